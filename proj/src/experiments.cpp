#include "ccran/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ccran/errors.hpp"
#include "ccran/rng.hpp"

namespace ccran {

const char* to_string(CachePolicy policy) {
  switch (policy) {
    case CachePolicy::kPopularity: return "popularity";
    case CachePolicy::kRandom: return "random";
    case CachePolicy::kNone: return "none";
  }
  return "unknown";
}

const char* to_string(Mode mode) {
  return mode == Mode::kMulticast ? "multicast" : "unicast";
}

Scenario Scenario::full() { return Scenario{}; }

Scenario Scenario::desk() {
  Scenario s;
  s.num_bs = 3;
  s.antennas_per_bs = 2;
  s.users_per_interval = 6;
  s.total_users = 60;
  s.num_contents = 20;
  s.radius_km = 0.5;
  const double r = s.spacing_km / std::sqrt(3.0);  // circumradius of the triangle
  for (int i = 0; i < 3; ++i) {
    const double a = std::numbers::pi / 2.0 + i * 2.0 * std::numbers::pi / 3.0;
    s.bs_positions.push_back(Point{r * std::cos(a), r * std::sin(a)});
  }
  return s;
}

double Scenario::target_sinr() const { return std::pow(10.0, gamma_db / 10.0); }

void Scenario::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (num_bs < 1) fail("num_bs", "must be >= 1");
  if (antennas_per_bs < 1) fail("antennas", "must be >= 1");
  if (users_per_interval < 1) fail("users_per_interval", "must be >= 1");
  if (total_users < users_per_interval) fail("total_users", "must be >= users_per_interval");
  if (num_contents < 1) fail("contents", "must be >= 1");
  if (zipf_skew < 0.0) fail("zipf_skew", "must be >= 0");
  if (common_fraction < 0.0 || common_fraction > 1.0) fail("common_fraction", "must lie in [0, 1]");
  if (!(radius_km > 0.0)) fail("radius", "must be > 0");
  if (!(spacing_km > 0.0)) fail("spacing", "must be > 0");
  if (!(power_budget_w > 0.0)) fail("power_budget", "must be > 0");
  if (shadowing_db < 0.0) fail("shadowing_db", "must be >= 0");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth", "must be > 0");
  if (!bs_positions.empty() && static_cast<int>(bs_positions.size()) != num_bs) {
    fail("bs_positions", "count must equal num_bs");
  }
  if (bs_positions.empty() && num_bs != 1 && num_bs != 7) {
    fail("bs_positions", "required when num_bs is not 1 or 7");
  }
}

void SweepSpec::validate() const {
  scenario.validate();
  dc.validate();
  if (etas.empty()) throw std::invalid_argument("etas: list must be nonempty");
  if (cache_sizes.empty()) throw std::invalid_argument("cache_sizes: list must be nonempty");
  for (double e : etas) {
    if (!(e >= 0.0)) throw std::invalid_argument("etas: values must be >= 0");
  }
  for (int c : cache_sizes) {
    if (c < 0 || c >= scenario.num_contents) {
      throw std::invalid_argument("cache_sizes: values must satisfy 0 <= F_l < F");
    }
  }
  if (intervals < 1) throw std::invalid_argument("intervals: must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
}

namespace {

NetworkLayout make_layout(const Scenario& s, std::uint64_t seed) {
  LayoutOptions opt;
  opt.antennas_per_bs = s.antennas_per_bs;
  opt.power_budget_w = s.power_budget_w;
  opt.antenna_gain_dbi = s.antenna_gain_dbi;
  opt.explicit_positions = s.bs_positions;
  return generate_layout(s.num_bs, s.radius_km, s.spacing_km, seed, opt);
}

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

CachePlacement make_cache(const SweepSpec& spec, int cache_size) {
  const auto& s = spec.scenario;
  const Catalog catalog = Catalog::zipf(s.num_contents, s.zipf_skew);
  const std::vector<int> budgets(s.num_bs, cache_size);
  switch (spec.policy) {
    case CachePolicy::kPopularity: return popularity_aware_cache(catalog, budgets);
    case CachePolicy::kRandom: return random_cache(catalog, budgets, spec.seed);
    case CachePolicy::kNone: break;
  }
  return empty_cache(s.num_bs, s.num_contents);
}

IntervalProblem build_interval(const SweepSpec& spec, int interval, int cache_size) {
  const auto& s = spec.scenario;
  const NetworkLayout layout = make_layout(s, spec.seed);
  const auto users = place_users(layout, s.total_users, spec.seed);
  const auto scheduled = round_robin_schedule(s.total_users, s.users_per_interval, interval);
  std::vector<Point> positions;
  for (int id : scheduled) positions.push_back(users[id]);

  const std::uint64_t iseed = interval_seed(spec.seed, static_cast<std::uint64_t>(interval));
  ChannelOptions ch;
  ch.shadowing_std_db = s.shadowing_db;
  ch.noise_psd_dbm_hz = s.noise_psd_dbm_hz;
  ch.bandwidth_hz = s.bandwidth_hz;
  ChannelRealization channels = generate_channels(layout, positions, iseed, ch);

  const Catalog catalog = Catalog::zipf(s.num_contents, s.zipf_skew);
  auto requests = draw_requests(s.users_per_interval, s.common_fraction, catalog, iseed,
                                s.common_content);
  GroupSet groups = spec.mode == Mode::kMulticast
                        ? form_groups(requests, s.target_sinr())
                        : form_unicast_groups(requests, s.target_sinr());
  return IntervalProblem{
      QosInstance(std::move(channels), std::move(groups), s.num_bs, s.antennas_per_bs,
                  layout.power_budget_w),
      make_cache(spec, cache_size), std::move(requests)};
}

IntervalResult solve_instance(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                              const DcConfig& cfg, std::uint64_t seed) {
  IntervalResult result;
  result.groups = instance.groups;
  result.alpha = alpha;
  try {
    result.solution = dc_solve(instance, alpha, cfg);
    result.recovery = recover(result.solution, instance, alpha, cfg, seed);
  } catch (const InfeasibleError& e) {
    result.report.note = std::string("infeasible: ") + e.what();
    return result;
  } catch (const SolverFailure& e) {
    result.report.note = std::string("solver failure: ") + e.what();
    return result;
  } catch (const RandomizationFailure& e) {
    result.report.note = std::string("randomization failure: ") + e.what();
    return result;
  }
  const auto& w = result.recovery.w;
  result.solution.w = w;
  result.solution.clusters = extract_clusters(std::span<const Eigen::VectorXcd>(w),
                                              instance.selectors, cfg.cluster_threshold);
  result.report = network_cost(w, alpha, cfg.eta, cfg.cluster_threshold, instance.selectors);
  result.report.iterations = result.solution.iterations;
  result.report.feasible = check_feasibility(instance, w).satisfied(1e-6);
  if (!result.report.feasible) {
    result.report.note = "recovered beamformers violate the QoS constraints";
  }
  return result;
}

IntervalResult solve_interval(const SweepSpec& spec, int interval, double eta,
                              int cache_size) {
  IntervalProblem problem = build_interval(spec, interval, cache_size);
  const QosInstance& instance = problem.instance;
  DcConfig cfg = spec.dc;
  cfg.eta = eta;
  const std::uint64_t iseed = interval_seed(spec.seed, static_cast<std::uint64_t>(interval));
  IntervalResult result =
      solve_instance(instance, coupling_weights(problem.cache, instance.groups), cfg, iseed);
  result.requests = problem.requests;
  if (spec.mode == Mode::kUnicast && result.report.feasible) {
    auto& report = result.report;
    report.backhaul = deduplicated_backhaul(result.recovery.w, instance.groups, problem.cache,
                                            instance.selectors, cfg.cluster_threshold);
    report.network_cost = eta * report.transmit_power + report.backhaul;
  }
  return result;
}

CostReport run_interval(const SweepSpec& spec, int interval, double eta, int cache_size) {
  return solve_interval(spec, interval, eta, cache_size).report;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const int cells = static_cast<int>(spec.cache_sizes.size() * spec.etas.size());
  const int tasks = cells * spec.intervals;
  std::vector<CostReport> reports(tasks);
  parallel_for(tasks, spec.threads, [&](int task) {
    const int cell = task / spec.intervals;
    const int interval = task % spec.intervals;
    const int cache_size = spec.cache_sizes[cell / spec.etas.size()];
    const double eta = spec.etas[cell % spec.etas.size()];
    reports[task] = run_interval(spec, interval, eta, cache_size);
  });

  std::vector<SweepRow> rows;
  for (int cell = 0; cell < cells; ++cell) {
    SweepRow row;
    row.cache_size = spec.cache_sizes[cell / spec.etas.size()];
    row.eta = spec.etas[cell % spec.etas.size()];
    row.policy = spec.policy;
    row.mode = spec.mode;
    row.intervals = spec.intervals;
    double power = 0.0;
    double backhaul = 0.0;
    int feasible = 0;
    for (int i = 0; i < spec.intervals; ++i) {
      const auto& r = reports[cell * spec.intervals + i];
      if (!r.feasible) continue;
      ++feasible;
      power += r.transmit_power;
      backhaul += r.backhaul;
    }
    row.infeasible_count = spec.intervals - feasible;
    row.feasibility_rate = static_cast<double>(feasible) / spec.intervals;
    if (feasible > 0) {
      row.mean_power_w = power / feasible;
      row.mean_backhaul = backhaul / feasible;
      row.mean_power_dbm = 10.0 * std::log10(row.mean_power_w * 1000.0);
    } else {
      row.mean_power_w = row.mean_backhaul = row.mean_power_dbm =
          std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> unicast_baseline(SweepSpec spec) {
  spec.mode = Mode::kUnicast;
  return run_sweep(spec);
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows, bool header) {
  if (header) out << kCsvHeader << '\n';
  const auto old = out.precision(12);
  for (const auto& r : rows) {
    out << r.eta << ',' << r.cache_size << ',' << to_string(r.policy) << ','
        << to_string(r.mode) << ',' << r.mean_power_dbm << ',' << r.mean_power_w << ','
        << r.mean_backhaul << ',' << r.feasibility_rate << ',' << r.intervals << ','
        << r.infeasible_count << '\n';
  }
  out.precision(old);
}

double backhaul_at_power(std::span<const SweepRow> curve, double power_dbm) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : curve) {
    if (std::isfinite(r.mean_power_dbm)) pts.emplace_back(r.mean_power_dbm, r.mean_backhaul);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.empty() || power_dbm < pts.front().first || power_dbm > pts.back().first) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (power_dbm <= pts[i].first) {
      const auto [x0, y0] = pts[i - 1];
      const auto [x1, y1] = pts[i];
      if (x1 == x0) return std::min(y0, y1);
      return y0 + (y1 - y0) * (power_dbm - x0) / (x1 - x0);
    }
  }
  return pts.back().second;
}

}  // namespace ccran
