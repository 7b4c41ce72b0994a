// End-to-end acceptance checks. Prints one PASS/FAIL line per check and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ccran/config.hpp"
#include "ccran/errors.hpp"
#include "ccran/experiments.hpp"
#include "ccran/rng.hpp"

using namespace ccran;
using Mat = Eigen::MatrixXcd;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail,
            std::chrono::steady_clock::time_point start) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %-24s %s (%.1fs)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Everything later checks need from one solved instance.
struct Solved {
  QosInstance instance;
  IntervalResult result;
};

// Feasibility and bound checks are accumulated over every solved instance.
struct Ledger {
  int checked = 0;
  int infeasible = 0;
  double worst_sinr = 1.0;
  double worst_power = 0.0;
  int bound_violations = 0;
  double worst_bound_slack = std::numeric_limits<double>::infinity();

  void add(const Solved& s) {
    const auto& r = s.result;
    ++checked;
    if (r.recovery.w.empty()) {
      ++infeasible;
      return;
    }
    // Independent SINR and power evaluation.
    const auto& inst = s.instance;
    const auto& h = inst.channels.h;
    const double noise = inst.channels.noise_power;
    const auto& w = r.recovery.w;
    const int Nt = inst.selectors.antennas_per_bs();
    for (int m = 0; m < inst.num_groups(); ++m) {
      for (int k : inst.groups.groups[m].users) {
        const double signal = std::norm(h[k].dot(w[m]));
        double interference = 0.0;
        for (int j = 0; j < inst.num_groups(); ++j) {
          if (j != m) interference += std::norm(h[k].dot(w[j]));
        }
        const double ratio =
            signal / (interference + noise) / inst.groups.groups[m].target_sinr;
        worst_sinr = std::min(worst_sinr, ratio);
      }
    }
    for (int l = 0; l < inst.num_bs(); ++l) {
      double p = 0.0;
      for (const auto& wm : w) p += wm.segment(l * Nt, Nt).squaredNorm();
      worst_power = std::max(worst_power, p / inst.power_budget[l]);
    }
    // The recovered point is feasible for the last linearised SDP, so its
    // value there cannot undercut that SDP's optimum.
    double value = 0.0;
    for (int m = 0; m < inst.num_groups(); ++m) {
      value += (w[m].adjoint() * r.solution.bound_objective[m] * w[m])(0, 0).real();
    }
    const double slack = value - r.solution.sdr_bound;
    worst_bound_slack = std::min(worst_bound_slack, slack);
    if (slack < -1e-6) ++bound_violations;
  }
};

Ledger g_ledger;

SweepSpec desk_spec(std::uint64_t seed) {
  SweepSpec spec;
  spec.scenario = Scenario::desk();
  spec.seed = seed;
  return spec;
}

// First `count` desk intervals (one per seed) with feasible QoS targets.
std::vector<IntervalProblem> desk_instances(int count, int* skipped) {
  std::vector<IntervalProblem> out;
  *skipped = 0;
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < count && i < 10 * count; ++i) {
    IntervalProblem p = build_interval(desk_spec(derive_seed(2024, i)), 0, 2);
    try {
      solve_p_ini(p.instance);
    } catch (const InfeasibleError&) {
      ++*skipped;
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

// -- smooth-function formulas, written out independently of the library ---

double f_value(SmoothKind kind, double x, double theta) {
  switch (kind) {
    case SmoothKind::kLog: return std::log((x + theta) / theta);
    case SmoothKind::kExp: return 1.0 - std::exp(-x / theta);
    case SmoothKind::kAtan: return 2.0 / std::numbers::pi * std::atan(x / theta);
  }
  return 0.0;
}

double f_slope(SmoothKind kind, double x, double theta) {
  switch (kind) {
    case SmoothKind::kLog: return 1.0 / (x + theta);
    case SmoothKind::kExp: return std::exp(-x / theta) / theta;
    case SmoothKind::kAtan: return 2.0 / std::numbers::pi * theta / (theta * theta + x * x);
  }
  return 0.0;
}

Mat random_hermitian(std::mt19937_64& rng, int n, bool psd) {
  std::normal_distribution<double> g;
  Mat A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
  }
  return psd ? Mat(A * A.adjoint() / n) : Mat((A + A.adjoint()) / 2.0);
}

// -- checks ---------------------------------------------------------------

std::vector<Solved> check_dc_descent(const std::vector<IntervalProblem>& instances,
                                     int skipped) {
  const auto start = std::chrono::steady_clock::now();
  DcConfig cfg;
  std::vector<Solved> solved;
  int converged = 0;
  int descent_failures = 0;
  double worst_rise = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& p = instances[i];
    Solved s{p.instance, solve_instance(p.instance,
                                        coupling_weights(p.cache, p.instance.groups), cfg,
                                        derive_seed(9, i))};
    const auto& tr = s.result.solution.objective_trace;
    bool ok = !tr.empty();
    for (std::size_t t = 1; t < tr.size(); ++t) {
      const double rise = tr[t] - tr[t - 1];
      const double allowed = 10.0 * cfg.solver_tol * std::max(1.0, std::abs(tr[t - 1]));
      worst_rise = std::max(worst_rise, rise / std::max(1.0, std::abs(tr[t - 1])));
      if (rise > allowed) ok = false;
    }
    if (!ok) ++descent_failures;
    const bool conv = s.result.solution.converged && s.result.solution.iterations <= 50 &&
                      tr.size() >= 2 && tr[tr.size() - 2] - tr.back() < 1e-6;
    if (conv) ++converged;
    g_ledger.add(s);
    solved.push_back(std::move(s));
  }
  const int n = static_cast<int>(instances.size());
  std::ostringstream d;
  d << n << " instances (" << skipped << " infeasible draws skipped), " << descent_failures
    << " with rises over 10*tol, worst relative rise " << worst_rise << ", converged "
    << converged << "/" << n;
  report("dc_descent", n == 50 && descent_failures == 0 && converged * 100 >= 95 * n, d.str(),
         start);
  return solved;
}

void check_surrogate_equivalence(const std::vector<IntervalProblem>& instances) {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int failed_runs = 0;
  int n = 0;
  for (std::size_t i = 0; i < instances.size() && n < 20; ++i, ++n) {
    const auto& p = instances[i];
    const auto alpha = coupling_weights(p.cache, p.instance.groups);
    std::vector<double> costs;
    for (SmoothKind kind : {SmoothKind::kLog, SmoothKind::kExp, SmoothKind::kAtan}) {
      DcConfig cfg;
      cfg.smooth = kind;
      cfg.theta_rule = ThetaRule::kGradientMax;
      cfg.normalize = true;
      Solved s{p.instance, solve_instance(p.instance, alpha, cfg, derive_seed(11, i))};
      g_ledger.add(s);
      if (!s.result.report.feasible) ++failed_runs;
      costs.push_back(s.result.report.network_cost);
    }
    for (double c : costs) {
      worst = std::max(worst, std::abs(c - costs[0]) / std::max(std::abs(costs[0]), 1e-12));
    }
  }
  std::ostringstream d;
  d << n << " instances, worst relative cost spread " << worst << ", failed runs "
    << failed_runs;
  report("surrogate_equivalence", n == 20 && failed_runs == 0 && worst <= 1e-4, d.str(),
         start);
}

void check_theta_maximality() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(derive_seed(3, 0));
  std::uniform_real_distribution<double> logx(-6.0, 2.0);
  int bad = 0;
  double worst_offset = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double x = std::pow(10.0, logx(rng));
    for (SmoothKind kind : {SmoothKind::kExp, SmoothKind::kAtan}) {
      // 200 log-spaced theta in [x/100, 100 x]; the sampled peak must lie
      // within one grid step of theta = x, and the library must agree.
      const double step = 4.0 / 199.0;
      double best_e = 0.0;
      double best_slope = -1.0;
      for (int i = 0; i < 200; ++i) {
        const double e = -2.0 + step * i;
        const double s = std::abs(f_slope(kind, x, x * std::pow(10.0, e)));
        if (s > best_slope) {
          best_slope = s;
          best_e = e;
        }
      }
      const double lib = theta_star(kind, x, 1e-300);
      worst_offset = std::max(worst_offset, std::abs(lib - x) / x);
      if (std::abs(best_e) > step || std::abs(lib - x) > 1e-12 * x) ++bad;
      // Refine: the slope at theta = x beats every nearby theta.
      for (double r : {0.999, 1.001}) {
        if (f_slope(kind, x, r * x) > f_slope(kind, x, x)) ++bad;
      }
    }
  }
  report("theta_maximality", bad == 0,
         "20 x values, exp and atan, " + std::to_string(bad) +
             " misplaced peaks, library theta* offset " + fmt("%.1e", worst_offset),
         start);
}

void check_oracle_optimality() {
  const auto start = std::chrono::steady_clock::now();
  int close = 0;
  int below = 0;
  int unsolved = 0;
  double worst_gap = 0.0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const int L = 2 + i % 2;
    const int K = 1 + (i / 2) % 2;
    const TinyInstance t = tiny_instance(derive_seed(77, i), L, K);
    const OracleResult oracle = brute_force_oracle(t.instance, t.alpha, t.eta);
    DcConfig cfg;
    cfg.eta = t.eta;
    Solved s{t.instance, solve_instance(t.instance, t.alpha, cfg, derive_seed(78, i))};
    g_ledger.add(s);
    if (!oracle.feasible || !s.result.report.feasible) {
      ++unsolved;
      continue;
    }
    const double cost = s.result.report.network_cost;
    if (cost < oracle.cost - 1e-6) ++below;
    const double gap = (cost - oracle.cost) / oracle.cost;
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 0.05) ++close;
  }
  std::ostringstream d;
  d << close << "/" << n << " within 5% of the oracle, " << below << " below it, " << unsolved
    << " unsolved, worst gap " << worst_gap;
  report("oracle_optimality", close >= 85 && below == 0 && unsolved == 0, d.str(), start);
}

void check_feasibility() {
  const auto start = std::chrono::steady_clock::now();
  const bool ok = g_ledger.infeasible == 0 && g_ledger.worst_sinr >= 1.0 - 1e-6 &&
                  g_ledger.worst_power <= 1.0 + 1e-6;
  std::ostringstream d;
  d << g_ledger.checked << " solutions, " << g_ledger.infeasible
    << " without beamformers, min SINR/gamma " << g_ledger.worst_sinr << ", max P/P_l "
    << g_ledger.worst_power;
  report("feasibility", ok, d.str(), start);
}

void check_sdr_bound() {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream d;
  d << g_ledger.checked - g_ledger.infeasible << " solutions, " << g_ledger.bound_violations
    << " below the bound by more than 1e-6, smallest slack " << g_ledger.worst_bound_slack;
  report("sdr_bound", g_ledger.checked > g_ledger.infeasible && g_ledger.bound_violations == 0,
         d.str(), start);
}

SweepRow cell(const std::vector<SweepRow>& rows, int cache, double eta) {
  for (const auto& r : rows) {
    if (r.cache_size == cache && r.eta == eta) return r;
  }
  throw std::logic_error("missing sweep cell");
}

const std::vector<double> kEtaGrid{0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0};

void check_cache_trend() {
  const auto start = std::chrono::steady_clock::now();
  SweepSpec spec = desk_spec(1);
  spec.etas = {0.1};
  spec.cache_sizes = {0, 1, 6};  // 0%, 5%, 30% of 20 contents
  const auto rows = run_sweep(spec);
  const double b0 = cell(rows, 0, 0.1).mean_backhaul;
  const double b5 = cell(rows, 1, 0.1).mean_backhaul;
  const double b30 = cell(rows, 6, 0.1).mean_backhaul;
  const double r5 = 1.0 - b5 / b0;
  const double r30 = 1.0 - b30 / b0;
  std::ostringstream d;
  d << "eta 0.1, backhaul " << b0 << " -> " << b5 << " (5%, -" << 100 * r5 << "%) -> " << b30
    << " (30%, -" << 100 * r30 << "%)";
  report("cache_trend", r5 >= 0.40 && r30 >= 0.60, d.str(), start);
}

void check_policy_trend() {
  const auto start = std::chrono::steady_clock::now();
  SweepSpec spec = desk_spec(1);
  spec.etas = kEtaGrid;
  spec.cache_sizes = {1, 2};
  const auto pop = run_sweep(spec);
  spec.policy = CachePolicy::kRandom;
  const auto rnd = run_sweep(spec);
  bool ok = true;
  double min_margin_small = std::numeric_limits<double>::infinity();
  for (int cache : spec.cache_sizes) {
    for (double eta : kEtaGrid) {
      const double a = cell(pop, cache, eta).mean_backhaul;
      const double b = cell(rnd, cache, eta).mean_backhaul;
      if (!(a <= b)) ok = false;
      if (cache == 1) {
        if (!(a < b)) ok = false;
        min_margin_small = std::min(min_margin_small, b - a);
      }
    }
  }
  std::ostringstream d;
  d << "cache 1 and 2 over " << kEtaGrid.size() << " eta values, smallest margin at cache 1: "
    << min_margin_small;
  report("policy_trend", ok, d.str(), start);
}

void check_multicast_trend() {
  const auto start = std::chrono::steady_clock::now();
  SweepSpec spec = desk_spec(1);
  spec.etas = kEtaGrid;
  spec.cache_sizes = {2};
  const auto mc = run_sweep(spec);
  const auto uc = unicast_baseline(spec);
  auto range = [](const std::vector<SweepRow>& rows) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& r : rows) {
      if (!std::isfinite(r.mean_power_dbm)) continue;
      lo = std::min(lo, r.mean_power_dbm);
      hi = std::max(hi, r.mean_power_dbm);
    }
    return std::pair{lo, hi};
  };
  const auto [mlo, mhi] = range(mc);
  const auto [ulo, uhi] = range(uc);
  const double lo = std::max(mlo, ulo);
  const double hi = std::min(mhi, uhi);
  std::ostringstream d;
  d << std::fixed;
  d.precision(2);
  d << "power ranges multicast [" << mlo << ", " << mhi << "] dBm, unicast [" << ulo << ", "
    << uhi << "] dBm";
  bool ok = false;
  if (lo <= hi) {
    ok = true;
    for (int i = 0; i <= 10; ++i) {
      const double p = lo + (hi - lo) * i / 10.0;
      const double bm = backhaul_at_power(mc, p);
      const double bu = backhaul_at_power(uc, p);
      if (!(bm < bu)) ok = false;
    }
    d << ", compared on the overlap";
  } else {
    d << ", no overlapping power range to compare on";
  }
  report("multicast_vs_unicast", ok, d.str(), start);
}

void check_gradients() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(derive_seed(5, 0));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  const int n = 3;
  for (SmoothKind kind : {SmoothKind::kLog, SmoothKind::kExp, SmoothKind::kAtan}) {
    for (int trial = 0; trial < 30; ++trial) {
      const Mat W = random_hermitian(rng, n, true);
      Mat J = Mat::Zero(n, n);
      J(trial % n, trial % n) = 1.0;
      if (trial % 2) J = random_hermitian(rng, n, true);
      const double x = (W * J).trace().real();
      const double theta = x * std::pow(10.0, u(rng));
      const Mat G = gradient_matrix(kind, W, J, theta);
      // Central differences along a Hermitian basis rebuild the gradient.
      Mat fd = Mat::Zero(n, n);
      const double h = 1e-6 * std::max(x, theta);
      auto F = [&](const Mat& X) { return f_value(kind, (X * J).trace().real(), theta); };
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          Mat E = Mat::Zero(n, n);
          if (i == j) {
            E(i, i) = 1.0;
            fd(i, i) = (F(W + h * E) - F(W - h * E)) / (2 * h);
          } else {
            E(i, j) = E(j, i) = 1.0;
            const double re = (F(W + h * E) - F(W - h * E)) / (4 * h);
            E(i, j) = {0.0, 1.0};
            E(j, i) = {0.0, -1.0};
            const double im = (F(W + h * E) - F(W - h * E)) / (4 * h);
            fd(i, j) = {re, im};
            fd(j, i) = std::conj(fd(i, j));
          }
        }
      }
      const double err = (G - fd).norm() / G.norm();
      worst = std::max(worst, err);
      const double slope_err = std::abs(G.norm() / J.norm() - f_slope(kind, x, theta)) /
                               f_slope(kind, x, theta);
      worst = std::max(worst, slope_err);
    }
  }
  report("gradient_fd", worst <= 1e-5, "90 triples, worst relative error " + fmt("%.2e", worst),
         start);
}

void check_determinism() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::vector<std::string>> commands = {
      {"run", "--preset", "desk", "--seed", "7", "--interval", "3"},
      {"sweep", "--preset", "desk", "--seed", "7", "--etas", "0.1,10", "--cache-sizes", "0,2",
       "--intervals", "4"},
      {"sweep", "--preset", "desk", "--seed", "7", "--etas", "1", "--intervals", "3",
       "--mode", "unicast", "--policy", "random"},
      {"dump-problem", "--preset", "desk", "--seed", "7"},
      {"validate"},
  };
  bool ok = true;
  for (const auto& cmd : commands) {
    std::ostringstream o1, e1, o2, e2;
    const int s1 = run_cli(cmd, o1, e1);
    const int s2 = run_cli(cmd, o2, e2);
    if (s1 != s2 || o1.str() != o2.str() || e1.str() != e2.str() || o1.str().empty()) {
      ok = false;
    }
  }
  report("determinism", ok, std::to_string(commands.size()) + " subcommands run twice",
         start);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  int skipped = 0;
  const auto instances = desk_instances(50, &skipped);
  check_dc_descent(instances, skipped);
  check_surrogate_equivalence(instances);
  check_theta_maximality();
  check_oracle_optimality();
  check_feasibility();
  check_sdr_bound();
  check_cache_trend();
  check_policy_trend();
  check_multicast_trend();
  check_gradients();
  check_determinism();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d check(s) failed, %.0fs total\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
