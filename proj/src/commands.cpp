#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "ccran/config.hpp"
#include "ccran/conic.hpp"
#include "ccran/rng.hpp"

namespace ccran {
namespace {

constexpr const char* kUsage =
    "usage: ccran <run|sweep|validate|dump-problem> [--config FILE] [--key VALUE]...\n"
    "\n"
    "  run           solve one scheduling interval and write its DC trace\n"
    "  sweep         average over intervals for each (cache size, eta) and write CSV\n"
    "  validate      oracle and invariant checks; nonzero exit on any failure\n"
    "  dump-problem  write the power-minimisation SDP of the chosen interval\n"
    "\n"
    "Flags mirror config keys with dashes (--gamma-db 10 or --gamma-db=10).\n"
    "--preset desk selects the small scenario. CCRAN_OUTPUT_DIR sets the\n"
    "directory used when --output is not given.\n";

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = nullptr;
  std::string path;
};

Output open_output(const RunConfig& cfg, const std::string& default_name, std::ostream& out) {
  Output o;
  o.path = cfg.output;
  if (o.path.empty()) {
    const std::string dir = default_output_dir();
    if (!dir.empty()) o.path = (std::filesystem::path(dir) / default_name).string();
  }
  if (o.path.empty()) {
    o.stream = &out;
    return o;
  }
  const auto parent = std::filesystem::path(o.path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  o.file = std::make_unique<std::ofstream>(o.path);
  if (!*o.file) throw std::runtime_error("cannot open " + o.path + " for writing");
  o.stream = o.file.get();
  return o;
}

// The resolved config goes next to the product, or to the error stream when
// the product is on stdout.
void echo_config(const RunConfig& cfg, const Output& o, std::ostream& err) {
  if (o.path.empty()) {
    write_config(err, cfg);
    return;
  }
  std::ofstream f(o.path + ".conf");
  write_config(f, cfg);
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SweepSpec spec = cfg.sweep_spec();
  Output o = open_output(cfg, "trace.tsv", out);
  echo_config(cfg, o, err);
  const IntervalResult r = solve_interval(spec, cfg.interval, cfg.etas.front(),
                                          cfg.cache_sizes.front());
  auto& s = *o.stream;
  write_trace(s, r.solution);
  s << std::setprecision(12);
  s << "# feasible " << (r.report.feasible ? 1 : 0) << '\n';
  s << "# transmit_power_w " << r.report.transmit_power << '\n';
  s << "# backhaul " << r.report.backhaul << '\n';
  s << "# network_cost " << r.report.network_cost << '\n';
  s << "# dc_iterations " << r.solution.iterations << '\n';
  s << "# clusters";
  for (int c : r.report.cluster_sizes) s << ' ' << c;
  s << '\n';
  if (!r.report.note.empty()) s << "# note " << r.report.note << '\n';
  if (!r.report.feasible) {
    err << "interval " << cfg.interval << ": " << r.report.note << '\n';
    return 1;
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Output o = open_output(cfg, "sweep.csv", out);
  echo_config(cfg, o, err);
  const auto rows = run_sweep(cfg.sweep_spec());
  write_csv(*o.stream, rows);
  if (cfg.verbosity > 0) {
    for (const auto& r : rows) {
      err << "eta " << r.eta << " cache " << r.cache_size << ": " << r.infeasible_count
          << " infeasible of " << r.intervals << '\n';
    }
  }
  return 0;
}

int cmd_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Output o = open_output(cfg, "problem.sdp", out);
  echo_config(cfg, o, err);
  const IntervalProblem p = build_interval(cfg.sweep_spec(), cfg.interval,
                                           cfg.cache_sizes.front());
  std::vector<Eigen::MatrixXcd> objective;
  for (int m = 0; m < p.instance.num_groups(); ++m) {
    objective.push_back(Eigen::MatrixXcd::Identity(p.instance.dim(), p.instance.dim()));
  }
  write_sdp(*o.stream, qos_sdp(p.instance, std::move(objective)));
  return 0;
}

// -- validate ------------------------------------------------------------------

struct Checker {
  std::ostream& out;
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) out << "  (" << detail << ')';
    out << '\n';
    if (!ok) ++failures;
  }
};

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

Eigen::MatrixXcd random_psd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = {g(rng), g(rng)};
  }
  return A * A.adjoint() / n;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  Checker c{out};
  const std::uint64_t seed = cfg.seed;

  // Oracle agreement on tiny single-group instances.
  int close = 0;
  int total = 20;
  bool never_below = true;
  bool all_feasible = true;
  double worst_gap = 0.0;
  for (int i = 0; i < total; ++i) {
    const TinyInstance t = tiny_instance(derive_seed(seed, 1000 + i), 3, 1 + i % 2);
    const OracleResult oracle = brute_force_oracle(t.instance, t.alpha, t.eta);
    DcConfig dc = cfg.dc;
    dc.eta = t.eta;
    const IntervalResult r = solve_instance(t.instance, t.alpha, dc, derive_seed(seed, i));
    if (!oracle.feasible || !r.report.feasible) {
      all_feasible = false;
      continue;
    }
    const double cost = r.report.network_cost;
    if (cost < oracle.cost - 1e-6) never_below = false;
    const double gap = (cost - oracle.cost) / oracle.cost;
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 0.05) ++close;
  }
  c.check("tiny instances solved and feasible", all_feasible);
  c.check("pipeline never beats the oracle", never_below);
  c.check("pipeline within 5% of oracle on >= 85%", close * 100 >= 85 * total,
          std::to_string(close) + "/" + std::to_string(total) + ", worst gap " + num(worst_gap));

  // Gradient matrices against central differences.
  std::mt19937_64 rng(derive_seed(seed, 7));
  double worst_fd = 0.0;
  for (SmoothKind kind : {SmoothKind::kLog, SmoothKind::kExp, SmoothKind::kAtan}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXcd W = random_psd(rng, 3);
      const Eigen::MatrixXcd J = random_psd(rng, 3);
      const Eigen::MatrixXcd D = random_psd(rng, 3);
      const double x = (W * J).trace().real();
      const double theta = x * std::exp(std::uniform_real_distribution<double>(-1, 1)(rng));
      const double h = 1e-5;
      auto f = [&](double s) {
        return smooth_value(kind, (W + s * D).cwiseProduct(J.conjugate()).sum().real(),
                            theta);
      };
      const double fd = (f(h) - f(-h)) / (2 * h);
      const double an = gradient_matrix(kind, W, J, theta).cwiseProduct(D.conjugate()).sum().real();
      worst_fd = std::max(worst_fd, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
    }
  }
  c.check("gradient matrices match central differences", worst_fd <= 1e-5,
          "worst rel " + num(worst_fd));

  // One desk interval: determinism, cost identity, feasibility, dump round trip.
  RunConfig desk = resolve_config({}, {{"preset", "desk"}, {"seed", std::to_string(seed)}});
  SweepSpec spec = desk.sweep_spec();
  spec.dc = cfg.dc;
  const double eta = 1.0;
  const IntervalResult a = solve_interval(spec, 0, eta, 1);
  const IntervalResult b = solve_interval(spec, 0, eta, 1);
  std::ostringstream ta;
  std::ostringstream tb;
  write_trace(ta, a.solution);
  write_trace(tb, b.solution);
  c.check("desk interval feasible", a.report.feasible, a.report.note);
  c.check("repeated interval gives identical trace", ta.str() == tb.str() &&
                                                         a.report.network_cost ==
                                                             b.report.network_cost);
  if (a.report.feasible) {
    const IntervalProblem p = build_interval(spec, 0, 1);
    const CostReport again = network_cost(a.recovery.w, a.alpha, eta,
                                          spec.dc.cluster_threshold, p.instance.selectors);
    const double rel = std::abs(again.network_cost - a.recovery.cost) /
                       std::max(1.0, std::abs(a.recovery.cost));
    c.check("cost identity", rel <= 1e-9 &&
                                 again.network_cost ==
                                     eta * again.transmit_power + again.backhaul,
            "rel " + num(rel));
    bool monotone = true;
    const auto& tr = a.solution.objective_trace;
    for (std::size_t t = 1; t < tr.size(); ++t) {
      if (tr[t] > tr[t - 1] + 10 * spec.dc.solver_tol * std::max(1.0, std::abs(tr[t - 1]))) {
        monotone = false;
      }
    }
    c.check("DC objective non-increasing", monotone);

    std::vector<Eigen::MatrixXcd> obj(p.instance.num_groups(),
                                      Eigen::MatrixXcd::Identity(p.instance.dim(),
                                                                 p.instance.dim()));
    const LinearSdp sdp = qos_sdp(p.instance, obj);
    std::stringstream io;
    write_sdp(io, sdp);
    const LinearSdp back = read_sdp(io);
    std::stringstream io2;
    write_sdp(io2, back);
    std::stringstream io3;
    write_sdp(io3, sdp);
    c.check("SDP dump round trip", io2.str() == io3.str());
  }

  out << (c.failures == 0 ? "all checks passed" : std::to_string(c.failures) + " check(s) failed")
      << '\n';
  return c.failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    (args.empty() ? err : out) << kUsage;
    return args.empty() ? 2 : 0;
  }
  const std::string command = args[0];
  std::map<std::string, std::function<int(const RunConfig&, std::ostream&, std::ostream&)>>
      commands{{"run", cmd_run},
               {"sweep", cmd_sweep},
               {"validate", cmd_validate},
               {"dump-problem", cmd_dump}};
  const auto it = commands.find(command);
  if (it == commands.end()) {
    err << "unknown subcommand '" << command << "'\n" << kUsage;
    return 2;
  }

  try {
    std::vector<std::pair<std::string, std::string>> flags;
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a == "--help" || a == "-h") {
        out << kUsage;
        return 0;
      }
      if (a.rfind("--", 0) != 0 || a.size() == 2) {
        throw ConfigError(a, "expected --key VALUE");
      }
      std::string key = a.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.resize(eq);
      } else {
        // The next token is always the value, so negative numbers work.
        if (i + 1 >= args.size()) throw ConfigError(key, "missing value");
        value = args[++i];
      }
      if (key == "config") {
        config_path = value;
      } else {
        flags.emplace_back(key, value);
      }
    }
    std::vector<std::pair<std::string, std::string>> file_pairs;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("config", "cannot open " + config_path);
      file_pairs = parse_config_text(f);
    }
    const RunConfig cfg = resolve_config(file_pairs, flags);
    return it->second(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ccran
