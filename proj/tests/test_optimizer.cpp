#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "ccran/errors.hpp"
#include "ccran/experiments.hpp"
#include "ccran/optimizer.hpp"
#include "doctest.h"

using namespace ccran;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd rank_one(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return v;
}

std::string field_of(const DcConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    return what.substr(0, what.find(':'));
  }
  return "";
}

}  // namespace

TEST_CASE("surrogate values") {
  CHECK(smooth_value(SmoothKind::kLog, 0.0, 1.0) == 0.0);
  CHECK(smooth_value(SmoothKind::kExp, 0.0, 1.0) == 0.0);
  CHECK(smooth_value(SmoothKind::kAtan, 0.0, 1.0) == 0.0);
  CHECK(smooth_value(SmoothKind::kLog, 1.0, 1.0) == doctest::Approx(std::log(2.0)));
  CHECK(smooth_value(SmoothKind::kExp, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(smooth_value(SmoothKind::kAtan, 1.0, 1.0) == doctest::Approx(0.5));
  // Bounded kinds approach the indicator as theta shrinks.
  CHECK(smooth_value(SmoothKind::kExp, 1.0, 1e-3) == doctest::Approx(1.0));
  CHECK(smooth_value(SmoothKind::kAtan, 1.0, 1e-6) > 0.999);
}

TEST_CASE("surrogate derivatives match finite differences") {
  for (auto kind : {SmoothKind::kLog, SmoothKind::kExp, SmoothKind::kAtan}) {
    for (double theta : {1e-3, 0.1, 2.0}) {
      for (double x : {1e-4, 0.05, 0.7, 3.0}) {
        const double h = 1e-6 * std::max(x, theta);
        const double fd = (smooth_value(kind, x + h, theta) - smooth_value(kind, x - h, theta)) / (2 * h);
        CHECK(std::abs(smooth_derivative(kind, x, theta) - fd) <= 1e-6 * std::abs(fd) + 1e-9);
      }
    }
  }
}

TEST_CASE("gradient-max theta") {
  CHECK(theta_star(SmoothKind::kLog, 0.3, 1e-7) == 1e-7);
  CHECK(theta_star(SmoothKind::kExp, 0.3, 1e-7) == 0.3);
  CHECK(theta_star(SmoothKind::kAtan, 0.3, 1e-7) == 0.3);
  CHECK(theta_star(SmoothKind::kExp, 1e-9, 1e-7) == 1e-7);
  // e * exp weight equals pi * atan weight at theta = x.
  for (double x : {1e-3, 0.2, 5.0}) {
    const double e_exp = std::numbers::e * smooth_derivative(SmoothKind::kExp, x, x);
    const double pi_atan = std::numbers::pi * smooth_derivative(SmoothKind::kAtan, x, x);
    CHECK(e_exp == doctest::Approx(pi_atan).epsilon(1e-12));
    CHECK(e_exp == doctest::Approx(1.0 / x).epsilon(1e-12));
  }
  CHECK(normalization_factor(SmoothKind::kLog) == 1.0);
}

TEST_CASE("potential derivative equals the weight") {
  for (auto kind : {SmoothKind::kLog, SmoothKind::kExp, SmoothKind::kAtan}) {
    for (auto rule : {ThetaRule::kGradientMax, ThetaRule::kFixed}) {
      DcConfig cfg;
      cfg.smooth = kind;
      cfg.theta_rule = rule;
      cfg.epsilon = 1e-3;
      for (double x : {2e-4, 5e-3, 0.4, 2.0}) {
        const double h = 1e-7 * x;
        const double fd = (surrogate_potential(cfg, x + h) - surrogate_potential(cfg, x - h)) / (2 * h);
        CHECK(std::abs(fd - surrogate_weight(cfg, x)) <= 1e-5 * surrogate_weight(cfg, x) + 1e-12);
      }
      CHECK(surrogate_potential(cfg, 0.0) == 0.0);
    }
  }
}

TEST_CASE("gradient matrix") {
  const SelectorMatrices sel(2, 2);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXcd W = rank_one(random_vector(4, rng));
  const Eigen::MatrixXcd J = sel.matrix(1);
  const double x = sel.block_power(W, 1);
  const Eigen::MatrixXcd G = gradient_matrix(SmoothKind::kAtan, W, J, 0.5);
  CHECK(G.isApprox(smooth_derivative(SmoothKind::kAtan, x, 0.5) * J));
}

TEST_CASE("config validation names the field") {
  DcConfig cfg;
  CHECK(field_of(cfg).empty());
  cfg.eta = -1;
  CHECK(field_of(cfg) == "eta");
  cfg = {};
  cfg.epsilon = 0;
  CHECK(field_of(cfg) == "epsilon");
  cfg = {};
  cfg.rho = 0;
  CHECK(field_of(cfg) == "rho");
  cfg = {};
  cfg.max_iters = 0;
  CHECK(field_of(cfg) == "max_iters");
  cfg = {};
  cfg.n_randomizations = 0;
  CHECK(field_of(cfg) == "n_randomizations");
}

TEST_CASE("rank-one extraction") {
  std::mt19937_64 rng(7);
  const Eigen::VectorXcd v = random_vector(4, rng);
  const Eigen::VectorXcd w = extract_rank_one(rank_one(v));
  CHECK(w.imag()(0) == 0.0);
  CHECK(w.real()(0) >= 0.0);
  CHECK(rank_one(w).isApprox(rank_one(v), 1e-10));
  CHECK(rank_one_check(Eigen::MatrixXcd::Zero(3, 3), 1e-6));
  CHECK_FALSE(rank_one_check(Eigen::MatrixXcd::Identity(3, 3), 1e-6));
  CHECK_THROWS_AS(extract_rank_one(Eigen::MatrixXcd::Identity(3, 3)), std::logic_error);
}

TEST_CASE("cluster extraction") {
  const SelectorMatrices sel(3, 1);
  Eigen::VectorXcd w(3);
  w << cd(1e-2, 0), cd(0, 0), cd(0, 1e-4);
  const std::vector<Eigen::VectorXcd> ws{w};
  CHECK(extract_clusters(ws, sel, 1e-6) == std::vector<std::vector<int>>{{0}});
  CHECK(extract_clusters(ws, sel, 1e-9) == std::vector<std::vector<int>>{{0, 2}});
  const std::vector<Eigen::MatrixXcd> Ws{rank_one(w)};
  CHECK(extract_clusters(Ws, sel, 1e-9) == std::vector<std::vector<int>>{{0, 2}});
}

TEST_CASE("power control meets targets with equality") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto t = tiny_instance(seed, 3, 2);
    const int n = t.instance.dim();
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < 2; ++k) u += t.instance.channels.h[k];
    u.normalize();
    const std::vector<Eigen::VectorXcd> dirs{u};
    const auto p = power_control(t.instance, dirs);
    if (p.empty()) continue;
    const std::vector<Eigen::VectorXcd> w{std::sqrt(p[0]) * u};
    const auto sinr = user_sinr(t.instance, w);
    const double gamma = t.instance.groups.groups[0].target_sinr;
    const double worst = std::min(sinr[0], sinr[1]);
    CHECK(worst >= gamma * (1 - 1e-8));
    CHECK(worst <= gamma * (1 + 1e-6));
    CHECK(check_feasibility(t.instance, w).satisfied());
  }
}

TEST_CASE("power control reports impossible targets") {
  // Two single-user groups on one shared scalar channel cannot both reach 10 dB.
  ChannelRealization ch;
  const Eigen::VectorXcd h = Eigen::VectorXcd::Ones(1);
  ch.h = {h, h};
  ch.H = {rank_one(h), rank_one(h)};
  ch.noise_power = 1.0;
  const QosInstance inst(ch, form_groups(std::vector<int>{0, 1}, 10.0), 1, 1, {1e6});
  const std::vector<Eigen::VectorXcd> dirs{h, h};
  CHECK(power_control(inst, dirs).empty());
}

TEST_CASE("randomization returns feasible beamformers") {
  const auto t = tiny_instance(3, 4, 3);
  const auto p = solve_p_ini(t.instance);
  RecoveryOptions opt;
  opt.seed = 5;
  opt.n_randomizations = 30;
  const Eigen::MatrixXd alpha = t.alpha;
  const auto r = randomize(p.W, t.instance, alpha, t.eta, opt);
  CHECK(check_feasibility(t.instance, r.w).satisfied());
  const auto again = randomize(p.W, t.instance, alpha, t.eta, opt);
  CHECK(again.cost == r.cost);
  CHECK(again.w[0] == r.w[0]);
}

TEST_CASE("DC iterations descend") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = tiny_instance(seed, 3, 2);
    DcConfig cfg;
    cfg.eta = t.eta;
    const Eigen::MatrixXd alpha = t.alpha;
    BeamformerSolution s;
    try {
      s = dc_solve(t.instance, alpha, cfg);
    } catch (const InfeasibleError&) {
      continue;
    }
    const auto& v = s.objective_trace;
    REQUIRE(v.size() == s.iterates.size());
    for (std::size_t i = 1; i < v.size(); ++i) {
      CHECK(v[i] <= v[i - 1] + 10 * cfg.solver_tol * std::max(1.0, std::abs(v[i - 1])));
    }
    CHECK(v.front() == doctest::Approx(surrogate_objective(t.instance, alpha, cfg,
                                                           solve_p_ini(t.instance).W))
                           .epsilon(1e-5));
    CHECK(s.v_ini > 0.0);
  }
}

TEST_CASE("a free BS takes over the backhaul-costly one") {
  // Two BSs with identical channels; BS 0 must fetch over backhaul, BS 1 caches.
  ChannelRealization ch;
  Eigen::VectorXcd h(2);
  h << cd(1.0, 0.0), cd(1.0, 0.0);
  ch.h = {h};
  ch.H = {rank_one(h)};
  ch.noise_power = 1.0;
  const QosInstance inst(ch, form_groups(std::vector<int>{0}, 10.0), 2, 1, {100.0, 100.0});
  Eigen::MatrixXd alpha(2, 1);
  alpha << 3.0, 0.0;
  DcConfig cfg;
  cfg.eta = 0.1;
  const auto s = dc_solve(inst, alpha, cfg);
  const auto r = recover(s, inst, alpha, cfg, 1);
  const auto q = extract_clusters(r.w, inst.selectors, cfg.cluster_threshold);
  CHECK(q == std::vector<std::vector<int>>{{1}});
  CHECK(r.cost == doctest::Approx(0.1 * 10.0).epsilon(1e-5));
}

TEST_CASE("restricted power minimisation matches the oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto t = tiny_instance(seed, 3, 2);
    const auto o = brute_force_oracle(t.instance, t.alpha, t.eta);
    if (!o.feasible) continue;
    const auto r = solve_restricted_power_min(t.instance, {o.support});
    CHECK(r.value == doctest::Approx(o.power).epsilon(1e-5));
    for (int l = 0; l < 3; ++l) {
      if (std::find(o.support.begin(), o.support.end(), l) == o.support.end()) {
        CHECK(t.instance.selectors.block_power(r.W[0], l) < 1e-12);
      }
    }
  }
  const auto t = tiny_instance(0, 3, 2);
  CHECK_THROWS_AS(solve_restricted_power_min(t.instance, {{}}), InfeasibleError);
}

TEST_CASE("trace output") {
  const auto t = tiny_instance(1, 3, 2);
  DcConfig cfg;
  const auto s = dc_solve(t.instance, Eigen::MatrixXd(t.alpha), cfg);
  std::ostringstream out;
  write_trace(out, s);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
    ++rows;
  }
  CHECK(rows == static_cast<int>(s.objective_trace.size()));
}
