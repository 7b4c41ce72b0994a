#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccran/cost.hpp"
#include "ccran/errors.hpp"
#include "ccran/optimizer.hpp"
#include "ccran/rng.hpp"

namespace ccran {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

bool rank_one_check(const Mat& W, double rank_tol) {
  if (W.rows() <= 1) return true;
  Eigen::SelfAdjointEigenSolver<Mat> eig(W, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();  // ascending
  const double l1 = ev(ev.size() - 1);
  const double l2 = ev(ev.size() - 2);
  if (l1 <= 0.0) return true;
  return l2 / l1 <= rank_tol;
}

namespace {

void normalize_phase(Vec& w) {
  const double cutoff = 1e-12 * w.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > cutoff) {
      w *= std::conj(w(i)) / std::abs(w(i));
      w(i) = std::abs(w(i));
      return;
    }
  }
}

}  // namespace

Vec extract_rank_one(const Mat& W, double rank_tol) {
  if (!rank_one_check(W, rank_tol)) {
    throw std::logic_error("extract_rank_one: matrix is not rank one");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(W);
  const Eigen::Index top = W.rows() - 1;
  const double lambda = eig.eigenvalues()(top);
  if (lambda <= 0.0) return Vec::Zero(W.rows());
  Vec w = std::sqrt(lambda) * eig.eigenvectors().col(top);
  normalize_phase(w);
  return w;
}

std::vector<std::vector<int>> extract_clusters(std::span<const Mat> W,
                                               const SelectorMatrices& selectors,
                                               double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cluster threshold must be > 0");
  std::vector<std::vector<int>> out(W.size());
  for (std::size_t m = 0; m < W.size(); ++m) {
    for (int l = 0; l < selectors.num_bs(); ++l) {
      if (selectors.block_power(W[m], l) > delta) out[m].push_back(l);
    }
  }
  return out;
}

std::vector<std::vector<int>> extract_clusters(std::span<const Vec> w,
                                               const SelectorMatrices& selectors,
                                               double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cluster threshold must be > 0");
  std::vector<std::vector<int>> out(w.size());
  for (std::size_t m = 0; m < w.size(); ++m) {
    for (int l = 0; l < selectors.num_bs(); ++l) {
      if (selectors.block_power(w[m], l) > delta) out[m].push_back(l);
    }
  }
  return out;
}

std::vector<double> user_sinr(const QosInstance& instance, std::span<const Vec> w) {
  const auto owner = instance.groups.group_of_user();
  std::vector<double> sinr(owner.size());
  for (std::size_t k = 0; k < owner.size(); ++k) {
    const Vec& h = instance.channels.h[k];
    double signal = 0.0;
    double interference = instance.channels.noise_power;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const double g = std::norm(h.dot(w[n]));  // |h^H w|^2
      if (static_cast<int>(n) == owner[k]) {
        signal = g;
      } else {
        interference += g;
      }
    }
    sinr[k] = signal / interference;
  }
  return sinr;
}

FeasibilityReport check_feasibility(const QosInstance& instance, std::span<const Vec> w) {
  FeasibilityReport r;
  r.min_sinr_ratio = std::numeric_limits<double>::infinity();
  const auto sinr = user_sinr(instance, w);
  const auto owner = instance.groups.group_of_user();
  for (std::size_t k = 0; k < sinr.size(); ++k) {
    r.min_sinr_ratio = std::min(
        r.min_sinr_ratio, sinr[k] / instance.groups.groups[owner[k]].target_sinr);
  }
  for (int l = 0; l < instance.num_bs(); ++l) {
    double used = 0.0;
    for (const auto& wm : w) used += instance.selectors.block_power(wm, l);
    r.max_power_ratio = std::max(r.max_power_ratio, used / instance.power_budget[l]);
  }
  return r;
}

namespace {

// SINR targets can always be met tightly by raising power; budgets cannot,
// and a budget-binding SDR optimum solved to 1e-7 can need a few 1e-7 of
// extra power once rounded to rank one.
constexpr double kSinrTol = 1e-8;
constexpr double kBudgetTol = 1e-6;

bool acceptable(const FeasibilityReport& r) {
  return r.min_sinr_ratio >= 1.0 - kSinrTol && r.max_power_ratio <= 1.0 + kBudgetTol;
}

}  // namespace

std::vector<double> power_control(const QosInstance& instance,
                                  std::span<const Vec> directions, double tol) {
  const int M = instance.num_groups();
  const int K = instance.channels.num_users();
  const double noise = instance.channels.noise_power;
  Eigen::MatrixXd gain(K, M);  // |h_k^H u_m|^2
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) gain(k, m) = std::norm(instance.channels.h[k].dot(directions[m]));
  }

  LinearSdp lp(std::vector<int>(M, 1));
  for (int m = 0; m < M; ++m) {
    lp.set_objective(m, Mat::Constant(1, 1, directions[m].squaredNorm()));
  }
  for (int m = 0; m < M; ++m) {
    const auto& g = instance.groups.groups[m];
    for (int k : g.users) {
      if (gain(k, m) <= 0.0) return {};
      LinearConstraint c;
      c.rhs = g.target_sinr * noise;
      for (int n = 0; n < M; ++n) {
        const double coeff = n == m ? gain(k, m) : -g.target_sinr * gain(k, n);
        c.terms.push_back(BlockTerm{n, Mat::Constant(1, 1, coeff)});
      }
      lp.add_constraint(std::move(c));
    }
  }
  for (int l = 0; l < instance.num_bs(); ++l) {
    LinearConstraint c;
    c.sense = Sense::kLessEqual;
    c.rhs = instance.power_budget[l];
    for (int m = 0; m < M; ++m) {
      c.terms.push_back(BlockTerm{
          m, Mat::Constant(1, 1, instance.selectors.block_power(directions[m], l))});
    }
    lp.add_constraint(std::move(c));
  }
  SolverOptions opt;
  opt.tol = tol;
  const SdpSolution sol = solve(lp, opt);

  auto bs_power = [&](const std::vector<double>& beta, int l) {
    double used = 0.0;
    for (int m = 0; m < M; ++m) used += beta[m] * instance.selectors.block_power(directions[m], l);
    return used;
  };
  auto over_budget = [&](const std::vector<double>& beta, double slack) {
    for (int l = 0; l < instance.num_bs(); ++l) {
      if (bs_power(beta, l) > instance.power_budget[l] * (1.0 + slack)) return true;
    }
    return false;
  };
  // One sweep of the standard interference map beta -> T(beta).
  auto sweep = [&](const std::vector<double>& beta) {
    std::vector<double> next(M, 0.0);
    for (int m = 0; m < M; ++m) {
      const auto& g = instance.groups.groups[m];
      for (int k : g.users) {
        double interference = noise;
        for (int n = 0; n < M; ++n) {
          if (n != m) interference += beta[n] * gain(k, n);
        }
        next[m] = std::max(next[m], g.target_sinr * interference / gain(k, m));
      }
    }
    return next;
  };
  auto relative_change = [](const std::vector<double>& a, const std::vector<double>& b) {
    double change = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      change = std::max(change, std::abs(a[m] - b[m]) / std::max(b[m], 1e-300));
    }
    return change;
  };

  std::vector<double> beta(M, 0.0);
  bool converged = false;
  if (sol.status == SdpStatus::kOptimal) {
    // Starting next to the LP optimum, a few sweeps remove the solver's residual.
    for (int m = 0; m < M; ++m) beta[m] = std::max(0.0, sol.blocks[m](0, 0).real());
    for (int it = 0; it < 200 && !converged; ++it) {
      auto next = sweep(beta);
      converged = relative_change(next, beta) < 1e-15;
      beta = std::move(next);
    }
  }
  if (!converged) {
    // From zero the iterates rise monotonically to the least feasible
    // powers, so crossing a budget proves the directions infeasible.
    std::fill(beta.begin(), beta.end(), 0.0);
    for (int it = 0; it < 100000 && !converged; ++it) {
      auto next = sweep(beta);
      converged = relative_change(next, beta) < 1e-14;
      beta = std::move(next);
      if (over_budget(beta, kBudgetTol)) return {};
    }
    if (!converged) return {};
  }
  for (double& b : beta) b *= 1.0 + 1e-10;
  if (over_budget(beta, kBudgetTol)) return {};
  return beta;
}

RecoveryOptions recovery_options(const DcConfig& cfg, std::uint64_t seed) {
  RecoveryOptions opt;
  opt.n_randomizations = cfg.n_randomizations;
  opt.seed = seed;
  opt.rank_tol = cfg.rank_tol;
  opt.cluster_threshold = cfg.cluster_threshold;
  return opt;
}

namespace {

std::vector<Vec> unit_directions(std::span<const Vec> w) {
  std::vector<Vec> u;
  for (const auto& wm : w) {
    const double n = wm.norm();
    u.push_back(n > 0.0 ? Vec(wm / n) : wm);
  }
  return u;
}

std::vector<Vec> scale_directions(std::span<const Vec> u, const std::vector<double>& beta) {
  std::vector<Vec> w;
  for (std::size_t m = 0; m < u.size(); ++m) w.push_back(std::sqrt(beta[m]) * u[m]);
  return w;
}

// Zero sub-threshold blocks so the l0 count matches the vectors; restore
// the group if zeroing breaks feasibility even after re-running power control.
std::vector<Vec> zero_small_blocks(const QosInstance& instance, std::vector<Vec> w,
                                   double delta, double tol, int& fallbacks) {
  const auto& sel = instance.selectors;
  std::vector<Vec> zeroed = w;
  bool changed = false;
  for (auto& wm : zeroed) {
    for (int l = 0; l < sel.num_bs(); ++l) {
      if (sel.block_power(wm, l) <= delta && sel.block_power(wm, l) > 0.0) {
        wm.segment(l * sel.antennas_per_bs(), sel.antennas_per_bs()).setZero();
        changed = true;
      }
    }
  }
  if (!changed) return w;
  if (acceptable(check_feasibility(instance, zeroed))) return zeroed;
  const auto u = unit_directions(zeroed);
  const auto beta = power_control(instance, u, tol);
  if (!beta.empty()) {
    auto rescaled = scale_directions(u, beta);
    if (acceptable(check_feasibility(instance, rescaled))) return rescaled;
  }
  ++fallbacks;
  return w;
}

Vec complex_gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));
  Vec z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = component(rng);
    const double im = component(rng);
    z(i) = {re, im};
  }
  return z;
}

}  // namespace

RecoveryResult randomize(std::span<const Mat> W, const QosInstance& instance,
                         const Eigen::MatrixXd& alpha, double eta,
                         const RecoveryOptions& options) {
  const int M = static_cast<int>(W.size());
  const int n = instance.dim();
  const double delta = options.cluster_threshold;
  if (M != instance.num_groups()) throw std::invalid_argument("one SDR block per group required");

  RecoveryResult best;
  best.cost = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<Vec> w, int candidate, bool sampled) {
    int fallbacks = 0;
    w = zero_small_blocks(instance, std::move(w), delta, options.solver_tol, fallbacks);
    if (!acceptable(check_feasibility(instance, w))) return;
    const double cost = network_cost(w, alpha, eta, delta, instance.selectors).network_cost;
    if (cost < best.cost) {
      best.w = std::move(w);
      best.cost = cost;
      best.candidate = candidate;
      best.zeroing_fallbacks = fallbacks;
      best.used_sampling = sampled;
    }
  };

  std::vector<bool> rank_one(M);
  std::vector<Vec> principal(M);
  std::vector<Mat> factor(M);
  for (int m = 0; m < M; ++m) {
    rank_one[m] = rank_one_check(W[m], options.rank_tol);
    Eigen::SelfAdjointEigenSolver<Mat> eig(W[m]);
    Vec v = eig.eigenvectors().col(n - 1);
    normalize_phase(v);
    principal[m] = v;
    // Covariance square root; rows with zero variance stay exactly zero.
    const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor[m] = eig.eigenvectors() * lambda.asDiagonal();
    for (int i = 0; i < n; ++i) {
      if (W[m](i, i).real() <= 0.0) factor[m].row(i).setZero();
    }
  }

  const bool all_rank_one = std::all_of(rank_one.begin(), rank_one.end(), [](bool b) { return b; });
  if (all_rank_one) {
    std::vector<Vec> w;
    for (int m = 0; m < M; ++m) w.push_back(extract_rank_one(W[m], options.rank_tol));
    if (!acceptable(check_feasibility(instance, w))) {
      const auto u = unit_directions(w);
      const auto beta = power_control(instance, u, options.solver_tol);
      if (!beta.empty()) w = scale_directions(u, beta);
    }
    consider(std::move(w), -1, false);
    if (std::isfinite(best.cost)) return best;
  }

  // Candidate 0 uses principal eigenvectors, later candidates are Gaussian
  // samples; rank-one groups keep their extracted direction throughout.
  for (int trial = 0; trial <= options.n_randomizations; ++trial) {
    Rng rng = make_rng(options.seed ^ splitmix64(static_cast<std::uint64_t>(trial)),
                       Stream::kRandomization);
    std::vector<Vec> u(M);
    bool usable = true;
    for (int m = 0; m < M; ++m) {
      if (trial == 0 || rank_one[m]) {
        u[m] = principal[m];
      } else {
        u[m] = factor[m] * complex_gaussian(n, rng);
        const double norm = u[m].norm();
        if (!(norm > 0.0)) {
          usable = false;
          break;
        }
        u[m] /= norm;
      }
    }
    if (!usable) continue;
    const auto beta = power_control(instance, u, options.solver_tol);
    if (beta.empty()) continue;
    consider(scale_directions(u, beta), trial, trial > 0);
  }
  if (!std::isfinite(best.cost)) {
    throw RandomizationFailure("no feasible candidate among " +
                               std::to_string(options.n_randomizations) + " randomizations");
  }
  return best;
}

}  // namespace ccran
