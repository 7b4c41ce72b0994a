#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccran/conic.hpp"
#include "ccran/content.hpp"
#include "ccran/netgen.hpp"

namespace ccran {

enum class SmoothKind { kLog, kExp, kAtan };
enum class ThetaRule { kGradientMax, kFixed };

const char* to_string(SmoothKind kind);
const char* to_string(ThetaRule rule);

struct DcConfig {
  double eta = 1.0;  // weight of transmit power against backhaul
  SmoothKind smooth = SmoothKind::kLog;
  double epsilon = 1e-7;
  double rho = 1e-6;  // stop when V_{t-1} - V_t < rho
  int max_iters = 50;
  ThetaRule theta_rule = ThetaRule::kGradientMax;
  double fixed_theta = 1e-3;  // used by ThetaRule::kFixed
  /// Scale exp gradients by e and atan gradients by pi so every kind
  /// drives the same subproblem under the gradient-max rule.
  bool normalize = true;
  double rank_tol = 1e-6;
  double cluster_threshold = 1e-6;  // delta, watts
  int n_randomizations = 100;
  double solver_tol = 1e-7;
  /// After recovery, re-minimise power on every distinct cluster pattern
  /// the DC iterates visited and keep the cheapest recovered point.
  bool polish_supports = true;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// -- smooth l0 surrogates ---------------------------------------------------

/// f(x; theta) for x = Tr(W_m J_l).
double smooth_value(SmoothKind kind, double x, double theta);
/// df/dx at (x; theta).
double smooth_derivative(SmoothKind kind, double x, double theta);
/// Gradient-maximising smoothness: epsilon for log, max(x, epsilon) otherwise.
double theta_star(SmoothKind kind, double x, double epsilon);
/// Gradient of f(Tr(W J)) with respect to W: f'(Tr(W J); theta) J.
Eigen::MatrixXcd gradient_matrix(SmoothKind kind, const Eigen::MatrixXcd& W,
                                 const Eigen::MatrixXcd& J, double theta);
/// 1 for log, e for exp, pi for atan.
double normalization_factor(SmoothKind kind);

/// Weight multiplying J_l in the linearised objective at block power x.
double surrogate_weight(const DcConfig& cfg, double x);
/// Concave potential whose derivative is surrogate_weight; the DC iteration
/// is a majorization-minimization of eta*Tr(W) + sum alpha*potential.
double surrogate_potential(const DcConfig& cfg, double x);

// -- problem data -------------------------------------------------------------

struct QosInstance {
  QosInstance(ChannelRealization channels, GroupSet groups, int num_bs,
              int antennas_per_bs, std::vector<double> power_budget);

  ChannelRealization channels;
  GroupSet groups;
  SelectorMatrices selectors;
  std::vector<double> power_budget;

  int num_bs() const { return selectors.num_bs(); }
  int dim() const { return selectors.dim(); }
  int num_groups() const { return groups.size(); }
};

/// SDP with the QoS and power rows of the instance and the given objective.
LinearSdp qos_sdp(const QosInstance& instance, std::vector<Eigen::MatrixXcd> objective,
                  double constant = 0.0);

struct PowerMinResult {
  std::vector<Eigen::MatrixXcd> W;
  double value = 0.0;  // V_ini = min sum_m Tr(W_m)
};

/// Power minimisation with group m confined to the BSs in clusters[m].
/// Throws InfeasibleError or SolverFailure.
PowerMinResult solve_restricted_power_min(const QosInstance& instance,
                                          const std::vector<std::vector<int>>& clusters,
                                          double tol = 1e-7);

/// Throws InfeasibleError or SolverFailure.
PowerMinResult solve_p_ini(const QosInstance& instance, double tol = 1e-7);

struct DcIterate {
  int iteration = 0;
  double value = 0.0;  // V_t
  std::vector<double> group_power;  // Tr(W_m)
  std::vector<int> cluster_sizes;
  std::vector<std::vector<int>> clusters;  // Q_m at this iterate
};

struct BeamformerSolution {
  std::vector<Eigen::MatrixXcd> W;
  std::vector<Eigen::VectorXcd> w;  // empty until recovery
  std::vector<std::vector<int>> clusters;
  /// V_t for t = 0, 1, ...; V_0 is the surrogate objective at W^(0).
  std::vector<double> objective_trace;
  std::vector<DcIterate> iterates;
  double v_ini = 0.0;
  /// Optimal value of the last linearised SDP and its objective blocks. Any
  /// feasible rank-one point scores at least sdr_bound under that objective.
  double sdr_bound = 0.0;
  std::vector<Eigen::MatrixXcd> bound_objective;
  std::vector<bool> is_rank_one;
  int iterations = 0;
  bool converged = false;
};

/// DC iteration starting from the power-minimising point. alpha is L x M.
/// Throws InfeasibleError or SolverFailure.
BeamformerSolution dc_solve(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                            const DcConfig& cfg);

/// Surrogate objective eta*sum Tr(W_m) + sum alpha(l,m) potential(Tr(W_m J_l)).
double surrogate_objective(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                           const DcConfig& cfg, std::span<const Eigen::MatrixXcd> W);

/// Tab-separated: iteration, V_t, per-group Tr(W_m), active-cluster sizes.
void write_trace(std::ostream& out, const BeamformerSolution& solution);

// -- rank-one recovery --------------------------------------------------------

/// lambda_2 / lambda_1 <= rank_tol (true for the zero matrix).
bool rank_one_check(const Eigen::MatrixXcd& W, double rank_tol);

/// sqrt(lambda_1) v_1 with the first nonzero entry real and nonnegative.
/// Throws std::logic_error if W is not rank one within rank_tol.
Eigen::VectorXcd extract_rank_one(const Eigen::MatrixXcd& W, double rank_tol = 1e-6);

/// l in Q_m iff Tr(W_m J_l) > delta.
std::vector<std::vector<int>> extract_clusters(std::span<const Eigen::MatrixXcd> W,
                                               const SelectorMatrices& selectors,
                                               double delta);
/// l in Q_m iff ||w_{l,m}||^2 > delta.
std::vector<std::vector<int>> extract_clusters(std::span<const Eigen::VectorXcd> w,
                                               const SelectorMatrices& selectors,
                                               double delta);

struct FeasibilityReport {
  double min_sinr_ratio = 0.0;   // min_k SINR_k / gamma_m(k)
  double max_power_ratio = 0.0;  // max_l P_used,l / P_l
  bool satisfied(double rel_tol = 1e-6) const {
    return min_sinr_ratio >= 1.0 - rel_tol && max_power_ratio <= 1.0 + rel_tol;
  }
};

std::vector<double> user_sinr(const QosInstance& instance,
                              std::span<const Eigen::VectorXcd> w);
FeasibilityReport check_feasibility(const QosInstance& instance,
                                    std::span<const Eigen::VectorXcd> w);

/// Minimum-power amplitudes for fixed unit directions u_m, solved as an LP
/// with 1x1 blocks and polished by fixed-point power control. Returns an
/// empty vector if no feasible scaling exists.
std::vector<double> power_control(const QosInstance& instance,
                                  std::span<const Eigen::VectorXcd> directions,
                                  double tol = 1e-9);

struct RecoveryOptions {
  int n_randomizations = 100;
  std::uint64_t seed = 0;
  double rank_tol = 1e-6;
  double cluster_threshold = 1e-6;
  double solver_tol = 1e-9;
};

struct RecoveryResult {
  std::vector<Eigen::VectorXcd> w;
  double cost = 0.0;  // network cost with thresholded l0
  int candidate = -1;  // -1: all groups rank one, 0: principal eigenvectors
  int zeroing_fallbacks = 0;
  bool used_sampling = false;
  /// DC iterate whose cluster pattern produced w after polishing; -1 when
  /// the final DC point won.
  int polished_from = -1;
};

/// Rank-one extraction where possible, Gaussian randomization plus power
/// control otherwise; returns the feasible candidate of least network cost.
/// Throws RandomizationFailure.
RecoveryResult randomize(std::span<const Eigen::MatrixXcd> W, const QosInstance& instance,
                         const Eigen::MatrixXd& alpha, double eta,
                         const RecoveryOptions& options);

/// randomize() on the final DC point, then (if cfg.polish_supports) on the
/// restricted power minimiser of each distinct cluster pattern in
/// solution.iterates. Returns the cheapest. Throws RandomizationFailure
/// when no candidate survives.
RecoveryResult recover(const BeamformerSolution& solution, const QosInstance& instance,
                       const Eigen::MatrixXd& alpha, const DcConfig& cfg,
                       std::uint64_t seed);

RecoveryOptions recovery_options(const DcConfig& cfg, std::uint64_t seed);

}  // namespace ccran
