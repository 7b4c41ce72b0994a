#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccran/content.hpp"

namespace ccran {

enum class Sense { kGreaterEqual, kLessEqual };

/// Coefficient of one variable block inside a linear constraint.
struct BlockTerm {
  int block = 0;
  Eigen::MatrixXcd coeff;  // Hermitian, dims[block] x dims[block]
};

/// sum_terms <coeff, W_block> (sense) rhs
struct LinearConstraint {
  std::vector<BlockTerm> terms;
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;
};

/// Linear program over Hermitian PSD blocks:
///
///   minimize   sum_m <A_m, W_m> + constant
///   subject to sum_m <B_jm, W_m> (>= | <=) b_j,  W_m PSD.
///
/// <X, Y> = Re Tr(X^H Y). A 1x1 block is a nonnegative scalar.
class LinearSdp {
 public:
  LinearSdp() = default;
  explicit LinearSdp(std::vector<int> block_dims);

  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<int>& dims() const { return dims_; }

  void set_objective(int block, Eigen::MatrixXcd coeff);
  void set_objective_constant(double c) { constant_ = c; }
  void add_constraint(LinearConstraint c);

  const Eigen::MatrixXcd& objective(int block) const { return objective_.at(block); }
  double objective_constant() const { return constant_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  /// Dimension and Hermitian checks. Throws std::invalid_argument.
  void validate() const;

  double evaluate_objective(std::span<const Eigen::MatrixXcd> blocks) const;
  /// Left-hand side of constraint j at the given point.
  double evaluate_constraint(int j, std::span<const Eigen::MatrixXcd> blocks) const;

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXcd> objective_;
  double constant_ = 0.0;
  std::vector<LinearConstraint> constraints_;
};

enum class SdpStatus { kOptimal, kInfeasible, kNumericalFailure };

const char* to_string(SdpStatus status);

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::vector<Eigen::MatrixXcd> blocks;
  std::vector<double> multipliers;  // one per constraint, >= 0
  double objective_value = 0.0;
  double dual_value = 0.0;
  /// max of relative primal infeasibility, dual infeasibility and gap.
  double kkt_residual = 0.0;
  int iterations = 0;
  std::string message;
};

struct SolverOptions {
  double tol = 1e-7;
  int max_iters = 120;
  /// Run a phase-I problem when the main solve does not converge.
  bool phase_one = true;
};

/// Primal-dual interior-point solve (infeasible start, Mehrotra
/// predictor-corrector, HKM direction), carried out directly in complex
/// Hermitian arithmetic.
SdpSolution solve(const LinearSdp& problem, const SolverOptions& options = {});

/// Sub-problem over the rows/columns keep[b] of each block b. Terms on
/// emptied blocks vanish; constraints left without terms are dropped when
/// 0 satisfies them. Returns false (leaving out untouched) when such a
/// constraint is violated, i.e. the restriction is trivially infeasible.
bool restrict_blocks(const LinearSdp& problem, const std::vector<std::vector<int>>& keep,
                     LinearSdp& out);

/// Inverse of restrict_blocks for a solution: zero-padded full-size blocks.
std::vector<Eigen::MatrixXcd> lift_blocks(std::span<const Eigen::MatrixXcd> blocks,
                                          const std::vector<std::vector<int>>& keep,
                                          const std::vector<int>& dims);

/// J_l = diag(0_{(l)N_t}, 1_{N_t}, 0_{(L-l-1)N_t}); sum_l J_l = I.
class SelectorMatrices {
 public:
  SelectorMatrices(int num_bs, int antennas_per_bs);

  int num_bs() const { return num_bs_; }
  int antennas_per_bs() const { return antennas_; }
  int dim() const { return num_bs_ * antennas_; }

  Eigen::MatrixXcd matrix(int bs) const;
  /// Tr(W J_l) without forming J_l.
  double block_power(const Eigen::MatrixXcd& W, int bs) const {
    return W.diagonal().segment(bs * antennas_, antennas_).real().sum();
  }
  double block_power(const Eigen::VectorXcd& w, int bs) const {
    return w.segment(bs * antennas_, antennas_).squaredNorm();
  }

 private:
  int num_bs_;
  int antennas_;
};

/// QoS-constrained SDP: one SINR row per user
///   <H_k, W_m> - gamma_m sum_{n != m} <H_k, W_n> >= gamma_m sigma^2
/// and one per-BS power row sum_m <J_l, W_m> <= P_l, with the given
/// objective blocks. Throws std::invalid_argument on dimension mismatch.
LinearSdp assemble_qos_sdp(std::span<const Eigen::MatrixXcd> H,
                           const GroupSet& groups,
                           const SelectorMatrices& selectors,
                           std::span<const double> power_budget,
                           double noise_power,
                           std::vector<Eigen::MatrixXcd> objective_blocks,
                           double objective_constant = 0.0);

/// Real symmetric embedding [[Re, -Im], [Im, Re]]; for Hermitian A, W
/// <A, W> = 1/2 <embed(A), embed(W)>.
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& X);

/// Embeds every block; the embedded problem has the same optimal value.
LinearSdp embed_real(const LinearSdp& problem);

/// Debug dump format (see README, "Problem dump format").
void write_sdp(std::ostream& out, const LinearSdp& problem);
LinearSdp read_sdp(std::istream& in);

}  // namespace ccran
