#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ccran/errors.hpp"
#include "ccran/optimizer.hpp"

namespace ccran {

using Mat = Eigen::MatrixXcd;

QosInstance::QosInstance(ChannelRealization channels_in, GroupSet groups_in,
                         int num_bs, int antennas_per_bs,
                         std::vector<double> power_budget_in)
    : channels(std::move(channels_in)),
      groups(std::move(groups_in)),
      selectors(num_bs, antennas_per_bs),
      power_budget(std::move(power_budget_in)) {
  if (channels.dim() != selectors.dim()) {
    throw std::invalid_argument("channel length must equal L*N_t");
  }
  if (groups.num_users() != channels.num_users()) {
    throw std::invalid_argument("groups must cover exactly the scheduled users");
  }
  if (static_cast<int>(power_budget.size()) != num_bs) {
    throw std::invalid_argument("one power budget per BS required");
  }
}

LinearSdp qos_sdp(const QosInstance& instance, std::vector<Mat> objective,
                  double constant) {
  return assemble_qos_sdp(instance.channels.H, instance.groups, instance.selectors,
                          instance.power_budget, instance.channels.noise_power,
                          std::move(objective), constant);
}

namespace {

std::vector<Mat> solve_or_throw(const LinearSdp& sdp, double tol, double* value,
                                const char* stage) {
  SolverOptions opt;
  opt.tol = tol;
  const SdpSolution sol = solve(sdp, opt);
  if (sol.status == SdpStatus::kInfeasible) {
    throw InfeasibleError(std::string(stage) + ": QoS targets infeasible (" +
                          sol.message + ")");
  }
  if (sol.status != SdpStatus::kOptimal) {
    throw SolverFailure(std::string(stage) + ": " + sol.message +
                        " (kkt residual " + std::to_string(sol.kkt_residual) + ")");
  }
  if (value) *value = sol.objective_value;
  return sol.blocks;
}

DcIterate describe(int t, double value, std::span<const Mat> W,
                   const SelectorMatrices& selectors, double delta) {
  DcIterate it;
  it.iteration = t;
  it.value = value;
  it.clusters = extract_clusters(W, selectors, delta);
  for (const auto& q : it.clusters) it.cluster_sizes.push_back(static_cast<int>(q.size()));
  for (const auto& Wm : W) it.group_power.push_back(Wm.trace().real());
  return it;
}

}  // namespace

PowerMinResult solve_p_ini(const QosInstance& instance, double tol) {
  const int n = instance.dim();
  std::vector<Mat> objective(instance.num_groups(), Mat::Identity(n, n));
  PowerMinResult out;
  out.W = solve_or_throw(qos_sdp(instance, std::move(objective)), tol, &out.value,
                         "power minimization");
  return out;
}

double surrogate_objective(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                           const DcConfig& cfg, std::span<const Mat> W) {
  double v = 0.0;
  for (int m = 0; m < static_cast<int>(W.size()); ++m) {
    v += cfg.eta * W[m].trace().real();
    for (int l = 0; l < instance.num_bs(); ++l) {
      if (alpha(l, m) == 0.0) continue;
      v += alpha(l, m) *
           surrogate_potential(cfg, std::max(0.0, instance.selectors.block_power(W[m], l)));
    }
  }
  return v;
}

BeamformerSolution dc_solve(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                            const DcConfig& cfg) {
  cfg.validate();
  const int L = instance.num_bs();
  const int M = instance.num_groups();
  const int n = instance.dim();
  if (alpha.rows() != L || alpha.cols() != M) {
    throw std::invalid_argument("coupling weights must be L x M");
  }
  if ((alpha.array() < 0.0).any()) {
    throw std::invalid_argument("coupling weights must be nonnegative");
  }

  BeamformerSolution out;
  const PowerMinResult init = solve_p_ini(instance, cfg.solver_tol);
  out.v_ini = init.value;
  out.W = init.W;
  double previous = surrogate_objective(instance, alpha, cfg, out.W);
  out.objective_trace.push_back(previous);
  out.iterates.push_back(describe(0, previous, out.W, instance.selectors,
                                  cfg.cluster_threshold));

  for (int t = 1; t <= cfg.max_iters; ++t) {
    std::vector<Mat> objective(M, cfg.eta * Mat::Identity(n, n));
    for (int m = 0; m < M; ++m) {
      for (int l = 0; l < L; ++l) {
        if (alpha(l, m) == 0.0) continue;
        const double x = std::max(0.0, instance.selectors.block_power(out.W[m], l));
        objective[m].diagonal().segment(l * instance.selectors.antennas_per_bs(),
                                        instance.selectors.antennas_per_bs()).array() +=
            alpha(l, m) * surrogate_weight(cfg, x);
      }
    }
    double sub_value = 0.0;
    std::vector<Mat> next = solve_or_throw(qos_sdp(instance, objective), cfg.solver_tol,
                                           &sub_value, "DC subproblem");
    const double value = surrogate_objective(instance, alpha, cfg, next);
    out.W = std::move(next);
    out.bound_objective = std::move(objective);
    out.sdr_bound = sub_value;
    out.iterations = t;
    out.objective_trace.push_back(value);
    out.iterates.push_back(describe(t, value, out.W, instance.selectors,
                                    cfg.cluster_threshold));
    if (previous - value < cfg.rho) {
      out.converged = true;
      break;
    }
    previous = value;
  }

  out.clusters = extract_clusters(out.W, instance.selectors, cfg.cluster_threshold);
  for (const auto& Wm : out.W) out.is_rank_one.push_back(rank_one_check(Wm, cfg.rank_tol));
  return out;
}

void write_trace(std::ostream& out, const BeamformerSolution& solution) {
  const auto old = out.precision(17);
  for (const auto& it : solution.iterates) {
    out << it.iteration << '\t' << it.value << '\t';
    for (std::size_t m = 0; m < it.group_power.size(); ++m) {
      out << (m ? "," : "") << it.group_power[m];
    }
    out << '\t';
    for (std::size_t m = 0; m < it.cluster_sizes.size(); ++m) {
      out << (m ? "," : "") << it.cluster_sizes[m];
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace ccran
