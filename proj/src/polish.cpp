#include <algorithm>
#include <optional>
#include <string>

#include "ccran/errors.hpp"
#include "ccran/optimizer.hpp"
#include "ccran/rng.hpp"

namespace ccran {

PowerMinResult solve_restricted_power_min(const QosInstance& instance,
                                          const std::vector<std::vector<int>>& clusters,
                                          double tol) {
  const int M = instance.num_groups();
  const int n = instance.dim();
  const int Nt = instance.selectors.antennas_per_bs();
  if (static_cast<int>(clusters.size()) != M) {
    throw std::invalid_argument("need one cluster per group");
  }
  std::vector<std::vector<int>> keep(M);
  for (int m = 0; m < M; ++m) {
    for (int l : clusters[m]) {
      if (l < 0 || l >= instance.num_bs()) throw std::invalid_argument("cluster BS out of range");
      for (int a = 0; a < Nt; ++a) keep[m].push_back(l * Nt + a);
    }
    std::sort(keep[m].begin(), keep[m].end());
  }
  std::vector<Eigen::MatrixXcd> objective(M, Eigen::MatrixXcd::Identity(n, n));
  const LinearSdp full = qos_sdp(instance, std::move(objective));
  LinearSdp sub;
  if (!restrict_blocks(full, keep, sub)) {
    throw InfeasibleError("restricted power minimization: a group has no serving BS");
  }
  SolverOptions opt;
  opt.tol = tol;
  const SdpSolution sol = solve(sub, opt);
  if (sol.status == SdpStatus::kInfeasible) {
    throw InfeasibleError("restricted power minimization: " + sol.message);
  }
  if (sol.status != SdpStatus::kOptimal) {
    throw SolverFailure("restricted power minimization: " + sol.message);
  }
  PowerMinResult out;
  out.W = lift_blocks(sol.blocks, keep, full.dims());
  out.value = sol.objective_value;
  return out;
}

RecoveryResult recover(const BeamformerSolution& solution, const QosInstance& instance,
                       const Eigen::MatrixXd& alpha, const DcConfig& cfg,
                       std::uint64_t seed) {
  std::optional<RecoveryResult> best;
  std::string failure;
  try {
    best = randomize(solution.W, instance, alpha, cfg.eta, recovery_options(cfg, seed));
  } catch (const RandomizationFailure& e) {
    failure = e.what();
  }
  if (cfg.polish_supports) {
    std::vector<std::vector<std::vector<int>>> seen;
    for (const auto& it : solution.iterates) {
      if (std::find(seen.begin(), seen.end(), it.clusters) != seen.end()) continue;
      seen.push_back(it.clusters);
      try {
        const PowerMinResult pm =
            solve_restricted_power_min(instance, it.clusters, cfg.solver_tol);
        RecoveryResult r = randomize(pm.W, instance, alpha, cfg.eta,
                                     recovery_options(cfg, derive_seed(seed, it.iteration)));
        // Ties keep the unpolished point.
        if (!best || r.cost < best->cost) {
          r.polished_from = it.iteration;
          best = std::move(r);
        }
      } catch (const InfeasibleError&) {
      } catch (const SolverFailure&) {
      } catch (const RandomizationFailure&) {
      }
    }
  }
  if (!best) throw RandomizationFailure(failure);
  return *best;
}

}  // namespace ccran
