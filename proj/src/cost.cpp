#include "ccran/cost.hpp"

#include <set>
#include <stdexcept>
#include <utility>

namespace ccran {

bool block_active(const Eigen::VectorXcd& w, const SelectorMatrices& selectors,
                  int bs, double delta) {
  return selectors.block_power(w, bs) > delta;
}

CostReport network_cost(std::span<const Eigen::VectorXcd> w, const Eigen::MatrixXd& alpha,
                        double eta, double delta, const SelectorMatrices& selectors) {
  if (alpha.rows() != selectors.num_bs() || alpha.cols() != static_cast<Eigen::Index>(w.size())) {
    throw std::invalid_argument("coupling weights must be L x M");
  }
  CostReport r;
  r.feasible = true;
  for (std::size_t m = 0; m < w.size(); ++m) {
    if (w[m].size() != selectors.dim()) {
      throw std::invalid_argument("beamformer length must equal L*N_t");
    }
    r.transmit_power += w[m].squaredNorm();
    int active = 0;
    for (int l = 0; l < selectors.num_bs(); ++l) {
      if (!block_active(w[m], selectors, l, delta)) continue;
      ++active;
      r.objective_backhaul += alpha(l, static_cast<Eigen::Index>(m));
    }
    r.cluster_sizes.push_back(active);
  }
  r.backhaul = r.objective_backhaul;
  r.network_cost = eta * r.transmit_power + r.backhaul;
  return r;
}

double deduplicated_backhaul(std::span<const Eigen::VectorXcd> w,
                             const GroupSet& unicast_groups,
                             const CachePlacement& cache,
                             const SelectorMatrices& selectors, double delta) {
  std::set<std::pair<int, int>> fetched;  // (bs, content)
  double total = 0.0;
  for (int m = 0; m < unicast_groups.size(); ++m) {
    const auto& g = unicast_groups.groups[m];
    for (int l = 0; l < selectors.num_bs(); ++l) {
      if (!block_active(w[m], selectors, l, delta) || cache.cached(l, g.content)) continue;
      if (fetched.emplace(l, g.content).second) total += g.rate;
    }
  }
  return total;
}

}  // namespace ccran
