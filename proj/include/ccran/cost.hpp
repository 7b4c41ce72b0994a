#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccran/conic.hpp"
#include "ccran/content.hpp"

namespace ccran {

struct CostReport {
  double transmit_power = 0.0;  // watts, sum_m ||w_m||^2
  /// Reported backhaul. Equals objective_backhaul for multicast; for
  /// unicast it is deduplicated per (BS, content).
  double backhaul = 0.0;
  double objective_backhaul = 0.0;
  double network_cost = 0.0;  // eta * transmit_power + backhaul
  std::vector<int> cluster_sizes;
  bool feasible = false;
  int iterations = 0;
  std::string note;
};

/// l is in Q_m iff ||w_{l,m}||^2 > delta.
bool block_active(const Eigen::VectorXcd& w, const SelectorMatrices& selectors,
                  int bs, double delta);

/// eta * sum ||w_m||^2 + sum_{m,l} 1[||w_{l,m}||^2 > delta] alpha(l, m).
CostReport network_cost(std::span<const Eigen::VectorXcd> w,
                        const Eigen::MatrixXd& alpha, double eta, double delta,
                        const SelectorMatrices& selectors);

/// Backhaul of unicast beamformers counted once per (BS, content): BS l
/// pays R_f if it serves any user requesting an uncached content f.
double deduplicated_backhaul(std::span<const Eigen::VectorXcd> w,
                             const GroupSet& unicast_groups,
                             const CachePlacement& cache,
                             const SelectorMatrices& selectors, double delta);

}  // namespace ccran
