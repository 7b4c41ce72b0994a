#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ccran/errors.hpp"
#include "ccran/experiments.hpp"
#include "ccran/rng.hpp"

namespace ccran {

OracleResult brute_force_oracle(const QosInstance& instance, const Eigen::VectorXd& alpha,
                                double eta, double tol) {
  const int L = instance.num_bs();
  const int Nt = instance.selectors.antennas_per_bs();
  if (instance.num_groups() != 1) {
    throw std::invalid_argument("brute-force oracle handles a single group only");
  }
  if (L > 10) throw std::invalid_argument("brute-force oracle: too many BSs to enumerate");
  if (alpha.size() != L) throw std::invalid_argument("oracle needs one weight per BS");

  OracleResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << L); ++mask) {
    std::vector<int> support;
    for (int l = 0; l < L; ++l) {
      if (mask & (1u << l)) support.push_back(l);
    }
    // Beamformer blocks outside the support are zero, so restrict the
    // channels to the antennas inside it.
    const int n = static_cast<int>(support.size()) * Nt;
    std::vector<Eigen::VectorXcd> h;
    for (const auto& hk : instance.channels.h) {
      Eigen::VectorXcd r(n);
      for (std::size_t i = 0; i < support.size(); ++i) {
        r.segment(i * Nt, Nt) = hk.segment(support[i] * Nt, Nt);
      }
      h.push_back(r);
    }
    std::vector<double> budget;
    double backhaul = 0.0;
    for (int l : support) {
      budget.push_back(instance.power_budget[l]);
      backhaul += alpha(l);
    }
    const QosInstance restricted(make_channels(std::move(h), instance.channels.noise_power),
                                 instance.groups, static_cast<int>(support.size()), Nt,
                                 std::move(budget));
    PowerMinResult pm;
    try {
      pm = solve_p_ini(restricted, tol);
    } catch (const InfeasibleError&) {
      continue;
    }
    const double cost = eta * pm.value + backhaul;
    if (cost < best.cost) {
      best.feasible = true;
      best.cost = cost;
      best.power = pm.value;
      best.support = support;
    }
  }
  return best;
}

}  // namespace ccran

namespace ccran {

TinyInstance tiny_instance(std::uint64_t seed, int num_bs, int num_users, double gamma_db) {
  if (num_bs < 1 || num_users < 1) throw std::invalid_argument("tiny_instance: empty instance");
  Rng rng = make_rng(seed, Stream::kInstance);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::vector<Eigen::VectorXcd> h;
  for (int k = 0; k < num_users; ++k) {
    Eigen::VectorXcd hk(num_bs);
    for (int l = 0; l < num_bs; ++l) hk(l) = {gauss(rng), gauss(rng)};
    h.push_back(hk);
  }
  const double gamma = std::pow(10.0, gamma_db / 10.0);
  GroupSet groups;
  MulticastGroup g;
  g.content = 0;
  g.target_sinr = gamma;
  g.rate = std::log2(1.0 + gamma);
  for (int k = 0; k < num_users; ++k) g.users.push_back(k);
  groups.groups.push_back(g);

  std::bernoulli_distribution cached(0.3);
  Eigen::VectorXd alpha(num_bs);
  for (int l = 0; l < num_bs; ++l) alpha(l) = cached(rng) ? 0.0 : g.rate;
  const double etas[] = {0.05, 0.2, 1.0};
  const double eta = etas[std::uniform_int_distribution<int>(0, 2)(rng)];
  // Budgets loose enough that the full cluster is almost always feasible.
  std::vector<double> budget(num_bs, 50.0 * gamma);
  return TinyInstance{QosInstance(make_channels(std::move(h), 1.0), std::move(groups), num_bs,
                                  1, std::move(budget)),
                      alpha, eta};
}

}  // namespace ccran
