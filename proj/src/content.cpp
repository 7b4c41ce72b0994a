#include "ccran/content.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ccran/rng.hpp"

namespace ccran {

std::vector<double> zipf_pmf(int num_contents, double skew) {
  if (num_contents < 1) throw std::invalid_argument("catalog needs F >= 1");
  if (skew < 0.0) throw std::invalid_argument("Zipf skew must be >= 0");
  std::vector<double> p(num_contents);
  for (int f = 0; f < num_contents; ++f) p[f] = std::pow(f + 1.0, -skew);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

CachePlacement::CachePlacement(int num_bs, int num_contents, std::vector<int> budgets)
    : num_bs_(num_bs),
      num_contents_(num_contents),
      budgets_(std::move(budgets)),
      bits_(static_cast<std::size_t>(num_bs) * num_contents, 0) {
  if (num_bs < 1 || num_contents < 1) {
    throw std::invalid_argument("cache needs L >= 1 and F >= 1");
  }
  if (static_cast<int>(budgets_.size()) != num_bs) {
    throw std::invalid_argument("one cache budget per BS required");
  }
  for (int b : budgets_) {
    if (b < 0 || b >= num_contents) {
      throw std::invalid_argument("cache budget must satisfy 0 <= F_l < F");
    }
  }
}

void CachePlacement::set(int bs, int content, bool value) {
  bits_.at(static_cast<std::size_t>(bs) * num_contents_ + content) = value ? 1 : 0;
}

int CachePlacement::row_count(int bs) const {
  const auto row = bits_.begin() + static_cast<std::ptrdiff_t>(bs) * num_contents_;
  return static_cast<int>(std::count(row, row + num_contents_, std::uint8_t{1}));
}

void CachePlacement::validate() const {
  for (int l = 0; l < num_bs_; ++l) {
    if (row_count(l) > budgets_[l]) {
      throw std::invalid_argument("cache row " + std::to_string(l) +
                                  " exceeds its budget");
    }
  }
}

CachePlacement popularity_aware_cache(const Catalog& catalog,
                                      std::span<const int> budgets) {
  const int F = catalog.size();
  std::vector<int> order(F);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return catalog.popularity[a] > catalog.popularity[b];
  });
  CachePlacement cache(static_cast<int>(budgets.size()), F,
                       {budgets.begin(), budgets.end()});
  for (int l = 0; l < cache.num_bs(); ++l) {
    for (int i = 0; i < budgets[l]; ++i) cache.set(l, order[i], true);
  }
  return cache;
}

CachePlacement random_cache(const Catalog& catalog, std::span<const int> budgets,
                            std::uint64_t seed) {
  const int F = catalog.size();
  CachePlacement cache(static_cast<int>(budgets.size()), F,
                       {budgets.begin(), budgets.end()});
  Rng rng = make_rng(seed, Stream::kCache);
  std::vector<int> ids(F);
  for (int l = 0; l < cache.num_bs(); ++l) {
    std::iota(ids.begin(), ids.end(), 0);
    // Partial Fisher-Yates: the first F_l entries form a uniform subset.
    for (int i = 0; i < budgets[l]; ++i) {
      std::uniform_int_distribution<int> pick(i, F - 1);
      std::swap(ids[i], ids[pick(rng)]);
      cache.set(l, ids[i], true);
    }
  }
  return cache;
}

CachePlacement empty_cache(int num_bs, int num_contents) {
  return CachePlacement(num_bs, num_contents, std::vector<int>(num_bs, 0));
}

void write_cache(std::ostream& out, const CachePlacement& cache) {
  out << cache.num_bs() << ' ' << cache.num_contents() << '\n';
  for (int l = 0; l < cache.num_bs(); ++l) {
    for (int f = 0; f < cache.num_contents(); ++f) {
      if (f) out << ' ';
      out << (cache.cached(l, f) ? '1' : '0');
    }
    out << '\n';
  }
}

CachePlacement read_cache(std::istream& in) {
  int L = 0;
  int F = 0;
  if (!(in >> L >> F) || L < 1 || F < 1) {
    throw std::runtime_error("cache file: bad header, expected `L F`");
  }
  std::vector<std::vector<int>> rows(L, std::vector<int>(F));
  std::vector<int> budgets(L, 0);
  for (int l = 0; l < L; ++l) {
    for (int f = 0; f < F; ++f) {
      int bit = -1;
      if (!(in >> bit) || (bit != 0 && bit != 1)) {
        throw std::runtime_error("cache file: expected 0/1 at row " +
                                 std::to_string(l + 1));
      }
      rows[l][f] = bit;
      budgets[l] += bit;
    }
  }
  CachePlacement cache(L, F, budgets);
  for (int l = 0; l < L; ++l) {
    for (int f = 0; f < F; ++f) cache.set(l, f, rows[l][f] == 1);
  }
  return cache;
}

std::vector<int> round_robin_schedule(int total_users, int K, int interval) {
  if (K < 1 || K > total_users) {
    throw std::invalid_argument("round robin needs 1 <= K <= total users");
  }
  if (interval < 0) throw std::invalid_argument("interval index must be >= 0");
  std::vector<int> ids(K);
  const long long start = (static_cast<long long>(interval) * K) % total_users;
  for (int i = 0; i < K; ++i) {
    ids[i] = static_cast<int>((start + i) % total_users);
  }
  return ids;
}

std::vector<int> draw_requests(int K, double common_fraction,
                               const Catalog& catalog, std::uint64_t seed,
                               CommonContent common) {
  if (K < 1) throw std::invalid_argument("need at least one user");
  if (common_fraction < 0.0 || common_fraction > 1.0) {
    throw std::invalid_argument("common fraction must lie in [0, 1]");
  }
  Rng rng = make_rng(seed, Stream::kRequests);
  std::discrete_distribution<int> pick(catalog.popularity.begin(),
                                       catalog.popularity.end());
  const int shared = static_cast<int>(std::ceil(common_fraction * K - 1e-12));
  std::vector<int> requests(K);
  if (shared > 0) {
    const int content = common == CommonContent::kMostPopular ? 0 : pick(rng);
    std::fill(requests.begin(), requests.begin() + shared, content);
  }
  for (int k = shared; k < K; ++k) requests[k] = pick(rng);
  return requests;
}

int GroupSet::num_users() const {
  int n = 0;
  for (const auto& g : groups) n += static_cast<int>(g.users.size());
  return n;
}

std::vector<int> GroupSet::group_of_user() const {
  std::vector<int> owner(num_users(), -1);
  for (int m = 0; m < size(); ++m) {
    for (int k : groups[m].users) owner.at(k) = m;
  }
  return owner;
}

void GroupSet::validate(bool distinct_contents) const {
  const int K = num_users();
  std::vector<int> seen(K, 0);
  std::map<int, int> contents;
  for (const auto& g : groups) {
    if (g.users.empty()) throw std::invalid_argument("empty multicast group");
    if (!(g.target_sinr > 0.0)) throw std::invalid_argument("target SINR must be > 0");
    if (std::abs(g.rate - std::log2(1.0 + g.target_sinr)) > 1e-12) {
      throw std::invalid_argument("group rate must equal log2(1 + SINR target)");
    }
    for (int k : g.users) {
      if (k < 0 || k >= K || seen[k]++) {
        throw std::invalid_argument("groups do not partition the users");
      }
    }
    if (distinct_contents && contents[g.content]++) {
      throw std::invalid_argument("two groups share a content id");
    }
  }
}

namespace {

MulticastGroup make_group(int content, double target_sinr) {
  if (!(target_sinr > 0.0)) throw std::invalid_argument("target SINR must be > 0");
  return MulticastGroup{content, {}, target_sinr, std::log2(1.0 + target_sinr)};
}

}  // namespace

GroupSet form_groups(std::span<const int> requests, double target_sinr) {
  if (requests.empty()) throw std::invalid_argument("no requests");
  std::map<int, MulticastGroup> by_content;
  for (int k = 0; k < static_cast<int>(requests.size()); ++k) {
    auto it = by_content.find(requests[k]);
    if (it == by_content.end()) {
      it = by_content.emplace(requests[k], make_group(requests[k], target_sinr)).first;
    }
    it->second.users.push_back(k);
  }
  GroupSet out;
  for (auto& [content, group] : by_content) out.groups.push_back(std::move(group));
  return out;
}

GroupSet form_unicast_groups(std::span<const int> requests, double target_sinr) {
  if (requests.empty()) throw std::invalid_argument("no requests");
  GroupSet out;
  for (int k = 0; k < static_cast<int>(requests.size()); ++k) {
    auto g = make_group(requests[k], target_sinr);
    g.users.push_back(k);
    out.groups.push_back(std::move(g));
  }
  return out;
}

Eigen::MatrixXd coupling_weights(const CachePlacement& cache, const GroupSet& groups) {
  Eigen::MatrixXd alpha(cache.num_bs(), groups.size());
  for (int m = 0; m < groups.size(); ++m) {
    const auto& g = groups.groups[m];
    if (g.content < 0 || g.content >= cache.num_contents()) {
      throw std::invalid_argument("group content id outside the catalog");
    }
    for (int l = 0; l < cache.num_bs(); ++l) {
      alpha(l, m) = cache.cached(l, g.content) ? 0.0 : g.rate;
    }
  }
  return alpha;
}

}  // namespace ccran
