#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ccran {

// Content ids are 0-based in code and follow popularity rank: id 0 is the
// most popular content ("content 1" in user-facing docs).

/// p_f proportional to (f+1)^-skew, f = 0..F-1.
std::vector<double> zipf_pmf(int num_contents, double skew);

struct Catalog {
  std::vector<double> popularity;

  static Catalog zipf(int num_contents, double skew) {
    return Catalog{zipf_pmf(num_contents, skew)};
  }
  int size() const { return static_cast<int>(popularity.size()); }
};

class CachePlacement {
 public:
  CachePlacement() = default;
  CachePlacement(int num_bs, int num_contents, std::vector<int> budgets);

  int num_bs() const { return num_bs_; }
  int num_contents() const { return num_contents_; }
  const std::vector<int>& budgets() const { return budgets_; }

  bool cached(int bs, int content) const {
    return bits_[static_cast<std::size_t>(bs) * num_contents_ + content] != 0;
  }
  void set(int bs, int content, bool value);
  int row_count(int bs) const;

  /// Throws std::invalid_argument if a row exceeds its budget.
  void validate() const;

  friend bool operator==(const CachePlacement&, const CachePlacement&) = default;

 private:
  int num_bs_ = 0;
  int num_contents_ = 0;
  std::vector<int> budgets_;
  std::vector<std::uint8_t> bits_;
};

/// Each BS stores its F_l most popular contents (ties to the lower id).
CachePlacement popularity_aware_cache(const Catalog& catalog,
                                      std::span<const int> budgets);

/// Each BS stores a uniform random F_l-subset, independently across BSs.
CachePlacement random_cache(const Catalog& catalog, std::span<const int> budgets,
                            std::uint64_t seed);

/// No cache at all (every budget zero).
CachePlacement empty_cache(int num_bs, int num_contents);

/// Text format: header `L F`, then L rows of F space-separated 0/1 digits.
void write_cache(std::ostream& out, const CachePlacement& cache);
/// Budgets are taken as the row counts of the file.
CachePlacement read_cache(std::istream& in);

/// K consecutive user ids starting at (interval*K mod total), wrapping.
std::vector<int> round_robin_schedule(int total_users, int K, int interval);

enum class CommonContent {
  kZipfDraw,     // shared content drawn once from the popularity pmf
  kMostPopular,  // shared content is always id 0
};

/// ceil(common_fraction*K) users share one content; the rest draw i.i.d.
/// from the popularity pmf.
std::vector<int> draw_requests(int K, double common_fraction,
                               const Catalog& catalog, std::uint64_t seed,
                               CommonContent common = CommonContent::kZipfDraw);

struct MulticastGroup {
  int content = 0;
  std::vector<int> users;  // indices into the scheduled-user list
  double target_sinr = 0.0;  // linear
  double rate = 0.0;         // log2(1 + target_sinr)
};

struct GroupSet {
  std::vector<MulticastGroup> groups;

  int size() const { return static_cast<int>(groups.size()); }
  int num_users() const;
  /// Group index of each user 0..num_users()-1.
  std::vector<int> group_of_user() const;

  /// Partition and rate invariants. Multicast sets additionally require
  /// distinct contents across groups.
  void validate(bool distinct_contents = true) const;
};

/// One group per distinct content, ordered by content id.
GroupSet form_groups(std::span<const int> requests, double target_sinr);

/// One singleton group per user (unicast transmission); contents may repeat.
GroupSet form_unicast_groups(std::span<const int> requests, double target_sinr);

/// alpha(l, m) = R_m (1 - c_{l, f_m}).
Eigen::MatrixXd coupling_weights(const CachePlacement& cache, const GroupSet& groups);

}  // namespace ccran
