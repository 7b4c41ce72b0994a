#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccran/content.hpp"
#include "ccran/cost.hpp"
#include "ccran/netgen.hpp"
#include "ccran/optimizer.hpp"

namespace ccran {

enum class CachePolicy { kPopularity, kRandom, kNone };
enum class Mode { kMulticast, kUnicast };

const char* to_string(CachePolicy policy);
const char* to_string(Mode mode);

/// Physical and traffic parameters of one simulated network.
struct Scenario {
  int num_bs = 7;
  int antennas_per_bs = 3;
  int users_per_interval = 14;  // K
  int total_users = 140;
  int num_contents = 100;       // F
  double gamma_db = 10.0;
  double zipf_skew = 1.0;
  double common_fraction = 0.5;
  CommonContent common_content = CommonContent::kMostPopular;
  double radius_km = 1.2;
  double spacing_km = 0.8;
  double power_budget_w = 10.0;
  double antenna_gain_dbi = 10.0;
  double shadowing_db = 8.0;
  double noise_psd_dbm_hz = -172.0;
  double bandwidth_hz = 10e6;
  /// Required when num_bs has no built-in lattice.
  std::vector<Point> bs_positions;

  /// 7 BSs, 3 antennas, 14 of 140 users, 100 contents.
  static Scenario full();
  /// 3 BSs on a 0.8 km triangle inside a 0.5 km disk, 2 antennas, 6 of 60 users, 20 contents.
  static Scenario desk();

  double target_sinr() const;
  void validate() const;
};

struct SweepSpec {
  std::vector<double> etas{1.0};
  std::vector<int> cache_sizes{0};
  CachePolicy policy = CachePolicy::kPopularity;
  Mode mode = Mode::kMulticast;
  int intervals = 20;
  std::uint64_t seed = 1;
  Scenario scenario = Scenario::desk();
  DcConfig dc;
  int threads = 1;

  void validate() const;
};

/// Everything one scheduling interval produces; eta and cache size pick the
/// sweep cell.
struct IntervalResult {
  CostReport report;
  BeamformerSolution solution;
  RecoveryResult recovery;
  Eigen::MatrixXd alpha;
  GroupSet groups;
  std::vector<int> requests;
};

/// dc_solve, recovery and network cost for a prepared instance. The report
/// is marked infeasible, with a note, when any stage throws.
IntervalResult solve_instance(const QosInstance& instance, const Eigen::MatrixXd& alpha,
                              const DcConfig& cfg, std::uint64_t seed);

/// Scheduling -> requests -> groups -> weights -> DC -> recovery -> cost.
/// Infeasible or failed intervals come back with report.feasible == false.
IntervalResult solve_interval(const SweepSpec& spec, int interval, double eta,
                              int cache_size);
CostReport run_interval(const SweepSpec& spec, int interval, double eta, int cache_size);

/// QoS instance and cache for one interval, as run_interval builds them.
struct IntervalProblem {
  QosInstance instance;
  CachePlacement cache;
  std::vector<int> requests;
};
IntervalProblem build_interval(const SweepSpec& spec, int interval, int cache_size);

CachePlacement make_cache(const SweepSpec& spec, int cache_size);

struct SweepRow {
  double eta = 0.0;
  int cache_size = 0;
  CachePolicy policy = CachePolicy::kPopularity;
  Mode mode = Mode::kMulticast;
  double mean_power_dbm = 0.0;  // of the mean power in watts
  double mean_power_w = 0.0;
  double mean_backhaul = 0.0;
  double feasibility_rate = 0.0;
  int intervals = 0;
  int infeasible_count = 0;
};

/// One row per (cache size, eta) cell; means over feasible intervals.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// run_sweep with every user in its own group and deduplicated backhaul.
std::vector<SweepRow> unicast_baseline(SweepSpec spec);

inline constexpr const char* kCsvHeader =
    "eta,cache_size,policy,mode,mean_power_dbm,mean_power_w,mean_backhaul,"
    "feasibility_rate,intervals,infeasible_count";

void write_csv(std::ostream& out, std::span<const SweepRow> rows, bool header = true);

/// Linear interpolation of mean backhaul over mean power (dBm) along a
/// tradeoff curve. Returns NaN outside the curve's power range.
double backhaul_at_power(std::span<const SweepRow> curve, double power_dbm);

struct OracleResult {
  bool feasible = false;
  double cost = 0.0;
  double power = 0.0;
  std::vector<int> support;
};

/// Exhaustive search over BS supports for a single-group instance: each
/// support S gets a power-minimising SDP over the BSs in S, and the cost
/// eta*power + sum_{l in S} alpha(l).
OracleResult brute_force_oracle(const QosInstance& instance, const Eigen::VectorXd& alpha,
                                double eta, double tol = 1e-10);

/// Small single-group instance for oracle comparisons: Nt = 1, i.i.d.
/// CN(0,1) channels, unit noise, a random cache bit per BS and eta drawn
/// from {0.05, 0.2, 1}. Fully determined by seed.
struct TinyInstance {
  QosInstance instance;
  Eigen::VectorXd alpha;  // L weights
  double eta = 1.0;
};
TinyInstance tiny_instance(std::uint64_t seed, int num_bs = 3, int num_users = 2,
                           double gamma_db = 10.0);

}  // namespace ccran
