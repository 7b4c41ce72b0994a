#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccran {

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct NetworkLayout {
  std::vector<Point> bs_positions;
  double radius_km = 0.0;
  int antennas_per_bs = 1;
  std::vector<double> power_budget_w;  // one entry per BS
  double antenna_gain_dbi = 0.0;

  int num_bs() const { return static_cast<int>(bs_positions.size()); }
  int dim() const { return num_bs() * antennas_per_bs; }

  /// Throws std::invalid_argument when a layout invariant is broken.
  void validate() const;
};

struct LayoutOptions {
  int antennas_per_bs = 3;
  double power_budget_w = 10.0;
  double antenna_gain_dbi = 10.0;
  /// When nonempty, used verbatim instead of the built-in lattice.
  std::vector<Point> explicit_positions;
};

/// BS layout. L=1 is a single BS at the origin, L=7 is the centre plus a
/// hexagonal ring of radius `spacing_km`. Any other L needs explicit
/// positions. The lattice is deterministic, `seed` is accepted so callers
/// can treat all generators uniformly.
NetworkLayout generate_layout(int num_bs, double radius_km, double spacing_km,
                              std::uint64_t seed,
                              const LayoutOptions& options = {});

/// Reads `x_km y_km` pairs, one per line. Blank lines and `#` comments are
/// skipped.
std::vector<Point> read_positions(std::istream& in);
std::vector<Point> read_positions_file(const std::string& path);

/// n users i.i.d. uniform over the coverage disk.
std::vector<Point> place_users(const NetworkLayout& layout, int n,
                               std::uint64_t seed);

/// 148.1 + 37.6 log10(d), d in km. Throws std::domain_error for d <= 0.
double pathloss_db(double d_km);

/// Noise power in watts from a PSD in dBm/Hz and a bandwidth in Hz.
double noise_power(double psd_dbm_hz, double bandwidth_hz);

struct ChannelOptions {
  double shadowing_std_db = 8.0;
  /// false replaces the CN(0,1) fading coefficient with exactly 1.
  bool rayleigh = true;
  double noise_psd_dbm_hz = -172.0;
  double bandwidth_hz = 10e6;
  /// Distances below this are clamped (km).
  double min_distance_km = 1e-3;
};

struct ChannelRealization {
  std::vector<Eigen::VectorXcd> h;  // network-wide channel per user
  std::vector<Eigen::MatrixXcd> H;  // h h^H
  double noise_power = 0.0;         // watts

  int num_users() const { return static_cast<int>(h.size()); }
  int dim() const { return h.empty() ? 0 : static_cast<int>(h.front().size()); }
};

/// Per user k and BS l the amplitude 10^((-PL - X + G)/20) multiplies N_t
/// i.i.d. CN(0,1) entries; X ~ N(0, shadowing_std_db) per link.
ChannelRealization generate_channels(const NetworkLayout& layout,
                                     std::span<const Point> users,
                                     std::uint64_t seed,
                                     const ChannelOptions& options = {});

/// Builds a realization from explicit channel vectors.
ChannelRealization make_channels(std::vector<Eigen::VectorXcd> h,
                                 double noise_power);

}  // namespace ccran
