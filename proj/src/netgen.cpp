#include "ccran/netgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ccran/rng.hpp"

namespace ccran {

void NetworkLayout::validate() const {
  if (bs_positions.empty()) {
    throw std::invalid_argument("layout needs at least one BS");
  }
  if (antennas_per_bs < 1) {
    throw std::invalid_argument("antennas_per_bs must be >= 1");
  }
  if (power_budget_w.size() != bs_positions.size()) {
    throw std::invalid_argument("one power budget per BS required");
  }
  for (double p : power_budget_w) {
    if (!(p > 0.0)) throw std::invalid_argument("power budget must be > 0");
  }
  for (const auto& pos : bs_positions) {
    if (std::hypot(pos.x, pos.y) > radius_km * (1.0 + 1e-12)) {
      throw std::invalid_argument("BS position outside the coverage disk");
    }
  }
}

NetworkLayout generate_layout(int num_bs, double radius_km, double spacing_km,
                              std::uint64_t /*seed*/,
                              const LayoutOptions& options) {
  NetworkLayout layout;
  layout.radius_km = radius_km;
  layout.antennas_per_bs = options.antennas_per_bs;
  layout.antenna_gain_dbi = options.antenna_gain_dbi;

  if (!options.explicit_positions.empty()) {
    if (static_cast<int>(options.explicit_positions.size()) != num_bs) {
      throw std::invalid_argument(
          "explicit BS positions do not match the number of BSs");
    }
    layout.bs_positions = options.explicit_positions;
  } else if (num_bs == 1) {
    layout.bs_positions = {Point{0.0, 0.0}};
  } else if (num_bs == 7) {
    layout.bs_positions.push_back(Point{0.0, 0.0});
    for (int i = 0; i < 6; ++i) {
      const double angle = i * std::numbers::pi / 3.0;
      layout.bs_positions.push_back(
          Point{spacing_km * std::cos(angle), spacing_km * std::sin(angle)});
    }
  } else {
    throw std::invalid_argument(
        "no built-in lattice for L=" + std::to_string(num_bs) +
        "; supply explicit BS positions");
  }
  layout.power_budget_w.assign(layout.bs_positions.size(),
                               options.power_budget_w);
  layout.validate();
  return layout;
}

std::vector<Point> read_positions(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Point p;
    if (!(fields >> p.x)) continue;  // blank line
    std::string extra;
    if (!(fields >> p.y) || (fields >> extra)) {
      throw std::runtime_error("malformed position on line " +
                               std::to_string(line_no));
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Point> read_positions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file " + path);
  return read_positions(in);
}

std::vector<Point> place_users(const NetworkLayout& layout, int n,
                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one user");
  Rng rng = make_rng(seed, Stream::kUsers);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> users;
  users.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = layout.radius_km * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    users.push_back(Point{r * std::cos(phi), r * std::sin(phi)});
  }
  return users;
}

double pathloss_db(double d_km) {
  if (!(d_km > 0.0)) throw std::domain_error("path loss needs d > 0");
  return 148.1 + 37.6 * std::log10(d_km);
}

double noise_power(double psd_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  const double dbm = psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

ChannelRealization generate_channels(const NetworkLayout& layout,
                                     std::span<const Point> users,
                                     std::uint64_t seed,
                                     const ChannelOptions& options) {
  if (users.empty()) throw std::invalid_argument("no users to generate channels for");
  layout.validate();
  const int L = layout.num_bs();
  const int Nt = layout.antennas_per_bs;

  // Separate streams so toggling fading does not change the shadowing draws.
  Rng shadow_rng = make_rng(seed, Stream::kShadowing);
  Rng fading_rng = make_rng(seed, Stream::kFading);
  std::normal_distribution<double> shadow(0.0, options.shadowing_std_db);
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));

  std::vector<Eigen::VectorXcd> h;
  h.reserve(users.size());
  for (const auto& user : users) {
    Eigen::VectorXcd hk(L * Nt);
    for (int l = 0; l < L; ++l) {
      const double d =
          std::max(distance(user, layout.bs_positions[l]), options.min_distance_km);
      const double x = options.shadowing_std_db > 0.0 ? shadow(shadow_rng) : 0.0;
      const double amplitude =
          std::pow(10.0, (-pathloss_db(d) - x + layout.antenna_gain_dbi) / 20.0);
      for (int a = 0; a < Nt; ++a) {
        std::complex<double> fade(1.0, 0.0);
        if (options.rayleigh) {
          const double re = component(fading_rng);
          const double im = component(fading_rng);
          fade = {re, im};
        }
        hk(l * Nt + a) = amplitude * fade;
      }
    }
    h.push_back(std::move(hk));
  }
  return make_channels(std::move(h),
                       noise_power(options.noise_psd_dbm_hz, options.bandwidth_hz));
}

ChannelRealization make_channels(std::vector<Eigen::VectorXcd> h,
                                 double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be > 0");
  ChannelRealization out;
  out.noise_power = noise_power;
  out.H.reserve(h.size());
  for (const auto& hk : h) out.H.push_back(hk * hk.adjoint());
  out.h = std::move(h);
  return out;
}

}  // namespace ccran
