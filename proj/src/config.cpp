#include "ccran/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace ccran {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string canonical(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (v.empty() || ec != std::errc() || p != end) {
    throw ConfigError(dashed(key), "expected a number, got '" + v + "'");
  }
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (v.empty() || ec != std::errc() || p != end) {
    throw ConfigError(dashed(key), "expected an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(dashed(key), "expected true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(xs[i]);
    } else {
      s += std::to_string(xs[i]);
    }
  }
  return s;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CCRAN_DOUBLE(name, member)                                                   \
  Field{name, [](RunConfig& c, const std::string& k, const std::string& v) {          \
          c.member = to_double(k, v);                                                 \
        },                                                                            \
        [](const RunConfig& c) { return fmt(c.member); }}
#define CCRAN_INT(name, member)                                                      \
  Field{name, [](RunConfig& c, const std::string& k, const std::string& v) {          \
          c.member = to_int<int>(k, v);                                               \
        },                                                                            \
        [](const RunConfig& c) { return std::to_string(c.member); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"preset",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "full") {
                c.scenario = Scenario::full();
                c.intervals = 300;
                c.cache_sizes = {10};
              } else if (v == "desk") {
                c.scenario = Scenario::desk();
                c.intervals = 20;
                c.cache_sizes = {2};
              } else {
                throw ConfigError(dashed(k), "expected full or desk, got '" + v + "'");
              }
              c.preset = v;
            },
            [](const RunConfig& c) { return c.preset; }},
      CCRAN_INT("num_bs", scenario.num_bs),
      CCRAN_INT("antennas", scenario.antennas_per_bs),
      CCRAN_INT("users", scenario.users_per_interval),
      CCRAN_INT("total_users", scenario.total_users),
      CCRAN_INT("contents", scenario.num_contents),
      CCRAN_DOUBLE("gamma_db", scenario.gamma_db),
      CCRAN_DOUBLE("zipf_skew", scenario.zipf_skew),
      CCRAN_DOUBLE("common_fraction", scenario.common_fraction),
      Field{"common_content",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "zipf") {
                c.scenario.common_content = CommonContent::kZipfDraw;
              } else if (v == "most_popular") {
                c.scenario.common_content = CommonContent::kMostPopular;
              } else {
                throw ConfigError(dashed(k), "expected zipf or most_popular, got '" + v + "'");
              }
            },
            [](const RunConfig& c) {
              return std::string(c.scenario.common_content == CommonContent::kZipfDraw
                                     ? "zipf"
                                     : "most_popular");
            }},
      CCRAN_DOUBLE("radius", scenario.radius_km),
      CCRAN_DOUBLE("spacing", scenario.spacing_km),
      CCRAN_DOUBLE("power_budget", scenario.power_budget_w),
      CCRAN_DOUBLE("antenna_gain", scenario.antenna_gain_dbi),
      CCRAN_DOUBLE("shadowing_db", scenario.shadowing_db),
      CCRAN_DOUBLE("noise_psd", scenario.noise_psd_dbm_hz),
      CCRAN_DOUBLE("bandwidth", scenario.bandwidth_hz),
      Field{"bs_positions",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              std::vector<Point> pts;
              for (const auto& item : split(v, ';')) {
                const auto xy = split(item, ',');
                if (xy.size() != 2) throw ConfigError(dashed(k), "expected x,y;x,y;...");
                pts.push_back(Point{to_double(k, xy[0]), to_double(k, xy[1])});
              }
              c.scenario.bs_positions = std::move(pts);
            },
            [](const RunConfig& c) {
              std::string s;
              for (const auto& p : c.scenario.bs_positions) {
                if (!s.empty()) s += ';';
                s += fmt(p.x) + ',' + fmt(p.y);
              }
              return s;
            }},
      Field{"etas",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.etas.clear();
              for (const auto& t : split(v, ',')) c.etas.push_back(to_double(k, t));
            },
            [](const RunConfig& c) { return join(c.etas); }},
      Field{"cache_sizes",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.cache_sizes.clear();
              for (const auto& t : split(v, ',')) c.cache_sizes.push_back(to_int<int>(k, t));
            },
            [](const RunConfig& c) { return join(c.cache_sizes); }},
      Field{"policy",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "popularity") {
                c.policy = CachePolicy::kPopularity;
              } else if (v == "random") {
                c.policy = CachePolicy::kRandom;
              } else if (v == "none") {
                c.policy = CachePolicy::kNone;
              } else {
                throw ConfigError(dashed(k), "expected popularity, random or none");
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.policy)); }},
      Field{"mode",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "multicast") {
                c.mode = Mode::kMulticast;
              } else if (v == "unicast") {
                c.mode = Mode::kUnicast;
              } else {
                throw ConfigError(dashed(k), "expected multicast or unicast");
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
      CCRAN_INT("intervals", intervals),
      CCRAN_INT("interval", interval),
      Field{"seed",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.seed = to_int<std::uint64_t>(k, v);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      CCRAN_INT("threads", threads),
      Field{"smooth",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "log") {
                c.dc.smooth = SmoothKind::kLog;
              } else if (v == "exp") {
                c.dc.smooth = SmoothKind::kExp;
              } else if (v == "atan") {
                c.dc.smooth = SmoothKind::kAtan;
              } else {
                throw ConfigError(dashed(k), "expected log, exp or atan");
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.dc.smooth)); }},
      CCRAN_DOUBLE("epsilon", dc.epsilon),
      CCRAN_DOUBLE("rho", dc.rho),
      CCRAN_INT("max_iters", dc.max_iters),
      Field{"theta_rule",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              if (v == "gradient_max") {
                c.dc.theta_rule = ThetaRule::kGradientMax;
              } else if (v == "fixed") {
                c.dc.theta_rule = ThetaRule::kFixed;
              } else {
                throw ConfigError(dashed(k), "expected gradient_max or fixed");
              }
            },
            [](const RunConfig& c) { return std::string(to_string(c.dc.theta_rule)); }},
      CCRAN_DOUBLE("fixed_theta", dc.fixed_theta),
      Field{"normalize",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.dc.normalize = to_bool(k, v);
            },
            [](const RunConfig& c) { return std::string(c.dc.normalize ? "true" : "false"); }},
      Field{"polish",
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.dc.polish_supports = to_bool(k, v);
            },
            [](const RunConfig& c) {
              return std::string(c.dc.polish_supports ? "true" : "false");
            }},
      CCRAN_DOUBLE("rank_tol", dc.rank_tol),
      CCRAN_DOUBLE("cluster_threshold", dc.cluster_threshold),
      CCRAN_INT("randomizations", dc.n_randomizations),
      CCRAN_DOUBLE("solver_tol", dc.solver_tol),
      Field{"output",
            [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; },
            [](const RunConfig& c) { return c.output; }},
      CCRAN_INT("verbosity", verbosity),
  };
  return table;
}

#undef CCRAN_DOUBLE
#undef CCRAN_INT

}  // namespace

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec s;
  s.etas = etas;
  s.cache_sizes = cache_sizes;
  s.policy = policy;
  s.mode = mode;
  s.intervals = intervals;
  s.seed = seed;
  s.scenario = scenario;
  s.dc = dc;
  s.threads = threads;
  return s;
}

void RunConfig::validate() const {
  // Rephrase module errors with the flag spelling of the key.
  try {
    sweep_spec().validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const auto colon = msg.find(':');
    if (colon != std::string::npos) {
      throw ConfigError(dashed(msg.substr(0, colon)), trim(msg.substr(colon + 1)));
    }
    throw;
  }
  if (interval < 0) throw ConfigError("interval", "must be >= 0");
  if (verbosity < 0) throw ConfigError("verbosity", "must be >= 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = canonical(key);
  if (k == "eta") {
    // Single-value shorthand for etas.
    cfg.etas = {to_double(k, trim(value))};
    return;
  }
  for (const auto& f : fields()) {
    if (f.key == k) {
      f.set(cfg, k, trim(value));
      return;
    }
  }
  throw ConfigError(dashed(k), "unknown key");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = canonical(trim(line.substr(0, eq)));
    if (key != "eta" &&
        std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
      throw ConfigError(dashed(key), "unknown key");
    }
    pairs.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return pairs;
}

RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs) {
  RunConfig cfg;
  std::string preset;
  for (const auto* src : {&file_pairs, &flag_pairs}) {
    for (const auto& [k, v] : *src) {
      if (canonical(k) == "preset") preset = v;
    }
  }
  if (!preset.empty()) set_config_value(cfg, "preset", preset);
  for (const auto* src : {&file_pairs, &flag_pairs}) {
    for (const auto& [k, v] : *src) {
      if (canonical(k) != "preset") set_config_value(cfg, k, v);
    }
  }
  cfg.validate();
  return cfg;
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  for (const auto& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

std::string default_output_dir() {
  const char* dir = std::getenv("CCRAN_OUTPUT_DIR");
  return dir ? std::string(dir) : std::string();
}

}  // namespace ccran
