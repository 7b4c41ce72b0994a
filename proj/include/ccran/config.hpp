#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccran/experiments.hpp"

namespace ccran {

/// Everything a CLI invocation needs. Defaults follow the published
/// simulation setup; `preset=desk` swaps in the small scenario.
struct RunConfig {
  Scenario scenario = Scenario::full();
  DcConfig dc;
  std::vector<double> etas{1.0};
  std::vector<int> cache_sizes{10};
  CachePolicy policy = CachePolicy::kPopularity;
  Mode mode = Mode::kMulticast;
  int intervals = 300;
  int interval = 0;  // used by run and dump-problem
  std::uint64_t seed = 1;
  int threads = 1;
  std::string preset = "full";
  std::string output;  // empty: stdout
  int verbosity = 0;

  SweepSpec sweep_spec() const;
  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Raised for malformed input; key() is the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Keys in file form (underscores). Flags use the same names with dashes.
const std::vector<std::string>& config_keys();

/// Apply one key=value pair. Key may use dashes or underscores; `eta` is
/// shorthand for a one-element `etas`.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parse "key = value" lines; '#' starts a comment. Returns pairs in order.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in);

/// Resolve a config from an optional file and flag pairs (flags win).
/// `preset` is applied before anything else from either source.
RunConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_pairs,
                         const std::vector<std::pair<std::string, std::string>>& flag_pairs);

/// Complete config as key=value lines; parse_config_text reads it back.
void write_config(std::ostream& out, const RunConfig& cfg);

/// Default output directory from CCRAN_OUTPUT_DIR, or empty.
std::string default_output_dir();

/// Full CLI entry point: argv without the program name. Returns exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccran
