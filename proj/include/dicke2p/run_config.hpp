#ifndef DICKE2P_RUN_CONFIG_HPP
#define DICKE2P_RUN_CONFIG_HPP

#include "dicke2p/dynamics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dicke2p {

/// Invalid user input; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

const std::vector<std::string>& command_names();

/// Settings of one CLI run. Keys of the flat text form match the long flag
/// names: command, nbar, phi, g, gg, ge, delta, engine, ensemble, seed, out,
/// format, efficiency, lo-phase, strict.
struct RunConfig
{
  std::string command;
  std::vector<Real> nbar;
  std::optional<Real> phi;         ///< unset: drawn per sample (bell) or 0
  Real g = 1.0;
  Real gg = 1.0;
  Real ge = 1.0;
  Real delta = 500.0;
  Engine engine = Engine::effective;
  std::size_t ensemble = 100;
  std::uint64_t seed = 1;
  std::string out;
  OutputFormat format = OutputFormat::csv;
  std::optional<Real> efficiency;  ///< set: homodyne detection
  Real lo_phase = 0.0;             ///< local-oscillator offset from the field phase
  bool strict = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using KeyValues = std::map<std::string, std::string>;

/// Built-in defaults of a subcommand.
RunConfig defaults_for(const std::string& command);

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::string& path);

/// Overwrites the fields named in `kv`; unknown keys and bad values throw ConfigError.
void apply(RunConfig& cfg, const KeyValues& kv);

/// Checks ranges and cross-field constraints.
void validate(const RunConfig& cfg);

/// Flat text form. parse_config(emit(c)) == c.
std::string emit(const RunConfig& cfg);
/// Defaults of the `command` key, then the remaining keys.
RunConfig parse_config(const std::string& text);

/// Defaults < config file < flags.
RunConfig resolve(const std::string& command, const KeyValues& file, const KeyValues& flags);

/// Shortest decimal that parses back to the same double.
std::string format_real(Real x);

}  // namespace dicke2p

#endif
