#include "dicke2p/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dicke2p {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Real parse_real(const std::string& key, const std::string& v)
{
  Real x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError("invalid number for '" + key + "': '" + v + "'");
  return x;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v)
{
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid non-negative integer for '" + key + "': '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v)
{
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + v + "'");
}

std::vector<Real> parse_list(const std::string& key, const std::string& v)
{
  std::vector<Real> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_real(key, trim(item)));
  if (out.empty())
    throw ConfigError("empty list for '" + key + "'");
  return out;
}

std::string default_out(const std::string& command, OutputFormat format)
{
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), '-', '_');
  return stem + (format == OutputFormat::json ? ".json" : ".csv");
}

}  // namespace

const std::vector<std::string>& command_names()
{
  static const std::vector<std::string> names{"fidelity-scan", "rabi", "wigner", "ghz", "bell", "bell-timing"};
  return names;
}

std::string format_real(Real x)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

RunConfig defaults_for(const std::string& command)
{
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("unknown subcommand '" + command + "'");
  RunConfig c;
  c.command = command;
  c.nbar = {50.0};
  if (command == "fidelity-scan") {
    c.nbar = {20.0, 50.0, 100.0};
    c.engine = Engine::full;
  } else if (command == "wigner") {
    c.phi = 2.0 * kPi / 3.0;
  } else if (command == "ghz") {
    c.nbar = {10.0, 20.0, 50.0, 100.0};
    c.phi = kPi / 4.0;
  }
  c.out = default_out(command, c.format);
  return c;
}

KeyValues parse_key_values(const std::string& text)
{
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply(RunConfig& c, const KeyValues& kv)
{
  bool out_given = false;
  for (const auto& [key, v] : kv) {
    if (key == "command") {
      if (v != c.command)
        throw ConfigError("config is for subcommand '" + v + "', not '" + c.command + "'");
    } else if (key == "nbar") {
      c.nbar = parse_list(key, v);
    } else if (key == "phi") {
      if (v.empty() || v == "random")
        c.phi.reset();
      else
        c.phi = parse_real(key, v);
    } else if (key == "g") {
      c.g = parse_real(key, v);
    } else if (key == "gg") {
      c.gg = parse_real(key, v);
    } else if (key == "ge") {
      c.ge = parse_real(key, v);
    } else if (key == "delta") {
      c.delta = parse_real(key, v);
    } else if (key == "engine") {
      try {
        c.engine = parse_engine(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "ensemble") {
      c.ensemble = static_cast<std::size_t>(parse_unsigned(key, v));
    } else if (key == "seed") {
      c.seed = parse_unsigned(key, v);
    } else if (key == "out") {
      c.out = v;
      out_given = true;
    } else if (key == "format") {
      if (v == "csv")
        c.format = OutputFormat::csv;
      else if (v == "json")
        c.format = OutputFormat::json;
      else
        throw ConfigError("format must be csv or json, got '" + v + "'");
    } else if (key == "efficiency") {
      if (v.empty() || v == "none")
        c.efficiency.reset();
      else
        c.efficiency = parse_real(key, v);
    } else if (key == "lo-phase") {
      c.lo_phase = parse_real(key, v);
    } else if (key == "strict") {
      c.strict = parse_bool(key, v);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!out_given && kv.count("format") && c.out == default_out(c.command, OutputFormat::csv))
    c.out = default_out(c.command, c.format);
}

void validate(const RunConfig& c)
{
  defaults_for(c.command);
  for (Real n : c.nbar)
    if (!(n > 0.0))
      throw ConfigError("nbar must be positive");
  const bool single = c.command == "rabi" || c.command == "wigner" || c.command == "bell-timing";
  if (single && c.nbar.size() != 1)
    throw ConfigError(c.command + " takes a single nbar value");
  if (c.g == 0.0)
    throw ConfigError("g must be nonzero");
  if (!(c.gg > 0.0) || !(c.ge > 0.0) || !(c.delta > 0.0))
    throw ConfigError("gg, ge and delta must be positive");
  if (c.ensemble < 1)
    throw ConfigError("ensemble must be at least 1");
  if (c.efficiency && (!(*c.efficiency > 0.0) || *c.efficiency > 1.0))
    throw ConfigError("efficiency must lie in (0, 1]");
  if (c.out.empty())
    throw ConfigError("out must not be empty");
}

std::string emit(const RunConfig& c)
{
  std::ostringstream os;
  os << "command = " << c.command << '\n';
  os << "nbar = ";
  for (std::size_t k = 0; k < c.nbar.size(); ++k)
    os << (k ? "," : "") << format_real(c.nbar[k]);
  os << '\n';
  os << "phi = " << (c.phi ? format_real(*c.phi) : std::string("random")) << '\n';
  os << "g = " << format_real(c.g) << '\n';
  os << "gg = " << format_real(c.gg) << '\n';
  os << "ge = " << format_real(c.ge) << '\n';
  os << "delta = " << format_real(c.delta) << '\n';
  os << "engine = " << engine_name(c.engine) << '\n';
  os << "ensemble = " << c.ensemble << '\n';
  os << "seed = " << c.seed << '\n';
  os << "out = " << c.out << '\n';
  os << "format = " << (c.format == OutputFormat::json ? "json" : "csv") << '\n';
  os << "efficiency = " << (c.efficiency ? format_real(*c.efficiency) : std::string("none")) << '\n';
  os << "lo-phase = " << format_real(c.lo_phase) << '\n';
  os << "strict = " << (c.strict ? "true" : "false") << '\n';
  return os.str();
}

RunConfig parse_config(const std::string& text)
{
  const KeyValues kv = parse_key_values(text);
  const auto it = kv.find("command");
  if (it == kv.end())
    throw ConfigError("config text has no 'command' key");
  RunConfig c = defaults_for(it->second);
  apply(c, kv);
  return c;
}

RunConfig resolve(const std::string& command, const KeyValues& file, const KeyValues& flags)
{
  RunConfig c = defaults_for(command);
  apply(c, file);
  apply(c, flags);
  validate(c);
  return c;
}

}  // namespace dicke2p
