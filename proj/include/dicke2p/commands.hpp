#ifndef DICKE2P_COMMANDS_HPP
#define DICKE2P_COMMANDS_HPP

#include "dicke2p/run_config.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace dicke2p {

/// One output panel. Cells are preformatted so tables can mix labels and numbers.
struct Table
{
  std::string name;  ///< file suffix for multi-panel commands; empty for the main file
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct CommandResult
{
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;  ///< numerical-validity warnings; fatal under --strict
};

/// Runs a subcommand without touching the filesystem.
CommandResult run_command(const RunConfig& cfg);

/// Writes the panels (CSV with '#' header, or one JSON document) and the
/// `<out>.meta.json` sidecar. Returns the written paths, sidecar last.
std::vector<std::string> write_outputs(const RunConfig& cfg, const CommandResult& result, double wall_seconds);

/// Metadata record stored in the sidecar and in JSON output.
nlohmann::json metadata(const RunConfig& cfg, const CommandResult& result, double wall_seconds,
                        const std::vector<std::string>& files);

/// Compute, write and report. Returns the process exit code (0, or 3 when
/// --strict meets a warning); throws ConfigError for invalid settings.
int execute(const RunConfig& cfg, std::ostream& log);

/// Panel file name: `<stem>_<name><ext>` for named panels, `out` otherwise.
std::string panel_path(const std::string& out, const std::string& name);

const char* version_string();

}  // namespace dicke2p

#endif
