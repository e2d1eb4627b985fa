#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace delaymid::cli {

enum class Command { design, roots, locus, verify, simulate, resonator };
enum class OutputFormat { json, csv, svg };

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Overrides the directory that default artifact paths are placed in.
inline constexpr const char* kOutputDirEnv = "DELAYMID_OUTPUT_DIR";

struct RunConfig {
  Command command = Command::design;
  // Flag name without dashes -> value text as given on the command line.
  std::map<std::string, std::string> parameters;
  OutputFormat output_format = OutputFormat::json;
  // Primary artifact. Empty: <$DELAYMID_OUTPUT_DIR or .>/<command>.<ext>.
  // "-": write the primary artifact to the output stream instead.
  std::filesystem::path output_path;
};

const char* to_string(Command c) noexcept;
const char* to_string(OutputFormat f) noexcept;

// Everything an invocation wrote, for callers that want to inspect it.
struct RunResult {
  int status = kExitOk;
  std::vector<std::filesystem::path> artifacts;
};

// Executes one command. Usage problems (missing or malformed parameters,
// unreadable inputs, unsupported formats) name the offending flag on err and
// give status 2. Library errors are written to err as
// {"error": <name>, "message": <what()>} with status 1, as is a refuted or
// inconclusive dominance check.
RunResult run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv with CLI11 into a RunConfig and runs it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delaymid::cli
