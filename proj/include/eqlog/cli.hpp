#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace eqlog::cli {

enum class Mode { Tabled, Untabled, Both };

struct RunConfig {
  std::string program_path;
  std::optional<std::string> goal;
  Mode mode = Mode::Tabled;
  std::uint64_t max_steps = 100000;
  bool dont_reduce = true;
  bool never_add = true;
  bool prune_rules = true;
  bool json = false;
  bool trace = false;
  bool stats = false;
  std::optional<std::string> dot_path;
};

// Exit codes.
inline constexpr int kExitNormalForm = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoFiniteNormalForm = 2;
inline constexpr int kExitStepLimit = 3;

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_normalize(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line and dispatches. `EQLOG_MAX_STEPS`, when set,
/// replaces the default step budget; an explicit --max-steps still wins.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eqlog::cli
