#pragma once

// Command dispatch shared by the CLI and the tests.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "slvst/config.hpp"

namespace slvst {

std::string_view version();

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  ///< overrides output.dir
  bool overlay_theory = false;                   ///< or-ed with output.overlay_theory
};

using SummaryValue = std::variant<bool, long long, double, std::string>;

struct RunResult {
  std::vector<std::pair<std::string, SummaryValue>> summary;
  std::vector<std::filesystem::path> files;  ///< written outputs, metadata last
  double wall_time_s = 0.0;

  /// nullptr when absent.
  const SummaryValue* find(std::string_view key) const;
};

/// Executes the configured command, writes its outputs and a metadata.json
/// record (resolved config, version, wall time, summary) into the output
/// directory. Module errors propagate as slvst::Error.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// "key=value" text of a summary value.
std::string summary_text(const SummaryValue& value);

}  // namespace slvst
