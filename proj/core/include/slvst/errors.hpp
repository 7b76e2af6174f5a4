#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slvst {

/// Failure categories. Each maps to a distinct CLI exit status.
enum class ErrorCategory {
  kConfigParse,       ///< malformed config text
  kConfigSchema,      ///< unknown / missing / mistyped key
  kValidation,        ///< parameter out of its domain
  kLaddersUndefined,  ///< ladder analysis requested at zero velocity
  kNoLadder,          ///< fewer than two ladder peaks resolved
  kDegenerate,        ///< band gap below tolerance where eigenvectors are needed
  kGridResolution,    ///< quadrature / lattice grid too coarse
  kInconsistent,      ///< slope-method trajectories disagree
  kAmbiguous,         ///< ladder tracking cannot decide between candidates
  kNumerical,         ///< solver failure or non-finite output
  kIo,                ///< file system errors
};

std::string_view category_name(ErrorCategory category);

/// Exit status used by the CLI for a given category (0 is reserved for success).
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace slvst
