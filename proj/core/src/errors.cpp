#include "slvst/errors.hpp"

namespace slvst {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfigParse: return "config-parse";
    case ErrorCategory::kConfigSchema: return "config-schema";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kLaddersUndefined: return "ladders-undefined";
    case ErrorCategory::kNoLadder: return "no-ladder-resolved";
    case ErrorCategory::kDegenerate: return "degenerate-point";
    case ErrorCategory::kGridResolution: return "grid-resolution";
    case ErrorCategory::kInconsistent: return "inconsistent-trajectories";
    case ErrorCategory::kAmbiguous: return "tracking-ambiguity";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfigParse: return 2;
    case ErrorCategory::kConfigSchema: return 3;
    case ErrorCategory::kValidation: return 4;
    case ErrorCategory::kLaddersUndefined: return 5;
    case ErrorCategory::kNoLadder: return 6;
    case ErrorCategory::kDegenerate: return 7;
    case ErrorCategory::kGridResolution: return 8;
    case ErrorCategory::kInconsistent: return 9;
    case ErrorCategory::kAmbiguous: return 10;
    case ErrorCategory::kNumerical: return 11;
    case ErrorCategory::kIo: return 12;
  }
  return 1;
}

}  // namespace slvst
