#include "flexsim/error.hpp"

namespace flexsim {

std::string format_issues(const Issues& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.path + ": " + issue.message;
  }
  return out;
}

ValidationError::ValidationError(Issues issues)
    : std::invalid_argument(format_issues(issues)), issues_(std::move(issues)) {
  if (issues_.empty()) issues_.push_back({"", "validation failed"});
}

}  // namespace flexsim
