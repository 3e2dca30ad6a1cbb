#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flexsim {

/// One constraint violation, addressed by a dotted key path ("mesh.n_space").
struct Issue {
  std::string path;
  std::string message;
};

using Issues = std::vector<Issue>;

/// Thrown when a value object violates its invariants.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(Issues issues);
  ValidationError(std::string field, const std::string& message)
      : ValidationError(Issues{{std::move(field), message}}) {}

  const Issues& issues() const noexcept { return issues_; }
  /// Path of the first offending field.
  const std::string& field() const noexcept { return issues_.front().path; }

 private:
  Issues issues_;
};

std::string format_issues(const Issues& issues);

}  // namespace flexsim
