#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int {
  kSuccess = 0,
  kNotFound = 1,
  kInvalidInput = 2,
  kResourceCap = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ExitCode::kInvalidInput, what) {}
};

/// A resolution or product-space size above the configured cap.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ExitCode::kResourceCap, what) {}
};

/// A neighborhood U_m was tested at a resolution coarser than m.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ExitCode::kInvalidInput, what) {}
};

/// A construction ran and failed to produce its object; carries a reason tag.
class ConstructionFailure : public Error {
 public:
  ConstructionFailure(std::string kind, const std::string& what)
      : Error(ExitCode::kNotFound, what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace dyadic
