#pragma once

#include <stdexcept>
#include <string>

namespace nullrad {

// All library failures derive from Error and carry a stable category
// string that the CLI maps to exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message),
        category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

private:
  std::string category_;
};

struct ResolutionError : Error {
  explicit ResolutionError(const std::string& m) : Error("resolution", m) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string& m) : Error("range", m) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

struct NonMeanFreeSourceError : Error {
  explicit NonMeanFreeSourceError(const std::string& m)
      : Error("non-mean-free-source", m) {}
};

struct NonElectricSourceError : Error {
  explicit NonElectricSourceError(const std::string& m)
      : Error("non-electric-source", m) {}
};

struct KernelObstructionError : Error {
  explicit KernelObstructionError(const std::string& m)
      : Error("kernel-obstruction", m) {}
};

struct GridCollisionError : Error {
  explicit GridCollisionError(const std::string& m)
      : Error("grid-collision", m) {}
};

struct AbsentFieldError : Error {
  explicit AbsentFieldError(const std::string& m) : Error("absent-field", m) {}
};

struct IntegratorError : Error {
  explicit IntegratorError(const std::string& m) : Error("integrator", m) {}
};

struct LoadError : Error {
  explicit LoadError(const std::string& m) : Error("load", m) {}
};

struct SpecError : Error {
  explicit SpecError(const std::string& m) : Error("spec", m) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error("internal", m) {}
};

}  // namespace nullrad
