#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrdm {

// Precondition violations. The CLI maps these to exit status 1.
class ContractError : public std::invalid_argument {
 public:
  ContractError(std::string name, const std::string& message);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Failures that arise during a computation. Exit status 2.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string name, const std::string& message);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

struct NormalizationError : ContractError {
  explicit NormalizationError(const std::string& m) : ContractError("normalization", m) {}
};
struct DimensionMismatch : ContractError {
  explicit DimensionMismatch(const std::string& m) : ContractError("dimension-mismatch", m) {}
};
struct DomainError : ContractError {
  explicit DomainError(const std::string& m) : ContractError("domain", m) {}
};
struct StepSizeError : ContractError {
  explicit StepSizeError(const std::string& m) : ContractError("step-size", m) {}
};
struct DegenerateOccupation : ContractError {
  explicit DegenerateOccupation(const std::string& m) : ContractError("degenerate-occupation", m) {}
};
struct SuperPlanckianError : ContractError {
  explicit SuperPlanckianError(const std::string& m) : ContractError("super-planckian", m) {}
};
struct NoSuchFrame : ContractError {
  explicit NoSuchFrame(const std::string& m) : ContractError("no-such-frame", m) {}
};
struct PhaseAmbiguity : NumericError {
  explicit PhaseAmbiguity(const std::string& m) : NumericError("phase-ambiguity", m) {}
};
struct InsufficientOverlap : NumericError {
  explicit InsufficientOverlap(const std::string& m) : NumericError("insufficient-overlap", m) {}
};

// Thrown when a stepped evolution produces a non-finite value.
class NumericFailure : public NumericError {
 public:
  NumericFailure(const std::string& m, std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace qrdm
