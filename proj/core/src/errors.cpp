#include "qrdm/errors.hpp"

#include <utility>

namespace qrdm {

ContractError::ContractError(std::string name, const std::string& message)
    : std::invalid_argument(name + ": " + message), name_(std::move(name)) {}

NumericError::NumericError(std::string name, const std::string& message)
    : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

NumericFailure::NumericFailure(const std::string& m, std::size_t step)
    : NumericError("numeric-failure", m + " at step " + std::to_string(step)), step_(step) {}

}  // namespace qrdm
