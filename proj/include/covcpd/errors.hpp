#pragma once

#include <stdexcept>
#include <string>

namespace covcpd {

// Violated precondition or index contract.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An iterative routine exhausted its iteration cap without converging.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data generation failure (e.g. a covariance that is not PSD).
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File parsing / format failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace covcpd
