#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sparseva {

// Bad user-supplied configuration (rules, sizes, tolerances).
struct InvalidConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Rank-deficient or otherwise numerically unusable data.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative routine hit its iteration cap. Carries the best iterate seen.
struct ConvergenceError : std::runtime_error {
    std::vector<double> best_iterate;

    ConvergenceError(const std::string& what, std::vector<double> best)
        : std::runtime_error(what), best_iterate(std::move(best)) {}
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sparseva
