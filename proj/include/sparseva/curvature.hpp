#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sparseva/core.hpp"

namespace sparseva {

/// Monte Carlo estimate of the ensemble curvature: w_min is the empirical
/// alpha-quantile of the smallest eigenvalue of (1/N) phi phi^T over
/// regressor matrices with i.i.d. N(0, sigma) columns, and
/// kappa_alpha = w_min / 2.
struct CurvatureEstimate {
    double kappa_alpha = 0.0;
    double w_min = 0.0;
    double alpha = 0.0;
    int trials = 0;
    int n = 0;
    int N = 0;
    std::uint64_t seed = 0;
    std::string sigma_digest;
};

/// Smallest eigenvalue of a symmetric matrix (tridiagonalization + implicit
/// QL, via Eigen's selfadjoint solver).
double smallest_eigenvalue(const Matrix& m);

/// Order-independent content hash of a matrix (dims + row-major doubles).
std::string sigma_digest(const Matrix& sigma);

/// Runs `trials` independent draws (trial k uses the stream derived from
/// (seed, k), so the result does not depend on job count), takes the lower
/// empirical alpha-quantile (order statistic ceil(alpha * trials)) of the
/// smallest eigenvalues, and halves it. Requires trials >= 1000.
CurvatureEstimate estimate_kappa_alpha(const Matrix& sigma, int n, int N, double alpha, int trials,
                                       std::uint64_t seed, int jobs = 0);

/// File cache for curvature estimates, keyed by every field of the estimate.
std::optional<CurvatureEstimate> curvature_cache_lookup(const std::string& path,
                                                        const std::string& digest, int n, int N,
                                                        double alpha, int trials,
                                                        std::uint64_t seed);
void curvature_cache_append(const std::string& path, const CurvatureEstimate& est);

}  // namespace sparseva
