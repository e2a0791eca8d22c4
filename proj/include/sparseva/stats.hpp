#pragma once

#include <cstdint>

#include "sparseva/core.hpp"

namespace sparseva {

struct ChiSquareQuantileQuery {
    double beta;  // upper-tail probability, in (0,1)
    int dof;      // degrees of freedom, >= 1
};

/// Regularized lower incomplete gamma P(a,x); series for x < a+1, continued
/// fraction otherwise. Accurate to ~1e-14 relative for a up to ~1e5.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi2_cdf(double x, double dof);

/// Density of the chi-square distribution with `dof` degrees of freedom.
double chi2_pdf(double x, double dof);

/// x such that P(X < x) = 1 - beta for X ~ chi2(dof).
double chi2_upper_quantile(const ChiSquareQuantileQuery& q);

/// x such that P(X < x) = alpha for X ~ chi2(dof).
double chi2_lower_quantile(double alpha, int dof);

/// Density of N(0, sigma2) at x.
double gaussian_pdf(double x, double sigma2);

/// n x N matrix whose columns are i.i.d. N(0, sigma) draws, generated as
/// chol(sigma) times standard normals. Column-major draw order, so the
/// output is a pure function of (n, N, sigma, seed).
Matrix sample_gaussian_matrix(int n, int N, const Matrix& sigma, std::uint64_t seed);

/// Same draw sequence as sample_gaussian_matrix but with the Cholesky factor
/// precomputed; used by callers that sample many matrices from one ensemble.
Matrix sample_gaussian_matrix_chol(const Matrix& chol_lower, int N, std::uint64_t seed);

}  // namespace sparseva
