#pragma once

#include "sparseva/core.hpp"

namespace sparseva {

/// Lagrangian relaxation of the constrained program. Note the orientation:
/// the multiplier weights the LOSS, i.e. the objective is
/// ||theta||_1 + lambda * L(theta), so lambda -> infinity recovers the
/// least-squares estimate and lambda = 0 the zero vector.
struct LassoSubproblem {
    const RegressionProblem& problem;
    double lambda;
};

/// Quadratic loss L(theta) = ||y - phi^T theta||^2 / (2N).
double loss(const RegressionProblem& problem, const Vector& theta);

/// Gradient of the loss, -phi (y - phi^T theta) / N.
Vector gradient(const RegressionProblem& problem, const Vector& theta);

/// Unconstrained least-squares estimate via the normal equations.
Vector least_squares(const RegressionProblem& problem);

/// Minimizes ||theta||_1 + lambda * L(theta) by cyclic coordinate descent
/// with soft thresholding (fixed coordinate order, exact coordinate
/// minimization). Stops when both the duality gap and the max KKT violation
/// fall below solver_tol; throws ConvergenceError past max_iter sweeps.
Vector solve_lasso(const LassoSubproblem& sub, const SparsevaConfig& config = {});

/// Solves: minimize ||theta||_1 subject to
///   L(theta) <= L(theta_ls) * (1 + eps_N).
/// The loss of the Lagrangian minimizer is nonincreasing in lambda, so the
/// multiplier is located by bisection on lambda: the initial bracket grows
/// from 1/||grad L(0)||_inf by doubling until feasible, then bisects until
/// the feasible endpoint's loss matches the budget to solver_tol relative.
/// If the zero vector is already feasible it is returned with lambda = 0.
SparsevaSolution solve_sparseva(const RegressionProblem& problem, const SparsevaConfig& config);

/// Multiplier identity for a nonzero estimate: 1 / ||grad L(theta_hat)||_inf.
/// Errors when theta_hat is (numerically) zero, or when the value would
/// exceed 1e12 (gradient at the estimate vanishes).
double lagrange_multiplier(const RegressionProblem& problem, const SparsevaSolution& solution);

}  // namespace sparseva
