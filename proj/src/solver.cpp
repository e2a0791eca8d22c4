#include "sparseva/solver.hpp"

#include <cmath>
#include <limits>

namespace sparseva {

double loss(const RegressionProblem& problem, const Vector& theta) {
    return (problem.y() - problem.phi().transpose() * theta).squaredNorm() / (2.0 * problem.N());
}

Vector gradient(const RegressionProblem& problem, const Vector& theta) {
    return -(problem.phi() * (problem.y() - problem.phi().transpose() * theta)) / problem.N();
}

Vector least_squares(const RegressionProblem& problem) {
    const Matrix gram = problem.phi() * problem.phi().transpose();
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw RankError("least_squares: normal matrix factorization failed");
    return ldlt.solve(problem.phi() * problem.y());
}

namespace {

// Precomputed normal-equation data; every inner solve works on this instead
// of re-touching the N-sized data.
struct Gram {
    Matrix G;       // phi * phi^T
    Vector b;       // phi * y
    double y_sq;    // y^T y
    int N;
    double row_scale;  // max_j sum_k |G_jk|, for gradient roundoff estimates

    explicit Gram(const RegressionProblem& p)
        : G(p.phi() * p.phi().transpose()),
          b(p.phi() * p.y()),
          y_sq(p.y().squaredNorm()),
          N(p.N()),
          row_scale(G.cwiseAbs().rowwise().sum().maxCoeff()) {}
};

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

struct CdResult {
    bool converged = false;
    int sweeps = 0;
};

// Cyclic coordinate descent on ||theta||_1 + lambda * L(theta) in Gram form.
// Maintains q = G * theta incrementally. The stopping test combines the
// Fenchel duality gap of the equivalent penalized problem (penalty 1/lambda)
// with the max KKT violation; the KKT part pins the multiplier identity
// lambda = 1/||grad L||_inf to solver_tol for nonzero iterates.
CdResult lasso_gram(const Gram& gram, double lambda, double tol, int max_sweeps, Vector& theta) {
    const int n = static_cast<int>(gram.b.size());
    if (lambda <= 0.0) {
        theta.setZero(n);
        return {true, 0};
    }
    const double thresh = gram.N / lambda;
    if (theta.size() != n) theta.setZero(n);
    Vector q = gram.G * theta;

    CdResult res;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        ++res.sweeps;
        for (int j = 0; j < n; ++j) {
            const double gjj = gram.G(j, j);
            if (gjj <= 0.0) continue;
            const double c = gram.b(j) - q(j) + gjj * theta(j);
            const double next = soft_threshold(c, thresh) / gjj;
            const double delta = next - theta(j);
            if (delta != 0.0) {
                q += delta * gram.G.col(j);
                theta(j) = next;
            }
        }

        // refresh q to drop the drift of the incremental updates, then check
        // the KKT residual; the slack term is the achievable floating-point
        // resolution of lambda * grad L at this scale
        q.noalias() = gram.G * theta;
        const double fp_grad = std::numeric_limits<double>::epsilon() *
                               (gram.row_scale * theta.lpNorm<Eigen::Infinity>() +
                                gram.b.lpNorm<Eigen::Infinity>()) /
                               gram.N;
        const double kkt_tol = tol + 8.0 * lambda * fp_grad;
        double kkt = 0.0;
        double grad_inf = 0.0;
        for (int j = 0; j < n; ++j) {
            const double g = (q(j) - gram.b(j)) / gram.N;
            grad_inf = std::max(grad_inf, std::abs(g));
            const double v = theta(j) != 0.0
                                 ? std::abs(lambda * g + (theta(j) > 0.0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(lambda * g) - 1.0);
            kkt = std::max(kkt, v);
        }
        if (kkt > kkt_tol) continue;

        // duality gap of L(theta) + (1/lambda)||theta||_1
        const double bt = gram.b.dot(theta);
        const double r_sq = std::max(0.0, gram.y_sq - 2.0 * bt + theta.dot(q));
        const double primal = r_sq / (2.0 * gram.N) + theta.lpNorm<1>() / lambda;
        const double scale = grad_inf > 0.0 ? std::min(1.0, 1.0 / (lambda * grad_inf)) : 1.0;
        const double dual = scale * (gram.y_sq - bt) / gram.N - scale * scale * r_sq / (2.0 * gram.N);
        const double gap = std::max(0.0, primal - dual);
        if (gap <= tol * std::max(1.0, primal)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

namespace {

void check_solver_config(const SparsevaConfig& config) {
    if (!(config.solver_tol > 0.0))
        throw InvalidConfigError("solver config: solver_tol must be > 0");
    if (config.max_iter < 1) throw InvalidConfigError("solver config: max_iter must be >= 1");
}

}  // namespace

Vector solve_lasso(const LassoSubproblem& sub, const SparsevaConfig& config) {
    check_solver_config(config);
    if (sub.lambda < 0.0) throw InvalidConfigError("solve_lasso: lambda must be >= 0");
    const Gram gram(sub.problem);
    Vector theta = Vector::Zero(sub.problem.n());
    const CdResult res = lasso_gram(gram, sub.lambda, config.solver_tol, config.max_iter, theta);
    if (!res.converged)
        throw ConvergenceError("solve_lasso: coordinate descent exceeded max_iter sweeps",
                               to_std(theta));
    return theta;
}

SparsevaSolution solve_sparseva(const RegressionProblem& problem, const SparsevaConfig& config) {
    check_solver_config(config);
    const double eps = resolve_epsilon(config, problem.n(), problem.N());
    const double tol = config.solver_tol;
    const Gram gram(problem);

    Eigen::LDLT<Matrix> ldlt(gram.G);
    if (ldlt.info() != Eigen::Success)
        throw RankError("solve_sparseva: normal matrix factorization failed");
    const Vector theta_nr = ldlt.solve(gram.b);
    const double loss_nr = loss(problem, theta_nr);
    const double budget = loss_nr * (1.0 + eps);

    SparsevaSolution sol;
    sol.loss_nr = loss_nr;
    sol.eps_n = eps;

    const double loss_zero = gram.y_sq / (2.0 * gram.N);
    // absolute floor below which two losses are indistinguishable in floating
    // point; keeps the search terminating when loss_nr is (near) zero
    const double feas_slack = 64.0 * std::numeric_limits<double>::epsilon() * loss_zero;
    const double act_tol = tol * loss_nr + feas_slack;

    if (loss_zero <= budget * (1.0 + 1e-12) + feas_slack) {
        // the zero vector is feasible, hence optimal
        sol.theta_hat = Vector::Zero(problem.n());
        sol.loss_at_solution = loss_zero;
        sol.lambda_eps = 0.0;
        sol.constraint_active = budget - loss_zero <= act_tol;
        return sol;
    }

    const double grad0_inf = gram.b.lpNorm<Eigen::Infinity>() / gram.N;
    double lambda_hi = 1.0 / grad0_inf;
    double lambda_lo = 0.0;
    Vector theta = Vector::Zero(problem.n());
    int total_sweeps = 0;

    auto solve_at = [&](double lambda) -> double {
        const CdResult res = lasso_gram(gram, lambda, tol, config.max_iter, theta);
        total_sweeps += res.sweeps;
        if (!res.converged)
            throw ConvergenceError("solve_sparseva: inner solver exceeded max_iter sweeps",
                                   to_std(theta));
        return loss(problem, theta);
    };

    // grow the bracket until the loss constraint is met
    double loss_hi = solve_at(lambda_hi);
    int doublings = 0;
    while (loss_hi > budget + feas_slack) {
        lambda_lo = lambda_hi;
        lambda_hi *= 2.0;
        if (++doublings > 400)
            throw ConvergenceError("solve_sparseva: feasible multiplier bracket not found",
                                   to_std(theta));
        loss_hi = solve_at(lambda_hi);
    }
    Vector theta_hi = theta;

    // bisect; keep the feasible endpoint so the returned estimate never
    // violates the loss budget
    for (int it = 0; it < config.max_iter; ++it) {
        if (budget - loss_hi <= act_tol) break;
        if (lambda_hi - lambda_lo <= 1e-12 * lambda_hi) break;
        const double mid = 0.5 * (lambda_lo + lambda_hi);
        const double loss_mid = solve_at(mid);
        if (loss_mid <= budget + feas_slack) {
            lambda_hi = mid;
            loss_hi = loss_mid;
            theta_hi = theta;
        } else {
            lambda_lo = mid;
        }
    }

    sol.theta_hat = std::move(theta_hi);
    sol.loss_at_solution = loss_hi;
    sol.lambda_eps = lambda_hi;
    sol.iterations = total_sweeps;
    sol.constraint_active = budget - loss_hi <= act_tol;
    return sol;
}

double lagrange_multiplier(const RegressionProblem& problem, const SparsevaSolution& solution) {
    const double tol = 1e-8;
    if (solution.theta_hat.size() == 0 || solution.theta_hat.lpNorm<Eigen::Infinity>() < tol)
        throw DomainError("lagrange_multiplier: undefined for the zero estimate");
    const double grad_inf = gradient(problem, solution.theta_hat).lpNorm<Eigen::Infinity>();
    if (grad_inf < 1e-12)
        throw DomainError("lagrange_multiplier: gradient vanishes, multiplier exceeds 1e12");
    return 1.0 / grad_inf;
}

}  // namespace sparseva
