#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "sparseva/errors.hpp"

namespace sparseva {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Rule for the loss-inflation parameter eps_N of the norm-minimization
/// program: minimize ||theta||_1 subject to L(theta) <= L_ls * (1 + eps_N).
enum class EpsRule {
    Pec,       // n/N       (prediction error criterion)
    Aic,       // 2n/N
    Bic,       // n*log(N)/N, natural log
    Explicit,  // user-supplied positive value
};

std::string to_string(EpsRule rule);
EpsRule eps_rule_from_string(const std::string& s);

struct SparsevaConfig {
    EpsRule eps_rule = EpsRule::Pec;
    double explicit_eps = 0.0;  // only read when eps_rule == Explicit
    double solver_tol = 1e-8;
    int max_iter = 2000;
};

/// Resolves the configured rule to a concrete eps_N > 0.
double resolve_epsilon(const SparsevaConfig& config, int n, int N);

/// Batch linear-regression data: an n x N regressor matrix whose columns are
/// the regressors, and the length-N output vector. Construction checks the
/// persistent-excitation condition (phi*phi^T positive definite), so every
/// downstream solve on a constructed problem is well posed.
class RegressionProblem {
  public:
    RegressionProblem(Matrix phi, Vector y);

    const Matrix& phi() const { return phi_; }
    const Vector& y() const { return y_; }
    int n() const { return static_cast<int>(phi_.rows()); }
    int N() const { return static_cast<int>(phi_.cols()); }

  private:
    Matrix phi_;
    Vector y_;
};

/// Ground truth behind a synthetic problem: the true parameter, the output
/// noise variance, and a weak-sparsity certificate (q, r_q) with
/// sum_i |theta_i|^q <= r_q (q = 0 counts nonzeros, with 0^0 = 0).
class TrueModel {
  public:
    TrueModel(Vector theta_star, double sigma_e2, double q, double r_q);

    const Vector& theta_star() const { return theta_star_; }
    double sigma_e2() const { return sigma_e2_; }
    double q() const { return q_; }
    double r_q() const { return r_q_; }

  private:
    Vector theta_star_;
    double sigma_e2_;
    double q_;
    double r_q_;
};

/// Output of the constrained solve. loss_nr is the unconstrained
/// least-squares loss; when theta_hat != 0 the loss constraint is active and
/// lambda_eps is the multiplier located by the outer bisection.
struct SparsevaSolution {
    Vector theta_hat;
    double loss_at_solution = 0.0;
    double loss_nr = 0.0;
    double lambda_eps = 0.0;
    double eps_n = 0.0;
    int iterations = 0;
    bool constraint_active = false;
};

}  // namespace sparseva
