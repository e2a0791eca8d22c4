#include "sparseva/core.hpp"

#include <cmath>

namespace sparseva {

std::string to_string(EpsRule rule) {
    switch (rule) {
        case EpsRule::Pec: return "pec";
        case EpsRule::Aic: return "aic";
        case EpsRule::Bic: return "bic";
        case EpsRule::Explicit: return "explicit";
    }
    return "?";
}

EpsRule eps_rule_from_string(const std::string& s) {
    if (s == "pec") return EpsRule::Pec;
    if (s == "aic") return EpsRule::Aic;
    if (s == "bic") return EpsRule::Bic;
    if (s == "explicit") return EpsRule::Explicit;
    throw InvalidConfigError("unknown eps rule: " + s);
}

double resolve_epsilon(const SparsevaConfig& config, int n, int N) {
    if (n < 1 || N < 1) throw InvalidConfigError("resolve_epsilon: need n >= 1 and N >= 1");
    switch (config.eps_rule) {
        case EpsRule::Pec: return static_cast<double>(n) / N;
        case EpsRule::Aic: return 2.0 * n / N;
        case EpsRule::Bic: return n * std::log(static_cast<double>(N)) / N;
        case EpsRule::Explicit:
            if (!(config.explicit_eps > 0.0))
                throw InvalidConfigError("resolve_epsilon: explicit eps must be > 0");
            return config.explicit_eps;
    }
    throw InvalidConfigError("resolve_epsilon: bad rule");
}

RegressionProblem::RegressionProblem(Matrix phi, Vector y) : phi_(std::move(phi)), y_(std::move(y)) {
    const auto n = phi_.rows();
    const auto N = phi_.cols();
    if (n < 1 || N < 1) throw InvalidConfigError("RegressionProblem: empty data");
    if (y_.size() != N) throw InvalidConfigError("RegressionProblem: y length must match column count");
    if (N < n) throw RankError("RegressionProblem: fewer samples than parameters");

    const Matrix gram = phi_ * phi_.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    // scale-invariant rank test
    if (!(lo > 1e-10 * hi)) throw RankError("RegressionProblem: phi*phi^T is not positive definite");
}

TrueModel::TrueModel(Vector theta_star, double sigma_e2, double q, double r_q)
    : theta_star_(std::move(theta_star)), sigma_e2_(sigma_e2), q_(q), r_q_(r_q) {
    if (!(sigma_e2 >= 0.0)) throw InvalidConfigError("TrueModel: negative noise variance");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidConfigError("TrueModel: q must lie in [0,1]");
    if (!(r_q >= 0.0)) throw InvalidConfigError("TrueModel: negative weak-sparsity radius");

    double mass = 0.0;
    for (double v : theta_star_) {
        const double a = std::abs(v);
        if (q == 0.0) {
            mass += (a > 0.0) ? 1.0 : 0.0;  // 0^0 = 0 convention
        } else {
            mass += std::pow(a, q);
        }
    }
    if (mass > r_q * (1.0 + 1e-12) + 1e-15)
        throw InvalidConfigError("TrueModel: theta_star violates the weak-sparsity budget");
}

}  // namespace sparseva
