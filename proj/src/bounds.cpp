#include "sparseva/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sparseva/stats.hpp"

namespace sparseva {

SubspaceSupport::SubspaceSupport(std::set<int> s, int n) : s_(std::move(s)), n_(n) {
    if (n < 1) throw InvalidConfigError("SubspaceSupport: ambient dimension must be >= 1");
    if (s_.empty() || static_cast<int>(s_.size()) > n)
        throw InvalidConfigError("SubspaceSupport: support size must lie in [1, n]");
    if (*s_.begin() < 0 || *s_.rbegin() >= n)
        throw InvalidConfigError("SubspaceSupport: index out of range");
}

double dual_norm_linf(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

Vector project_onto_support(const Vector& v, const SubspaceSupport& s) {
    if (v.size() != s.ambient_dim())
        throw InvalidConfigError("project_onto_support: dimension mismatch");
    Vector out = Vector::Zero(v.size());
    for (int i : s.indices()) out(i) = v(i);
    return out;
}

double subspace_compatibility(const SubspaceSupport& s) {
    return std::sqrt(static_cast<double>(s.size()));
}

double general_bound(const GeneralBoundInputs& in) {
    if (!(in.kappa_L > 0.0) || !(in.lambda_eps > 0.0))
        throw DomainError("general_bound: kappa_L and lambda_eps must be > 0");
    if (in.r_star_grad < 0.0 || in.psi_m < 0.0 || in.psi_m_perp < 0.0 || in.r_theta_perp < 0.0)
        throw DomainError("general_bound: negative input");

    const double k = in.kappa_L;
    const double l = in.lambda_eps;
    const double tail = 4.0 / (k * l) * in.r_theta_perp;
    // boundary lambda * r* == 1 takes case 1; r* == 0 always does
    if (in.lambda_eps * in.r_star_grad <= 1.0)
        return 4.0 / (k * k * l * l) * in.psi_m * in.psi_m + tail;
    const double r2 = in.r_star_grad * in.r_star_grad;
    return 2.0 / (k * k) * r2 * in.psi_m * in.psi_m +
           8.0 / (k * k) * r2 * in.psi_m_perp * in.psi_m_perp + tail;
}

double grad_bound_at_theta_star(int N, int n, double sigma_e2, double s_max, double beta) {
    if (N < 1 || n < 1) throw DomainError("grad_bound_at_theta_star: need N >= 1, n >= 1");
    if (!(sigma_e2 >= 0.0) || !(s_max >= 0.0)) throw DomainError("grad_bound_at_theta_star: negative variance");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("grad_bound_at_theta_star: beta must lie in (0,1)");
    const double chi = chi2_upper_quantile({beta, N});
    return std::sqrt(2.0 * sigma_e2 * s_max * chi * std::log(2.0 / beta)) / N;
}

double grad_bound_at_theta_hat(int N, int n, double sigma_e2, double s_max, double beta,
                               double eps_N) {
    if (n < 1 || N <= n) throw DomainError("grad_bound_at_theta_hat: need N > n >= 1");
    if (!(sigma_e2 >= 0.0) || !(s_max >= 0.0)) throw DomainError("grad_bound_at_theta_hat: negative variance");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("grad_bound_at_theta_hat: beta must lie in (0,1)");
    if (!(eps_N >= 0.0)) throw DomainError("grad_bound_at_theta_hat: eps_N must be >= 0");
    const double chi = chi2_upper_quantile({beta, N - n});
    return std::sqrt(2.0 * sigma_e2 * s_max * chi * (1.0 + eps_N) * std::log(2.0 / beta)) / N;
}

BoundResult sparse_bound(const SparseBoundInputs& in) {
    if (in.n < 1 || in.n_eta < 1 || in.n_eta > in.n)
        throw DomainError("sparse_bound: need 1 <= n_eta <= n");
    if (in.N <= in.n) throw DomainError("sparse_bound: need N > n");
    if (!(in.sigma_e2 > 0.0) || !(in.s_max > 0.0) || !(in.kappa_alpha > 0.0))
        throw DomainError("sparse_bound: variances and kappa_alpha must be > 0");
    if (!(in.eps_N > 0.0)) throw DomainError("sparse_bound: eps_N must be > 0");
    if (!(in.beta > 0.0 && in.beta < 1.0) || !(in.alpha > 0.0 && in.alpha < 1.0))
        throw DomainError("sparse_bound: probabilities must lie in (0,1)");
    if (in.theta_tail_l1 < 0.0) throw DomainError("sparse_bound: negative tail");

    const double N = in.N;
    const double l2b = std::log(2.0 / in.beta);
    const double chi_hat = chi2_upper_quantile({in.beta, in.N - in.n});
    const double chi_star = chi2_upper_quantile({in.beta, in.N});
    const double k2N2 = in.kappa_alpha * in.kappa_alpha * N * N;

    const double tail_term =
        std::sqrt(32.0 * in.sigma_e2 * in.s_max * chi_hat * (1.0 + in.eps_N) * l2b) *
        in.theta_tail_l1 / (in.kappa_alpha * N);

    BoundResult out;
    out.a1 = 8.0 * in.n_eta * in.sigma_e2 * in.s_max * chi_hat * (1.0 + in.eps_N) * l2b / k2N2 +
             tail_term;
    out.a2 = (16.0 * in.n - 12.0 * in.n_eta) * in.sigma_e2 * in.s_max * chi_star * l2b / k2N2 +
             tail_term;
    out.bound = std::max(out.a1, out.a2);
    out.prob = (1.0 - in.alpha) * (1.0 - 4.0 * in.n * in.beta);
    out.vacuous = out.prob <= 0.0;
    return out;
}

double weak_sparsity_tail(const Vector& theta_star, int n_eta) {
    if (n_eta < 1) throw DomainError("weak_sparsity_tail: n_eta must be >= 1");
    std::vector<double> mags(theta_star.data(), theta_star.data() + theta_star.size());
    for (double& m : mags) m = std::abs(m);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double tail = 0.0;
    for (std::size_t i = n_eta; i < mags.size(); ++i) tail += mags[i];
    return tail;
}

double weak_sparsity_tail_bound(double q, double r_q, int n_eta) {
    if (!(q > 0.0 && q <= 1.0))
        throw DomainError("weak_sparsity_tail_bound: q must lie in (0,1]");
    if (!(r_q >= 0.0)) throw DomainError("weak_sparsity_tail_bound: negative radius");
    if (n_eta < 1) throw DomainError("weak_sparsity_tail_bound: n_eta must be >= 1");
    return std::pow(static_cast<double>(n_eta), 1.0 - 1.0 / q) * std::pow(r_q, 1.0 / q);
}

}  // namespace sparseva
