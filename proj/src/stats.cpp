#include "sparseva/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sparseva/rng.hpp"

namespace sparseva {

namespace {

// Lower incomplete gamma by its power series, x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma Q(a,x) by Lentz's continued fraction, x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw DomainError("regularized_gamma_p: a must be > 0");
    if (x < 0.0) throw DomainError("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw DomainError("chi2_cdf: dof must be > 0");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double x, double dof) {
    if (!(dof > 0.0)) throw DomainError("chi2_pdf: dof must be > 0");
    if (x <= 0.0) return 0.0;
    const double h = 0.5 * dof;
    return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::numbers::ln2 - std::lgamma(h));
}

namespace {

// Solves chi2_cdf(x, dof) = p by bracketed bisection, then polishes with
// Newton steps (derivative = density). Bisection makes the bracket tight
// enough that Newton cannot escape it.
double chi2_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi2 quantile: probability must lie in (0,1)");

    double lo = 0.0;
    double hi = dof > 1.0 ? dof : 1.0;
    while (chi2_cdf(hi, dof) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e308) throw DomainError("chi2 quantile: bracket overflow");
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        (chi2_cdf(x, dof) < p ? lo : hi) = x;
        x = 0.5 * (lo + hi);
        if (hi - lo <= 1e-12 * hi) break;
    }
    for (int i = 0; i < 4; ++i) {
        const double f = chi2_cdf(x, dof) - p;
        const double d = chi2_pdf(x, dof);
        if (d <= 0.0) break;
        double step = f / d;
        const double nx = x - step;
        if (!(nx > lo && nx < hi)) break;
        x = nx;
        if (std::abs(step) <= 1e-15 * x) break;
    }
    return x;
}

}  // namespace

double chi2_upper_quantile(const ChiSquareQuantileQuery& q) {
    if (!(q.beta > 0.0 && q.beta < 1.0)) throw DomainError("chi2_upper_quantile: beta must lie in (0,1)");
    if (q.dof < 1) throw DomainError("chi2_upper_quantile: dof must be >= 1");
    return chi2_quantile(1.0 - q.beta, static_cast<double>(q.dof));
}

double chi2_lower_quantile(double alpha, int dof) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("chi2_lower_quantile: alpha must lie in (0,1)");
    if (dof < 1) throw DomainError("chi2_lower_quantile: dof must be >= 1");
    return chi2_quantile(alpha, static_cast<double>(dof));
}

double gaussian_pdf(double x, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("gaussian_pdf: variance must be > 0");
    return std::exp(-0.5 * x * x / sigma2) / std::sqrt(2.0 * std::numbers::pi * sigma2);
}

Matrix sample_gaussian_matrix_chol(const Matrix& chol_lower, int N, std::uint64_t seed) {
    const int n = static_cast<int>(chol_lower.rows());
    GaussianStream g(seed);
    Matrix z(n, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < n; ++i) z(i, j) = g.next();
    return chol_lower * z;
}

Matrix sample_gaussian_matrix(int n, int N, const Matrix& sigma, std::uint64_t seed) {
    if (n < 1 || N < 1) throw InvalidConfigError("sample_gaussian_matrix: empty shape");
    if (sigma.rows() != n || sigma.cols() != n)
        throw InvalidConfigError("sample_gaussian_matrix: sigma must be n x n");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw DomainError("sample_gaussian_matrix: covariance is not positive definite");
    return sample_gaussian_matrix_chol(Matrix(llt.matrixL()), N, seed);
}

}  // namespace sparseva
