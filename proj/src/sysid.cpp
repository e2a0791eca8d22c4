#include "sparseva/sysid.hpp"

#include <cmath>
#include <numbers>

#include "sparseva/rng.hpp"

namespace sparseva {

namespace {

constexpr double kPoleRadius = 0.9;
constexpr double kAr1Pole = 0.2;
constexpr double kAr1Gain = 0.9798;
constexpr int kWarmupExtra = 50;
constexpr int kGainTaps = 256;

int warmup(int n) { return n + kWarmupExtra; }

using Cplx = std::complex<double>;

// expands prod_i (1 - r_i q^-1) into real coefficients
std::vector<double> poly_from_roots(const std::vector<Cplx>& roots) {
    std::vector<Cplx> c{1.0};
    for (const Cplx& r : roots) {
        std::vector<Cplx> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// conjugate-paired roots with |root| < radius
std::vector<Cplx> sample_roots(Xoshiro256pp& rng, int count, double radius) {
    std::vector<Cplx> roots;
    int remaining = count;
    while (remaining > 0) {
        if (remaining >= 2 && rng.uniform01_halfopen() < 0.5) {
            const double r = radius * rng.uniform01_halfopen();
            const double ang = std::numbers::pi * rng.uniform01();
            const Cplx p = std::polar(r, ang);
            roots.push_back(p);
            roots.push_back(std::conj(p));
            remaining -= 2;
        } else {
            double p;
            do {
                p = radius * (2.0 * rng.uniform01_halfopen() - 1.0);
            } while (std::abs(p) >= radius);
            roots.emplace_back(p, 0.0);
            remaining -= 1;
        }
    }
    return roots;
}

}  // namespace

std::string to_string(InputKind kind) {
    return kind == InputKind::White ? "white" : "ar1";
}

InputKind input_kind_from_string(const std::string& s) {
    if (s == "white") return InputKind::White;
    if (s == "ar1") return InputKind::Ar1Filtered;
    throw InvalidConfigError("unknown input kind: " + s);
}

RandomSystem random_stable_system(std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    RandomSystem sys;
    sys.order = static_cast<int>(rng.uniform_int(1, 10));
    sys.poles = sample_roots(rng, sys.order, kPoleRadius);
    const int n_zeros = static_cast<int>(rng.uniform_int(0, sys.order - 1));
    sys.zeros = sample_roots(rng, n_zeros, 1.0);
    const double target = 0.5 + 1.5 * rng.uniform01_halfopen();
    sys.gain = 1.0;
    const double norm = impulse_response(sys, kGainTaps).norm();
    sys.gain = target / norm;
    return sys;
}

Vector impulse_response(const RandomSystem& sys, int count) {
    if (count < 1) throw InvalidConfigError("impulse_response: count must be >= 1");
    const std::vector<double> a = poly_from_roots(sys.poles);
    std::vector<double> b = poly_from_roots(sys.zeros);
    for (double& c : b) c *= sys.gain;

    Vector h = Vector::Zero(count);
    for (int k = 0; k < count; ++k) {
        double v = k < static_cast<int>(b.size()) ? b[k] : 0.0;
        for (std::size_t j = 1; j < a.size() && static_cast<int>(j) <= k; ++j)
            v -= a[j] * h(k - static_cast<int>(j));
        h(k) = v;
    }
    return h;
}

Vector fir_truth(const RandomSystem& sys, int n) { return impulse_response(sys, n); }

int input_stride(InputKind kind, int n) { return kind == InputKind::White ? 1 : n; }

long raw_samples_needed(int rows, int n, InputKind kind) {
    return warmup(n) + static_cast<long>(rows - 1) * input_stride(kind, n) + 1;
}

Matrix sigma_for(InputKind kind, int n) {
    if (n < 1) throw InvalidConfigError("sigma_for: n must be >= 1");
    if (kind == InputKind::White) return Matrix::Identity(n, n);
    Matrix sigma(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sigma(i, j) = std::pow(kAr1Pole, std::abs(i - j));
    return sigma;
}

RegressionProblem build_fir_regression(const Vector& u, const Vector& y, int n, int stride) {
    if (n < 1 || stride < 1) throw InvalidConfigError("build_fir_regression: bad n or stride");
    if (u.size() != y.size()) throw InvalidConfigError("build_fir_regression: u and y length differ");
    const long len = u.size();
    const long rows = len >= n ? (len - n) / stride + 1 : 0;
    if (rows < n)
        throw InvalidConfigError("build_fir_regression: insufficient samples for " +
                                 std::to_string(n) + " parameters");
    Matrix phi(n, rows);
    Vector out(rows);
    for (long j = 0; j < rows; ++j) {
        const long t = (n - 1) + j * stride;
        for (int i = 0; i < n; ++i) phi(i, j) = u(t - i);
        out(j) = y(t);
    }
    return RegressionProblem(std::move(phi), std::move(out));
}

SynthOutput synthesize(const RandomSystem& sys, const SignalSpec& spec, int n) {
    if (n < 1) throw InvalidConfigError("synthesize: n must be >= 1");
    const long M = spec.N_total;
    const int w = warmup(n);
    const int stride = input_stride(spec.input_kind, n);
    const long rows = M - 1 >= w ? (M - 1 - w) / stride + 1 : 0;
    if (rows < n)
        throw InvalidConfigError("synthesize: N_total too small for the requested FIR order");

    const Vector theta = fir_truth(sys, n);

    GaussianStream gen_u(derive_seed(spec.seed, 1));
    GaussianStream gen_e(derive_seed(spec.seed, 2));

    Vector u(M);
    if (spec.input_kind == InputKind::White) {
        for (long t = 0; t < M; ++t) u(t) = gen_u.next();
    } else {
        const double sd_stationary = kAr1Gain / std::sqrt(1.0 - kAr1Pole * kAr1Pole);
        u(0) = sd_stationary * gen_u.next();
        for (long t = 1; t < M; ++t) u(t) = kAr1Pole * u(t - 1) + kAr1Gain * gen_u.next();
    }

    Vector ybar(M);
    for (long t = 0; t < M; ++t) {
        double v = 0.0;
        const int kmax = static_cast<int>(std::min<long>(t, n - 1));
        for (int k = 0; k <= kmax; ++k) v += theta(k) * u(t - k);
        ybar(t) = v;
    }

    // SNR calibration over the retained rows
    double mean = 0.0;
    for (long j = 0; j < rows; ++j) mean += ybar(w + j * stride);
    mean /= rows;
    double var = 0.0;
    for (long j = 0; j < rows; ++j) {
        const double d = ybar(w + j * stride) - mean;
        var += d * d;
    }
    var /= rows;
    const double sigma_e2 = var / std::pow(10.0, spec.snr_db / 10.0);
    const double sigma_e = std::sqrt(sigma_e2);

    Vector y(M);
    for (long t = 0; t < M; ++t) y(t) = ybar(t) + sigma_e * gen_e.next();

    // trim so the first regressor ends exactly at index n-1
    const long off = w - (n - 1);
    const long len = M - off;
    Vector u_trim = u.segment(off, len);
    Vector y_trim = y.segment(off, len);

    RegressionProblem problem = build_fir_regression(u_trim, y_trim, n, stride);

    double r_half = 0.0;
    for (double v : theta) r_half += std::sqrt(std::abs(v));
    TrueModel truth(theta, sigma_e2, 0.5, r_half);

    return SynthOutput{std::move(problem), std::move(truth), std::move(u_trim), std::move(y_trim),
                       stride};
}

}  // namespace sparseva
