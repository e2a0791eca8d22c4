#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sparseva/core.hpp"

namespace sparseva {

enum class InputKind {
    White,        // unit-variance Gaussian white noise
    Ar1Filtered,  // white noise through 0.9798 / (1 - 0.2 q^-1)
};

std::string to_string(InputKind kind);
InputKind input_kind_from_string(const std::string& s);

/// Random stable discrete-time system: poles strictly inside radius 0.9,
/// zeros strictly inside the unit circle, complex roots conjugate-paired so
/// the impulse response is real.
struct RandomSystem {
    std::vector<std::complex<double>> poles;
    std::vector<std::complex<double>> zeros;
    double gain = 1.0;
    int order = 1;
};

struct SignalSpec {
    InputKind input_kind = InputKind::White;
    long N_total = 0;  // raw time-series length
    double snr_db = 30.0;
    std::uint64_t seed = 0;
};

/// Everything synthesize() produces. The trimmed raw series are aligned so
/// that index n-1 carries the first fully populated regressor; rebuilding
/// the regression from (u, y, n, stride) reproduces `problem` exactly.
struct SynthOutput {
    RegressionProblem problem;
    TrueModel truth;
    Vector u;
    Vector y;
    int stride = 1;
};

/// Draws order, poles, zeros, and gain from the seed. The gain is scaled so
/// the l2 norm of the (256-tap) impulse response lands in [0.5, 2).
RandomSystem random_stable_system(std::uint64_t seed);

/// First `count` impulse-response coefficients of the system.
Vector impulse_response(const RandomSystem& sys, int count);

/// FIR truth: the first n impulse-response coefficients.
Vector fir_truth(const RandomSystem& sys, int n);

/// Regressor spacing: 1 for white input; n for the AR(1)-filtered input,
/// where adjacent windows would otherwise share correlated samples.
int input_stride(InputKind kind, int n);

/// Raw samples needed for `rows` regression rows at FIR order n (includes
/// the n + 50 warm-up).
long raw_samples_needed(int rows, int n, InputKind kind);

/// Column covariance of the regressor ensemble: identity for white input,
/// Toeplitz 0.2^|i-j| for the AR(1)-filtered input.
Matrix sigma_for(InputKind kind, int n);

/// FIR regression from a raw (u, y) series: column j holds
/// [u(t_j), ..., u(t_j - n + 1)] with t_j = (n-1) + j * stride.
RegressionProblem build_fir_regression(const Vector& u, const Vector& y, int n, int stride);

/// Generates the requested input kind, pushes it through the length-n FIR
/// truth of the system, calibrates the output noise variance to the
/// requested SNR over the retained rows, and assembles the regression
/// problem. A pure function of (sys, spec, n); input and noise use separate
/// substreams, so a longer run extends a shorter one sample-for-sample.
SynthOutput synthesize(const RandomSystem& sys, const SignalSpec& spec, int n);

}  // namespace sparseva
