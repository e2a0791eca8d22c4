#include <cmath>

#include "doctest.h"
#include "sparseva/rng.hpp"
#include "sparseva/solver.hpp"
#include "sparseva/sysid.hpp"

using namespace sparseva;

TEST_CASE("random_stable_system: pole radius, pairing, order, gain") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const RandomSystem sys = random_stable_system(seed);
        CHECK(sys.order >= 1);
        CHECK(sys.order <= 10);
        CHECK(static_cast<int>(sys.poles.size()) == sys.order);
        double imag_sum = 0.0;
        for (const auto& p : sys.poles) {
            CHECK(std::abs(p) < 0.9);
            imag_sum += p.imag();
        }
        for (const auto& z : sys.zeros) CHECK(std::abs(z) < 1.0);
        CHECK(std::abs(imag_sum) < 1e-12);  // conjugate pairing

        const double norm = impulse_response(sys, 256).norm();
        CHECK(norm >= 0.5);
        CHECK(norm < 2.0);
    }
}

TEST_CASE("random_stable_system is deterministic") {
    const RandomSystem a = random_stable_system(123);
    const RandomSystem b = random_stable_system(123);
    CHECK(a.order == b.order);
    CHECK(a.gain == b.gain);
    CHECK((fir_truth(a, 35) - fir_truth(b, 35)).norm() == 0.0);
}

TEST_CASE("impulse response decays at the pole-radius rate") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Vector h = impulse_response(random_stable_system(seed), 400);
        double early = 0.0, late = 0.0;
        for (int k = 0; k < 150; ++k) early = std::max(early, std::abs(h(k)) / std::pow(0.9, k));
        for (int k = 150; k < 400; ++k) late = std::max(late, std::abs(h(k)) / std::pow(0.9, k));
        // the 0.9^-k envelope peaks early; a late peak would mean a mode
        // outside radius 0.9
        CHECK(late <= early + 1e-12);
    }
}

TEST_CASE("fir_truth closed forms") {
    RandomSystem pure_gain;
    pure_gain.order = 1;
    pure_gain.poles = {{0.0, 0.0}};
    pure_gain.gain = 3.5;
    const Vector g = fir_truth(pure_gain, 5);
    CHECK(g(0) == 3.5);
    CHECK(g.tail(4).lpNorm<1>() == 0.0);

    RandomSystem one_pole;
    one_pole.order = 1;
    one_pole.poles = {{0.6, 0.0}};
    one_pole.gain = 1.0;
    const Vector h = fir_truth(one_pole, 3);
    CHECK(h(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h(1) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(h(2) == doctest::Approx(0.36).epsilon(1e-14));
}

TEST_CASE("fir tail obeys the decay envelope") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Vector theta = fir_truth(random_stable_system(seed), 35);
        double c = 0.0;
        for (int k = 0; k < 25; ++k) c = std::max(c, std::abs(theta(k)) / std::pow(0.9, k));
        double tail = 0.0, envelope = 0.0;
        for (int k = 25; k < 35; ++k) {
            tail += std::abs(theta(k));
            envelope += c * std::pow(0.9, k);
        }
        CHECK(tail <= envelope * (1.0 + 1e-9));
    }
}

TEST_CASE("sigma_for: white and AR(1) covariances") {
    const Matrix white = sigma_for(InputKind::White, 4);
    CHECK((white - Matrix::Identity(4, 4)).norm() == 0.0);

    const Matrix ar1 = sigma_for(InputKind::Ar1Filtered, 4);
    CHECK(ar1(0, 0) == 1.0);
    CHECK(ar1(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(ar1(0, 3) == doctest::Approx(0.008).epsilon(1e-12));
    CHECK(ar1.diagonal().maxCoeff() == 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ar1, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("synthesize: noiseless identification recovers the FIR truth") {
    const RandomSystem sys = random_stable_system(7);
    const int n = 12;
    const SignalSpec spec{InputKind::White, raw_samples_needed(400, n, InputKind::White), 300.0, 5};
    const SynthOutput out = synthesize(sys, spec, n);
    const Vector rec = least_squares(out.problem);
    CHECK((rec - out.truth.theta_star()).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("synthesize: AR(1) input autocorrelation") {
    const RandomSystem sys = random_stable_system(9);
    const int n = 4;
    const SignalSpec spec{InputKind::Ar1Filtered, 1000000, 20.0, 13};
    const SynthOutput out = synthesize(sys, spec, n);
    const auto& u = out.u;
    const long M = u.size();
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    for (long t = 2; t < M; ++t) {
        r0 += u(t) * u(t);
        r1 += u(t) * u(t - 1);
        r2 += u(t) * u(t - 2);
    }
    r0 /= M - 2;
    r1 /= M - 2;
    r2 /= M - 2;
    CHECK(std::abs(r0 - 1.0) < 0.02);
    CHECK(std::abs(r1 / r0 - 0.2) < 0.02);
    CHECK(std::abs(r2 / r0 - 0.04) < 0.02);
}

TEST_CASE("synthesize hits the requested SNR") {
    const RandomSystem sys = random_stable_system(3);
    const int n = 10;
    const SignalSpec spec{InputKind::White, raw_samples_needed(20000, n, InputKind::White), 20.0,
                          17};
    const SynthOutput out = synthesize(sys, spec, n);
    // residual variance of y - ybar at the rows vs the calibrated sigma
    const Vector resid = out.problem.y() - out.problem.phi().transpose() * out.truth.theta_star();
    const double noise_var = resid.squaredNorm() / resid.size();
    CHECK(noise_var == doctest::Approx(out.truth.sigma_e2()).epsilon(0.10));
    // 20 dB: noise variance is 1% of the signal variance
    Vector signal = out.problem.phi().transpose() * out.truth.theta_star();
    const double sig_var = (signal.array() - signal.mean()).square().sum() / signal.size();
    CHECK(noise_var / sig_var == doctest::Approx(0.01).epsilon(0.10));
}

TEST_CASE("synthesize and build_fir_regression agree by construction") {
    const RandomSystem sys = random_stable_system(41);
    const int n = 8;
    const SignalSpec spec{InputKind::Ar1Filtered, raw_samples_needed(60, n, InputKind::Ar1Filtered),
                          25.0, 19};
    const SynthOutput out = synthesize(sys, spec, n);
    CHECK(out.stride == n);
    const RegressionProblem rebuilt = build_fir_regression(out.u, out.y, n, out.stride);
    CHECK((rebuilt.phi().array() == out.problem.phi().array()).all());
    CHECK((rebuilt.y().array() == out.problem.y().array()).all());
}

TEST_CASE("synthesize is deterministic and prefix-stable in N") {
    const RandomSystem sys = random_stable_system(5);
    const int n = 6;
    const SignalSpec small{InputKind::White, raw_samples_needed(50, n, InputKind::White), 20.0, 23};
    const SignalSpec large{InputKind::White, raw_samples_needed(80, n, InputKind::White), 20.0, 23};
    const SynthOutput a = synthesize(sys, small, n);
    const SynthOutput b = synthesize(sys, large, n);
    CHECK((a.u.array() == b.u.head(a.u.size()).array()).all());

    const SynthOutput c = synthesize(sys, small, n);
    CHECK((a.y.array() == c.y.array()).all());
}

TEST_CASE("synthesize rejects insufficient samples") {
    const RandomSystem sys = random_stable_system(1);
    const SignalSpec spec{InputKind::White, 30, 20.0, 1};
    CHECK_THROWS_AS(synthesize(sys, spec, 10), InvalidConfigError);
}

TEST_CASE("regressor columns match the ensemble covariance") {
    const RandomSystem sys = random_stable_system(15);
    const int n = 20;

    SUBCASE("white input, pooled columns") {
        const long rows = 50000;
        const SignalSpec spec{InputKind::White, raw_samples_needed(rows, n, InputKind::White), 20.0,
                              29};
        const SynthOutput out = synthesize(sys, spec, n);
        const Matrix& phi = out.problem.phi();
        const Matrix cov = phi * phi.transpose() / static_cast<double>(phi.cols());
        const Matrix target = sigma_for(InputKind::White, n);
        CHECK((cov - target).norm() / target.norm() < 0.05);
    }

    SUBCASE("ar1 input with subsampling: marginal covariance and cross-column mixing") {
        const long rows = 4000;
        const SignalSpec spec{InputKind::Ar1Filtered,
                              raw_samples_needed(rows, n, InputKind::Ar1Filtered), 20.0, 31};
        const SynthOutput out = synthesize(sys, spec, n);
        const Matrix& phi = out.problem.phi();
        const long cols = phi.cols();
        const Matrix cov = phi * phi.transpose() / static_cast<double>(cols);
        const Matrix target = sigma_for(InputKind::Ar1Filtered, n);
        CHECK((cov - target).norm() / target.norm() < 0.10);

        // adjacent subsampled columns barely interact: entry-averaged
        // cross-covariance stays under 0.05 (consecutive windows without
        // subsampling would share n-1 samples and fail this by an order of
        // magnitude)
        Matrix cross = Matrix::Zero(n, n);
        for (long j = 0; j + 1 < cols; ++j) cross += phi.col(j) * phi.col(j + 1).transpose();
        cross /= static_cast<double>(cols - 1);
        CHECK(cross.norm() / n < 0.05);
    }
}
