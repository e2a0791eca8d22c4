#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sparseva/bounds.hpp"
#include "sparseva/rng.hpp"
#include "sparseva/stats.hpp"

using namespace sparseva;

TEST_CASE("dual_norm_linf basics") {
    CHECK(dual_norm_linf(Vector::Zero(3)) == 0.0);
    Vector v(3);
    v << 1.0, -3.0, 2.0;
    CHECK(dual_norm_linf(v) == 3.0);
}

TEST_CASE("dual_norm_linf matches the sup over the l1 ball") {
    // sup over u with ||u||_1 <= 1 of <u, v>; the sampler is corner-biased
    // (weights x_i^20) so the sup is actually approached
    GaussianStream g(77);
    Vector v(4);
    for (int i = 0; i < 4; ++i) v(i) = g.next();
    Xoshiro256pp rng(78);
    double sup = 0.0;
    for (int it = 0; it < 100000; ++it) {
        double w[4], total = 0.0;
        for (double& wi : w) {
            wi = std::pow(rng.uniform01(), 20.0);
            total += wi;
        }
        double dot = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double sign = rng.uniform01_halfopen() < 0.5 ? -1.0 : 1.0;
            dot += sign * (w[i] / total) * v(i);
        }
        sup = std::max(sup, std::abs(dot));
    }
    CHECK(sup <= dual_norm_linf(v) * (1.0 + 1e-12));
    CHECK(sup > 0.99 * dual_norm_linf(v));
}

TEST_CASE("projection onto a support set") {
    Vector v(3);
    v << 1.0, 2.0, 3.0;
    const SubspaceSupport full({0, 1, 2}, 3);
    CHECK((project_onto_support(v, full) - v).norm() == 0.0);

    const SubspaceSupport mid({1}, 3);
    const Vector p = project_onto_support(v, mid);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == 2.0);
    CHECK(p(2) == 0.0);
    CHECK((project_onto_support(p, mid) - p).norm() == 0.0);  // idempotent
}

TEST_CASE("projection is the closest point of the subspace") {
    GaussianStream g(5);
    Vector v(5);
    for (int i = 0; i < 5; ++i) v(i) = g.next();
    const SubspaceSupport s({0, 2}, 5);
    const Vector p = project_onto_support(v, s);
    for (int trial = 0; trial < 200; ++trial) {
        Vector q = Vector::Zero(5);
        for (int i : s.indices()) q(i) = p(i) + 0.1 * g.next();
        CHECK((v - p).norm() <= (v - q).norm() + 1e-12);
    }
}

TEST_CASE("l1 decomposes across a support split") {
    GaussianStream g(6);
    const SubspaceSupport s({1, 3}, 5);
    Vector a = Vector::Zero(5), b = Vector::Zero(5);
    a(1) = g.next();
    a(3) = g.next();
    b(0) = g.next();
    b(2) = g.next();
    b(4) = g.next();
    CHECK((a + b).lpNorm<1>() ==
          doctest::Approx(a.lpNorm<1>() + b.lpNorm<1>()).epsilon(1e-14));
}

TEST_CASE("subspace compatibility constant is sqrt of the support size") {
    CHECK(subspace_compatibility(SubspaceSupport({4}, 9)) == 1.0);
    CHECK(subspace_compatibility(SubspaceSupport({0, 1, 2, 3, 4, 5, 6, 7, 8}, 9)) == 3.0);
}

TEST_CASE("subspace compatibility matches the sup of ||u||_1 / ||u||_2") {
    // the sup is attained at equal-magnitude coordinates, so mix in draws
    // concentrated near that profile
    const SubspaceSupport s({0, 1, 2, 3}, 6);
    GaussianStream g(91);
    Xoshiro256pp rng(92);
    double sup = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Vector u = Vector::Zero(6);
        const bool near_flat = it % 2 == 0;
        for (int i : s.indices()) {
            const double sign = rng.uniform01_halfopen() < 0.5 ? -1.0 : 1.0;
            u(i) = near_flat ? sign * (1.0 + 0.05 * g.next()) : g.next();
        }
        const double n2 = u.norm();
        if (n2 > 0.0) sup = std::max(sup, u.lpNorm<1>() / n2);
    }
    const double psi = subspace_compatibility(s);
    CHECK(sup <= psi * (1.0 + 1e-12));
    CHECK(sup > 0.99 * psi);
}

TEST_CASE("SubspaceSupport validation") {
    CHECK_THROWS_AS(SubspaceSupport({}, 3), InvalidConfigError);
    CHECK_THROWS_AS(SubspaceSupport({3}, 3), InvalidConfigError);
    CHECK_THROWS_AS(SubspaceSupport({-1}, 3), InvalidConfigError);
}

TEST_CASE("general_bound: both cases and the boundary") {
    // case 1 plug-in: 4 / (kappa^2 lambda^2) with psi_m = 1 and no tail
    CHECK(general_bound({2.0, 2.0, 0.1, 1.0, 0.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
    // case 2 plug-in: 2*1 + 8*4 = 34 (lambda above 1/r*, tail zero)
    CHECK(general_bound({1.0, 2.0, 1.0, 1.0, 2.0, 0.0}) == doctest::Approx(34.0).epsilon(1e-14));
    // boundary lambda = 1/r* takes case 1
    const double at_boundary = general_bound({1.0, 2.0, 0.5, 1.0, 7.0, 0.0});
    CHECK(at_boundary == doctest::Approx(4.0 / 4.0).epsilon(1e-14));
    // r* = 0 is case 1 regardless of lambda
    CHECK(general_bound({1.0, 100.0, 0.0, 1.0, 7.0, 0.0}) ==
          doctest::Approx(4.0 / 10000.0).epsilon(1e-12));
    CHECK_THROWS_AS(general_bound({0.0, 1.0, 0.0, 1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("gradient bound at the truth") {
    CHECK(grad_bound_at_theta_star(100, 5, 0.0, 1.0, 0.001) == 0.0);
    // frozen: sqrt(2 * chi2_{0.001}(450) * ln 2000) / 450 with the oracle quantile
    CHECK(grad_bound_at_theta_star(450, 35, 1.0, 1.0, 0.001) ==
          doctest::Approx(0.20290680823605606).epsilon(1e-9));
    CHECK_THROWS_AS(grad_bound_at_theta_star(100, 5, 1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("gradient bound at the estimate") {
    // eps = 0 reduces to the theta* formula with N-n degrees of freedom
    const double lhs = grad_bound_at_theta_hat(500, 50, 0.3, 1.2, 0.01, 0.0);
    const double chi = chi2_upper_quantile({0.01, 450});
    CHECK(lhs == doctest::Approx(std::sqrt(2.0 * 0.3 * 1.2 * chi * std::log(200.0)) / 500.0)
                     .epsilon(1e-12));
    // frozen oracle arithmetic
    CHECK(grad_bound_at_theta_hat(1000, 35, 0.01, 1.0, 0.001, 0.035) ==
          doctest::Approx(0.013194380928419283).epsilon(1e-9));
    // monotone in eps, sigma, s_max
    CHECK(grad_bound_at_theta_hat(1000, 35, 0.01, 1.0, 0.001, 0.05) >
          grad_bound_at_theta_hat(1000, 35, 0.01, 1.0, 0.001, 0.035));
    CHECK(grad_bound_at_theta_hat(1000, 35, 0.02, 1.0, 0.001, 0.035) >
          grad_bound_at_theta_hat(1000, 35, 0.01, 1.0, 0.001, 0.035));
    CHECK(grad_bound_at_theta_hat(1000, 35, 0.01, 2.0, 0.001, 0.035) >
          grad_bound_at_theta_hat(1000, 35, 0.01, 1.0, 0.001, 0.035));
    CHECK_THROWS_AS(grad_bound_at_theta_hat(35, 35, 1.0, 1.0, 0.001, 0.1), DomainError);
}

TEST_CASE("sparse_bound: frozen example and the probability") {
    const BoundResult b = sparse_bound({35, 10, 1000, 0.01, 1.0, 0.3, 0.035, 0.001, 0.02, 0.05});
    // frozen from an independent evaluation of the two displayed formulas
    CHECK(b.a1 == doctest::Approx(0.08617033754527265).epsilon(1e-9));
    CHECK(b.a2 == doctest::Approx(0.4338754747116423).epsilon(1e-9));
    CHECK(b.bound == b.a2);
    CHECK(b.prob == doctest::Approx(0.8428).epsilon(1e-12));
    CHECK(!b.vacuous);
}

TEST_CASE("sparse_bound reduces cleanly at exact sparsity") {
    const int n = 12, N = 300;
    const double sig = 0.2, smax = 1.5, kappa = 0.4, eps = 0.04, beta = 0.001, alpha = 0.02;
    const BoundResult b = sparse_bound({n, n, N, sig, smax, kappa, eps, beta, alpha, 0.0});
    const double l2b = std::log(2.0 / beta);
    const double k2N2 = kappa * kappa * static_cast<double>(N) * N;
    CHECK(b.a1 == doctest::Approx(8.0 * n * sig * smax * chi2_upper_quantile({beta, N - n}) *
                                  (1.0 + eps) * l2b / k2N2)
                      .epsilon(1e-12));
    CHECK(b.a2 == doctest::Approx(4.0 * n * sig * smax * chi2_upper_quantile({beta, N}) * l2b /
                                  k2N2)
                      .epsilon(1e-12));
}

TEST_CASE("sparse_bound composes the general bound under the proof substitutions") {
    Xoshiro256pp rng(314);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(0, 30));
        const int n_eta = 1 + static_cast<int>(rng.uniform_int(0, n - 1));
        const int N = n + 50 + static_cast<int>(rng.uniform_int(0, 950));
        SparseBoundInputs in{n, n_eta, N, 0.01 + rng.uniform01(), 0.5 + rng.uniform01(),
                             0.1 + rng.uniform01(), 0.01 + 0.2 * rng.uniform01(),
                             1e-4 + 0.01 * rng.uniform01(), 0.02, 0.3 * rng.uniform01()};
        const BoundResult b = sparse_bound(in);

        const double g_star = grad_bound_at_theta_star(in.N, in.n, in.sigma_e2, in.s_max, in.beta);
        const double g_hat =
            grad_bound_at_theta_hat(in.N, in.n, in.sigma_e2, in.s_max, in.beta, in.eps_N);
        const double psi = std::sqrt(static_cast<double>(n_eta));
        const double psi_perp = std::sqrt(static_cast<double>(n - n_eta));
        GeneralBoundInputs gin{in.kappa_alpha, 1.0 / g_hat, g_star, psi, psi_perp,
                               in.theta_tail_l1};

        const double composed = general_bound(gin);
        const double expected = gin.lambda_eps * gin.r_star_grad <= 1.0 ? b.a1 : b.a2;
        CHECK(composed == doctest::Approx(expected).epsilon(1e-12));

        // forcing case 1 with r* = 0 must reproduce a1 exactly
        gin.r_star_grad = 0.0;
        CHECK(general_bound(gin) == doctest::Approx(b.a1).epsilon(1e-12));
    }
}

TEST_CASE("sparse_bound monotonicity and error paths") {
    const SparseBoundInputs base{35, 15, 1000, 0.01, 1.0, 0.3, 0.035, 0.001, 0.02, 0.05};
    const double b0 = sparse_bound(base).bound;

    auto bump = [&](auto mutate) {
        SparseBoundInputs in = base;
        mutate(in);
        return sparse_bound(in).bound;
    };
    CHECK(bump([](auto& in) { in.sigma_e2 *= 2.0; }) > b0);
    CHECK(bump([](auto& in) { in.s_max *= 2.0; }) > b0);
    CHECK(bump([](auto& in) { in.theta_tail_l1 *= 2.0; }) > b0);
    CHECK(bump([](auto& in) { in.kappa_alpha *= 2.0; }) < b0);
    CHECK(bump([](auto& in) { in.N = 2000; }) < b0);

    SparseBoundInputs bad = base;
    bad.N = 35;
    CHECK_THROWS_AS(sparse_bound(bad), DomainError);

    SparseBoundInputs weak = base;
    weak.beta = 0.01;  // 4 n beta > 1
    const BoundResult vac = sparse_bound(weak);
    CHECK(vac.vacuous);
    CHECK(vac.prob <= 0.0);
}

TEST_CASE("weak_sparsity_tail: exact values") {
    Vector t(4);
    t << 1.0, 0.5, 0.25, 0.125;
    CHECK(weak_sparsity_tail(t, 2) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(weak_sparsity_tail(t, 4) == 0.0);
    Vector sparse3 = Vector::Zero(6);
    sparse3(1) = 2.0;
    sparse3(4) = -1.0;
    CHECK(weak_sparsity_tail(sparse3, 2) == 0.0);
    CHECK_THROWS_AS(weak_sparsity_tail(t, 0), DomainError);
}

TEST_CASE("weak_sparsity_tail_bound dominates the exact tail on the q-ball") {
    CHECK_THROWS_AS(weak_sparsity_tail_bound(0.0, 1.0, 2), DomainError);
    GaussianStream g(17);
    const double q = 0.5;
    for (int trial = 0; trial < 20; ++trial) {
        Vector t(12);
        for (int i = 0; i < t.size(); ++i) t(i) = g.next();
        double rq = 0.0;
        for (double v : t) rq += std::pow(std::abs(v), q);
        for (int n_eta = 1; n_eta <= 12; ++n_eta)
            CHECK(weak_sparsity_tail(t, n_eta) <=
                  weak_sparsity_tail_bound(q, rq, n_eta) * (1.0 + 1e-12));
    }
}
