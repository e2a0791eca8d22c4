#pragma once

#include <set>
#include <vector>

#include "sparseva/core.hpp"

namespace sparseva {

/// Coordinate-aligned model subspace: vectors supported on the index set s
/// (0-based) inside an n-dimensional ambient space.
class SubspaceSupport {
  public:
    SubspaceSupport(std::set<int> s, int n);

    const std::set<int>& indices() const { return s_; }
    int size() const { return static_cast<int>(s_.size()); }
    int ambient_dim() const { return n_; }

  private:
    std::set<int> s_;
    int n_;
};

/// Scalars feeding the two-case bound on the squared l2 estimation error of
/// the loss-constrained norm-minimization estimate; the norm and subspace
/// pair enter only through their compatibility constants and the dual norm
/// of the loss gradient at the truth.
struct GeneralBoundInputs {
    double kappa_L;       // strong-convexity curvature, > 0
    double lambda_eps;    // constraint multiplier, > 0
    double r_star_grad;   // dual norm of grad L(theta*), >= 0
    double psi_m;         // compatibility constant of the model subspace
    double psi_m_perp;    // compatibility constant of its complement
    double r_theta_perp;  // norm of theta* projected off the model subspace
};

/// Scalars of the l1 / sparse-regression instantiation.
struct SparseBoundInputs {
    int n;                // parameter count
    int n_eta;            // model-subspace size, 1..n
    int N;                // sample count, > n
    double sigma_e2;      // output noise variance, > 0
    double s_max;         // max diagonal entry of the regressor covariance
    double kappa_alpha;   // probabilistic curvature lower bound, > 0
    double eps_N;         // loss-inflation parameter, > 0
    double beta;          // per-coordinate tail probability, in (0,1)
    double alpha;         // curvature quantile level, in (0,1)
    double theta_tail_l1; // l1 mass of theta* beyond its n_eta largest entries
};

struct BoundResult {
    double a1;
    double a2;
    double bound;   // max(a1, a2); bounds the SQUARED l2 error
    double prob;    // (1 - alpha) * (1 - 4 n beta)
    bool vacuous;   // prob <= 0
};

/// l-infinity norm, the dual of l1 under the Euclidean inner product.
double dual_norm_linf(const Vector& v);

/// Euclidean projection onto the support subspace: zero outside s.
Vector project_onto_support(const Vector& v, const SubspaceSupport& s);

/// sup of ||u||_1 / ||u||_2 over the subspace: sqrt(|s|).
double subspace_compatibility(const SubspaceSupport& s);

/// Two-case bound on the squared l2 error. Case 1 applies when
/// lambda_eps * r_star_grad <= 1 (including r_star_grad = 0):
///   4/(kappa^2 lambda^2) psi_m^2 + 4/(kappa lambda) r_theta_perp.
/// Otherwise:
///   2/kappa^2 r*^2 psi_m^2 + 8/kappa^2 r*^2 psi_m_perp^2
///     + 4/(kappa lambda) r_theta_perp.
double general_bound(const GeneralBoundInputs& in);

/// High-probability bound on ||grad L(theta*)||_inf for Gaussian regressors
/// and noise: sqrt(2 sigma_e2 s_max chi2_beta(N) ln(2/beta)) / N, valid with
/// probability at least 1 - 2 n beta.
double grad_bound_at_theta_star(int N, int n, double sigma_e2, double s_max, double beta);

/// Same bound at the constrained estimate; the active loss constraint
/// replaces chi2_beta(N) by chi2_beta(N-n) (1 + eps_N).
double grad_bound_at_theta_hat(int N, int n, double sigma_e2, double s_max, double beta,
                               double eps_N);

/// Sparse-regression bound on the squared l2 error, holding with probability
/// (1-alpha)(1-4 n beta):
///   a1 = 8 n_eta sigma^2 s_max chi2_b(N-n)(1+eps) ln(2/b) / (kappa^2 N^2) + tail term,
///   a2 = (16n - 12 n_eta) sigma^2 s_max chi2_b(N) ln(2/b) / (kappa^2 N^2) + tail term,
/// tail term = sqrt(32 sigma^2 s_max chi2_b(N-n)(1+eps) ln(2/b)) * tail_l1 / (kappa N).
BoundResult sparse_bound(const SparseBoundInputs& in);

/// l1 mass of theta_star beyond its n_eta largest-magnitude entries.
double weak_sparsity_tail(const Vector& theta_star, int n_eta);

/// Closed-form bound on that tail under the weak-sparsity budget:
/// n_eta^(1 - 1/q) * r_q^(1/q), for q in (0,1].
double weak_sparsity_tail_bound(double q, double r_q, int n_eta);

}  // namespace sparseva
