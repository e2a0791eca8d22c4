#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "sparseva/core.hpp"
#include "sparseva/curvature.hpp"
#include "sparseva/sysid.hpp"

namespace sparseva {

/// One Monte Carlo study: a fixed random system (hence a fixed FIR truth)
/// driven over a grid of (SNR, N, eps rule), with `realizations` independent
/// input/noise draws per cell and one bound evaluation per n_eta.
struct ExperimentConfig {
    InputKind input_kind = InputKind::White;
    std::vector<double> snr_db_list{30.0, 20.0, 10.0};
    std::vector<int> N_list{450, 1000, 5000};
    std::vector<EpsRule> eps_rules{EpsRule::Pec};
    int n = 35;
    std::vector<int> n_eta_list{10, 15, 25};
    double alpha = 0.02;
    double beta = 0.001;
    int realizations = 50;
    int curvature_trials = 10000;
    std::uint64_t root_seed = 1;
    double solver_tol = 1e-8;
    int max_iter = 2000;

    void validate() const;
};

struct ExperimentCell {
    double snr_db;
    int N;
    EpsRule eps_rule;
};

/// One (cell, realization, n_eta) outcome. Bound fields recompute exactly
/// from the stored inputs, so a records file is self-contained.
struct ExperimentRecord {
    InputKind input_kind;
    double snr_db = 0.0;
    int N = 0;
    EpsRule eps_rule = EpsRule::Pec;
    double eps_n = 0.0;
    int realization = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int n_eta = 0;
    double alpha = 0.0, beta = 0.0, s_max = 0.0;
    double sigma_e2 = 0.0, kappa_alpha = 0.0, tail_l1 = 0.0;
    double error_l2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double bound_l2 = 0.0;  // sqrt(max(a1, a2)); a1/a2 bound the squared error
    double prob = 0.0;
    double lambda_eps = 0.0;
    bool covered = false;
    bool solver_ok = true;
};

/// Per-cell aggregate plus the per-curve log-log decay slopes (fitted on the
/// squared quantities against N; repeated on each row of the curve).
struct CellSummary {
    InputKind input_kind;
    double snr_db = 0.0;
    EpsRule eps_rule = EpsRule::Pec;
    int n_eta = 0;
    int N = 0;
    int realizations = 0;
    int failures = 0;
    double error_median = 0.0, error_min = 0.0, error_max = 0.0;
    double bound_median = 0.0;
    double coverage = 0.0;
    double bound_sq_slope = 0.0;
    double error_sq_slope = 0.0;
};

/// Records for one cell. The system, FIR truth and curvature constant are
/// derived from the config, so two runs with the same config agree exactly;
/// realizations run in parallel with per-realization seeds.
std::vector<ExperimentRecord> run_cell(const ExperimentConfig& config, const ExperimentCell& cell,
                                       int jobs = 0);

/// The full grid. Curvature estimates are computed once per (sigma, N) and
/// shared across cells.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, int jobs = 0);

std::vector<CellSummary> aggregate(const std::vector<ExperimentRecord>& records);

/// Human-readable cell list for dry runs.
std::vector<std::string> describe_cells(const ExperimentConfig& config);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// One figure per (snr, eps rule): median error and per-n_eta median bound
/// against N, log-log.
void write_figures(const std::string& dir, const std::vector<CellSummary>& cells);

}  // namespace sparseva
