#include "sparseva/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "sparseva/bounds.hpp"
#include "sparseva/csv.hpp"
#include "sparseva/parallel.hpp"
#include "sparseva/rng.hpp"
#include "sparseva/solver.hpp"
#include "sparseva/svg.hpp"

namespace sparseva {

namespace {

constexpr std::uint64_t kTagSystem = 0xA0;
constexpr std::uint64_t kTagCurvature = 0xB0;
constexpr std::uint64_t kTagData = 0xC0;

std::uint64_t kind_index(InputKind k) { return k == InputKind::White ? 0 : 1; }

std::uint64_t data_seed(const ExperimentConfig& cfg, double snr_db, int realization) {
    // independent of N and eps rule: one dataset per (kind, snr, realization),
    // truncated or reused across the N grid and the rules
    return derive_seed(cfg.root_seed, {kTagData, kind_index(cfg.input_kind),
                                       std::bit_cast<std::uint64_t>(snr_db),
                                       static_cast<std::uint64_t>(realization)});
}

std::uint64_t curvature_seed(const ExperimentConfig& cfg, int N) {
    return derive_seed(cfg.root_seed,
                       {kTagCurvature, kind_index(cfg.input_kind), static_cast<std::uint64_t>(N)});
}

struct StudyContext {
    RandomSystem sys;
    Vector theta_star;
    Matrix sigma;
    double s_max;
    std::vector<double> tails;  // by n_eta_list index
};

StudyContext make_context(const ExperimentConfig& cfg) {
    StudyContext ctx;
    ctx.sys = random_stable_system(derive_seed(cfg.root_seed, kTagSystem));
    ctx.theta_star = fir_truth(ctx.sys, cfg.n);
    ctx.sigma = sigma_for(cfg.input_kind, cfg.n);
    ctx.s_max = ctx.sigma.diagonal().maxCoeff();
    for (int n_eta : cfg.n_eta_list) ctx.tails.push_back(weak_sparsity_tail(ctx.theta_star, n_eta));
    return ctx;
}

// one realization of one cell -> |n_eta_list| records written to `out`
void run_realization(const ExperimentConfig& cfg, const StudyContext& ctx,
                     const ExperimentCell& cell, const CurvatureEstimate& kappa, int realization,
                     ExperimentRecord* out) {
    const std::uint64_t seed = data_seed(cfg, cell.snr_db, realization);
    const double eps = resolve_epsilon({cell.eps_rule, 0.0}, cfg.n, cell.N);

    ExperimentRecord base;
    base.input_kind = cfg.input_kind;
    base.snr_db = cell.snr_db;
    base.N = cell.N;
    base.eps_rule = cell.eps_rule;
    base.eps_n = eps;
    base.realization = realization;
    base.seed = seed;
    base.n = cfg.n;
    base.alpha = cfg.alpha;
    base.beta = cfg.beta;
    base.s_max = ctx.s_max;
    base.kappa_alpha = kappa.kappa_alpha;

    const SignalSpec spec{cfg.input_kind, raw_samples_needed(cell.N, cfg.n, cfg.input_kind),
                          cell.snr_db, seed};
    const SynthOutput synth = synthesize(ctx.sys, spec, cfg.n);
    base.sigma_e2 = synth.truth.sigma_e2();

    bool solver_ok = true;
    double error_l2 = std::numeric_limits<double>::quiet_NaN();
    double lambda_eps = std::numeric_limits<double>::quiet_NaN();
    try {
        SparsevaConfig scfg;
        scfg.eps_rule = cell.eps_rule;
        scfg.solver_tol = cfg.solver_tol;
        scfg.max_iter = cfg.max_iter;
        const SparsevaSolution sol = solve_sparseva(synth.problem, scfg);
        error_l2 = (sol.theta_hat - ctx.theta_star).norm();
        lambda_eps = sol.lambda_eps;
    } catch (const ConvergenceError&) {
        solver_ok = false;
    } catch (const RankError&) {
        solver_ok = false;
    }

    for (std::size_t e = 0; e < cfg.n_eta_list.size(); ++e) {
        ExperimentRecord rec = base;
        rec.n_eta = cfg.n_eta_list[e];
        rec.tail_l1 = ctx.tails[e];
        rec.solver_ok = solver_ok;
        const BoundResult b = sparse_bound({cfg.n, rec.n_eta, cell.N, rec.sigma_e2, ctx.s_max,
                                            kappa.kappa_alpha, eps, cfg.beta, cfg.alpha,
                                            rec.tail_l1});
        rec.a1 = b.a1;
        rec.a2 = b.a2;
        rec.bound_l2 = std::sqrt(b.bound);
        rec.prob = b.prob;
        if (solver_ok) {
            rec.error_l2 = error_l2;
            rec.lambda_eps = lambda_eps;
            rec.covered = error_l2 <= rec.bound_l2;
        } else {
            rec.error_l2 = std::numeric_limits<double>::quiet_NaN();
            rec.lambda_eps = std::numeric_limits<double>::quiet_NaN();
            rec.covered = false;
        }
        out[e] = rec;
    }
}

std::vector<ExperimentRecord> run_cells(const ExperimentConfig& cfg,
                                        const std::vector<ExperimentCell>& cells, int jobs) {
    cfg.validate();
    const StudyContext ctx = make_context(cfg);

    std::map<int, CurvatureEstimate> kappa_by_N;
    for (const auto& cell : cells)
        if (!kappa_by_N.count(cell.N))
            kappa_by_N[cell.N] = estimate_kappa_alpha(ctx.sigma, cfg.n, cell.N, cfg.alpha,
                                                      cfg.curvature_trials,
                                                      curvature_seed(cfg, cell.N), jobs);

    const std::size_t per_item = cfg.n_eta_list.size();
    const std::size_t items = cells.size() * cfg.realizations;
    std::vector<ExperimentRecord> records(items * per_item);
    parallel_for(items, jobs, [&](std::size_t i) {
        const std::size_t c = i / cfg.realizations;
        const int realization = static_cast<int>(i % cfg.realizations);
        run_realization(cfg, ctx, cells[c], kappa_by_N.at(cells[c].N), realization,
                        records.data() + i * per_item);
    });
    return records;
}

std::vector<ExperimentCell> grid_cells(const ExperimentConfig& cfg) {
    std::vector<ExperimentCell> cells;
    for (double snr : cfg.snr_db_list)
        for (int N : cfg.N_list)
            for (EpsRule rule : cfg.eps_rules) cells.push_back({snr, N, rule});
    return cells;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// OLS slope of ln(y) on ln(x); NaN when underdetermined
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = m * sxx - sx * sx;
    return denom != 0.0 ? (m * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (snr_db_list.empty() || N_list.empty() || eps_rules.empty() || n_eta_list.empty())
        throw InvalidConfigError("experiment config: empty sweep list");
    for (EpsRule rule : eps_rules)
        if (rule == EpsRule::Explicit)
            throw InvalidConfigError("experiment config: sweeps take pec/aic/bic rules only");
    if (n < 1) throw InvalidConfigError("experiment config: n must be >= 1");
    for (int n_eta : n_eta_list)
        if (n_eta < 1 || n_eta > n)
            throw InvalidConfigError("experiment config: n_eta must lie in [1, n]");
    for (int N : N_list)
        if (N <= n) throw InvalidConfigError("experiment config: every N must exceed n");
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw InvalidConfigError("experiment config: alpha and beta must lie in (0,1)");
    if (realizations < 1) throw InvalidConfigError("experiment config: realizations must be >= 1");
    if (curvature_trials < 1000)
        throw InvalidConfigError("experiment config: curvature_trials must be >= 1000");
}

std::vector<ExperimentRecord> run_cell(const ExperimentConfig& config, const ExperimentCell& cell,
                                       int jobs) {
    return run_cells(config, {cell}, jobs);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& config, int jobs) {
    return run_cells(config, grid_cells(config), jobs);
}

std::vector<std::string> describe_cells(const ExperimentConfig& config) {
    config.validate();
    std::vector<std::string> out;
    for (const auto& cell : grid_cells(config)) {
        out.push_back(to_string(config.input_kind) + " snr=" + fmt_double(cell.snr_db) +
                      "dB N=" + std::to_string(cell.N) + " eps=" + to_string(cell.eps_rule) +
                      " realizations=" + std::to_string(config.realizations));
    }
    return out;
}

std::vector<CellSummary> aggregate(const std::vector<ExperimentRecord>& records) {
    using CurveKey = std::tuple<int, double, int, int>;        // kind, snr, rule, n_eta
    using CellKey = std::tuple<int, double, int, int, int>;    // + N
    std::map<CellKey, std::vector<const ExperimentRecord*>> by_cell;
    for (const auto& r : records)
        by_cell[{static_cast<int>(r.input_kind), r.snr_db, static_cast<int>(r.eps_rule), r.n_eta,
                 r.N}]
            .push_back(&r);

    std::vector<CellSummary> cells;
    for (const auto& [key, recs] : by_cell) {
        CellSummary c;
        c.input_kind = static_cast<InputKind>(std::get<0>(key));
        c.snr_db = std::get<1>(key);
        c.eps_rule = static_cast<EpsRule>(std::get<2>(key));
        c.n_eta = std::get<3>(key);
        c.N = std::get<4>(key);
        c.realizations = static_cast<int>(recs.size());

        std::vector<double> errors, bounds;
        int covered = 0, ok = 0;
        for (const auto* r : recs) {
            bounds.push_back(r->bound_l2);
            if (!r->solver_ok) {
                ++c.failures;
                continue;
            }
            ++ok;
            errors.push_back(r->error_l2);
            covered += r->covered ? 1 : 0;
        }
        c.error_median = median(errors);
        c.error_min = errors.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : *std::min_element(errors.begin(), errors.end());
        c.error_max = errors.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : *std::max_element(errors.begin(), errors.end());
        c.bound_median = median(bounds);
        c.coverage = ok > 0 ? static_cast<double>(covered) / ok
                            : std::numeric_limits<double>::quiet_NaN();
        cells.push_back(c);
    }

    // per-curve decay slopes on the squared quantities
    std::map<CurveKey, std::pair<std::vector<double>, std::vector<double>>> bound_curves,
        error_curves;
    for (const auto& c : cells) {
        const CurveKey k{static_cast<int>(c.input_kind), c.snr_db, static_cast<int>(c.eps_rule),
                         c.n_eta};
        bound_curves[k].first.push_back(c.N);
        bound_curves[k].second.push_back(c.bound_median * c.bound_median);
        error_curves[k].first.push_back(c.N);
        error_curves[k].second.push_back(c.error_median * c.error_median);
    }
    for (auto& c : cells) {
        const CurveKey k{static_cast<int>(c.input_kind), c.snr_db, static_cast<int>(c.eps_rule),
                         c.n_eta};
        c.bound_sq_slope = loglog_slope(bound_curves[k].first, bound_curves[k].second);
        c.error_sq_slope = loglog_slope(error_curves[k].first, error_curves[k].second);
    }
    return cells;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << "input,snr_db,N,eps_rule,eps_n,realization,seed,n,n_eta,alpha,beta,s_max,sigma_e2,"
           "kappa_alpha,tail_l1,error_l2,a1,a2,bound_l2,prob,lambda_eps,covered,solver_ok\n";
    for (const auto& r : records) {
        out << to_string(r.input_kind) << ',' << fmt_double(r.snr_db) << ',' << r.N << ','
            << to_string(r.eps_rule) << ',' << fmt_double(r.eps_n) << ',' << r.realization << ','
            << r.seed << ',' << r.n << ',' << r.n_eta << ',' << fmt_double(r.alpha) << ','
            << fmt_double(r.beta) << ',' << fmt_double(r.s_max) << ',' << fmt_double(r.sigma_e2)
            << ',' << fmt_double(r.kappa_alpha) << ',' << fmt_double(r.tail_l1) << ','
            << fmt_double(r.error_l2) << ',' << fmt_double(r.a1) << ',' << fmt_double(r.a2) << ','
            << fmt_double(r.bound_l2) << ',' << fmt_double(r.prob) << ','
            << fmt_double(r.lambda_eps) << ',' << (r.covered ? 1 : 0) << ','
            << (r.solver_ok ? 1 : 0) << "\n";
    }
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
    out << "input,snr_db,eps_rule,n_eta,N,realizations,failures,error_l2_median,error_l2_min,"
           "error_l2_max,bound_l2_median,coverage,bound_sq_loglog_slope,error_sq_loglog_slope\n";
    for (const auto& c : cells) {
        out << to_string(c.input_kind) << ',' << fmt_double(c.snr_db) << ','
            << to_string(c.eps_rule) << ',' << c.n_eta << ',' << c.N << ',' << c.realizations << ','
            << c.failures << ',' << fmt_double(c.error_median) << ',' << fmt_double(c.error_min)
            << ',' << fmt_double(c.error_max) << ',' << fmt_double(c.bound_median) << ','
            << fmt_double(c.coverage) << ',' << fmt_double(c.bound_sq_slope) << ','
            << fmt_double(c.error_sq_slope) << "\n";
    }
}

void write_figures(const std::string& dir, const std::vector<CellSummary>& cells) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    using FigKey = std::tuple<int, double, int>;  // kind, snr, rule
    std::map<FigKey, std::vector<const CellSummary*>> by_fig;
    for (const auto& c : cells)
        by_fig[{static_cast<int>(c.input_kind), c.snr_db, static_cast<int>(c.eps_rule)}].push_back(
            &c);

    const char* palette[] = {"magenta", "blue", "cyan", "darkorange", "green"};
    for (const auto& [key, group] : by_fig) {
        const InputKind kind = static_cast<InputKind>(std::get<0>(key));
        const double snr = std::get<1>(key);
        const EpsRule rule = static_cast<EpsRule>(std::get<2>(key));

        std::set<int> etas;
        std::set<int> Ns;
        for (const auto* c : group) {
            etas.insert(c->n_eta);
            Ns.insert(c->N);
        }
        auto cell_of = [&](int n_eta, int N) -> const CellSummary* {
            for (const auto* c : group)
                if (c->n_eta == n_eta && c->N == N) return c;
            return nullptr;
        };

        std::vector<PlotSeries> series;
        PlotSeries err{"error (median)", "red", {}, {}};
        const int first_eta = *etas.begin();
        for (int N : Ns)
            if (const auto* c = cell_of(first_eta, N)) {
                err.x.push_back(N);
                err.y.push_back(c->error_median);
            }
        series.push_back(std::move(err));
        int color = 0;
        for (int n_eta : etas) {
            PlotSeries s{"bound n_eta=" + std::to_string(n_eta),
                         palette[color++ % std::size(palette)], {}, {}};
            for (int N : Ns)
                if (const auto* c = cell_of(n_eta, N)) {
                    s.x.push_back(N);
                    s.y.push_back(c->bound_median);
                }
            series.push_back(std::move(s));
        }

        char snr_buf[32];
        std::snprintf(snr_buf, sizeof(snr_buf), "%g", snr);
        const std::string name = "fig_" + to_string(kind) + "_snr" + snr_buf + "dB_" +
                                 to_string(rule) + ".svg";
        write_loglog_svg(dir + "/" + name,
                         to_string(kind) + " input, SNR " + snr_buf + " dB, eps " + to_string(rule),
                         "N", "l2 error", series);
    }
}

}  // namespace sparseva
