// Command-line front end: SPARSEVA estimation from CSV data, bound and
// curvature evaluation, synthetic data generation, and the Monte Carlo
// study. Exit codes: 0 success, 2 usage/input error, 3 numerical/rank
// error, 4 convergence failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sparseva/bounds.hpp"
#include "sparseva/csv.hpp"
#include "sparseva/curvature.hpp"
#include "sparseva/experiment.hpp"
#include "sparseva/parallel.hpp"
#include "sparseva/solver.hpp"
#include "sparseva/sysid.hpp"

using json = nlohmann::ordered_json;
using namespace sparseva;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConvergence = 4;

// "pec" | "aic" | "bic" | "explicit:<value>"
void apply_eps_rule(SparsevaConfig& cfg, const std::string& text) {
    if (text.rfind("explicit:", 0) == 0) {
        cfg.eps_rule = EpsRule::Explicit;
        cfg.explicit_eps = parse_double(text.substr(9), 0);
        return;
    }
    cfg.eps_rule = eps_rule_from_string(text);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// flat "key = value" config document mirroring ExperimentConfig
void load_experiment_config(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw InvalidConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));

        if (key == "input_kind") {
            cfg.input_kind = input_kind_from_string(value);
        } else if (key == "snr_db_list") {
            cfg.snr_db_list.clear();
            for (const auto& v : split_list(value)) cfg.snr_db_list.push_back(parse_double(v, lineno));
        } else if (key == "N_list") {
            cfg.N_list.clear();
            for (const auto& v : split_list(value))
                cfg.N_list.push_back(static_cast<int>(parse_long(v, lineno)));
        } else if (key == "eps_rules") {
            cfg.eps_rules.clear();
            for (const auto& v : split_list(value)) cfg.eps_rules.push_back(eps_rule_from_string(v));
        } else if (key == "n") {
            cfg.n = static_cast<int>(parse_long(value, lineno));
        } else if (key == "n_eta_list") {
            cfg.n_eta_list.clear();
            for (const auto& v : split_list(value))
                cfg.n_eta_list.push_back(static_cast<int>(parse_long(v, lineno)));
        } else if (key == "alpha") {
            cfg.alpha = parse_double(value, lineno);
        } else if (key == "beta") {
            cfg.beta = parse_double(value, lineno);
        } else if (key == "realizations") {
            cfg.realizations = static_cast<int>(parse_long(value, lineno));
        } else if (key == "curvature_trials") {
            cfg.curvature_trials = static_cast<int>(parse_long(value, lineno));
        } else if (key == "root_seed") {
            cfg.root_seed = static_cast<std::uint64_t>(parse_long(value, lineno));
        } else if (key == "solver_tol") {
            cfg.solver_tol = parse_double(value, lineno);
        } else if (key == "max_iter") {
            cfg.max_iter = static_cast<int>(parse_long(value, lineno));
        } else {
            throw InvalidConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                     "'");
        }
    }
}

// headerless numeric CSV -> matrix
Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError("cannot open file: " + path, 0);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split_csv_line(line)) row.push_back(parse_double(cell, lineno));
        if (!rows.empty() && row.size() != rows.front().size())
            throw CsvParseError("ragged matrix row", lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvParseError("empty matrix file: " + path, 0);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
    return m;
}

// accepts either `u,y` raw series or `y,phi_1..phi_n` regression rows
RegressionProblem load_estimation_data(const std::string& path, int fir_order, int stride) {
    const CsvTable table = read_csv(path);
    const auto& h = table.header;

    if (h.size() == 2 && h[0] == "u" && h[1] == "y") {
        if (fir_order < 1) throw InvalidConfigError("u,y input needs --fir-order");
        Vector u(table.rows.size()), y(table.rows.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const int line = static_cast<int>(i) + 2;
            u(i) = parse_double(table.rows[i][0], line);
            y(i) = parse_double(table.rows[i][1], line);
        }
        return build_fir_regression(u, y, fir_order, stride);
    }

    if (h.size() >= 2 && h[0] == "y") {
        const int n = static_cast<int>(h.size()) - 1;
        for (int i = 0; i < n; ++i)
            if (h[i + 1] != "phi_" + std::to_string(i + 1))
                throw CsvParseError("expected header y,phi_1..phi_" + std::to_string(n), 1);
        const int N = static_cast<int>(table.rows.size());
        Matrix phi(n, N);
        Vector y(N);
        for (int j = 0; j < N; ++j) {
            const int line = j + 2;
            y(j) = parse_double(table.rows[j][0], line);
            for (int i = 0; i < n; ++i) phi(i, j) = parse_double(table.rows[j][i + 1], line);
        }
        return RegressionProblem(std::move(phi), std::move(y));
    }
    throw CsvParseError("unrecognized header; expected 'u,y' or 'y,phi_1..phi_n'", 1);
}

int cmd_estimate(const std::string& data_path, int fir_order, int stride,
                 const std::string& eps_rule, double tol, int max_iter,
                 const std::string& format) {
    SparsevaConfig cfg;
    apply_eps_rule(cfg, eps_rule);
    cfg.solver_tol = tol;
    cfg.max_iter = max_iter;

    const RegressionProblem problem = load_estimation_data(data_path, fir_order, stride);
    const SparsevaSolution sol = solve_sparseva(problem, cfg);

    std::vector<int> support;
    for (int i = 0; i < sol.theta_hat.size(); ++i)
        if (std::abs(sol.theta_hat(i)) >= tol) support.push_back(i);

    if (format == "csv") {
        std::cout << "# n=" << problem.n() << " N=" << problem.N()
                  << " eps=" << fmt_double(sol.eps_n) << " loss=" << fmt_double(sol.loss_at_solution)
                  << " loss_nr=" << fmt_double(sol.loss_nr)
                  << " lambda_eps=" << fmt_double(sol.lambda_eps)
                  << " constraint_active=" << (sol.constraint_active ? 1 : 0)
                  << " iterations=" << sol.iterations << "\n";
        std::cout << "index,theta_hat,in_support\n";
        for (int i = 0; i < sol.theta_hat.size(); ++i)
            std::cout << i << ',' << fmt_double(sol.theta_hat(i)) << ','
                      << (std::abs(sol.theta_hat(i)) >= tol ? 1 : 0) << "\n";
        return 0;
    }

    json out;
    out["n"] = problem.n();
    out["N"] = problem.N();
    out["eps"] = sol.eps_n;
    out["theta_hat"] =
        std::vector<double>(sol.theta_hat.data(), sol.theta_hat.data() + sol.theta_hat.size());
    out["loss"] = sol.loss_at_solution;
    out["loss_nr"] = sol.loss_nr;
    out["lambda_eps"] = sol.lambda_eps;
    out["constraint_active"] = sol.constraint_active;
    out["iterations"] = sol.iterations;
    out["support"] = support;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bound(const SparseBoundInputs& in, const std::string& format) {
    const BoundResult b = sparse_bound(in);
    if (format == "csv") {
        std::cout << "a1,a2,bound,bound_l2,prob,vacuous\n"
                  << fmt_double(b.a1) << ',' << fmt_double(b.a2) << ',' << fmt_double(b.bound)
                  << ',' << fmt_double(std::sqrt(b.bound)) << ',' << fmt_double(b.prob) << ','
                  << (b.vacuous ? 1 : 0) << "\n";
        return 0;
    }
    json out;
    out["a1"] = b.a1;
    out["a2"] = b.a2;
    out["bound"] = b.bound;
    out["bound_l2"] = std::sqrt(b.bound);
    out["prob"] = b.prob;
    out["vacuous"] = b.vacuous;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_curvature(const std::string& sigma_spec, int n, int N, double alpha, int trials,
                  std::uint64_t seed, int jobs, const std::string& cache_path,
                  const std::string& format) {
    Matrix sigma;
    if (sigma_spec == "white" || sigma_spec == "ar1") {
        sigma = sigma_for(input_kind_from_string(sigma_spec), n);
    } else {
        sigma = read_matrix_csv(sigma_spec);
        if (sigma.rows() != n || sigma.cols() != n)
            throw InvalidConfigError("--sigma file must hold an n x n matrix");
    }

    const std::string digest = sigma_digest(sigma);
    std::optional<CurvatureEstimate> est;
    bool cached = false;
    if (!cache_path.empty()) {
        est = curvature_cache_lookup(cache_path, digest, n, N, alpha, trials, seed);
        cached = est.has_value();
    }
    if (!est) {
        est = estimate_kappa_alpha(sigma, n, N, alpha, trials, seed, jobs);
        if (!cache_path.empty()) curvature_cache_append(cache_path, *est);
    }

    if (format == "csv") {
        std::cout << "sigma_digest,n,N,alpha,trials,seed,w_min,kappa_alpha,cached\n"
                  << est->sigma_digest << ',' << est->n << ',' << est->N << ','
                  << fmt_double(est->alpha) << ',' << est->trials << ',' << est->seed << ','
                  << fmt_double(est->w_min) << ',' << fmt_double(est->kappa_alpha) << ','
                  << (cached ? 1 : 0) << "\n";
        return 0;
    }
    json out;
    out["sigma_digest"] = est->sigma_digest;
    out["n"] = est->n;
    out["N"] = est->N;
    out["alpha"] = est->alpha;
    out["trials"] = est->trials;
    out["seed"] = est->seed;
    out["w_min"] = est->w_min;
    out["kappa_alpha"] = est->kappa_alpha;
    out["cached"] = cached;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs, bool dry_run,
                   bool figures) {
    if (dry_run) {
        for (const auto& line : describe_cells(cfg)) std::cout << line << "\n";
        return 0;
    }
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    const auto records = run_experiment(cfg, jobs);
    {
        std::ofstream out(out_dir + "/records.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/records.csv");
        write_records_csv(out, records);
    }
    const auto cells = aggregate(records);
    {
        std::ofstream out(out_dir + "/summary.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/summary.csv");
        write_summary_csv(out, cells);
    }
    if (figures) write_figures(out_dir + "/figures", cells);

    double min_coverage = 1.0;
    for (const auto& c : cells) min_coverage = std::min(min_coverage, c.coverage);
    std::cout << "records: " << records.size() << "\ncells: " << cells.size()
              << "\nmin coverage: " << min_coverage << "\nwrote " << out_dir
              << "/records.csv, summary.csv" << (figures ? ", figures/" : "") << "\n";
    return 0;
}

int cmd_synth(const std::string& kind_str, double snr_db, int n, int rows, std::uint64_t seed,
              std::uint64_t system_seed, const std::string& emit, const std::string& out_path) {
    const InputKind kind = input_kind_from_string(kind_str);
    const RandomSystem sys = random_stable_system(system_seed);
    const SignalSpec spec{kind, raw_samples_needed(rows, n, kind), snr_db, seed};
    const SynthOutput out = synthesize(sys, spec, n);

    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    if (emit == "raw") {
        file << "u,y\n";
        for (long t = 0; t < out.u.size(); ++t)
            file << fmt_double(out.u(t)) << ',' << fmt_double(out.y(t)) << "\n";
    } else {
        file << "y";
        for (int i = 1; i <= n; ++i) file << ",phi_" << i;
        file << "\n";
        for (int j = 0; j < out.problem.N(); ++j) {
            file << fmt_double(out.problem.y()(j));
            for (int i = 0; i < n; ++i) file << ',' << fmt_double(out.problem.phi()(i, j));
            file << "\n";
        }
    }
    std::cerr << "wrote " << out_path << " (" << emit << ", kind=" << kind_str
              << ", stride=" << out.stride << ", rows=" << out.problem.N()
              << ", sigma_e2=" << fmt_double(out.truth.sigma_e2()) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPARSEVA estimation, finite-sample error bounds, and the Monte Carlo study"};
    app.require_subcommand(1);

    auto* est = app.add_subcommand("estimate", "solve the SPARSEVA program on CSV data");
    std::string est_data, est_rule = "pec", est_format = "json";
    int est_order = 0, est_stride = 1, est_max_iter = 2000;
    double est_tol = 1e-8;
    est->add_option("--data", est_data, "CSV file: 'u,y' series or 'y,phi_1..phi_n' rows")
        ->required();
    est->add_option("--fir-order", est_order, "FIR order for u,y input");
    est->add_option("--stride", est_stride, "regressor spacing for u,y input");
    est->add_option("--eps-rule", est_rule, "pec | aic | bic | explicit:<value>");
    est->add_option("--tol", est_tol, "solver tolerance");
    est->add_option("--max-iter", est_max_iter, "iteration cap");
    est->add_option("--format", est_format)->check(CLI::IsMember({"json", "csv"}));

    auto* bnd = app.add_subcommand("bound", "evaluate the sparse-regression error bound");
    SparseBoundInputs bin{};
    std::string bnd_format = "json";
    bnd->add_option("--n", bin.n)->required();
    bnd->add_option("--n-eta", bin.n_eta)->required();
    bnd->add_option("--N", bin.N)->required();
    bnd->add_option("--sigma-e2", bin.sigma_e2)->required();
    bnd->add_option("--s-max", bin.s_max)->required();
    bnd->add_option("--kappa-alpha", bin.kappa_alpha)->required();
    bnd->add_option("--eps", bin.eps_N)->required();
    bnd->add_option("--beta", bin.beta)->required();
    bnd->add_option("--alpha", bin.alpha)->required();
    bnd->add_option("--tail-l1", bin.theta_tail_l1)->required();
    bnd->add_option("--format", bnd_format)->check(CLI::IsMember({"json", "csv"}));

    auto* cur = app.add_subcommand("curvature", "Monte Carlo curvature constant");
    std::string cur_sigma = "white", cur_cache, cur_format = "json";
    int cur_n = 35, cur_N = 1000, cur_trials = 10000, cur_jobs = 0;
    double cur_alpha = 0.02;
    std::uint64_t cur_seed = 1;
    cur->add_option("--sigma", cur_sigma, "white | ar1 | path to an n x n CSV matrix");
    cur->add_option("--n", cur_n);
    cur->add_option("--N", cur_N);
    cur->add_option("--alpha", cur_alpha);
    cur->add_option("--trials", cur_trials);
    cur->add_option("--seed", cur_seed);
    cur->add_option("--jobs", cur_jobs);
    cur->add_option("--cache", cur_cache, "CSV cache file, read before computing");
    cur->add_option("--format", cur_format)->check(CLI::IsMember({"json", "csv"}));

    auto* exp = app.add_subcommand("experiment", "run the Monte Carlo study");
    ExperimentConfig ecfg;
    std::string exp_config, exp_out = "out", exp_kind, exp_snr, exp_N, exp_rules, exp_etas;
    int exp_jobs = 0;
    int exp_n = 0, exp_realizations = 0, exp_trials = 0, exp_max_iter = 0;
    double exp_alpha = -1.0, exp_beta = -1.0, exp_tol = -1.0;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    bool exp_dry = false, exp_no_figures = false;
    exp->add_option("--config", exp_config, "key = value config file");
    exp->add_option("--out", exp_out, "output directory");
    exp->add_option("--input-kind", exp_kind, "white | ar1");
    exp->add_option("--snr-list", exp_snr, "comma list of SNR dB values");
    exp->add_option("--N-list", exp_N, "comma list of sample counts");
    exp->add_option("--eps-rules", exp_rules, "comma list of pec/aic/bic");
    exp->add_option("--n", exp_n, "FIR order");
    exp->add_option("--n-eta-list", exp_etas, "comma list of subspace sizes");
    exp->add_option("--alpha", exp_alpha);
    exp->add_option("--beta", exp_beta);
    exp->add_option("--realizations", exp_realizations);
    exp->add_option("--curvature-trials", exp_trials);
    exp->add_option("--seed", exp_seed)->each([&](const std::string&) { exp_seed_set = true; });
    exp->add_option("--tol", exp_tol);
    exp->add_option("--max-iter", exp_max_iter);
    exp->add_option("--jobs", exp_jobs, "worker cap (0 = hardware)");
    exp->add_flag("--dry-run", exp_dry, "print the cell grid and exit");
    exp->add_flag("--no-figures", exp_no_figures, "skip SVG output");

    auto* syn = app.add_subcommand("synth", "generate synthetic identification data");
    std::string syn_kind = "white", syn_emit = "raw", syn_out;
    double syn_snr = 30.0;
    int syn_n = 35, syn_rows = 1000;
    std::uint64_t syn_seed = 1, syn_system_seed = 1;
    syn->add_option("--kind", syn_kind, "white | ar1");
    syn->add_option("--snr", syn_snr, "SNR in dB");
    syn->add_option("--n", syn_n, "FIR order");
    syn->add_option("--rows", syn_rows, "regression rows to generate");
    syn->add_option("--seed", syn_seed, "data seed");
    syn->add_option("--system-seed", syn_system_seed, "system seed");
    syn->add_option("--emit", syn_emit)->check(CLI::IsMember({"raw", "regression"}));
    syn->add_option("--out", syn_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (est->parsed())
            return cmd_estimate(est_data, est_order, est_stride, est_rule, est_tol, est_max_iter,
                                est_format);
        if (bnd->parsed()) return cmd_bound(bin, bnd_format);
        if (cur->parsed())
            return cmd_curvature(cur_sigma, cur_n, cur_N, cur_alpha, cur_trials, cur_seed, cur_jobs,
                                 cur_cache, cur_format);
        if (exp->parsed()) {
            if (!exp_config.empty()) load_experiment_config(exp_config, ecfg);
            if (!exp_kind.empty()) ecfg.input_kind = input_kind_from_string(exp_kind);
            if (!exp_snr.empty()) {
                ecfg.snr_db_list.clear();
                for (const auto& v : split_list(exp_snr))
                    ecfg.snr_db_list.push_back(parse_double(v, 0));
            }
            if (!exp_N.empty()) {
                ecfg.N_list.clear();
                for (const auto& v : split_list(exp_N))
                    ecfg.N_list.push_back(static_cast<int>(parse_long(v, 0)));
            }
            if (!exp_rules.empty()) {
                ecfg.eps_rules.clear();
                for (const auto& v : split_list(exp_rules))
                    ecfg.eps_rules.push_back(eps_rule_from_string(v));
            }
            if (!exp_etas.empty()) {
                ecfg.n_eta_list.clear();
                for (const auto& v : split_list(exp_etas))
                    ecfg.n_eta_list.push_back(static_cast<int>(parse_long(v, 0)));
            }
            if (exp_n > 0) ecfg.n = exp_n;
            if (exp_alpha >= 0.0) ecfg.alpha = exp_alpha;
            if (exp_beta >= 0.0) ecfg.beta = exp_beta;
            if (exp_realizations > 0) ecfg.realizations = exp_realizations;
            if (exp_trials > 0) ecfg.curvature_trials = exp_trials;
            if (exp_seed_set) ecfg.root_seed = exp_seed;
            if (exp_tol > 0.0) ecfg.solver_tol = exp_tol;
            if (exp_max_iter > 0) ecfg.max_iter = exp_max_iter;
            return cmd_experiment(ecfg, exp_out, exp_jobs, exp_dry, !exp_no_figures);
        }
        if (syn->parsed())
            return cmd_synth(syn_kind, syn_snr, syn_n, syn_rows, syn_seed, syn_system_seed,
                             syn_emit, syn_out);
    } catch (const CsvParseError& e) {
        std::cerr << "input error (line " << e.line << "): " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RankError& e) {
        std::cerr << "rank error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
