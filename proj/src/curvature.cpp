#include "sparseva/curvature.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sparseva/csv.hpp"
#include "sparseva/parallel.hpp"
#include "sparseva/rng.hpp"
#include "sparseva/stats.hpp"

namespace sparseva {

double smallest_eigenvalue(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw InvalidConfigError("smallest_eigenvalue: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw RankError("smallest_eigenvalue: eigensolver failed");
    return eig.eigenvalues().minCoeff();
}

std::string sigma_digest(const Matrix& sigma) {
    // FNV-1a over dims + row-major IEEE doubles
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto fold = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::int64_t rows = sigma.rows(), cols = sigma.cols();
    fold(&rows, sizeof rows);
    fold(&cols, sizeof cols);
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j) {
            const double v = sigma(i, j);
            fold(&v, sizeof v);
        }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CurvatureEstimate estimate_kappa_alpha(const Matrix& sigma, int n, int N, double alpha, int trials,
                                       std::uint64_t seed, int jobs) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidConfigError("estimate_kappa_alpha: alpha must lie in (0,1)");
    if (trials < 1000)
        throw InvalidConfigError("estimate_kappa_alpha: need at least 1000 trials");
    if (n < 1 || N < n) throw InvalidConfigError("estimate_kappa_alpha: need N >= n >= 1");
    if (sigma.rows() != n || sigma.cols() != n)
        throw InvalidConfigError("estimate_kappa_alpha: sigma must be n x n");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw DomainError("estimate_kappa_alpha: covariance is not positive definite");
    const Matrix chol = llt.matrixL();

    std::vector<double> eigs(trials);
    parallel_for(trials, jobs, [&](std::size_t k) {
        const Matrix phi = sample_gaussian_matrix_chol(chol, N, derive_seed(seed, k));
        const Matrix cov = (phi * phi.transpose()) / static_cast<double>(N);
        eigs[k] = smallest_eigenvalue(cov);
    });
    std::sort(eigs.begin(), eigs.end());

    // lower order statistic: conservative (small) w_min keeps the coverage
    // probability at or above 1 - alpha
    const int idx = std::max(0, static_cast<int>(std::ceil(alpha * trials)) - 1);

    CurvatureEstimate est;
    est.w_min = eigs[std::min(idx, trials - 1)];
    est.kappa_alpha = est.w_min / 2.0;
    est.alpha = alpha;
    est.trials = trials;
    est.n = n;
    est.N = N;
    est.seed = seed;
    est.sigma_digest = sigma_digest(sigma);
    return est;
}

namespace {
constexpr const char* kCacheHeader = "sigma_digest,n,N,alpha,trials,seed,w_min,kappa_alpha";
}

std::optional<CurvatureEstimate> curvature_cache_lookup(const std::string& path,
                                                        const std::string& digest, int n, int N,
                                                        double alpha, int trials,
                                                        std::uint64_t seed) {
    std::ifstream probe(path);
    if (!probe) return std::nullopt;
    probe.close();

    const CsvTable table = read_csv(path);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = static_cast<int>(r) + 2;
        if (row[0] != digest || parse_long(row[1], line) != n || parse_long(row[2], line) != N)
            continue;
        if (parse_double(row[3], line) != alpha || parse_long(row[4], line) != trials) continue;
        errno = 0;
        char* end = nullptr;
        const std::uint64_t row_seed = std::strtoull(row[5].c_str(), &end, 10);
        if (end == row[5].c_str() || *end != '\0' || errno != 0)
            throw CsvParseError("not a seed: '" + row[5] + "'", line);
        if (row_seed != seed) continue;
        CurvatureEstimate est;
        est.sigma_digest = digest;
        est.n = n;
        est.N = N;
        est.alpha = alpha;
        est.trials = trials;
        est.seed = seed;
        est.w_min = parse_double(row[6], line);
        est.kappa_alpha = parse_double(row[7], line);
        return est;
    }
    return std::nullopt;
}

void curvature_cache_append(const std::string& path, const CurvatureEstimate& est) {
    const bool exists = static_cast<bool>(std::ifstream(path));
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write curvature cache: " + path);
    if (!exists) out << kCacheHeader << "\n";
    out << est.sigma_digest << ',' << est.n << ',' << est.N << ',' << fmt_double(est.alpha) << ','
        << est.trials << ',' << est.seed << ',' << fmt_double(est.w_min) << ','
        << fmt_double(est.kappa_alpha) << "\n";
}

}  // namespace sparseva
