#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "hpd_core.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "parallel.hpp"

namespace hpdk {

struct SampleSet {
    std::vector<HpdMatrix> matrices;
    std::string label;
    json provenance = json::object();
};

enum class TestMethod { QuadraticPermutation, LinearAsymptotic };

inline const char* method_name(TestMethod m) {
    return m == TestMethod::LinearAsymptotic ? "linear_asymptotic" : "quadratic_permutation";
}

struct TestResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
    double level = 0.05;
    TestMethod method = TestMethod::LinearAsymptotic;
};

// [K(a_i, b_j)] through kernel_eval for every pair, so blocks built from the same
// samples share bit-identical entries.
inline RMatrix kernel_matrix(const KernelSpec& spec, const std::vector<HpdMatrix>& a,
                             const std::vector<HpdMatrix>& b, int threads = 1) {
    RMatrix k(a.size(), b.size());
    parallel_for(a.size(), threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < b.size(); ++j) k(i, j) = kernel_eval(spec, a[i], b[j]).real();
    });
    return k;
}

namespace detail {

inline void require_equal_sizes(const std::vector<HpdMatrix>& x, const std::vector<HpdMatrix>& y) {
    require(x.size() == y.size(), ErrorKind::SizeMismatch,
            "samples differ in size (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
}

// h(z_i, z_j) = (Kxx_ij + Kyy_ij) - (Kxy_ij + Kxy_ji), grouped so that swapping X and Y
// or setting Y = X is exact in floating point.
inline double h_term(const RMatrix& kxx, const RMatrix& kyy, const RMatrix& kxy, int i, int j) {
    return (kxx(i, j) + kyy(i, j)) - (kxy(i, j) + kxy(j, i));
}

// Unbiased statistic from a pooled Gram matrix and a labelling of its rows.
inline double mmd2_from_pooled(const RMatrix& kz, const std::vector<int>& xi, const std::vector<int>& yi) {
    const int m = static_cast<int>(xi.size());
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            s += (kz(xi[i], xi[j]) + kz(yi[i], yi[j])) - (kz(xi[i], yi[j]) + kz(xi[j], yi[i]));
        }
    return s / (static_cast<double>(m) * (m - 1));
}

}  // namespace detail

// (1/(m(m-1))) sum_{i != j} h(z_i, z_j)
inline double mmd2_unbiased(const KernelSpec& spec, const std::vector<HpdMatrix>& x, const std::vector<HpdMatrix>& y,
                            int threads = 1) {
    detail::require_equal_sizes(x, y);
    const int m = static_cast<int>(x.size());
    require(m >= 2, ErrorKind::SizeMismatch, "need m >= 2");
    const RMatrix kxx = kernel_matrix(spec, x, x, threads);
    const RMatrix kyy = kernel_matrix(spec, y, y, threads);
    const RMatrix kxy = kernel_matrix(spec, x, y, threads);
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) s += detail::h_term(kxx, kyy, kxy, i, j);
    return s / (static_cast<double>(m) * (m - 1));
}

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

// Linear-time statistic (2/m) sum_i h(z_{2i-1}, z_{2i}) with a one-sided Gaussian threshold
// z_{1-level} * sqrt(var(h) / (m/2)).
inline TestResult mmd_linear(const KernelSpec& spec, const std::vector<HpdMatrix>& x, const std::vector<HpdMatrix>& y,
                             double level) {
    detail::require_equal_sizes(x, y);
    const int m = static_cast<int>(x.size());
    require(m % 2 == 0, ErrorKind::OddSampleSize, "linear statistic needs an even sample size");
    require(m >= 4, ErrorKind::SizeMismatch, "linear statistic needs m >= 4");
    require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must be in (0, 1)");
    const int pairs = m / 2;
    std::vector<double> h(pairs);
    for (int i = 0; i < pairs; ++i) {
        const HpdMatrix& x1 = x[2 * i];
        const HpdMatrix& x2 = x[2 * i + 1];
        const HpdMatrix& y1 = y[2 * i];
        const HpdMatrix& y2 = y[2 * i + 1];
        h[i] = (kernel_eval(spec, x1, x2).real() + kernel_eval(spec, y1, y2).real()) -
               (kernel_eval(spec, x1, y2).real() + kernel_eval(spec, x2, y1).real());
    }
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= pairs;
    double var = 0.0;
    for (double v : h) var += (v - mean) * (v - mean);
    var /= (pairs - 1);
    TestResult r;
    r.method = TestMethod::LinearAsymptotic;
    r.level = level;
    r.statistic = mean;
    r.threshold = normal_quantile(1.0 - level) * std::sqrt(var / pairs);
    r.reject = r.statistic > r.threshold;
    return r;
}

// Quadratic statistic calibrated by relabelling the pooled sample n_perm times; the
// threshold is the (1 - level) empirical quantile of the permuted statistics.
inline TestResult permutation_test(const KernelSpec& spec, const std::vector<HpdMatrix>& x,
                                   const std::vector<HpdMatrix>& y, int n_perm, double level, std::uint64_t seed,
                                   int threads = 1) {
    detail::require_equal_sizes(x, y);
    require(n_perm >= 100, ErrorKind::InvalidArgument, "need n_perm >= 100");
    require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must be in (0, 1)");
    const int m = static_cast<int>(x.size());
    require(m >= 2, ErrorKind::SizeMismatch, "need m >= 2");
    std::vector<HpdMatrix> z(x);
    z.insert(z.end(), y.begin(), y.end());
    const RMatrix kz = kernel_matrix(spec, z, z, threads);
    std::vector<int> xi(m), yi(m);
    std::iota(xi.begin(), xi.end(), 0);
    std::iota(yi.begin(), yi.end(), m);
    TestResult r;
    r.method = TestMethod::QuadraticPermutation;
    r.level = level;
    r.statistic = detail::mmd2_from_pooled(kz, xi, yi);
    Rng rng(seed);
    std::vector<int> idx(2 * m);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> stats(n_perm);
    for (int p = 0; p < n_perm; ++p) {
        std::shuffle(idx.begin(), idx.end(), rng);
        std::copy(idx.begin(), idx.begin() + m, xi.begin());
        std::copy(idx.begin() + m, idx.end(), yi.begin());
        stats[p] = detail::mmd2_from_pooled(kz, xi, yi);
    }
    std::sort(stats.begin(), stats.end());
    const int q = std::clamp(static_cast<int>(std::ceil((1.0 - level) * n_perm)) - 1, 0, n_perm - 1);
    r.threshold = stats[q];
    r.reject = r.statistic > r.threshold;
    return r;
}

struct ExperimentConfig {
    int n = 3;
    int m = 100;
    double base_low = 30.0;  // X eigenvalues uniform on [base_low, base_low + 1]
    std::vector<double> r;
    int trials = 50;
    double level = 0.05;
    KernelSpec kernel{BetaPrimeSpec{3.0, false}};
    std::uint64_t seed = 0;
    TestMethod method = TestMethod::LinearAsymptotic;
    int n_perm = 200;
    int threads = 1;

    void validate() const {
        require(n >= 1 && m >= 4, ErrorKind::InvalidArgument, "need N >= 1 and m >= 4");
        require(trials >= 1, ErrorKind::InvalidArgument, "trials must be >= 1");
        require(level > 0.0 && level < 1.0, ErrorKind::InvalidArgument, "level must be in (0, 1)");
        require(base_low > 0.0, ErrorKind::InvalidArgument, "base interval must be positive");
        require(!r.empty(), ErrorKind::InvalidArgument, "empty r grid");
        for (double v : r) require(v > 0.0, ErrorKind::InvalidArgument, "scaling factors must be positive");
        kernel.bind(n);
    }
};

// r_k = 0.1 + k (4 - 0.1) / 80, k = 0..80
inline std::vector<double> default_r_grid() {
    std::vector<double> r;
    for (int k = 0; k <= 80; ++k) r.push_back(0.1 + k * (4.0 - 0.1) / 80.0);
    return r;
}

inline ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.n = j.value("N", c.n);
        c.m = j.value("m", c.m);
        c.base_low = j.value("base_low", c.base_low);
        c.r = j.contains("r") ? j.at("r").get<std::vector<double>>() : default_r_grid();
        c.trials = j.value("trials", c.trials);
        c.level = j.value("level", c.level);
        if (j.contains("kernel")) c.kernel = parse_kernel_spec(j.at("kernel").get<std::string>());
        c.seed = j.value("seed", c.seed);
        const std::string method = j.value("method", std::string("linear"));
        require(method == "linear" || method == "quadratic", ErrorKind::InvalidArgument, "unknown method " + method);
        c.method = method == "linear" ? TestMethod::LinearAsymptotic : TestMethod::QuadraticPermutation;
        c.n_perm = j.value("n_perm", c.n_perm);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed experiment config: ") + e.what());
    }
    return c;
}

inline json experiment_to_json(const ExperimentConfig& c) {
    return json{{"N", c.n},
                {"m", c.m},
                {"base_low", c.base_low},
                {"r", c.r},
                {"trials", c.trials},
                {"level", c.level},
                {"kernel", to_string(c.kernel)},
                {"seed", c.seed},
                {"method", c.method == TestMethod::LinearAsymptotic ? "linear" : "quadratic"},
                {"n_perm", c.n_perm}};
}

struct TrialRecord {
    int r_index = 0;
    int trial = 0;
    TestResult result;
};

struct ExperimentRow {
    double r = 0.0;
    int rejections = 0;
    int trials = 0;
    double rate() const { return trials ? static_cast<double>(rejections) / trials : 0.0; }
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::vector<TrialRecord> trials;
};

// One job per (r_k, trial); each draws X and Y from its own stream derived from
// (seed, k, trial), so results do not depend on the thread count.
inline ExperimentResult two_sample_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int cells = static_cast<int>(cfg.r.size());
    const std::size_t jobs = static_cast<std::size_t>(cells) * cfg.trials;
    std::vector<TrialRecord> rec(jobs);
    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        const int k = static_cast<int>(job / cfg.trials);
        const int trial = static_cast<int>(job % cfg.trials);
        const std::uint64_t s = derive_seed(cfg.seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial));
        Rng rng(s);
        const double a = cfg.base_low, ra = cfg.r[k] * cfg.base_low;
        const auto x = sample_spd(cfg.n, a, a + 1.0, cfg.m, Field::Real, rng);
        const auto y = sample_spd(cfg.n, ra, ra + 1.0, cfg.m, Field::Real, rng);
        TrialRecord t{k, trial, {}};
        if (cfg.method == TestMethod::LinearAsymptotic)
            t.result = mmd_linear(cfg.kernel, x, y, cfg.level);
        else
            t.result = permutation_test(cfg.kernel, x, y, cfg.n_perm, cfg.level, splitmix64(s));
        rec[job] = t;
    });
    ExperimentResult out;
    out.rows.resize(cells);
    for (int k = 0; k < cells; ++k) out.rows[k].r = cfg.r[k];
    for (const auto& t : rec) {
        out.rows[t.r_index].trials += 1;
        out.rows[t.r_index].rejections += t.result.reject ? 1 : 0;
    }
    out.trials = std::move(rec);
    return out;
}

}  // namespace hpdk
