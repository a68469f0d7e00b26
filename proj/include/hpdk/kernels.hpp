#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hpd_core.hpp"
#include "parallel.hpp"
#include "special.hpp"
#include "transform.hpp"

namespace hpdk {

struct BetaPrimeSpec {
    double alpha = 2.0;
    bool include_gamma = false;
};
struct HeatSpec {
    double kappa = 1.0;
};
struct CauchySpec {
    double kappa = 1.0;
};
struct RadialSpec {
    RadialFunction f;
    std::string text;  // as parsed, for round trips
};

struct KernelSpec {
    std::variant<BetaPrimeSpec, HeatSpec, CauchySpec, RadialSpec> v;

    // Parameter checks that depend on N (alpha > N - 1 for Beta-prime).
    void bind(int n) const {
        if (const auto* b = std::get_if<BetaPrimeSpec>(&v))
            require(b->alpha > n - 1, ErrorKind::AlphaOutOfRange,
                    "Beta-prime needs alpha > N - 1 (alpha=" + std::to_string(b->alpha) +
                        ", N=" + std::to_string(n) + ")");
    }
};

namespace detail {

inline std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        require(eq != std::string::npos, ErrorKind::InvalidArgument, "parameter without '=': " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

inline double param(const std::map<std::string, std::string>& p, const std::string& key, double fallback,
                    bool required = false) {
    const auto it = p.find(key);
    if (it == p.end()) {
        require(!required, ErrorKind::InvalidArgument, "missing parameter " + key);
        return fallback;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        require(used == it->second.size(), ErrorKind::InvalidArgument, "bad number " + it->second);
        return v;
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidArgument, "bad number for " + key + ": " + it->second);
    }
}

inline void only_keys(const std::map<std::string, std::string>& p, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : p) {
        bool ok = false;
        for (const char* a : keys) ok = ok || k == a;
        require(ok, ErrorKind::InvalidArgument, "unknown parameter " + k);
    }
}

}  // namespace detail

// Named radial functions: gaussian:sigma=, betaprime:alpha=,n=, heat:kappa=, cauchy:kappa=, zero.
inline RadialFunction parse_radial(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const auto p = detail::parse_params(colon == std::string::npos ? "" : text.substr(colon + 1));
    if (name == "gaussian") {
        detail::only_keys(p, {"sigma"});
        return radial_gaussian(detail::param(p, "sigma", 1.0));
    }
    if (name == "betaprime") {
        detail::only_keys(p, {"alpha", "n", "gamma"});
        return radial_beta_prime(detail::param(p, "alpha", 2.0), static_cast<int>(detail::param(p, "n", 2.0)),
                                 detail::param(p, "gamma", 0.0) != 0.0);
    }
    if (name == "heat") {
        detail::only_keys(p, {"kappa"});
        return radial_heat(detail::param(p, "kappa", 1.0));
    }
    if (name == "cauchy") {
        detail::only_keys(p, {"kappa"});
        return radial_cauchy(detail::param(p, "kappa", 1.0));
    }
    if (name == "zero") return radial_zero();
    throw Error(ErrorKind::InvalidArgument, "unknown radial function " + name);
}

// Named spectral densities: heat:kappa=,n=, gaussian:kappa=, betaprime:alpha=,n=, zero.
inline SpectralDensity parse_density(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const auto p = detail::parse_params(colon == std::string::npos ? "" : text.substr(colon + 1));
    if (name == "heat") {
        detail::only_keys(p, {"kappa", "n"});
        return density_heat(detail::param(p, "kappa", 1.0), static_cast<int>(detail::param(p, "n", 2.0)));
    }
    if (name == "gaussian") {
        detail::only_keys(p, {"kappa"});
        return density_gaussian(detail::param(p, "kappa", 1.0));
    }
    if (name == "betaprime") {
        detail::only_keys(p, {"alpha", "n"});
        return density_beta_prime(detail::param(p, "alpha", 2.0), static_cast<int>(detail::param(p, "n", 2.0)));
    }
    if (name == "zero") return density_zero();
    throw Error(ErrorKind::InvalidArgument, "unknown spectral density " + name);
}

// "betaprime:alpha=2[,gamma=1]", "heat:kappa=0.5", "cauchy:kappa=1", "radial:<name>[:params]"
inline KernelSpec parse_kernel_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "radial") {
        require(!rest.empty(), ErrorKind::InvalidArgument, "radial kernel needs a function name");
        return KernelSpec{RadialSpec{parse_radial(rest), rest}};
    }
    const auto p = detail::parse_params(rest);
    if (name == "betaprime") {
        detail::only_keys(p, {"alpha", "gamma"});
        const double a = detail::param(p, "alpha", 0.0, true);
        require(a > 0.0, ErrorKind::AlphaOutOfRange, "alpha must be positive");
        return KernelSpec{BetaPrimeSpec{a, detail::param(p, "gamma", 0.0) != 0.0}};
    }
    if (name == "heat") {
        detail::only_keys(p, {"kappa"});
        const double k = detail::param(p, "kappa", 0.0, true);
        require(k > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
        return KernelSpec{HeatSpec{k}};
    }
    if (name == "cauchy") {
        detail::only_keys(p, {"kappa"});
        const double k = detail::param(p, "kappa", 0.0, true);
        require(k > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
        return KernelSpec{CauchySpec{k}};
    }
    throw Error(ErrorKind::InvalidArgument, "unknown kernel " + name);
}

inline std::string to_string(const KernelSpec& s) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* b = std::get_if<BetaPrimeSpec>(&s.v))
        os << "betaprime:alpha=" << b->alpha << (b->include_gamma ? ",gamma=1" : "");
    else if (const auto* h = std::get_if<HeatSpec>(&s.v))
        os << "heat:kappa=" << h->kappa;
    else if (const auto* c = std::get_if<CauchySpec>(&s.v))
        os << "cauchy:kappa=" << c->kappa;
    else
        os << "radial:" << std::get<RadialSpec>(s.v).text;
    return os.str();
}

namespace detail {

inline double log_det_real_or_complex(const CMatrix& a, bool real) {
    if (real) {
        Eigen::LLT<RMatrix> llt(a.real());
        require(llt.info() == Eigen::Success, ErrorKind::NotPositiveDefinite, "cholesky");
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    Eigen::LLT<CMatrix> llt(a);
    require(llt.info() == Eigen::Success, ErrorKind::NotPositiveDefinite, "cholesky");
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

inline double log_det_sum(const HpdMatrix& x, const HpdMatrix& y) {
    if (x.is_real() && y.is_real()) {
        Eigen::LLT<RMatrix> llt(x.matrix().real() + y.matrix().real());
        return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    return log_det_real_or_complex(x.matrix() + y.matrix(), false);
}

inline double beta_prime_log(double alpha, int n, bool include_gamma, double ldx, double ldy, double ldxy) {
    double v = alpha * (ldx + ldy - 2.0 * ldxy);
    if (include_gamma) v += log_gamma_m_scalar(n, 2.0 * alpha);
    return v;
}

// Lexicographic order on entries, used to evaluate K(x, y) and K(y, x) through the same
// arithmetic so that K(y, x) = conj K(x, y) holds exactly.
inline bool canonical_less(const HpdMatrix& x, const HpdMatrix& y) {
    const CMatrix& a = x.matrix();
    const CMatrix& b = y.matrix();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
}

}  // namespace detail

// Gamma_M(2 alpha) [det x det y / det(x + y)^2]^alpha via Cholesky log-determinants.
inline double beta_prime(const HpdMatrix& x, const HpdMatrix& y, double alpha, bool include_gamma = false) {
    require_same_dim(x.dim(), y.dim());
    const int n = x.dim();
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    return std::exp(detail::beta_prime_log(alpha, n, include_gamma, x.log_det(), y.log_det(),
                                           detail::log_det_sum(x, y)));
}

// K(x, x) for every x: Gamma_M(2 alpha) 4^{-N alpha} (or 4^{-N alpha} without the factor).
inline double beta_prime_diagonal(int n, double alpha, bool include_gamma = false) {
    double v = -n * alpha * std::log(4.0);
    if (include_gamma) v += log_gamma_m_scalar(n, 2.0 * alpha);
    return std::exp(v);
}

inline cd radial_value(const KernelSpec& spec, const Spectrum& rho) {
    if (const auto* h = std::get_if<HeatSpec>(&spec.v)) return heat_kernel_radial(h->kappa, rho);
    if (const auto* c = std::get_if<CauchySpec>(&spec.v)) return cauchy_family(c->kappa, rho);
    if (const auto* r = std::get_if<RadialSpec>(&spec.v)) return r->f(rho);
    const auto& b = std::get<BetaPrimeSpec>(spec.v);
    return radial_beta_prime(b.alpha, rho.size(), b.include_gamma)(rho);
}

// K(x, y) = f(spectrum of y^{-1} x); Beta-prime uses its determinant form.
inline cd kernel_eval(const KernelSpec& spec, const HpdMatrix& x, const HpdMatrix& y) {
    require_same_dim(x.dim(), y.dim());
    spec.bind(x.dim());
    if (const auto* b = std::get_if<BetaPrimeSpec>(&spec.v)) return beta_prime(x, y, b->alpha, b->include_gamma);
    if (detail::canonical_less(y, x)) return std::conj(radial_value(spec, relative_spectrum(y, x)));
    return radial_value(spec, relative_spectrum(x, y));
}

struct GramMatrix {
    CMatrix entries;
    std::string kernel;
    std::string fingerprint;
    int size() const { return static_cast<int>(entries.rows()); }
};

// FNV-1a over the raw entries of every sample.
inline std::string samples_fingerprint(const std::vector<HpdMatrix>& xs) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& x : xs) {
        const int n = x.dim();
        mix(&n, sizeof n);
        mix(x.matrix().data(), sizeof(cd) * static_cast<std::size_t>(x.matrix().size()));
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// Upper triangle computed (optionally in parallel), lower triangle mirrored.
inline GramMatrix gram(const KernelSpec& spec, const std::vector<HpdMatrix>& xs, int threads = 1) {
    require(!xs.empty(), ErrorKind::InvalidArgument, "empty sample list");
    const int m = static_cast<int>(xs.size());
    const int n = xs.front().dim();
    for (const auto& x : xs) require_same_dim(x.dim(), n);
    spec.bind(n);
    GramMatrix g;
    g.entries = CMatrix::Zero(m, m);
    g.kernel = to_string(spec);
    g.fingerprint = samples_fingerprint(xs);
    if (const auto* b = std::get_if<BetaPrimeSpec>(&spec.v)) {
        std::vector<double> ld(m);
        for (int i = 0; i < m; ++i) ld[i] = xs[i].log_det();
        const double lg = b->include_gamma ? log_gamma_m_scalar(n, 2.0 * b->alpha) : 0.0;
        parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t i) {
            for (int j = static_cast<int>(i); j < m; ++j) {
                const double ldxy = detail::log_det_sum(xs[i], xs[j]);
                g.entries(i, j) = std::exp(b->alpha * (ld[i] + ld[j] - 2.0 * ldxy) + lg);
            }
        });
    } else {
        parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t i) {
            for (int j = static_cast<int>(i); j < m; ++j) g.entries(i, j) = kernel_eval(spec, xs[i], xs[j]);
        });
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) g.entries(i, j) = std::conj(g.entries(j, i));
    return g;
}

struct PsdReport {
    double min_eig = 0.0;
    double trace = 0.0;
    bool is_psd = false;
};

// PSD when the smallest eigenvalue is >= -tol * trace / m.
inline PsdReport psd_check(const CMatrix& a, double tol = 1e-8) {
    require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::DimensionMismatch, "square matrix required");
    const CMatrix h = (a + a.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
    PsdReport r;
    r.min_eig = es.eigenvalues().minCoeff();
    r.trace = h.trace().real();
    r.is_psd = r.min_eig >= -tol * r.trace / static_cast<double>(a.rows());
    return r;
}

inline PsdReport psd_check(const GramMatrix& g, double tol = 1e-8) { return psd_check(g.entries, tol); }

struct BenchRow {
    int n = 0;
    int repeat = 0;
    double seconds = 0.0;
};

struct BenchSummary {
    int n = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
    int threads = 1;
    double alpha = 0.0;  // Beta-prime parameter actually used (0 for other kernels)
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<BenchSummary> summary;
};

// Wall-clock time of gram() on fresh samples (eigenvalues uniform on [1, 2]) for each N.
// One warm-up round per N is discarded. Beta-prime runs use alpha = N.
inline BenchResult bench_gram(const KernelSpec& spec, const std::vector<int>& dims, int m, int repeats,
                              std::uint64_t seed, int threads = 1) {
    require(m >= 2 && repeats >= 1, ErrorKind::InvalidArgument, "need m >= 2 and repeats >= 1");
    BenchResult out;
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int n = dims[di];
        KernelSpec s = spec;
        double alpha = 0.0;
        if (auto* b = std::get_if<BetaPrimeSpec>(&s.v)) {
            b->alpha = n;
            alpha = n;
        }
        std::vector<double> times;
        for (int r = -1; r < repeats; ++r) {
            const auto xs = sample_spd(n, 1.0, 2.0, m, Field::Real, derive_seed(seed, di, r + 1));
            const auto t0 = std::chrono::steady_clock::now();
            const GramMatrix g = gram(s, xs, threads);
            const auto t1 = std::chrono::steady_clock::now();
            if (g.entries.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty gram");
            if (r < 0) continue;
            const double sec = std::chrono::duration<double>(t1 - t0).count();
            times.push_back(sec);
            out.rows.push_back({n, r, sec});
        }
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= times.size();
        double var = 0.0;
        for (double t : times) var += (t - mean) * (t - mean);
        const double sd = times.size() > 1 ? std::sqrt(var / (times.size() - 1)) : 0.0;
        out.summary.push_back({n, mean, sd, threads, alpha});
    }
    return out;
}

}  // namespace hpdk
