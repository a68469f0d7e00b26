#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "hpd_core.hpp"
#include "special.hpp"

namespace hpdk {

inline RVec delta_vector(int n) {
    require(n >= 1, ErrorKind::InvalidArgument, "N must be >= 1");
    RVec d(n);
    for (int k = 0; k < n; ++k) d(k) = 0.5 * (2.0 * (k + 1) - n - 1);
    return d;
}

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// log prod_{k=1}^{N-1} k!
inline double log_superfactorial(int n) {
    double acc = 0.0;
    for (int k = 1; k < n; ++k) acc += log_factorial(k);
    return acc;
}

namespace detail {

// H(k, j) = h_j(x_0, ..., x_k), the complete homogeneous symmetric polynomial.
template <class Vec>
auto complete_homogeneous(const Vec& x, int jmax) {
    using S = std::decay_t<decltype(x[0])>;
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> h(n, jmax + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k, 0) = S(1);
        for (int j = 1; j <= jmax; ++j) h(k, j) = (k > 0 ? h(k - 1, j) : S(0)) + x[k] * h(k, j - 1);
    }
    return h;
}

inline double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double min_gap(const CVec& v) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < v.size(); ++k)
        for (Eigen::Index l = k + 1; l < v.size(); ++l) g = std::min(g, std::abs(v(l) - v(k)));
    return g;
}

inline cd log_vandermonde(const CVec& v) {
    cd acc = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k)
        for (Eigen::Index l = k + 1; l < v.size(); ++l) acc += std::log(v(l) - v(k));
    return acc;
}

// det[exp(nu_l sigma_k)] / (V(sigma) V(nu)) through the double divided-difference
// expansion: entry (k, l) = sum_n h_{n-k}(sigma_0..sigma_k) h_{n-l}(nu_0..nu_l) / n!.
// Exact at coincident points; accurate while max|sigma| * max|nu| is moderate.
inline cd alternant_series(CVec sigma, CVec nu) {
    const int n = static_cast<int>(sigma.size());
    const double S = max_abs(sigma), L = max_abs(nu);
    if (S > 0.0 && L > 0.0) {
        // det[exp(nu sigma)] and V(sigma) V(nu) are both invariant under sigma -> c sigma, nu -> nu / c.
        const double c = std::sqrt(L / S);
        sigma *= c;
        nu /= c;
    }
    const double prod = S * L;
    const int nmax = 30 + 4 * static_cast<int>(std::ceil(prod)) + 2 * n;
    const CMatrix hs = complete_homogeneous(sigma, nmax);
    const CMatrix hn = complete_homogeneous(nu, nmax);
    RVec inv_fact(nmax + 1);
    inv_fact(0) = 1.0;
    for (int j = 1; j <= nmax; ++j) inv_fact(j) = inv_fact(j - 1) / j;
    CMatrix m(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            cd acc = 0.0;
            for (int p = std::max(k, l); p <= nmax; ++p) acc += hs(k, p - k) * hn(l, p - l) * inv_fact(p);
            m(k, l) = acc;
        }
    if (n == 1) return m(0, 0);
    return Eigen::PartialPivLU<CMatrix>(m).determinant();
}

// Same ratio from the alternant itself, with per-row scaling in the log domain.
inline cd log_alternant_direct(const CVec& sigma, const CVec& nu) {
    const int n = static_cast<int>(sigma.size());
    CMatrix a(n, n);
    double shift = 0.0;
    for (int k = 0; k < n; ++k) {
        double r = -std::numeric_limits<double>::infinity();
        for (int l = 0; l < n; ++l) r = std::max(r, (nu(l) * sigma(k)).real());
        for (int l = 0; l < n; ++l) a(k, l) = std::exp(nu(l) * sigma(k) - r);
        shift += r;
    }
    const cd det = Eigen::PartialPivLU<CMatrix>(a).determinant();
    return shift + std::log(det) - log_vandermonde(sigma) - log_vandermonde(nu);
}

inline constexpr double kSeriesProduct = 8.0;
inline constexpr double kDirectGap = 1e-4;

inline bool series_ok(const CVec& sigma, const CVec& nu) {
    return max_abs(sigma) * max_abs(nu) <= kSeriesProduct;
}

inline bool direct_ok(const CVec& sigma, const CVec& nu) {
    const double S = max_abs(sigma), L = max_abs(nu);
    return min_gap(sigma) * L >= kDirectGap && min_gap(nu) * S >= kDirectGap;
}

// Offsets j - (K-1)/2 inside each cluster of nearly equal values, zero elsewhere.
inline CVec cluster_offsets(const CVec& v, double tol) {
    const int n = static_cast<int>(v.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (v(a).real() != v(b).real()) return v(a).real() < v(b).real();
        return v(a).imag() < v(b).imag();
    });
    CVec off = CVec::Zero(n);
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i < n && std::abs(v(idx[i]) - v(idx[i - 1])) < tol) continue;
        const int len = i - start;
        if (len > 1)
            for (int j = 0; j < len; ++j) off(idx[start + j]) = j - 0.5 * (len - 1);
        start = i;
    }
    return off;
}

inline cd log_alternant_regular(const CVec& sigma, const CVec& nu) {
    if (series_ok(sigma, nu)) return std::log(alternant_series(sigma, nu));
    return log_alternant_direct(sigma, nu);
}

inline constexpr double kPerturbProduct = 3e-3;
inline constexpr double kConfluentTol = 1e-6;

// Symmetric spreading of clustered values plus two Richardson levels; the ratio is
// analytic, so g(eps) = (f(eps) + f(-eps)) / 2 is even in eps.
inline cd alternant_perturbed(const CVec& sigma, const CVec& nu) {
    const double S = max_abs(sigma), L = max_abs(nu);
    const CVec os = cluster_offsets(sigma, 2.0 * kDirectGap / std::max(L, 1e-300));
    const CVec on = cluster_offsets(nu, 2.0 * kDirectGap / std::max(S, 1e-300));
    const double es = kPerturbProduct / std::max(L, 1e-300);
    const double en = kPerturbProduct / std::max(S, 1e-300);
    auto f = [&](double t) {
        const CVec s = sigma + (t * es) * os;
        const CVec u = nu + (t * en) * on;
        return std::exp(log_alternant_regular(s, u));
    };
    auto g = [&](double t) { return 0.5 * (f(t) + f(-t)); };
    const cd g1 = g(1.0), g2 = g(0.5), g4 = g(0.25);
    const cd r1 = (4.0 * g2 - g1) / 3.0;
    const cd r2 = (4.0 * g4 - g2) / 3.0;
    const double err = std::abs(r2 - r1) / 15.0;
    if (err > kConfluentTol * std::abs(r2))
        throw Error(ErrorKind::NumericalInstability,
                    "confluent limit estimate has relative error " + std::to_string(err / std::abs(r2)));
    return r2;
}

}  // namespace detail

// log of det[exp(mu_l s_k)] / (V(s) V(mu)), an entire function symmetric in s and in mu.
inline cd log_alternant_ratio(const CVec& s, const CVec& mu) {
    require(s.size() == mu.size() && s.size() > 0, ErrorKind::DimensionMismatch, "alternant sizes");
    const int n = static_cast<int>(s.size());
    const cd sbar = s.mean(), mbar = mu.mean();
    const CVec sigma = s.array() - sbar;
    const CVec nu = mu.array() - mbar;
    const cd pre = static_cast<double>(n) * sbar * mbar;
    if (n == 1) return pre;
    if (detail::series_ok(sigma, nu)) return pre + std::log(detail::alternant_series(sigma, nu));
    if (detail::direct_ok(sigma, nu)) return pre + detail::log_alternant_direct(sigma, nu);
    return pre + std::log(detail::alternant_perturbed(sigma, nu));
}

inline cd alternant_ratio(const CVec& s, const CVec& mu) { return std::exp(log_alternant_ratio(s, mu)); }

// log of V(log rho) / V(rho), factor by factor so coincident eigenvalues are exact.
inline double log_vandermonde_log_ratio(const RVec& rho) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < rho.size(); ++k)
        for (Eigen::Index l = k + 1; l < rho.size(); ++l) {
            const double lo = std::min(rho(k), rho(l)), hi = std::max(rho(k), rho(l));
            const double d = std::log(hi) - std::log(lo);
            acc -= std::log(lo) + (d == 0.0 ? 0.0 : std::log(std::expm1(d) / d));
        }
    return acc;
}

inline cd log_spherical_function(const CVec& lambda, const Spectrum& rho) {
    const int n = rho.size();
    require_same_dim(static_cast<int>(lambda.size()), n);
    const CVec s = rho.logs().cast<cd>();
    const CVec mu = lambda.array() + 0.5 * (n - 1);
    return log_superfactorial(n) + log_alternant_ratio(s, mu) + log_vandermonde_log_ratio(rho.values());
}

// Gelfand-Naimark: prod k! det[rho_k^{lambda_l + (N-1)/2}] / (V(lambda) V(rho)).
inline cd spherical_function(const CVec& lambda, const Spectrum& rho) {
    return std::exp(log_spherical_function(lambda, rho));
}

inline cd spherical_function(const CVec& lambda, const HpdMatrix& x) {
    return spherical_function(lambda, eigenvalues(x));
}

struct McEstimate {
    cd mean;
    double se_re = 0.0;
    double se_im = 0.0;
    std::int64_t samples = 0;
    double se() const { return std::hypot(se_re, se_im); }
};

// Haar average of Delta_{lambda + delta}(u x u^H).
inline McEstimate monte_carlo_spherical(const CVec& lambda, const HpdMatrix& x, std::int64_t samples,
                                        std::uint64_t seed) {
    require(samples >= 1, ErrorKind::InvalidArgument, "samples must be >= 1");
    const int n = x.dim();
    require_same_dim(static_cast<int>(lambda.size()), n);
    const CVec s = lambda + delta_vector(n).cast<cd>();
    McEstimate est;
    est.samples = samples;
    const CMatrix& a = x.matrix();
    const bool scalar = (a - a(0, 0) * CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0;
    if (n == 1 || scalar) {
        // u x u^H = x exactly, so every draw gives the same value.
        est.mean = power_function(s, x);
        return est;
    }
    Rng rng(seed);
    double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const CMatrix u = detail::haar_unitary_matrix(n, rng);
        CMatrix y = u * a * u.adjoint();
        y = (y + y.adjoint()) * 0.5;
        Eigen::LLT<CMatrix> llt(y);
        cd lg = 0.0;
        for (int j = 0; j < n; ++j) lg += s(j) * (2.0 * std::log(llt.matrixLLT()(j, j).real()));
        const cd v = std::exp(lg);
        sr += v.real();
        si += v.imag();
        sr2 += v.real() * v.real();
        si2 += v.imag() * v.imag();
    }
    const double m = static_cast<double>(samples);
    est.mean = cd(sr / m, si / m);
    if (samples > 1) {
        const double vr = std::max(0.0, (sr2 - sr * sr / m) / (m - 1.0));
        const double vi = std::max(0.0, (si2 - si * si / m) / (m - 1.0));
        est.se_re = std::sqrt(vr / m);
        est.se_im = std::sqrt(vi / m);
    }
    return est;
}

class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts) : p_(std::move(parts)) {
        for (std::size_t k = 0; k < p_.size(); ++k) {
            require(p_[k] >= 0, ErrorKind::InvalidArgument, "negative part");
            if (k > 0) require(p_[k] <= p_[k - 1], ErrorKind::InvalidArgument, "parts must be weakly decreasing");
        }
    }
    Partition(std::initializer_list<int> l) : Partition(std::vector<int>(l)) {}

    int size() const { return static_cast<int>(p_.size()); }
    int operator[](int k) const { return p_[k]; }
    const std::vector<int>& parts() const { return p_; }
    int weight() const { return std::accumulate(p_.begin(), p_.end(), 0); }
    bool operator==(const Partition& o) const { return p_ == o.p_; }

private:
    std::vector<int> p_;
};

// Partitions of n into at most `parts` parts, zero padded, lexicographically increasing.
inline std::vector<Partition> partitions_of(int n, int parts) {
    require(n >= 0 && parts >= 1, ErrorKind::InvalidArgument, "bad partition request");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int maxpart) -> void {
        if (static_cast<int>(cur.size()) == parts) {
            if (remaining == 0) out.push_back(cur);
            return;
        }
        const int slots = parts - static_cast<int>(cur.size());
        for (int v = std::min(remaining, maxpart); v >= 0; --v) {
            if (static_cast<long>(v) * slots < remaining) break;
            cur.push_back(v);
            self(self, remaining - v, v);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    std::sort(out.begin(), out.end());
    std::vector<Partition> res;
    res.reserve(out.size());
    for (auto& p : out) res.emplace_back(std::move(p));
    return res;
}

// det[x_k^{m_l + N - l}] / det[x_k^{N - l}], evaluated as a determinant of complete
// homogeneous polynomials so that coincident x are handled exactly.
inline double schur_polynomial(const Partition& m, const RVec& x) {
    const int n = static_cast<int>(x.size());
    require_same_dim(m.size(), n);
    if (n == 0) return 1.0;
    std::vector<int> a(n);
    for (int l = 0; l < n; ++l) a[l] = m[l] + n - 1 - l;
    const RMatrix h = detail::complete_homogeneous(x, a[0] + 1);
    RMatrix b(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const int j = a[l] - k;
            b(k, l) = j >= 0 ? h(k, j) : 0.0;
        }
    const double det = n == 1 ? b(0, 0) : Eigen::PartialPivLU<RMatrix>(b).determinant();
    return (half_pairs(n) % 2 == 0) ? det : -det;
}

inline double schur_polynomial(const Partition& m, const Spectrum& rho) { return schur_polynomial(m, rho.values()); }

// prod k! S_m(rho) / Pi(lambda), lambda = m - delta, Pi(mu) = prod_{k<l} (mu_k - mu_l).
inline double spherical_via_schur(const Partition& m, const Spectrum& rho) {
    const int n = rho.size();
    require_same_dim(m.size(), n);
    const RVec d = delta_vector(n);
    double pi = 1.0;
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) pi *= (m[k] - d(k)) - (m[l] - d(l));
    return std::exp(log_superfactorial(n)) * schur_polynomial(m, rho) / pi;
}

// Number of standard Young tableaux of shape m, by the hook length formula.
inline double standard_tableaux_count(const Partition& m) {
    const int n = m.weight();
    std::vector<int> conj;
    for (int k = 0; k < m.size(); ++k)
        for (int j = 0; j < m[k]; ++j) {
            if (static_cast<int>(conj.size()) <= j) conj.push_back(0);
            ++conj[j];
        }
    long double lg = std::lgamma(static_cast<long double>(n) + 1.0L);
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m[i]; ++j) lg -= std::log(static_cast<long double>(m[i] - j + conj[j] - i - 1));
    return static_cast<double>(std::round(std::exp(lg)));
}

// Z_m = c_m S_m with sum_{[m]=n} Z_m = (sum rho)^n; c_m counts standard tableaux.
inline double zonal_polynomial(const Partition& m, const RVec& x) {
    return standard_tableaux_count(m) * schur_polynomial(m, x);
}

inline double zonal_polynomial(const Partition& m, const Spectrum& rho) { return zonal_polynomial(m, rho.values()); }

namespace detail {

inline cd sch(cd a) { return std::abs(a) < 1e-8 ? cd(1.0) + a * a / 6.0 : std::sinh(a) / a; }

inline double sc(double a) { return std::abs(a) < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a; }

inline cd bilinear(const CVec& a, const CVec& b) { return (a.array() * b.array()).sum(); }

}  // namespace detail

struct GaussZ {
    cd product;
    std::optional<cd> determinant;  // absent when V(lambda) = 0
};

// Gaussian integrals Z(sigma, lambda) in product form and, for distinct lambda,
// determinant form det[sigma exp((sigma^2/2)(delta_k + lambda_l)^2)] / V(lambda).
inline GaussZ gauss_Z(double sigma, const CVec& lambda, bool with_determinant = true) {
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    const int n = static_cast<int>(lambda.size());
    require(n >= 1, ErrorKind::InvalidArgument, "empty lambda");
    const RVec d = delta_vector(n);
    const double a = 0.5 * sigma * sigma;
    cd lp = static_cast<double>(n * n) * std::log(sigma) + a * (detail::bilinear(lambda, lambda) + d.squaredNorm());
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) lp += std::log(detail::sch(a * (lambda(l) - lambda(k))));
    GaussZ z{std::exp(lp), std::nullopt};
    if (with_determinant) {
        const cd v = vandermonde(lambda);
        if (std::abs(v) > 0.0) {
            CMatrix m(n, n);
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) m(k, l) = sigma * std::exp(a * (d(k) + lambda(l)) * (d(k) + lambda(l)));
            const cd det = n == 1 ? m(0, 0) : Eigen::PartialPivLU<CMatrix>(m).determinant();
            z.determinant = det / v;
        }
    }
    return z;
}

// sigma^N e^{sigma^2 (delta,delta)} prod_{k<l} sinh((sigma^2/2)(l - k)), the Gaussian volume integral.
inline double gauss_Z_volume(double sigma, int n) {
    require(sigma > 0.0 && n >= 1, ErrorKind::InvalidArgument, "bad arguments");
    const RVec d = delta_vector(n);
    double v = std::pow(sigma, n) * std::exp(sigma * sigma * d.squaredNorm());
    for (int k = 1; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) v *= std::sinh(0.5 * sigma * sigma * (l - k));
    return v;
}

// sigma^{N^2} e^{(sigma^2/2)((delta,delta) - (t,t))} prod_{k<l} sc((sigma^2/2)(t_l - t_k))
inline double gauss_spherical_transform(double sigma, const RVec& t) {
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    const int n = static_cast<int>(t.size());
    const RVec d = delta_vector(n);
    const double a = 0.5 * sigma * sigma;
    double v = std::pow(sigma, n * n) * std::exp(a * (d.squaredNorm() - t.squaredNorm()));
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) v *= detail::sc(a * (t(l) - t(k)));
    return v;
}

namespace detail {

template <class F>
cd radial_laplacian_fd(F& f, const RVec& rho, double h_rel) {
    const int n = static_cast<int>(rho.size());
    const cd f0 = f(rho);
    std::vector<cd> d1(n), d2(n);
    for (int k = 0; k < n; ++k) {
        const double h = h_rel * rho(k);
        RVec p = rho, q = rho;
        p(k) += h;
        q(k) -= h;
        const cd fp = f(p), fq = f(q);
        d1[k] = (fp - fq) / (2.0 * h);
        d2[k] = (fp - 2.0 * f0 + fq) / (h * h);
    }
    cd acc = 0.0;
    for (int k = 0; k < n; ++k) acc += rho(k) * rho(k) * d2[k] + static_cast<double>(n) * rho(k) * d1[k];
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) acc += 2.0 * rho(k) * rho(l) / (rho(k) - rho(l)) * (d1[k] - d1[l]);
    return acc;
}

}  // namespace detail

struct LaplacianResult {
    cd value;
    double error_estimate = 0.0;
};

// Radial Laplace-Beltrami operator by central differences with step h_rel * rho_k;
// the step-halving difference serves as the error estimate.
template <class F>
LaplacianResult laplace_beltrami_radial(F&& f, const Spectrum& rho, double h_rel = 1e-4) {
    const RVec& r = rho.values();
    const int n = rho.size();
    for (int k = 0; k + 1 < n; ++k)
        if (r(k + 1) - r(k) <= 10.0 * 2.0 * h_rel * r(k + 1))
            throw Error(ErrorKind::StepTooLarge, "eigenvalues closer than ten steps");
    const cd lh = detail::radial_laplacian_fd(f, r, h_rel);
    const cd l2h = detail::radial_laplacian_fd(f, r, 2.0 * h_rel);
    const double err = std::abs(lh - l2h) / 3.0;
    const double scale = std::max(std::abs(lh), std::abs(f(r)));
    if (err > 1e-4 * scale)
        throw Error(ErrorKind::StepTooLarge, "Richardson error estimate " + std::to_string(err));
    return {lh, err};
}

}  // namespace hpdk
