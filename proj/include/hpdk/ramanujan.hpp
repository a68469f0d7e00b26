#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hpd_core.hpp"
#include "special.hpp"
#include "spherical.hpp"
#include "transform.hpp"

namespace hpdk {

struct PsiFunction {
    std::string name;
    std::function<cd(const CVec&)> eval;

    cd operator()(const CVec& l) const { return eval(l); }
};

inline PsiFunction psi_one() {
    return {"one", [](const CVec&) { return cd(1.0); }};
}

// psi(lambda) = sum lambda_k + c
inline PsiFunction psi_affine(double c) {
    return {"affine", [c](const CVec& l) { return l.sum() + c; }};
}

using SeriesCoefficient = std::function<cd(const Partition&)>;

struct SeriesState {
    int n_max = 0;
    std::vector<cd> partial_sums;        // sum over [m] <= n, n = 0..n_max
    std::vector<double> term_magnitudes; // |sum over [m] = n|
    std::vector<int> term_counts;        // number of partitions of weight n
};

inline constexpr int kMaxSeriesWeight = 30;
inline constexpr int kMaxSeriesDim = 4;

// Partial sums of sum_m ((-1)^{[m]} / [m]!) a(m) Z_m(x), x a vector of (possibly negative)
// Hermitian eigenvalues.
inline SeriesState spherical_series(const SeriesCoefficient& a, const RVec& x, int n_max) {
    const int n = static_cast<int>(x.size());
    require(n >= 1 && n <= kMaxSeriesDim, ErrorKind::InvalidArgument, "series supports 1 <= N <= 4");
    require(n_max >= 0 && n_max <= kMaxSeriesWeight, ErrorKind::InvalidArgument, "n_max must be in [0, 30]");
    SeriesState st;
    st.n_max = n_max;
    cd acc = 0.0;
    for (int w = 0; w <= n_max; ++w) {
        const double sign_fact = ((w % 2) ? -1.0 : 1.0) * std::exp(-log_factorial(w));
        cd level = 0.0;
        const auto parts = partitions_of(w, n);
        for (const auto& m : parts) {
            cd c;
            try {
                c = a(m);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::PoleError) throw Error(ErrorKind::CoefficientPole, e.what());
                throw;
            }
            require(std::isfinite(c.real()) && std::isfinite(c.imag()), ErrorKind::CoefficientPole,
                    "non-finite coefficient");
            level += sign_fact * c * zonal_polynomial(m, x);
        }
        acc += level;
        st.partial_sums.push_back(acc);
        st.term_magnitudes.push_back(std::abs(level));
        st.term_counts.push_back(static_cast<int>(parts.size()));
    }
    return st;
}

struct BinomialReport {
    cd partial;
    double target = 0.0;
    double gap = 0.0;           // relative, at n_max
    std::vector<double> gaps;   // relative, for every n
};

// Series with a(m) = Gamma_M(2 alpha + m) against Gamma_M(2 alpha) prod (1 + rho_k)^{-2 alpha}.
inline BinomialReport binomial_series_check(double alpha, const RVec& rho, int n_max) {
    const int n = static_cast<int>(rho.size());
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    require(rho.cwiseAbs().maxCoeff() < 1.0, ErrorKind::InvalidArgument, "eigenvalues must be < 1 in modulus");
    const SeriesCoefficient a = [alpha, n](const Partition& m) {
        CVec l(n);
        for (int k = 0; k < n; ++k) l(k) = 2.0 * alpha + m[k];
        return gamma_m(l);
    };
    const SeriesState st = spherical_series(a, rho, n_max);
    BinomialReport r;
    double lt = log_gamma_m_scalar(n, 2.0 * alpha);
    for (int k = 0; k < n; ++k) lt -= 2.0 * alpha * std::log1p(rho(k));
    r.target = std::exp(lt);
    for (const cd& p : st.partial_sums) r.gaps.push_back(std::abs(p - r.target) / std::abs(r.target));
    r.partial = st.partial_sums.back();
    r.gap = r.gaps.back();
    return r;
}

// |Gamma_M(alpha + delta + it)|^2 psi(it - alpha)
inline cd ramanujan_transform(const PsiFunction& psi, double alpha, const RVec& t) {
    const int n = static_cast<int>(t.size());
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    const RVec d = delta_vector(n);
    const CVec l = (alpha + d.array()).cast<cd>().matrix() + cd(0.0, 1.0) * t.cast<cd>();
    const double g2 = std::exp(2.0 * log_gamma_m(l).real());
    const CVec arg = cd(0.0, 1.0) * t.cast<cd>() - CVec::Constant(n, cd(alpha, 0.0));
    return g2 * psi(arg);
}

struct PsiScanReport {
    double min_re = 0.0;
    double max_re = 0.0;
    double max_abs_im = 0.0;
    RVec argmin;
    Verdict verdict = Verdict::ConsistentPd;
};

// Re psi(it - alpha) over the grid; NOT_PD when the minimum is below -rel_tol * max.
inline PsiScanReport psi_positivity_scan(const PsiFunction& psi, double alpha, const std::vector<RVec>& t_grid,
                                         double rel_tol = 1e-6) {
    require(!t_grid.empty(), ErrorKind::EmptyGrid, "empty t grid");
    const int n = static_cast<int>(t_grid.front().size());
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    PsiScanReport r;
    r.min_re = std::numeric_limits<double>::infinity();
    r.max_re = -std::numeric_limits<double>::infinity();
    for (const auto& t : t_grid) {
        require_same_dim(static_cast<int>(t.size()), n);
        const CVec arg = cd(0.0, 1.0) * t.cast<cd>() - CVec::Constant(n, cd(alpha, 0.0));
        const cd v = psi(arg);
        if (v.real() < r.min_re) {
            r.min_re = v.real();
            r.argmin = t;
        }
        r.max_re = std::max(r.max_re, v.real());
        r.max_abs_im = std::max(r.max_abs_im, std::abs(v.imag()));
    }
    r.verdict = r.min_re < -rel_tol * std::max(r.max_re, 0.0) ? Verdict::NotPd : Verdict::ConsistentPd;
    return r;
}

// det[int_{1/c}^{c} w(rho) rho^{k+l-N} d rho]_{k,l=0}^{N-1} with w = (rho/(1+rho)^2)^alpha,
// the Andreief form of the volume integral of the Beta-prime function (Gamma_M factor dropped).
inline double beta_prime_volume_integral(double alpha, int n, double cutoff) {
    require(cutoff > 1.0, ErrorKind::InvalidArgument, "cutoff must exceed 1");
    QuadratureGrid g;
    g.rule = QuadRule::GaussLegendre;
    g.T = std::log(cutoff);
    g.P = 16;
    g.panels = std::max(2, static_cast<int>(std::ceil(4.0 * g.T)));
    const auto [s, w] = axis_rule(g);
    std::vector<double> mom(2 * n - 1, 0.0);  // exponent j = k + l - N, index j + N
    for (Eigen::Index q = 0; q < s.size(); ++q) {
        const double lw = alpha * (s(q) - 2.0 * std::log1p(std::exp(s(q))));
        for (int j = -n; j <= n - 2; ++j) mom[j + n] += w(q) * std::exp(lw + s(q) * (j + 1));
    }
    RMatrix m(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) m(k, l) = mom[k + l];
    return n == 1 ? m(0, 0) : Eigen::PartialPivLU<RMatrix>(m).determinant();
}

}  // namespace hpdk
