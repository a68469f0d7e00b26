#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "hpd_core.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "special.hpp"
#include "spherical.hpp"

namespace hpdk {

struct RadialFunction {
    std::string name;
    std::function<cd(const RVec& rho)> eval;

    cd operator()(const RVec& rho) const { return eval(rho); }
    cd operator()(const Spectrum& rho) const { return eval(rho.values()); }
};

struct SpectralDensity {
    std::string name;
    std::function<double(const RVec& t)> eval;
    bool nonnegative = true;

    double operator()(const RVec& t) const { return eval(t); }
};

// Largest deviation |f(w rho) - f(rho)| / |f(rho)| over a few random points and
// permutations; registration code rejects functions above 1e-10.
template <class F>
double symmetry_defect(const F& f, int n, std::uint64_t seed, int trials = 5) {
    Rng rng(seed);
    std::uniform_real_distribution<double> ud(0.3, 3.0);
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        RVec r(n);
        for (int k = 0; k < n; ++k) r(k) = ud(rng);
        const auto base = f(r);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        RVec p(n);
        for (int k = 0; k < n; ++k) p(k) = r(perm[k]);
        const double scale = std::max(std::abs(base), 1e-300);
        worst = std::max(worst, static_cast<double>(std::abs(f(p) - base)) / scale);
    }
    return worst;
}

inline RadialFunction checked_radial(RadialFunction f, int n, double tol = 1e-10) {
    if (n > 1) {
        const double d = symmetry_defect(f.eval, n, 0x5eedULL);
        require(d <= tol, ErrorKind::InvalidArgument, f.name + " is not permutation symmetric");
    }
    return f;
}

enum class QuadRule { Trapezoid, GaussLegendre };

// Per-axis rule on [-T, T]. Trapezoid uses P equispaced points; Gauss-Legendre uses
// P points on each of `panels` equal subintervals.
struct QuadratureGrid {
    QuadRule rule = QuadRule::Trapezoid;
    double T = 12.0;
    int P = 64;
    int panels = 1;

    int points_per_axis() const { return rule == QuadRule::Trapezoid ? P : P * panels; }

    void validate(int n) const {
        require(T > 0.0, ErrorKind::InvalidArgument, "grid half-width must be positive");
        require(P >= 8, ErrorKind::InvalidArgument, "grid needs at least 8 points per axis");
        require(panels >= 1, ErrorKind::InvalidArgument, "panels must be >= 1");
        require(std::pow(static_cast<double>(points_per_axis()), n) <= 1e8, ErrorKind::GridTooLarge,
                "tensor grid exceeds 1e8 nodes");
    }

    QuadratureGrid refined() const {
        QuadratureGrid g = *this;
        g.P *= 2;
        return g;
    }

    std::string key(int n) const {
        std::ostringstream os;
        os.precision(17);
        os << n << ":" << (rule == QuadRule::Trapezoid ? "trapezoid" : "gauss_legendre") << ":" << T << ":"
           << P << ":" << panels;
        return os.str();
    }
};

// "T=12,P=64[,rule=gl][,panels=4]"
inline QuadratureGrid parse_grid(const std::string& text) {
    QuadratureGrid g;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        require(eq != std::string::npos, ErrorKind::InvalidArgument, "grid item without '=': " + item);
        const std::string k = item.substr(0, eq), v = item.substr(eq + 1);
        try {
            if (k == "T")
                g.T = std::stod(v);
            else if (k == "P")
                g.P = std::stoi(v);
            else if (k == "panels")
                g.panels = std::stoi(v);
            else if (k == "rule") {
                if (v == "trapezoid")
                    g.rule = QuadRule::Trapezoid;
                else if (v == "gl" || v == "gauss_legendre")
                    g.rule = QuadRule::GaussLegendre;
                else
                    throw Error(ErrorKind::InvalidArgument, "unknown rule " + v);
            } else
                throw Error(ErrorKind::InvalidArgument, "unknown grid key " + k);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::InvalidArgument, "bad grid value " + item);
        }
    }
    return g;
}

inline json grid_to_json(const QuadratureGrid& g) {
    return json{{"rule", g.rule == QuadRule::Trapezoid ? "trapezoid" : "gauss_legendre"},
                {"T", g.T},
                {"P", g.P},
                {"panels", g.panels}};
}

inline QuadratureGrid grid_from_json(const json& j) {
    QuadratureGrid g;
    const std::string rule = j.value("rule", "trapezoid");
    g.rule = rule == "trapezoid" ? QuadRule::Trapezoid : QuadRule::GaussLegendre;
    g.T = j.value("T", g.T);
    g.P = j.value("P", g.P);
    g.panels = j.value("panels", g.panels);
    return g;
}

// Golub-Welsch nodes and weights on [-1, 1].
inline std::pair<RVec, RVec> gauss_legendre(int p) {
    RMatrix jac = RMatrix::Zero(p, p);
    for (int k = 1; k < p; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "Golub-Welsch");
    RVec w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), w};
}

inline std::pair<RVec, RVec> axis_rule(const QuadratureGrid& g) {
    if (g.rule == QuadRule::Trapezoid) {
        RVec x(g.P), w(g.P);
        const double h = 2.0 * g.T / (g.P - 1);
        for (int j = 0; j < g.P; ++j) {
            x(j) = -g.T + h * j;
            w(j) = (j == 0 || j == g.P - 1) ? 0.5 * h : h;
        }
        return {x, w};
    }
    const auto [gx, gw] = gauss_legendre(g.P);
    const int total = g.P * g.panels;
    RVec x(total), w(total);
    const double width = 2.0 * g.T / g.panels;
    for (int q = 0; q < g.panels; ++q) {
        const double mid = -g.T + width * (q + 0.5);
        for (int j = 0; j < g.P; ++j) {
            x(q * g.P + j) = mid + 0.5 * width * gx(j);
            w(q * g.P + j) = 0.5 * width * gw(j);
        }
    }
    return {x, w};
}

struct QuadOptions {
    int threads = 1;
    bool refine = true;  // repeat on the refined grid for an error estimate
};

struct QuadResult {
    cd value;
    double abs_mass = 0.0;           // sum of |w f|
    double boundary_ratio = 0.0;     // share of abs_mass at nodes with some |s_k| > 0.9 T
    double error_estimate = 0.0;     // |I(P) - I(2P)| when refinement ran
    bool truncation_warning = false; // boundary_ratio > 1e-6
};

namespace detail {

struct PartialSum {
    cd sum;
    double mass = 0.0;
    double boundary = 0.0;
};

// Tensor-product sum over [-T, T]^N, reduced in a fixed order.
template <class F>
QuadResult tensor_sum(int n, const QuadratureGrid& g, const F& f, int threads) {
    const auto [x, w] = axis_rule(g);
    const int p = static_cast<int>(x.size());
    const double strip = 0.9 * g.T;
    std::vector<PartialSum> parts(p);
    parallel_for(static_cast<std::size_t>(p), threads, [&](std::size_t i0) {
        PartialSum acc;
        std::vector<int> idx(n, 0);
        idx[0] = static_cast<int>(i0);
        RVec node(n);
        const long inner = n > 1 ? static_cast<long>(std::pow(p, n - 1) + 0.5) : 1;
        for (long c = 0; c < inner; ++c) {
            long rem = c;
            for (int d = n - 1; d >= 1; --d) {
                idx[d] = static_cast<int>(rem % p);
                rem /= p;
            }
            double wt = 1.0;
            bool edge = false;
            for (int d = 0; d < n; ++d) {
                node(d) = x(idx[d]);
                wt *= w(idx[d]);
                edge = edge || std::abs(node(d)) > strip;
            }
            const cd v = wt * f(node);
            acc.sum += v;
            acc.mass += std::abs(v);
            if (edge) acc.boundary += std::abs(v);
        }
        parts[i0] = acc;
    });
    QuadResult r;
    double boundary = 0.0;
    for (const auto& q : parts) {
        r.value += q.sum;
        r.abs_mass += q.mass;
        boundary += q.boundary;
    }
    r.boundary_ratio = r.abs_mass > 0.0 ? boundary / r.abs_mass : 0.0;
    r.truncation_warning = r.boundary_ratio > 1e-6;
    return r;
}

template <class F>
QuadResult integrate(int n, const QuadratureGrid& g, const F& f, const QuadOptions& opt) {
    g.validate(n);
    QuadResult r = tensor_sum(n, g, f, opt.threads);
    if (opt.refine) {
        const QuadratureGrid fine = g.refined();
        if (std::pow(static_cast<double>(fine.points_per_axis()), n) <= 1e8) {
            const QuadResult rf = tensor_sum(n, fine, f, opt.threads);
            r.error_estimate = std::abs(rf.value - r.value);
        }
    }
    return r;
}

inline double factorial(int n) { return std::exp(log_factorial(n)); }

}  // namespace detail

// Spherical transform with the constant set to one, in the variables s = log rho:
// (1/N!) int f(e^s) V(e^s) V(s) G(s, -it - (N+1)/2) prod e^{s_k} ds,
// where G(s, mu) = det[e^{mu_l s_k}] / (V(s) V(mu)).
inline QuadResult forward_transform(const RadialFunction& f, const RVec& t, const QuadratureGrid& grid,
                                    const QuadOptions& opt = {}) {
    const int n = static_cast<int>(t.size());
    require(n >= 1, ErrorKind::InvalidArgument, "empty t");
    const CVec mu = (cd(0.0, -1.0) * t.cast<cd>()).array() - 0.5 * (n + 1);
    const double inv_fact = 1.0 / detail::factorial(n);
    auto integrand = [&](const RVec& s) -> cd {
        double v = 1.0;
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) v *= (std::exp(s(l)) - std::exp(s(k))) * (s(l) - s(k));
        if (v == 0.0) return 0.0;
        const RVec rho = s.array().exp();
        const cd fo = f(rho);
        if (fo == 0.0) return 0.0;
        return fo * v * std::exp(log_alternant_ratio(s.cast<cd>(), mu) + s.sum()) * inv_fact;
    };
    QuadResult r = detail::integrate(n, grid, integrand, opt);
    return r;
}

inline QuadResult forward_transform(const RadialFunction& f, const RVec& t, const QuadOptions& opt = {}) {
    return forward_transform(f, t, QuadratureGrid{}, opt);
}

inline constexpr double kRealTol = 1e-8;

// f(rho) = (1/V(i rho)) (1/N!) int g(t) V(t) det[rho_k^{i t_l + (N-1)/2}] dt, rewritten as
// det^{(N-1)/2} (V(s)/V(rho)) (1/N!) int g(t) V(t)^2 G(s, it) dt.
inline QuadResult inverse_transform(const SpectralDensity& g, const Spectrum& rho, const QuadratureGrid& grid,
                                    const QuadOptions& opt = {}) {
    const int n = rho.size();
    const CVec s = rho.logs().cast<cd>();
    const double inv_fact = 1.0 / detail::factorial(n);
    auto integrand = [&](const RVec& t) -> cd {
        const double vt = vandermonde(t);
        if (vt == 0.0) return 0.0;
        const double gv = g(t);
        if (gv == 0.0) return 0.0;
        return gv * vt * vt * alternant_ratio(s, cd(0.0, 1.0) * t.cast<cd>()) * inv_fact;
    };
    QuadResult r = detail::integrate(n, grid, integrand, opt);
    const double pre = std::exp(0.5 * (n - 1) * rho.logs().sum() + log_vandermonde_log_ratio(rho.values()));
    r.value *= pre;
    r.abs_mass *= pre;
    r.error_estimate *= pre;
    // The imaginary part cancels between t and -t; allow for rounding relative to the
    // total integrand mass as well.
    if (std::abs(r.value.imag()) > kRealTol * std::abs(r.value.real()) + 1e-14 * r.abs_mass)
        throw Error(ErrorKind::NonRealResult, "inverse transform imaginary residual " +
                                                  std::to_string(r.value.imag()));
    r.value = cd(r.value.real(), 0.0);
    return r;
}

// Radial functions used across the library.

inline RadialFunction radial_gaussian(double sigma) {
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    return {"gaussian", [sigma](const RVec& rho) -> cd {
                const double d2 = rho.array().log().square().sum();
                return std::exp(-d2 / (2.0 * sigma * sigma));
            }};
}

inline RadialFunction radial_zero() {
    return {"zero", [](const RVec&) -> cd { return 0.0; }};
}

// Gamma_M(2 alpha) prod (rho / (1 + rho)^2)^alpha, i.e. Delta^alpha(x (id + x)^{-2}).
inline RadialFunction radial_beta_prime(double alpha, int n, bool include_gamma = true) {
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    const double lg = include_gamma ? log_gamma_m(CVec::Constant(n, 2.0 * alpha)).real() : 0.0;
    return {"betaprime", [alpha, lg](const RVec& rho) -> cd {
                double acc = lg;
                for (Eigen::Index k = 0; k < rho.size(); ++k)
                    acc += alpha * (std::log(rho(k)) - 2.0 * std::log1p(rho(k)));
                return std::exp(acc);
            }};
}

inline SpectralDensity density_gaussian(double kappa) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    return {"gaussian", [kappa](const RVec& t) { return std::exp(-kappa * t.squaredNorm()); }, true};
}

// e^{-kappa ((t,t) + (delta,delta))}
inline SpectralDensity density_heat(double kappa, int n) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    const double dd = delta_vector(n).squaredNorm();
    return {"heat", [kappa, dd](const RVec& t) { return std::exp(-kappa * (t.squaredNorm() + dd)); }, true};
}

inline SpectralDensity density_zero() {
    return {"zero", [](const RVec&) { return 0.0; }, true};
}

// |Gamma_M(alpha + delta + it)|^2, the Beta-prime spectral density.
inline SpectralDensity density_beta_prime(double alpha, int n) {
    require(alpha > n - 1, ErrorKind::AlphaOutOfRange, "alpha must exceed N - 1");
    const RVec d = delta_vector(n);
    return {"betaprime",
            [alpha, d](const RVec& t) {
                const CVec l = (alpha + d.array()).cast<cd>().matrix() + cd(0.0, 1.0) * t.cast<cd>();
                return std::exp(2.0 * log_gamma_m(l).real());
            },
            true};
}

// det^{(N-1)/2} (V(log rho)/V(rho)) exp(-|log rho|^2 / 4 kappa), normalising constant one.
inline double heat_kernel_radial(double kappa, const Spectrum& rho) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    const RVec s = rho.logs();
    const int n = rho.size();
    return std::exp(0.5 * (n - 1) * s.sum() + log_vandermonde_log_ratio(rho.values()) - s.squaredNorm() / (4.0 * kappa));
}

inline double heat_kernel_radial(double kappa, const HpdMatrix& x) { return heat_kernel_radial(kappa, eigenvalues(x)); }

inline RadialFunction radial_heat(double kappa) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    return {"heat", [kappa](const RVec& rho) -> cd { return heat_kernel_radial(kappa, Spectrum(rho)); }};
}

// Exact constant c with inverse_transform(heat density) = c * heat_kernel_radial:
// (pi/kappa)^{N/2} e^{-kappa (delta,delta)} (2 kappa)^{-N(N-1)/2}.
inline double heat_inverse_constant(double kappa, int n) {
    const double dd = delta_vector(n).squaredNorm();
    return std::pow(std::numbers::pi / kappa, 0.5 * n) * std::exp(-kappa * dd) *
           std::pow(2.0 * kappa, -static_cast<double>(half_pairs(n)));
}

// Cauchy family: det^{(N-1)/2}/V(rho) det[(-1)^{k-1} g^{(k-1)}(log rho_l)], g(s) = 1/(kappa^2 + s^2).
// Columns are replaced by divided differences in s, which have the closed form
// (k-1)! (-1)^{l-1} Im(prod_i u_i h_{k-1}(u)) / kappa with u_i = 1/(s_i - i kappa).
inline double cauchy_family(double kappa, const Spectrum& rho) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    const int n = rho.size();
    const RVec s = rho.logs();
    const cd a(0.0, kappa);
    CMatrix h(n, n);  // h(l, j) = h_j(u_0..u_l)
    CVec u(n);
    for (int i = 0; i < n; ++i) u(i) = 1.0 / (s(i) - a);
    h = detail::complete_homogeneous(u, n - 1);
    RMatrix m(n, n);
    cd prod = 1.0;
    for (int l = 0; l < n; ++l) {
        prod *= u(l);
        for (int k = 0; k < n; ++k) {
            const cd dd = prod * h(l, k);
            m(k, l) = std::exp(log_factorial(k)) * ((l % 2) ? -1.0 : 1.0) * dd.imag() / kappa;
        }
    }
    const double det = n == 1 ? m(0, 0) : Eigen::PartialPivLU<RMatrix>(m).determinant();
    return std::exp(0.5 * (n - 1) * s.sum() + log_vandermonde_log_ratio(rho.values())) * det;
}

inline double cauchy_family(double kappa, const HpdMatrix& x) { return cauchy_family(kappa, eigenvalues(x)); }

inline RadialFunction radial_cauchy(double kappa) {
    require(kappa > 0.0, ErrorKind::InvalidArgument, "kappa must be positive");
    return {"cauchy", [kappa](const RVec& rho) -> cd { return cauchy_family(kappa, Spectrum(rho)); }};
}

// f(x) = det^{(N-1)/2} / V(i rho) det[int gamma(t) t^{k-1} e^{i t s_l} dt].
// The columns are divided differences in s (first row of exp(i t J), J bidiagonal with
// the s on its diagonal), so coincident eigenvalues are handled exactly.
inline double pd_from_gamma_product(const std::function<double(double)>& gam, const Spectrum& rho,
                                    const QuadratureGrid& grid) {
    const int n = rho.size();
    grid.validate(1);
    const RVec s = rho.logs();
    CMatrix jb = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        jb(k, k) = s(k);
        if (k + 1 < n) jb(k, k + 1) = 1.0;
    }
    const auto [x, w] = axis_rule(grid);
    CMatrix a = CMatrix::Zero(n, n);
    double mass = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double gv = gam(x(j));
        if (gv == 0.0) continue;
        const CMatrix e = (cd(0.0, x(j)) * jb).exp();
        double tk = 1.0;
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) a(k, l) += w(j) * gv * tk * e(0, l);
            mass += std::abs(w(j) * gv * tk);
            tk *= x(j);
        }
    }
    const cd det = n == 1 ? a(0, 0) : Eigen::PartialPivLU<CMatrix>(a).determinant();
    // 1/V(i rho) = i^{-M} / V(rho); the divided differences supply V(s).
    const int m = half_pairs(n);
    cd phase = 1.0;
    for (int i = 0; i < m; ++i) phase *= cd(0.0, -1.0);
    const cd v = phase * det * std::exp(0.5 * (n - 1) * s.sum() + log_vandermonde_log_ratio(rho.values()));
    if (std::abs(v.imag()) > kRealTol * std::abs(v.real()) + 1e-14 * std::pow(mass, n))
        throw Error(ErrorKind::NonRealResult, "imaginary residual " + std::to_string(v.imag()));
    return v.real();
}

inline std::function<double(double)> gamma_laplace(double kappa) {
    return [kappa](double t) { return 0.5 * kappa * std::exp(-kappa * std::abs(t)); };
}

// A 1-D grid suited to gamma_laplace: Gauss-Legendre panels with a break at 0.
inline QuadratureGrid laplace_grid(double kappa) {
    QuadratureGrid g;
    g.rule = QuadRule::GaussLegendre;
    g.T = 40.0 / kappa;
    g.P = 20;
    g.panels = 2 * static_cast<int>(std::ceil(g.T));
    return g;
}

struct Calibration {
    double kappa = 0.0;
    double spread = 0.0;  // max relative deviation of pointwise ratios from kappa
    std::vector<double> ratios;
};

// kappa_N with kappa_N * forward(Gaussian) = gauss_spherical_transform, sigma = 1,
// fitted by least squares over five t points.
inline Calibration calibrate_constant(int n, const QuadratureGrid& grid, const QuadOptions& opt = {}) {
    require(n >= 1, ErrorKind::InvalidArgument, "N must be >= 1");
    const RadialFunction f = radial_gaussian(1.0);
    QuadOptions o = opt;
    o.refine = false;
    double num = 0.0, den = 0.0;
    std::vector<double> a, b;
    for (int j = 0; j < 5; ++j) {
        RVec t(n);
        for (int k = 0; k < n; ++k) t(k) = 0.3 * j * (k + 1.0) / n;
        const double closed = gauss_spherical_transform(1.0, t);
        const double quad = forward_transform(f, t, grid, o).value.real();
        a.push_back(closed);
        b.push_back(quad);
        num += closed * quad;
        den += quad * quad;
    }
    Calibration c;
    require(den > 0.0, ErrorKind::CalibrationInconsistent, "degenerate calibration");
    c.kappa = num / den;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] / b[i];
        c.ratios.push_back(r);
        c.spread = std::max(c.spread, std::abs(r - c.kappa) / c.kappa);
    }
    if (!(c.kappa > 0.0) || c.spread > 1e-3)
        throw Error(ErrorKind::CalibrationInconsistent,
                    "ratio spread " + std::to_string(c.spread) + " across calibration points");
    return c;
}

// Calibration constants keyed by (N, rule, T, P); optionally persisted as JSON.
class CalibrationCache {
public:
    CalibrationCache() = default;
    explicit CalibrationCache(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        if (in) {
            const json j = json::parse(in, nullptr, false);
            if (j.is_object())
                for (auto it = j.begin(); it != j.end(); ++it) values_[it.key()] = it.value().get<double>();
        }
    }

    double get(int n, const QuadratureGrid& grid, const QuadOptions& opt = {}) {
        const std::string k = grid.key(n);
        const auto it = values_.find(k);
        if (it != values_.end()) return it->second;
        const double v = calibrate_constant(n, grid, opt).kappa;
        values_[k] = v;
        if (!path_.empty()) save();
        return v;
    }

    void save() const {
        json j = json::object();
        for (const auto& [k, v] : values_) j[k] = v;
        write_text_file(path_, j.dump(2) + "\n");
    }

private:
    std::string path_;
    std::map<std::string, double> values_;
};

enum class Verdict { ConsistentPd, NotPd };

inline const char* verdict_name(Verdict v) { return v == Verdict::NotPd ? "NOT_PD" : "CONSISTENT_PD"; }

struct GodementReport {
    double min_value = 0.0;
    double max_value = 0.0;
    RVec argmin;
    double max_error = 0.0;  // largest quadrature refinement error over the scan
    std::vector<double> values;
    Verdict verdict = Verdict::ConsistentPd;
};

// Scans the forward transform over t_grid. NOT_PD when some value is below
// -max(rel_tol * max value, 10 * quadrature error); a finite scan, not a proof.
inline GodementReport godement_check(const RadialFunction& f, const std::vector<RVec>& t_grid,
                                     const QuadratureGrid& grid, double rel_tol = 1e-6,
                                     const QuadOptions& opt = {}) {
    require(!t_grid.empty(), ErrorKind::EmptyGrid, "empty t grid");
    GodementReport r;
    r.min_value = std::numeric_limits<double>::infinity();
    r.max_value = -std::numeric_limits<double>::infinity();
    for (const auto& t : t_grid) {
        const QuadResult q = forward_transform(f, t, grid, opt);
        const double v = q.value.real();
        r.values.push_back(v);
        r.max_error = std::max(r.max_error, q.error_estimate);
        if (v < r.min_value) {
            r.min_value = v;
            r.argmin = t;
        }
        r.max_value = std::max(r.max_value, v);
    }
    const double tol = std::max(rel_tol * std::max(r.max_value, 0.0), 10.0 * r.max_error);
    r.verdict = r.min_value < -tol ? Verdict::NotPd : Verdict::ConsistentPd;
    return r;
}

// t_1 = 0, t_N = 3 pi / sigma^2, so (sigma^2/2)(t_N - t_1) = 3 pi / 2 and the (1, N)
// sc factor is negative. Interior entries sit at the midpoint, which keeps every other
// scaled gap at or below pi and hence every other factor nonnegative.
inline RVec gaussian_not_pd_witness(double sigma, int n) {
    require(sigma > 0.0 && n >= 2, ErrorKind::InvalidArgument, "need sigma > 0 and N >= 2");
    const double top = 3.0 * std::numbers::pi / (sigma * sigma);
    RVec t = RVec::Constant(n, 0.5 * top);
    t(0) = 0.0;
    t(n - 1) = top;
    const double v = gauss_spherical_transform(sigma, t);
    if (!(v < 0.0)) throw Error(ErrorKind::NumericalInstability, "witness transform is not negative");
    return t;
}

}  // namespace hpdk
