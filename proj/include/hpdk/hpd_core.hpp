#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace hpdk {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class Field { Real, Complex };

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kSingularTol = 1e-12;

inline RVec rvec(std::initializer_list<double> l) {
    return Eigen::Map<const RVec>(l.begin(), static_cast<Eigen::Index>(l.size()));
}

inline CVec cvec(std::initializer_list<cd> l) {
    return Eigen::Map<const CVec>(l.begin(), static_cast<Eigen::Index>(l.size()));
}

class HpdMatrix {
public:
    HpdMatrix() = default;

    // Checks Hermitian symmetry (relative to the largest entry) and positive
    // definiteness, then stores the exactly Hermitian part.
    static HpdMatrix validate(const CMatrix& a, double tol = kHermitianTol) {
        require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::DimensionMismatch,
                "matrix must be square and nonempty");
        const double scale = a.cwiseAbs().maxCoeff();
        require(std::isfinite(scale), ErrorKind::InvalidArgument, "non-finite entry");
        const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
        if (asym > tol * scale)
            throw Error(ErrorKind::NotHermitian,
                        "asymmetry " + std::to_string(asym) + " exceeds tolerance");
        HpdMatrix h;
        h.m_ = (a + a.adjoint()) * 0.5;
        h.real_ = h.m_.imag().cwiseAbs().maxCoeff() == 0.0;
        double min_eig;
        if (h.real_) {
            Eigen::SelfAdjointEigenSolver<RMatrix> es(h.m_.real(), Eigen::EigenvaluesOnly);
            require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
            min_eig = es.eigenvalues().minCoeff();
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h.m_, Eigen::EigenvaluesOnly);
            require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
            min_eig = es.eigenvalues().minCoeff();
        }
        if (!(min_eig > 0.0))
            throw Error(ErrorKind::NotPositiveDefinite,
                        "smallest eigenvalue " + std::to_string(min_eig));
        return h;
    }

    static HpdMatrix validate(const RMatrix& a, double tol = kHermitianTol) {
        return validate(CMatrix(a.cast<cd>()), tol);
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    bool is_real() const { return real_; }
    RMatrix real_matrix() const { return m_.real(); }

    double log_det() const {
        if (real_) {
            Eigen::LLT<RMatrix> llt(m_.real());
            return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        }
        Eigen::LLT<CMatrix> llt(m_);
        return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
    }

private:
    CMatrix m_;
    bool real_ = true;
};

inline HpdMatrix validate_hpd(const CMatrix& a, double tol = kHermitianTol) {
    return HpdMatrix::validate(a, tol);
}

inline HpdMatrix identity_hpd(int n) { return HpdMatrix::validate(RMatrix(RMatrix::Identity(n, n))); }

inline HpdMatrix diag_hpd(const RVec& d) { return HpdMatrix::validate(RMatrix(d.asDiagonal())); }

// Ascending positive eigenvalues.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(RVec v) : v_(std::move(v)) {
        require(v_.size() > 0, ErrorKind::InvalidArgument, "empty spectrum");
        std::sort(v_.data(), v_.data() + v_.size());
        require(v_(0) > 0.0, ErrorKind::NotPositiveDefinite, "spectrum must be positive");
    }
    Spectrum(std::initializer_list<double> l)
        : Spectrum(RVec(Eigen::Map<const RVec>(l.begin(), static_cast<Eigen::Index>(l.size())))) {}

    int size() const { return static_cast<int>(v_.size()); }
    const RVec& values() const { return v_; }
    double operator[](int k) const { return v_(k); }
    RVec logs() const { return v_.array().log().matrix(); }

private:
    RVec v_;
};

struct EigenDecomposition {
    Spectrum values;
    CMatrix vectors;  // columns, matching values
};

inline EigenDecomposition eigen_decompose(const HpdMatrix& x) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x.matrix());
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
    // Eigen returns eigenvalues in increasing order already.
    return {Spectrum(es.eigenvalues()), es.eigenvectors()};
}

inline Spectrum eigenvalues(const HpdMatrix& x) {
    if (x.is_real()) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(x.real_matrix(), Eigen::EigenvaluesOnly);
        require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
        return Spectrum(es.eigenvalues());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x.matrix(), Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
    return Spectrum(es.eigenvalues());
}

class GroupElement {
public:
    GroupElement() = default;

    // Invertibility is judged by the reciprocal condition number, so the test
    // does not depend on the overall scale of g.
    static GroupElement validate(const CMatrix& g, double singular_tol = kSingularTol) {
        require(g.rows() == g.cols() && g.rows() > 0, ErrorKind::DimensionMismatch,
                "group element must be square");
        Eigen::PartialPivLU<CMatrix> lu(g);
        const double rc = lu.rcond();
        if (!(rc > singular_tol))
            throw Error(ErrorKind::NotInvertible, "reciprocal condition " + std::to_string(rc));
        GroupElement e;
        e.g_ = g;
        return e;
    }

    int dim() const { return static_cast<int>(g_.rows()); }
    const CMatrix& matrix() const { return g_; }

private:
    CMatrix g_;
};

inline void require_same_dim(int a, int b) {
    require(a == b, ErrorKind::DimensionMismatch,
            "dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

inline HpdMatrix group_action(const GroupElement& g, const HpdMatrix& x) {
    require_same_dim(g.dim(), x.dim());
    const CMatrix r = g.matrix() * x.matrix() * g.matrix().adjoint();
    return HpdMatrix::validate(CMatrix((r + r.adjoint()) * 0.5));
}

// f(x) for a function of the spectrum, through the spectral decomposition.
template <class F>
CMatrix spectral_apply(const HpdMatrix& x, F&& f) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x.matrix());
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "eigensolver");
    RVec d = es.eigenvalues();
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = f(d(k));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline HpdMatrix hpd_sqrt(const HpdMatrix& x) {
    return HpdMatrix::validate(spectral_apply(x, [](double v) { return std::sqrt(v); }));
}

inline HpdMatrix hpd_inverse(const HpdMatrix& x) {
    return HpdMatrix::validate(spectral_apply(x, [](double v) { return 1.0 / v; }));
}

// y^{-1/2} x y^{-1/2}
inline HpdMatrix congruence_normalize(const HpdMatrix& x, const HpdMatrix& y) {
    require_same_dim(x.dim(), y.dim());
    const CMatrix w = spectral_apply(y, [](double v) {
        if (!(v > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "y has no HPD square root");
        return 1.0 / std::sqrt(v);
    });
    const CMatrix r = w * x.matrix() * w;
    return HpdMatrix::validate(CMatrix((r + r.adjoint()) * 0.5));
}

// Eigenvalues of y^{-1} x, from the generalized problem x v = rho y v.
inline Spectrum relative_spectrum(const HpdMatrix& x, const HpdMatrix& y) {
    require_same_dim(x.dim(), y.dim());
    if (x.is_real() && y.is_real()) {
        Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> es(x.real_matrix(), y.real_matrix(),
                                                            Eigen::EigenvaluesOnly);
        require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "generalized eigensolver");
        return Spectrum(es.eigenvalues());
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(x.matrix(), y.matrix(),
                                                        Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "generalized eigensolver");
    return Spectrum(es.eigenvalues());
}

inline double riemannian_distance(const HpdMatrix& x, const HpdMatrix& y) {
    const RVec s = relative_spectrum(x, y).logs();
    return std::sqrt(s.squaredNorm());
}

// prod_{k<l} (v_l - v_k)
template <class Vec>
auto vandermonde(const Vec& v) {
    using S = std::decay_t<decltype(v[0])>;
    S r(1);
    const auto n = static_cast<Eigen::Index>(v.size());
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = k + 1; l < n; ++l) r *= (v[l] - v[k]);
    return r;
}

// log of prod_k Delta_k(x)^{s_k - s_{k+1}}, Delta_k the leading principal minors.
inline cd log_power_function(const CVec& s, const HpdMatrix& x) {
    require_same_dim(static_cast<int>(s.size()), x.dim());
    const int n = x.dim();
    RVec logl(n);
    if (x.is_real()) {
        Eigen::LLT<RMatrix> llt(x.real_matrix());
        require(llt.info() == Eigen::Success, ErrorKind::NotPositiveDefinite, "cholesky");
        logl = llt.matrixLLT().diagonal().array().log();
    } else {
        Eigen::LLT<CMatrix> llt(x.matrix());
        require(llt.info() == Eigen::Success, ErrorKind::NotPositiveDefinite, "cholesky");
        logl = llt.matrixLLT().diagonal().real().array().log();
    }
    // log Delta_k = 2 sum_{j<=k} log L_jj, and sum_k (s_k - s_{k+1}) log Delta_k
    // telescopes to sum_j s_j * 2 log L_jj.
    cd acc = 0.0;
    for (int j = 0; j < n; ++j) acc += s(j) * (2.0 * logl(j));
    return acc;
}

inline cd power_function(const CVec& s, const HpdMatrix& x) {
    return std::exp(log_power_function(s, x));
}

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream seed for (master, a, b).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

namespace detail {

inline CMatrix complex_gaussian(int n, Rng& rng) {
    std::normal_distribution<double> nd;
    CMatrix a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double re = nd(rng);
            const double im = nd(rng);
            a(i, j) = cd(re, im) * std::sqrt(0.5);
        }
    return a;
}

inline RMatrix real_gaussian(int n, Rng& rng) {
    std::normal_distribution<double> nd;
    RMatrix a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = nd(rng);
    return a;
}

template <class M>
M haar_from_gaussian(const M& a) {
    Eigen::HouseholderQR<M> qr(a);
    M q = qr.householderQ();
    const M& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const auto d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline CMatrix haar_unitary_matrix(int n, Rng& rng) { return haar_from_gaussian(complex_gaussian(n, rng)); }

inline RMatrix haar_orthogonal_matrix(int n, Rng& rng) { return haar_from_gaussian(real_gaussian(n, rng)); }

}  // namespace detail

inline GroupElement haar_unitary(int n, Rng& rng) {
    require(n >= 1, ErrorKind::InvalidArgument, "N must be >= 1");
    return GroupElement::validate(detail::haar_unitary_matrix(n, rng));
}

inline GroupElement haar_unitary(int n, std::uint64_t seed) {
    Rng rng(seed);
    return haar_unitary(n, rng);
}

inline GroupElement haar_orthogonal(int n, Rng& rng) {
    require(n >= 1, ErrorKind::InvalidArgument, "N must be >= 1");
    return GroupElement::validate(detail::haar_orthogonal_matrix(n, rng).cast<cd>());
}

inline GroupElement haar_orthogonal(int n, std::uint64_t seed) {
    Rng rng(seed);
    return haar_orthogonal(n, rng);
}

// Standard complex Gaussian matrix, invertible with probability one.
inline GroupElement random_group_element(int n, Rng& rng) {
    return GroupElement::validate(detail::complex_gaussian(n, rng));
}

inline HpdMatrix sample_spd_one(int n, double lo, double hi, Field field, Rng& rng) {
    std::uniform_real_distribution<double> ud(lo, hi);
    if (field == Field::Real) {
        const RMatrix u = detail::haar_orthogonal_matrix(n, rng);
        RVec xi(n);
        for (int k = 0; k < n; ++k) xi(k) = ud(rng);
        RMatrix a = u * xi.asDiagonal() * u.transpose();
        a = (a + a.transpose()) * 0.5;
        return HpdMatrix::validate(a);
    }
    const CMatrix u = detail::haar_unitary_matrix(n, rng);
    RVec xi(n);
    for (int k = 0; k < n; ++k) xi(k) = ud(rng);
    const CMatrix a = u * xi.cast<cd>().asDiagonal() * u.adjoint();
    return HpdMatrix::validate(CMatrix((a + a.adjoint()) * 0.5));
}

inline std::vector<HpdMatrix> sample_spd(int n, double lo, double hi, int count, Field field, Rng& rng) {
    require(n >= 1 && count >= 0, ErrorKind::InvalidArgument, "bad sample size");
    require(0.0 < lo && lo < hi, ErrorKind::InvalidArgument, "need 0 < eig_low < eig_high");
    std::vector<HpdMatrix> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_spd_one(n, lo, hi, field, rng));
    return out;
}

inline std::vector<HpdMatrix> sample_spd(int n, double lo, double hi, int count, Field field,
                                         std::uint64_t seed) {
    Rng rng(seed);
    return sample_spd(n, lo, hi, count, field, rng);
}

}  // namespace hpdk
