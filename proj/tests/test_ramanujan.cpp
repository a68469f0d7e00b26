#include <gtest/gtest.h>

#include <hpdk/ramanujan.hpp>

using namespace hpdk;

namespace {

// Independent: sum_{[m] = n} Z_m(x) = (tr x)^n, so a(m) = (-1)^{[m]} sums to exp(tr x).
cd alternating_sign(const Partition& m) {
    return (m.weight() % 2) ? -1.0 : 1.0;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

TEST(Series, ZeroCoefficients) {
    const SeriesState st = spherical_series([](const Partition&) { return cd(0.0); }, rvec({0.2, 0.4}), 10);
    ASSERT_EQ(st.partial_sums.size(), 11u);
    for (const cd& p : st.partial_sums) EXPECT_EQ(p, cd(0.0));
}

TEST(Series, TermCounts) {
    const SeriesState st = spherical_series(alternating_sign, rvec({0.1, 0.2}), 6);
    EXPECT_EQ(st.term_counts[4], 3);
    const std::vector<int> expected = {1, 1, 2, 2, 3, 3, 4};
    EXPECT_EQ(st.term_counts, expected);
}

TEST(Series, ScalarBinomial) {
    const double alpha = 1.5, rho = 0.4;
    const SeriesState st = spherical_series(
        [alpha](const Partition& m) { return std::exp(std::lgamma(2.0 * alpha + m[0])); }, rvec({rho}), 30);
    const double target = std::exp(std::lgamma(2.0 * alpha)) * std::pow(1.0 + rho, -2.0 * alpha);
    EXPECT_NEAR(st.partial_sums.back().real(), target, 1e-8 * target);
    EXPECT_LT(st.term_magnitudes[30], st.term_magnitudes[10]);
}

TEST(Series, ExponentialOfTrace) {
    for (const RVec& x : {rvec({0.5, 1.0}), rvec({1.0, 1.0, 1.0}), rvec({-0.7, 0.4, 2.0}), rvec({0.3, 0.6, 0.9, 1.2})}) {
        const SeriesState st = spherical_series(alternating_sign, x, 25);
        const double target = std::exp(x.sum());
        EXPECT_NEAR(st.partial_sums.back().real(), target, 1e-10 * target) << x.transpose();
    }
}

TEST(Series, Limits) {
    EXPECT_THROW(spherical_series(alternating_sign, rvec({0.1, 0.2}), 31), Error);
    EXPECT_THROW(spherical_series(alternating_sign, rvec({0.1, 0.2, 0.3, 0.4, 0.5}), 5), Error);
}

TEST(Series, PoleInCoefficientIsReported) {
    // Gamma_M(lambda) at N = 2 has a pole when lambda_2 - 1 is a non-positive integer.
    const SeriesCoefficient a = [](const Partition& m) { return gamma_m(cvec({cd(1.0 + m[0]), cd(1.0 + m[1])})); };
    try {
        spherical_series(a, rvec({0.1, 0.2}), 3);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoefficientPole);
    }
}

TEST(Binomial, ZeroSpectrumIsExact) {
    const BinomialReport r = binomial_series_check(2.0, rvec({0.0, 0.0}), 5);
    EXPECT_NEAR(r.target, std::exp(log_gamma_m_scalar(2, 4.0)), 1e-12 * r.target);
    EXPECT_NEAR(r.gap, 0.0, 1e-14);
}

TEST(Binomial, GapShrinksWithDegree) {
    const BinomialReport r = binomial_series_check(2.0, rvec({0.3, 0.5}), 30);
    EXPECT_LT(r.gaps[20], r.gaps[5]);
    EXPECT_LT(r.gaps[30], r.gaps[20]);
    // Slow geometric convergence (ratio about max rho = 0.5 per degree with polynomial growth).
    EXPECT_LT(r.gaps[30], 1e-3);
}

TEST(Binomial, ConvergesToClosedForm) {
    const BinomialReport a = binomial_series_check(2.5, rvec({0.1, -0.2}), 30);
    EXPECT_LT(a.gap, 1e-12);
    const BinomialReport b = binomial_series_check(3.0, rvec({0.1, 0.15, 0.2}), 30);
    EXPECT_LT(b.gap, 1e-10);
}

TEST(Binomial, Preconditions) {
    EXPECT_THROW(binomial_series_check(1.0, rvec({0.3, 0.5}), 5), Error);
    EXPECT_THROW(binomial_series_check(2.0, rvec({0.3, 1.0}), 5), Error);
}

TEST(Ramanujan, ScalarExample) {
    EXPECT_NEAR(ramanujan_transform(psi_one(), 1.0, rvec({0.0})).real(), 1.0, 1e-14);
}

TEST(Ramanujan, ScalarMatchesMellinIntegral) {
    // int (r/(1+r)^2)^a r^{it} dr/r = Gamma(a+it) Gamma(a-it) / Gamma(2a), times Gamma(2a).
    const double a = 1.7;
    for (double t : {0.0, 0.5, 2.0}) {
        const cd v = ramanujan_transform(psi_one(), a, rvec({t}));
        EXPECT_NEAR(v.real(), std::norm(gamma(cd(a, t))), 1e-12 * v.real());
    }
}

TEST(Ramanujan, NonNegativeAndDecaying) {
    for (double t1 : {-3.0, 0.0, 1.0})
        for (double t2 : {-2.0, 0.5, 4.0}) {
            const cd v = ramanujan_transform(psi_one(), 2.0, rvec({t1, t2}));
            EXPECT_GE(v.real(), 0.0);
            EXPECT_EQ(v.imag(), 0.0);
        }
    const double at0 = ramanujan_transform(psi_one(), 2.0, rvec({0.0, 0.0})).real();
    const double at8 = ramanujan_transform(psi_one(), 2.0, rvec({0.0, 8.0})).real();
    EXPECT_LT(at8, 1e-3 * at0);
}

// The closed form is normalized like Gamma_M itself: it equals the unit-constant quadrature
// times (2 pi)^{N(N-1)/2}, which is (2 pi)^{N^2/2} times the Gaussian-calibrated one.
TEST(Ramanujan, MatchesQuadratureOfBetaPrime) {
    const QuadratureGrid g = parse_grid("T=12,P=64");
    const double kappa = calibrate_constant(2, g).kappa;
    const RadialFunction f = radial_beta_prime(2.0, 2, true);
    const double c = 2.0 * std::numbers::pi;
    for (const RVec& t : {rvec({0.0, 1.0}), rvec({0.3, -0.8}), rvec({1.5, 0.0})}) {
        const double closed = ramanujan_transform(psi_one(), 2.0, t).real();
        const double raw = forward_transform(f, t, g).value.real();
        EXPECT_NEAR(c * raw, closed, 1e-3 * closed) << t.transpose();
        EXPECT_NEAR(c * c * kappa * raw, closed, 1e-3 * closed) << t.transpose();
    }
}

TEST(Ramanujan, ScalarMatchesUnitConstantQuadrature) {
    const RadialFunction f = radial_beta_prime(1.5, 1, true);
    for (double t : {0.0, 0.9}) {
        const double closed = ramanujan_transform(psi_one(), 1.5, rvec({t})).real();
        EXPECT_NEAR(forward_transform(f, rvec({t})).value.real(), closed, 1e-6 * closed);
    }
}

TEST(Ramanujan, AlphaBound) {
    EXPECT_THROW(ramanujan_transform(psi_one(), 1.0, rvec({0.0, 0.0})), Error);
}

TEST(Psi, SymmetricEvaluators) {
    Rng rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const PsiFunction& psi : {psi_one(), psi_affine(0.7)}) {
        CVec l(3);
        for (int k = 0; k < 3; ++k) l(k) = cd(u(rng), u(rng));
        const CVec p = cvec({l(2), l(0), l(1)});
        EXPECT_NEAR(std::abs(psi(l) - psi(p)), 0.0, 1e-10);
    }
}

TEST(Psi, ScanOfOne) {
    const PsiScanReport r = psi_positivity_scan(psi_one(), 2.0, {rvec({0.0, 0.0}), rvec({1.0, -3.0})});
    EXPECT_EQ(r.min_re, 1.0);
    EXPECT_EQ(r.max_abs_im, 0.0);
    EXPECT_EQ(r.verdict, Verdict::ConsistentPd);
}

TEST(Psi, AffineSignChange) {
    std::vector<RVec> grid;
    for (double a = -2.0; a <= 2.0; a += 0.5) grid.push_back(rvec({a, 0.5 * a}));
    // Re psi(it - alpha) = c - N alpha = c - 4.
    const PsiScanReport bad = psi_positivity_scan(psi_affine(3.0), 2.0, grid);
    EXPECT_NEAR(bad.min_re, -1.0, 1e-14);
    EXPECT_EQ(bad.verdict, Verdict::NotPd);
    const PsiScanReport good = psi_positivity_scan(psi_affine(5.0), 2.0, grid);
    EXPECT_NEAR(good.min_re, 1.0, 1e-14);
    EXPECT_EQ(good.verdict, Verdict::ConsistentPd);
    EXPECT_NEAR(good.max_abs_im, 3.0, 1e-14);
}

TEST(Psi, EmptyGrid) {
    try {
        psi_positivity_scan(psi_one(), 2.0, {});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyGrid);
    }
}

TEST(Volume, ScalarBetaFunction) {
    for (double a : {1.0, 2.5, 4.0}) {
        const double v = beta_prime_volume_integral(a, 1, 1e12);
        EXPECT_NEAR(v, std::exp(log_beta(a, a)), 1e-6 * v);
    }
}

TEST(Volume, TwoByTwoMatchesBetaMoments) {
    // Entries int_0^inf r^{a + j} (1 + r)^{-2a} dr = B(a + j + 1, a - j - 1), j = k + l - 2.
    const double a = 2.5;
    RMatrix m(2, 2);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            const int j = k + l - 2;
            m(k, l) = std::exp(log_beta(a + j + 1, a - j - 1));
        }
    const double v = beta_prime_volume_integral(a, 2, 1e12);
    EXPECT_NEAR(v, m.determinant(), 1e-5 * std::abs(m.determinant()));
    EXPECT_GT(v, 0.0);
}

TEST(Volume, FiniteAboveThresholdDivergentAtIt) {
    // Tails decay like cutoff^{-(alpha - 1)} at N = 2.
    const double c4 = beta_prime_volume_integral(2.5, 2, 1e4), c8 = beta_prime_volume_integral(2.5, 2, 1e8);
    EXPECT_NEAR(c4, c8, 1e-4 * c8);
    double prev = 0.0;
    for (double cut : {1e2, 1e4, 1e6, 1e8}) {
        const double v = beta_prime_volume_integral(1.0, 2, cut);
        EXPECT_GT(v, 1.5 * prev);
        prev = v;
    }
}
