#include <gtest/gtest.h>

#include <hpdk/hpd_core.hpp>
#include <hpdk/io.hpp>

using namespace hpdk;

namespace {

HpdMatrix random_hpd(int n, Rng& rng, bool complex = true) {
    return sample_spd_one(n, 0.2, 5.0, complex ? Field::Complex : Field::Real, rng);
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

}  // namespace

TEST(Validate, IdentityAndHandExamples) {
    EXPECT_EQ(identity_hpd(3).dim(), 3);
    EXPECT_EQ(kind_of([] { diag_hpd(rvec({1.0, -1.0})); }), ErrorKind::NotPositiveDefinite);
    CMatrix a(2, 2);
    a << 1.0, cd(0, 1), cd(0, -1), 2.0;
    const HpdMatrix h = validate_hpd(a);
    const Spectrum s = eigenvalues(h);
    EXPECT_NEAR(s[0], (3.0 - std::sqrt(5.0)) / 2.0, 1e-14);
    EXPECT_NEAR(s[1], (3.0 + std::sqrt(5.0)) / 2.0, 1e-14);
    EXPECT_FALSE(h.is_real());
}

TEST(Validate, RejectsAsymmetry) {
    RMatrix a(2, 2);
    a << 2.0, 1.0, 1.1, 2.0;
    EXPECT_EQ(kind_of([&] { HpdMatrix::validate(a); }), ErrorKind::NotHermitian);
    RMatrix b(2, 3);
    b.setOnes();
    EXPECT_EQ(kind_of([&] { HpdMatrix::validate(b); }), ErrorKind::DimensionMismatch);
}

TEST(Eigenvalues, Examples) {
    const Spectrum a = eigenvalues(identity_hpd(2));
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 1.0);
    const Spectrum b = eigenvalues(diag_hpd(rvec({3, 1, 2})));
    EXPECT_NEAR(b[0], 1.0, 1e-15);
    EXPECT_NEAR(b[1], 2.0, 1e-15);
    EXPECT_NEAR(b[2], 3.0, 1e-15);
    RMatrix m(2, 2);
    m << 2, 1, 1, 2;
    const Spectrum c = eigenvalues(HpdMatrix::validate(m));
    EXPECT_NEAR(c[0], 1.0, 1e-14);
    EXPECT_NEAR(c[1], 3.0, 1e-14);
}

TEST(Eigenvalues, ReconstructionFromDecomposition) {
    Rng rng(11);
    for (int n : {2, 3, 5}) {
        const HpdMatrix x = random_hpd(n, rng);
        const EigenDecomposition e = eigen_decompose(x);
        const CMatrix r = e.vectors * e.values.values().cast<cd>().asDiagonal() * e.vectors.adjoint();
        EXPECT_LE((r - x.matrix()).norm(), 1e-10 * x.matrix().norm());
        for (int k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
    }
}

TEST(GroupAction, Examples) {
    Rng rng(3);
    const HpdMatrix x = random_hpd(3, rng);
    const HpdMatrix same = group_action(GroupElement::validate(CMatrix::Identity(3, 3)), x);
    EXPECT_LE((same.matrix() - x.matrix()).norm(), 1e-14);
    CMatrix g = CMatrix::Zero(2, 2);
    g(0, 0) = 2.0;
    g(1, 1) = 1.0;
    const HpdMatrix y = group_action(GroupElement::validate(g), identity_hpd(2));
    EXPECT_NEAR(y.matrix()(0, 0).real(), 4.0, 1e-15);
    EXPECT_NEAR(y.matrix()(1, 1).real(), 1.0, 1e-15);
    EXPECT_EQ(kind_of([&] { group_action(GroupElement::validate(g), x); }), ErrorKind::DimensionMismatch);
}

TEST(GroupAction, SpectrumMatchesSimilarForm) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const GroupElement g = random_group_element(3, rng);
        const HpdMatrix x = random_hpd(3, rng);
        const HpdMatrix gg = validate_hpd(g.matrix().adjoint() * g.matrix());
        const HpdMatrix r = hpd_sqrt(gg);
        const Spectrum a = eigenvalues(group_action(g, x));
        const Spectrum b = eigenvalues(validate_hpd(r.matrix() * x.matrix() * r.matrix()));
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * b[2]);
    }
}

TEST(GroupAction, Associative) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const GroupElement g1 = random_group_element(4, rng), g2 = random_group_element(4, rng);
        const HpdMatrix x = random_hpd(4, rng);
        const CMatrix a = group_action(g2, group_action(g1, x)).matrix();
        const CMatrix b = group_action(GroupElement::validate(g2.matrix() * g1.matrix()), x).matrix();
        EXPECT_LE((a - b).norm(), 1e-10 * b.norm());
    }
}

TEST(GroupElement, SingularRejected) {
    CMatrix g(2, 2);
    g << 1.0, 2.0, 2.0, 4.0;
    EXPECT_EQ(kind_of([&] { GroupElement::validate(g); }), ErrorKind::NotInvertible);
}

TEST(Congruence, Examples) {
    Rng rng(6);
    const HpdMatrix x = random_hpd(3, rng);
    EXPECT_LE((congruence_normalize(x, identity_hpd(3)).matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((congruence_normalize(x, x).matrix() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    const HpdMatrix d = congruence_normalize(diag_hpd(rvec({4, 1})), diag_hpd(rvec({1, 4})));
    EXPECT_NEAR(d.matrix()(0, 0).real(), 4.0, 1e-14);
    EXPECT_NEAR(d.matrix()(1, 1).real(), 0.25, 1e-14);
}

TEST(Congruence, SpectrumEqualsRelativeSpectrum) {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const HpdMatrix x = random_hpd(4, rng), y = random_hpd(4, rng);
        const Spectrum a = eigenvalues(congruence_normalize(x, y));
        const Spectrum b = relative_spectrum(x, y);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * a[3]);
    }
}

TEST(Distance, Examples) {
    Rng rng(8);
    const HpdMatrix x = random_hpd(3, rng);
    EXPECT_NEAR(riemannian_distance(x, x), 0.0, 1e-12);
    const double e = std::exp(1.0);
    EXPECT_NEAR(riemannian_distance(diag_hpd(rvec({e, e})), identity_hpd(2)), std::sqrt(2.0), 1e-14);
}

TEST(Distance, InvarianceSymmetryTriangle) {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const HpdMatrix x = random_hpd(3, rng), y = random_hpd(3, rng), z = random_hpd(3, rng);
        const GroupElement g = random_group_element(3, rng);
        const double d = riemannian_distance(x, y);
        EXPECT_NEAR(riemannian_distance(group_action(g, x), group_action(g, y)), d, 1e-10 * std::max(1.0, d));
        EXPECT_NEAR(riemannian_distance(y, x), d, 1e-12 * std::max(1.0, d));
        EXPECT_LE(riemannian_distance(x, z), d + riemannian_distance(y, z) + 1e-9);
    }
}

TEST(Vandermonde, Examples) {
    EXPECT_DOUBLE_EQ(vandermonde(rvec({1, 2, 3})), 2.0);
    EXPECT_DOUBLE_EQ(vandermonde(rvec({1, 2, 1})), 0.0);
    const cd v = vandermonde(cvec({cd(0, 0), cd(0, 1)}));
    EXPECT_EQ(v, cd(0, 1));
}

TEST(Vandermonde, PermutationSign) {
    Rng rng(10);
    std::uniform_real_distribution<double> ud(-2, 2);
    for (int trial = 0; trial < 20; ++trial) {
        RVec v(5);
        for (int k = 0; k < 5; ++k) v(k) = ud(rng);
        std::vector<int> p = {0, 1, 2, 3, 4};
        std::shuffle(p.begin(), p.end(), rng);
        RVec w(5);
        int inversions = 0;
        for (int k = 0; k < 5; ++k) {
            w(k) = v(p[k]);
            for (int l = k + 1; l < 5; ++l) inversions += p[k] > p[l];
        }
        const double sign = inversions % 2 ? -1.0 : 1.0;
        EXPECT_NEAR(vandermonde(w), sign * vandermonde(v), 1e-12 * std::abs(vandermonde(v)));
    }
    EXPECT_EQ(vandermonde(rvec({3, 1, 2})), vandermonde(rvec({1, 2, 3})));
    EXPECT_EQ(vandermonde(rvec({2, 1, 3})), -vandermonde(rvec({1, 2, 3})));
}

TEST(PowerFunction, Examples) {
    Rng rng(12);
    const HpdMatrix x = random_hpd(3, rng);
    EXPECT_NEAR(std::abs(power_function(cvec({cd(1, 2), 0.5, cd(-1, 3)}), identity_hpd(3)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(power_function(cvec({1, 1}), diag_hpd(rvec({2, 5}))).real(), 10.0, 1e-13);
    EXPECT_NEAR(power_function(cvec({2, 1}), diag_hpd(rvec({2, 3}))).real(), 12.0, 1e-13);
    // s = (1, 0, 0) picks the (1,1) minor.
    EXPECT_NEAR(power_function(cvec({1, 0, 0}), x).real(), x.matrix()(0, 0).real(), 1e-12);
}

TEST(PowerFunction, ProductRule) {
    Rng rng(13);
    std::uniform_real_distribution<double> ud(-2, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const HpdMatrix x = random_hpd(3, rng);
        CVec s(3), t(3);
        for (int k = 0; k < 3; ++k) {
            s(k) = cd(ud(rng), ud(rng));
            t(k) = cd(ud(rng), ud(rng));
        }
        const cd a = power_function(s, x) * power_function(t, x);
        const cd b = power_function(s + t, x);
        EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(b));
    }
}

TEST(PowerFunction, AgreesWithExplicitMinors) {
    Rng rng(14);
    const HpdMatrix x = random_hpd(3, rng);
    const CVec s = cvec({cd(0.7, 1.0), cd(-0.2, 0.5), cd(1.5, -2.0)});
    cd expected = 1.0;
    for (int k = 0; k < 3; ++k) {
        const double minor = x.matrix().topLeftCorner(k + 1, k + 1).determinant().real();
        const cd e = s(k) - (k + 1 < 3 ? s(k + 1) : cd(0.0));
        expected *= std::pow(cd(minor), e);
    }
    EXPECT_LE(std::abs(power_function(s, x) - expected), 1e-12 * std::abs(expected));
}

TEST(Haar, UnitaryAndDeterministic) {
    for (int n : {1, 2, 5}) {
        const GroupElement u = haar_unitary(n, 42);
        EXPECT_LE((u.matrix().adjoint() * u.matrix() - CMatrix::Identity(n, n)).norm(), 1e-12);
        const GroupElement o = haar_orthogonal(n, 42);
        EXPECT_LE((o.matrix().adjoint() * o.matrix() - CMatrix::Identity(n, n)).norm(), 1e-12);
        EXPECT_EQ(o.matrix().imag().cwiseAbs().maxCoeff(), 0.0);
        EXPECT_TRUE(u.matrix() == haar_unitary(n, 42).matrix());
        EXPECT_FALSE(u.matrix() == haar_unitary(n, 43).matrix());
    }
}

TEST(Haar, FirstEntryMoment) {
    const int n = 3, draws = 100000;
    Rng rng(99);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double v = std::norm(haar_unitary(n, rng).matrix()(0, 0));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
    EXPECT_NEAR(mean, 1.0 / n, 3.0 * se);
}

TEST(Haar, FixedPhaseColumnsAreNotBiased) {
    // With the diagonal phase correction, E[u_11] = 0; without it the QR output has
    // a positive real first entry.
    Rng rng(100);
    cd sum = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) sum += haar_unitary(2, rng).matrix()(0, 0);
    EXPECT_LT(std::abs(sum / static_cast<double>(draws)), 0.03);
}

TEST(SampleSpd, EigenvaluesInRangeAndMean) {
    for (Field f : {Field::Real, Field::Complex}) {
        const auto xs = sample_spd(3, 30.0, 31.0, 10000, f, 5);
        double sum = 0.0, sum2 = 0.0;
        for (const auto& x : xs) {
            const Spectrum s = eigenvalues(x);
            EXPECT_GE(s[0], 30.0 - 1e-9);
            EXPECT_LE(s[2], 31.0 + 1e-9);
            const double t = x.matrix().trace().real() / 3.0;
            sum += t;
            sum2 += t * t;
            if (f == Field::Real) EXPECT_TRUE(x.is_real());
        }
        const double mean = sum / xs.size();
        const double se = std::sqrt((sum2 / xs.size() - mean * mean) / xs.size());
        EXPECT_NEAR(mean, 30.5, 3.0 * se);
    }
}

TEST(SampleSpd, RejectsBadInterval) {
    EXPECT_EQ(kind_of([] { sample_spd(2, 2.0, 1.0, 3, Field::Real, 0); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { sample_spd(2, 0.0, 1.0, 3, Field::Real, 0); }), ErrorKind::InvalidArgument);
}

TEST(SampleSpd, SameSeedSameStream) {
    const auto a = sample_spd(4, 1.0, 2.0, 5, Field::Complex, 77);
    const auto b = sample_spd(4, 1.0, 2.0, 5, Field::Complex, 77);
    for (int i = 0; i < 5; ++i) EXPECT_TRUE(a[i].matrix() == b[i].matrix());
}

TEST(UInvariance, SpectrumUnchangedByUnitaryAction) {
    Rng rng(15);
    for (int trial = 0; trial < 10; ++trial) {
        const HpdMatrix x = random_hpd(4, rng);
        const Spectrum a = eigenvalues(x), b = eigenvalues(group_action(haar_unitary(4, rng), x));
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * a[3]);
    }
}

TEST(Seeds, DerivedStreamsDiffer) {
    EXPECT_NE(derive_seed(0, 0, 0), derive_seed(0, 0, 1));
    EXPECT_NE(derive_seed(0, 1, 0), derive_seed(0, 0, 1));
    EXPECT_NE(derive_seed(1, 0, 0), derive_seed(0, 0, 0));
    EXPECT_EQ(derive_seed(5, 6, 7), derive_seed(5, 6, 7));
}

TEST(Io, MatrixRoundTrip) {
    Rng rng(16);
    for (bool complex : {false, true}) {
        const HpdMatrix x = random_hpd(3, rng, complex);
        const json j = matrix_to_json(x);
        EXPECT_EQ(j.at("field"), complex ? "complex" : "real");
        const HpdMatrix y = matrix_from_json(json::parse(j.dump()));
        EXPECT_TRUE(x.matrix() == y.matrix());
    }
    const auto xs = sample_spd(2, 1.0, 2.0, 4, Field::Complex, 3);
    const auto ys = samples_from_json(json::parse(samples_to_json(xs).dump()));
    ASSERT_EQ(ys.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_TRUE(xs[i].matrix() == ys[i].matrix());
}

TEST(Io, MalformedInput) {
    EXPECT_EQ(kind_of([] { matrix_from_json(json::parse(R"({"dim": 2, "entries": [[1, 0]]})")); }),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { matrix_from_json(json::parse(R"({"entries": [[1]]})")); }), ErrorKind::Io);
    EXPECT_EQ(kind_of([] { read_json_file("/nonexistent/file.json"); }), ErrorKind::Io);
}

TEST(Io, BundledFixtureLoads) {
    const auto xs = read_samples_file(std::string(HPDK_TEST_DATA_DIR) + "/samples50.json");
    ASSERT_EQ(xs.size(), 50u);
    for (const auto& x : xs) {
        EXPECT_EQ(x.dim(), 3);
        const Spectrum s = eigenvalues(x);
        EXPECT_GE(s[0], 1.0 - 1e-9);
        EXPECT_LE(s[2], 2.0 + 1e-9);
    }
}
