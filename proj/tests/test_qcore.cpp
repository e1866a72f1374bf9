#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "randgap/stats.hpp"

using namespace randgap;
using randgap::testing::max_abs_diff;
using randgap::testing::mean_with_error;
using randgap::testing::taylor_expm;

namespace {

HermitianOperator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return HermitianOperator(m);
}

HermitianOperator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return HermitianOperator(m);
}

} // namespace

TEST_CASE("gue_sample is Hermitian, reproducible and bounded to dim 16") {
    Rng rng(11);
    HermitianOperator h = gue_sample(2, rng);
    CHECK(max_abs_diff(h.entries(), h.entries().adjoint()) == 0.0);

    Rng a(42), b(42);
    HermitianOperator ha = gue_sample(4, a), hb = gue_sample(4, b);
    CHECK(max_abs_diff(ha.entries(), hb.entries()) == 0.0);

    CHECK_THROWS_AS(gue_sample(1, rng), std::invalid_argument);
    CHECK_THROWS_AS(gue_sample(17, rng), std::invalid_argument);
}

TEST_CASE("gue_sample mean eigenvalue vanishes over many draws") {
    Rng rng(7);
    std::vector<double> means;
    for (int i = 0; i < 10000; ++i) {
        RealVector ev = eig_decompose(gue_sample(4, rng)).eigenvalues;
        means.push_back(ev.mean());
    }
    auto [mean, se] = mean_with_error(means);
    CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("eig_decompose handles diagonal, Pauli and random inputs") {
    RealVector d(2);
    d << 3, 1;
    EigenSystem diag = eig_decompose(HermitianOperator::diagonal(d));
    CHECK(diag.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(diag.eigenvalues(1) == doctest::Approx(3.0));
    // Eigenvectors of a diagonal matrix are a (signed) permutation.
    for (int j = 0; j < 2; ++j) {
        int nonzero = 0;
        for (int i = 0; i < 2; ++i) {
            if (std::abs(diag.eigenvectors.entries()(i, j)) > 1e-12) ++nonzero;
        }
        CHECK(nonzero == 1);
    }

    EigenSystem x = eig_decompose(pauli_x());
    CHECK(x.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(x.eigenvalues(1) == doctest::Approx(1.0));

    Rng rng(3);
    HermitianOperator h = gue_sample(4, rng);
    EigenSystem es = eig_decompose(h);
    Matrix residual = h.entries() * es.eigenvectors.entries() -
                      es.eigenvectors.entries() * es.eigenvalues.asDiagonal();
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9);
    for (int i = 1; i < 4; ++i) CHECK(es.eigenvalues(i) >= es.eigenvalues(i - 1));
}

TEST_CASE("evolve matches identities and the Taylor-series oracle") {
    Rng rng(5);
    HermitianOperator h = gue_sample(3, rng);
    CHECK(max_abs_diff(evolve(h, 0.0).entries(), Matrix::Identity(3, 3)) <= 1e-12);

    UnitaryMatrix z = evolve(pauli_z(), std::numbers::pi / 2);
    CHECK(std::abs(z.entries()(0, 0) - std::exp(Complex(0, -std::numbers::pi / 2))) <= 1e-12);
    CHECK(std::abs(z.entries()(1, 1) - std::exp(Complex(0, std::numbers::pi / 2))) <= 1e-12);
    CHECK(std::abs(z.entries()(0, 1)) <= 1e-15);

    // Group property.
    UnitaryMatrix u1 = evolve(h, 0.7), u2 = evolve(h, 1.9), u12 = evolve(h, 2.6);
    CHECK(max_abs_diff((u1 * u2).entries(), u12.entries()) <= 1e-9);

    // Taylor oracle on random 2x2 cases with ||Ht|| <= 5.
    for (int trial = 0; trial < 20; ++trial) {
        HermitianOperator h2 = gue_sample(2, rng);
        double norm = eig_decompose(h2).eigenvalues.cwiseAbs().maxCoeff();
        double t = 5.0 / std::max(norm, 1.0) * 0.8;
        CHECK(max_abs_diff(evolve(h2, t).entries(), taylor_expm(h2, t)) <= 1e-8);
    }

    // Norm preservation on random vectors.
    std::normal_distribution<double> normal;
    CVector v(3);
    for (int i = 0; i < 3; ++i) v(i) = Complex(normal(rng), normal(rng));
    CHECK(std::abs((evolve(h, 1.3).entries() * v).norm() - v.norm()) <= 1e-9);
}

TEST_CASE("unitarity is enforced at construction") {
    Matrix bad(2, 2);
    bad << 1, 0, 0, 1.5;
    CHECK_THROWS_AS(UnitaryMatrix{bad}, std::invalid_argument);
}

TEST_CASE("timeordered_evolve: constant Hamiltonian, T=0, and second-order convergence") {
    RealVector d(3);
    d << 0, 1, 4;
    HermitianOperator h0 = HermitianOperator::diagonal(d);

    for (int steps : {1, 7, 64}) {
        AdiabaticSchedule constant(h0, h0, 2.5, steps);
        CHECK(max_abs_diff(timeordered_evolve(constant).entries(), evolve(h0, 2.5).entries()) <= 1e-9);
    }

    Rng rng(9);
    HermitianOperator coupling = gue_sample(3, rng);
    HermitianOperator hp(h0.entries() + 0.5 * coupling.entries());

    AdiabaticSchedule zero_time(h0, hp, 0.0, 16);
    CHECK(max_abs_diff(timeordered_evolve(zero_time).entries(), Matrix::Identity(3, 3)) <= 1e-12);

    Matrix reference = timeordered_evolve(AdiabaticSchedule(h0, hp, 2.0, 4096)).entries();
    std::vector<double> steps_list, errors;
    for (int steps : {8, 16, 32, 64}) {
        double err = max_abs_diff(timeordered_evolve(AdiabaticSchedule(h0, hp, 2.0, steps)).entries(),
                                  reference);
        steps_list.push_back(static_cast<double>(steps));
        errors.push_back(err);
    }
    double slope = loglog_slope(steps_list, errors);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1)); // -2 +- 0.2
}

TEST_CASE("AdiabaticSchedule validates its invariants") {
    RealVector d(2);
    d << 0, 1;
    HermitianOperator h0 = HermitianOperator::diagonal(d);
    Rng rng(2);
    HermitianOperator hp = gue_sample(2, rng);
    CHECK_THROWS_AS(AdiabaticSchedule(hp, h0, 1.0, 4), std::invalid_argument); // h0 not diagonal
    CHECK_THROWS_AS(AdiabaticSchedule(h0, hp, 1.0, 0), std::invalid_argument); // steps < 1
}

TEST_CASE("normalize_spectrum sorts, shifts and preserves gaps") {
    Spectrum s = normalize_spectrum({3, 1, 2});
    CHECK(s.values() == std::vector<double>{0, 1, 2});
    CHECK(normalize_spectrum({0}).values() == std::vector<double>{0});
    CHECK_THROWS_AS(normalize_spectrum({}), std::invalid_argument);

    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        RealVector ev = eig_decompose(gue_sample(3, rng)).eigenvalues;
        Spectrum norm = normalize_spectrum({ev(0), ev(1), ev(2)});
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(std::abs((norm[i] - norm[j]) - (ev(i) - ev(j))) <= 1e-12);
            }
        }
    }
}

TEST_CASE("spectrum_to_gaps: examples, antisymmetry and additivity") {
    GapMatrix g = spectrum_to_gaps(Spectrum({0, 1, 3}));
    CHECK(g(1, 0) == doctest::Approx(1.0));
    CHECK(g(2, 0) == doctest::Approx(3.0));
    CHECK(g(2, 1) == doctest::Approx(2.0));

    GapMatrix trivial = spectrum_to_gaps(Spectrum({0}));
    CHECK(trivial.dim() == 1);
    CHECK(trivial(0, 0) == 0.0);

    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Spectrum s = spectrum_of(gue_sample(4, rng));
        GapMatrix gm = spectrum_to_gaps(s);
        double scale = std::abs(s[3]) + 1.0;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                CHECK(gm(i, j) == -gm(j, i)); // antisymmetry is exact
                for (int k = 0; k < 4; ++k) {
                    CHECK(std::abs(gm(i, k) - (gm(i, j) + gm(j, k))) <= 4e-16 * scale);
                }
            }
        }
    }
}

TEST_CASE("HermitianOperator rejects non-Hermitian input and oversized dims") {
    Matrix bad(2, 2);
    bad << 1, 2, 3, 4;
    CHECK_THROWS_AS(HermitianOperator{bad}, std::invalid_argument);
    CHECK_THROWS_AS(HermitianOperator(Matrix::Identity(17, 17)), std::invalid_argument);
}
