#include "mulsemi/cases.hpp"
#include "mulsemi/error.hpp"
#include "mulsemi/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace mulsemi;
using Mat = Eigen::MatrixXcd;

namespace {

const Complex I{0.0, 1.0};

double dist(const CMatrix& a, const Mat& b) { return (a.eigen() - b).norm(); }

Mat shift2() {
    Mat n = Mat::Zero(2, 2);
    n(0, 1) = 1.0;
    return n;
}

Mat zabczyk_block(int n) { return cases::zabczyk_family(n, n).active_generator(n - 1).eigen(); }

}  // namespace

TEST_CASE("CMatrix rejects non-finite and non-square input") {
    Mat bad = Mat::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(CMatrix{bad}, InvalidMatrixError);
    bad(0, 1) = Complex(0.0, INFINITY);
    CHECK_THROWS_AS(CMatrix{bad}, InvalidMatrixError);
    CHECK_THROWS_AS(CMatrix{Mat::Zero(2, 3)}, InvalidMatrixError);
}

TEST_CASE("expm examples") {
    CHECK(dist(expm(CMatrix::zero(4), 7.0), Mat::Identity(4, 4)) == 0.0);

    const CMatrix d = CMatrix::diagonal({-1.0, I});
    Mat expected = Mat::Zero(2, 2);
    expected(0, 0) = std::exp(-1.0);
    expected(1, 1) = std::exp(I);
    CHECK(dist(expm(d, 1.0), expected) < 1e-14);

    const Mat n = shift2();
    CHECK(dist(expm(CMatrix(n), 3.0), Mat::Identity(2, 2) + 3.0 * n) < 1e-14);

    CHECK_THROWS_AS(expm(d, -1.0), DomainError);
}

TEST_CASE("expm matches a long-double Taylor oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 8;
        const Mat a = oracle::gaussian(rng, n, 1.0 / std::sqrt(n));
        const double t = 0.1 + 0.3 * (trial % 10);
        const Mat ref = oracle::taylor_expm(a, t);
        CHECK(dist(expm(CMatrix(a), t), ref) <= 1e-12 * std::max(1.0, ref.norm()));
    }
    for (int n : {3, 6, 10}) {
        const Mat a = zabczyk_block(n);
        const Mat ref = oracle::taylor_expm(a, 5.0);
        CHECK(dist(expm(CMatrix(a), 5.0), ref) <= 1e-12 * ref.norm());
    }
}

TEST_CASE("semigroup law for expm") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 6;
        const CMatrix a(oracle::gaussian(rng, n, 1.0 / std::sqrt(n)));
        const double na = norm2(a);
        const double t = 12.0 / na * (0.2 + 0.05 * (trial % 7));
        const double s = 20.0 / na - t;
        const CMatrix whole = expm(a, t + s);
        const CMatrix prod = expm(a, t) * expm(a, s);
        CHECK((whole.eigen() - prod.eigen()).norm() <= 1e-9 * (1.0 + norm2(whole)));
    }
}

TEST_CASE("eigenvalues and spectral bound") {
    const auto ev = eigenvalues(CMatrix::diagonal({1.0, 2.0, 3.0}));
    CHECK(oracle::spectrum_distance(ev, {1.0, 2.0, 3.0}) < 1e-14);

    // The exact spectrum of a Jordan-type block is recovered from its diagonal.
    const auto z5 = eigenvalues(CMatrix(zabczyk_block(5)));
    REQUIRE(z5.size() == 5);
    for (const Complex& l : z5) CHECK(std::abs(l - Complex(-0.2, 5.0)) < 1e-12);

    CHECK(spectral_bound(CMatrix::diagonal({-3.0, Complex(-1.0, 2.0)})) == doctest::Approx(-1.0));
    for (int n = 1; n <= 30; ++n) CHECK(std::abs(spectral_bound(CMatrix(zabczyk_block(n))) + 1.0 / n) < 1e-8);
}

TEST_CASE("spectra are similarity invariant") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 7;
        const Mat a = oracle::gaussian(rng, n);
        const Mat s = oracle::mild_similarity(rng, n);
        const Mat b = s * a * s.inverse();
        CHECK(oracle::spectrum_distance(eigenvalues(CMatrix(a)), eigenvalues(CMatrix(b))) < 1e-8);
    }
}

TEST_CASE("Hurwitz shift hits the requested spectral bound") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial;
        const Mat b = oracle::gaussian(rng, n);
        const double sb = spectral_bound(CMatrix(b));
        const Mat shifted = b - (sb + 1.0) * Mat::Identity(n, n);
        CHECK(std::abs(spectral_bound(CMatrix(shifted)) + 1.0) < 1e-8);
    }
}

TEST_CASE("spectral radius examples") {
    CHECK(spectral_radius(CMatrix::identity(3)) == doctest::Approx(1.0));
    CHECK(spectral_radius(expm(CMatrix::diagonal({-1.0, I}), 2.0)) == doctest::Approx(1.0));
    CHECK(spectral_radius(CMatrix(shift2())) == 0.0);
}

TEST_CASE("spectral mapping in finite dimension") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 12;
        const CMatrix a(oracle::gaussian(rng, n, 1.0 / std::sqrt(n)));
        const double s = spectral_bound(a);
        for (double t : {0.5, 1.0, 5.0, 10.0}) {
            const double lhs = spectral_radius(expm(a, t));
            CHECK(std::abs(lhs - std::exp(t * s)) <= 1e-8 * std::exp(t * s));
        }
    }
    const SpectralSummary sum = spectral_summary(CMatrix::diagonal({-2.0, Complex(0.0, 3.0)}));
    CHECK(sum.spectral_bound == doctest::Approx(0.0));
    REQUIRE(sum.imaginary_eigs.size() == 1);
    CHECK(std::abs(sum.imaginary_eigs[0] - Complex(0.0, 3.0)) < 1e-14);
    CHECK(sum.spectral_radius_of_exp_at(2.0) == doctest::Approx(1.0));
}

TEST_CASE("operator 2-norm matches the singular value oracle") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat a = oracle::gaussian(rng, 1 + trial % 9);
        CHECK(norm2(a) == doctest::Approx(oracle::svd_norm(a)).epsilon(1e-12));
    }
    CHECK(norm2(Mat::Zero(3, 3)) == 0.0);
}

TEST_CASE("cesaro_mean examples") {
    const double tau = 2.0 * std::numbers::pi;
    const CMatrix rot = CMatrix::diagonal({I});
    CHECK(std::abs(cesaro_mean(rot, tau, CesaroMethod::ClosedForm)(0, 0)) < 1e-14);
    CHECK(std::abs(cesaro_mean(rot, tau, CesaroMethod::Quadrature)(0, 0)) < 1e-10);

    CHECK(dist(cesaro_mean(CMatrix::zero(3), 4.0, CesaroMethod::Quadrature), Mat::Identity(3, 3)) < 1e-14);

    const CMatrix decay = CMatrix::diagonal({-1.0});
    CHECK(std::abs(cesaro_mean(decay, 1.0, CesaroMethod::ClosedForm)(0, 0) - (1.0 - std::exp(-1.0))) < 1e-14);
    CHECK(std::abs(cesaro_mean(decay, 1.0, CesaroMethod::Quadrature)(0, 0) - (1.0 - std::exp(-1.0))) < 1e-12);

    CHECK_THROWS_AS(cesaro_mean(CMatrix::zero(2), 1.0, CesaroMethod::ClosedForm), SingularityError);
    CHECK_THROWS_AS(cesaro_mean(decay, 0.0, CesaroMethod::ClosedForm), DomainError);
}

TEST_CASE("cesaro_mean agrees with the block-exponential oracle") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 6;
        const Mat a = oracle::gaussian(rng, n, 1.0 / std::sqrt(n)) - 0.3 * Mat::Identity(n, n);
        const double t = 0.5 + trial % 5;
        const Mat ref = oracle::van_loan_mean(a, t);
        const CMatrix closed = cesaro_mean(CMatrix(a), t, CesaroMethod::ClosedForm);
        const CMatrix quad = cesaro_mean(CMatrix(a), t, CesaroMethod::Quadrature);
        CHECK(dist(closed, ref) <= 1e-10 * std::max(1.0, ref.norm()));
        CHECK(dist(quad, ref) <= 1e-8);
        CHECK((closed.eigen() - quad.eigen()).norm() <= 1e-8);
    }
}

TEST_CASE("ergodic_projection examples") {
    CHECK(dist(ergodic_projection(CMatrix::diagonal({0.0, -1.0})),
               CMatrix::diagonal({1.0, 0.0}).eigen()) < 1e-12);
    CHECK(dist(ergodic_projection(CMatrix::diagonal({-1.0, I})), Mat::Zero(2, 2)) == 0.0);
    CHECK(dist(ergodic_projection(CMatrix::zero(3)), Mat::Identity(3, 3)) < 1e-12);
    CHECK_THROWS_AS(ergodic_projection(CMatrix(shift2())), UnboundedSemigroupError);
}

TEST_CASE("projection laws on planted semisimple kernels") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 5;
        const int k = 1 + trial % (n - 1);
        // Similarity of diag(0 x k, Hurwitz-ish block) keeps zero semisimple.
        Mat d = Mat::Zero(n, n);
        d.bottomRightCorner(n - k, n - k) =
            oracle::gaussian(rng, n - k, 0.5) - 2.0 * Mat::Identity(n - k, n - k);
        const Mat s = oracle::mild_similarity(rng, n);
        const CMatrix a(s * d * s.inverse());
        const CMatrix p = ergodic_projection(a);
        CHECK(numerical_rank(p.eigen(), 1e-8) == k);
        CHECK((p * p).eigen().isApprox(p.eigen(), 1e-10));
        CHECK(norm2((p * p).eigen() - p.eigen()) <= 1e-10);
        CHECK(norm2((a * p).eigen()) <= 1e-10 * (1.0 + norm2(a)));
        CHECK(norm2((expm(a, 3.0) * p).eigen() - p.eigen()) <= 1e-9);
    }
}

TEST_CASE("mean ergodic convergence rate is 1/t") {
    const Mat s = [] {
        std::mt19937_64 rng(53);
        return oracle::mild_similarity(rng, 3);
    }();
    const CMatrix a(s * CMatrix::diagonal({0.0, I * 2.0, -0.5}).eigen() * s.inverse());
    const CMatrix p = ergodic_projection(a);
    std::vector<double> c;
    for (double t : {50.0, 100.0, 200.0, 400.0}) {
        const double err = norm2(cesaro_mean(a, t, CesaroMethod::Quadrature).eigen() - p.eigen());
        c.push_back(err * t);
    }
    const double fitted = *std::max_element(c.begin(), c.end());
    for (double t : {800.0, 1600.0}) {
        const double err = norm2(cesaro_mean(a, t, CesaroMethod::Quadrature).eigen() - p.eigen());
        CHECK(err * t <= 2.0 * fitted);
    }
}

TEST_CASE("semisimplicity and rank") {
    CHECK(is_semisimple(CMatrix::diagonal({I, I}), I));
    CHECK_FALSE(is_semisimple(CMatrix(Mat(I * Mat::Identity(2, 2) + shift2())), I));
    CHECK(numerical_rank(Mat::Identity(4, 4), 1e-9) == 4);
    CHECK(numerical_rank(shift2(), 1e-9) == 1);
}

TEST_CASE("matrix_power agrees with naive multiplication") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 8;
        const Mat m = oracle::gaussian(rng, n, 0.9 / std::sqrt(n) / 2.0);
        const unsigned k = trial % 65;
        const Mat ref = oracle::naive_power(m, k);
        CHECK(dist(matrix_power(CMatrix(m), k), ref) <= 1e-9 * std::max(1.0, ref.norm()));
    }
    CHECK(dist(matrix_power(CMatrix::diagonal({2.0}), 10), CMatrix::diagonal({1024.0}).eigen()) == 0.0);
}
