#include "mulsemi/cases.hpp"
#include "mulsemi/discrete.hpp"
#include "mulsemi/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mulsemi;
using Mat = Eigen::MatrixXcd;

namespace {

const Complex I{0.0, 1.0};

OperatorSample scalar_sample(const std::vector<Complex>& values) {
    std::vector<CMatrix> ms;
    for (const Complex& v : values) ms.push_back(CMatrix::diagonal({v}));
    return OperatorSample(DiscretizedMeasureSpace::atomic(std::vector<double>(values.size(), 1.0)), ms);
}

CMatrix rotation(double angle) {
    Mat r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return CMatrix(r);
}

// Random matrix scaled to spectral radius `radius`.
CMatrix with_radius(std::mt19937_64& rng, int n, double radius) {
    const Mat g = oracle::gaussian(rng, n);
    return CMatrix(g * (radius / spectral_radius(CMatrix(g))));
}

}  // namespace

TEST_CASE("power_bounded_estimate examples") {
    const auto space = DiscretizedMeasureSpace::atomic({1.0, 1.0});
    const PowerBound id = power_bounded_estimate(OperatorSample::identity(space, 3), 100);
    CHECK(id.bound == doctest::Approx(1.0));
    CHECK(id.certified);

    Mat j = Mat::Identity(2, 2);
    j(0, 1) = 1.0;
    const OperatorSample jordan(DiscretizedMeasureSpace::atomic({1.0}), {CMatrix(j)});
    double prev = 0.0;
    for (std::uint64_t n : {64, 128, 256, 512}) {
        const PowerBound b = power_bounded_estimate(jordan, n);
        CHECK_FALSE(b.certified);
        CHECK(b.bound > 0.99 * n);
        CHECK(b.bound < 1.01 * n + 1.0);
        CHECK(b.bound > prev);
        prev = b.bound;
    }

    std::mt19937_64 rng(97);
    std::vector<CMatrix> ms;
    for (int k = 0; k < 5; ++k) {
        const Mat g = oracle::gaussian(rng, 3);
        ms.emplace_back(g * (0.9 / oracle::svd_norm(g)));
    }
    const PowerBound c = power_bounded_estimate(OperatorSample(DiscretizedMeasureSpace::atomic({1, 1, 1, 1, 1}), ms), 500);
    CHECK(c.bound <= 1.0);
    CHECK(c.certified);

    CHECK(power_bounded_estimate(scalar_sample({2.0}), 5000).bound == kInfinity);
}

TEST_CASE("classify_discrete_uniform examples") {
    DiscreteOptions opts;
    const DiscreteUniformResult half = classify_discrete_uniform(scalar_sample({0.5, 0.5}), opts);
    CHECK(half.verdict == Verdict::Stable);
    CHECK(half.rho_star == doctest::Approx(0.5));
    REQUIRE(half.norm_decay_n);
    // 2^-n < 1e-6 first at n = 20.
    CHECK(*half.norm_decay_n == 20);
    CHECK(half.norm_check_ok);

    const auto space = DiscretizedMeasureSpace::atomic({1.0, 1.0});
    const OperatorSample rot(space, {rotation(1.0), CMatrix::diagonal({0.5, 0.5})});
    const DiscreteUniformResult r = classify_discrete_uniform(rot, opts);
    CHECK(r.verdict == Verdict::NotStable);
    CHECK(r.rho_star == doctest::Approx(1.0));
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].cell == 0);

    for (int k_max : {5, 20, 80}) {
        std::vector<Complex> v;
        for (int k = 1; k <= k_max; ++k) v.push_back(1.0 - 1.0 / k);
        DiscreteOptions o = opts;
        o.margin = 0.5 / k_max;
        const DiscreteUniformResult d = classify_discrete_uniform(scalar_sample(v), o);
        CHECK(d.verdict == Verdict::Stable);
        CHECK(d.rho_star == doctest::Approx(1.0 - 1.0 / k_max));
        o.margin = 2.0 / k_max;
        CHECK(classify_discrete_uniform(scalar_sample(v), o).verdict == Verdict::Inconclusive);
    }
}

TEST_CASE("classify_discrete_strong examples") {
    DiscreteOptions opts;
    CHECK(classify_discrete_strong(scalar_sample({0.99, 0.99}), opts).verdict == Verdict::Stable);

    const DiscreteStrongResult n = classify_discrete_strong(scalar_sample({0.5, std::exp(I * 0.7)}), opts);
    CHECK(n.verdict == Verdict::NotStable);
    REQUIRE(n.eigenvector);
    REQUIRE_FALSE(n.witnesses.empty());
    CHECK(n.witnesses[0].cell == 1);
    const CVector& v = *n.eigenvector;
    CHECK((CMatrix::diagonal({std::exp(I * 0.7)}) * v - std::exp(I * 0.7) * v).norm() < 1e-12);

    std::mt19937_64 rng(101);
    const auto space = DiscretizedMeasureSpace::atomic({1.0, 2.0, 0.5, 1.0});
    std::vector<CMatrix> ms;
    for (int k = 0; k < 4; ++k) {
        const Mat g = oracle::gaussian(rng, 3);
        ms.emplace_back(g * (0.8 / oracle::svd_norm(g)));
    }
    const OperatorSample m(space, ms);
    CHECK(classify_discrete_strong(m, opts).verdict == Verdict::Stable);
    for (const BochnerFunction& f : cases::random_probes(space, 3, 10, 5)) {
        BochnerFunction g = f;
        for (int k = 0; k < 200; ++k) g = apply(m, g);
        CHECK(lp_norm(g, 2.0) < 1e-12 * lp_norm(f, 2.0));
    }
}

TEST_CASE("discrete strong is inconclusive without a power bound") {
    Mat j = Mat::Identity(2, 2);
    j(0, 1) = 1.0;
    const OperatorSample jordan(DiscretizedMeasureSpace::atomic({1.0}), {CMatrix(j)});
    const DiscreteStrongResult r = classify_discrete_strong(jordan, {});
    CHECK(r.verdict == Verdict::Inconclusive);
    CHECK_FALSE(r.gate.empty());
}

TEST_CASE("classify_discrete_almost_weak examples") {
    DiscreteOptions opts;
    // 0.9^n stays above 1e-3 for n <= 65, so n_max must exceed 65 / 0.05.
    opts.n_max = 2000;
    const Complex u = std::exp(I * std::numbers::pi * std::sqrt(2.0));
    const DiscreteAlmostWeakResult s = classify_discrete_almost_weak(scalar_sample({0.9 * u}), opts);
    CHECK(s.verdict == Verdict::Stable);
    CHECK(s.density_corroborated);

    const DiscreteAlmostWeakResult n = classify_discrete_almost_weak(scalar_sample({u}), opts);
    CHECK(n.verdict == Verdict::NotStable);
    const CVector e1 = CVector::Unit(1, 0);
    CHECK(discrete_orbit_bad_density(CMatrix::diagonal({u}), e1, e1, 1000, 1e-3) == 1.0);

    const OperatorSample block(DiscretizedMeasureSpace::atomic({1.0}),
                               {CMatrix::diagonal({0.5, std::exp(I)})});
    const DiscreteAlmostWeakResult b = classify_discrete_almost_weak(block, opts);
    CHECK(b.verdict == Verdict::NotStable);
    REQUIRE_FALSE(b.witnesses.empty());
    CHECK(std::abs(b.witnesses[0].value - std::exp(I)) < 1e-12);
}

TEST_CASE("bad-set density of a contraction shrinks as the horizon doubles") {
    std::mt19937_64 rng(103);
    const CMatrix m = with_radius(rng, 3, 0.95);
    const CVector x = oracle::gaussian_vector(rng, 3);
    const CVector phi = oracle::gaussian_vector(rng, 3);
    double prev = 1.0;
    for (std::uint64_t n : {200, 400, 800, 1600}) {
        const double d = discrete_orbit_bad_density(m, x, phi, n, 1e-3);
        CHECK(d <= prev);
        prev = d;
    }
    CHECK(prev < 0.1);
}

TEST_CASE("discrete implication chain") {
    std::mt19937_64 rng(107);
    DiscreteOptions opts;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t cells = 1 + trial % 4;
        std::vector<CMatrix> ms;
        for (std::size_t i = 0; i < cells; ++i) {
            const double radius = (trial % 3 == 0 && i == 0) ? 1.0 : 0.3 + 0.6 * ((trial + i) % 5) / 5.0;
            ms.push_back(radius == 1.0 ? CMatrix::diagonal({std::exp(I * (0.3 * trial)), Complex(0.2)})
                                       : with_radius(rng, 2, radius));
        }
        const OperatorSample m(DiscretizedMeasureSpace::atomic(std::vector<double>(cells, 1.0)), ms);
        const DiscreteReport r = analyze_discrete(m, opts);
        if (r.uniform.verdict == Verdict::Stable) CHECK(r.strong.verdict == Verdict::Stable);
        if (r.strong.verdict == Verdict::Stable) CHECK(r.almost_weak.verdict == Verdict::Stable);
    }
}

TEST_CASE("discrete and continuous uniform verdicts agree at t = 1") {
    AnalysisOptions copts;
    DiscreteOptions dopts;
    std::vector<PointwiseFamily> families;
    for (std::uint64_t k = 0; k < 5; ++k) families.push_back(cases::random_hurwitz_family(400 + k, 3, 3, 0.2));
    families.push_back(cases::rotation_family(6));
    families.push_back(cases::zabczyk_family(6, 6));
    families.push_back(cases::diagonal_family({-1.0, I}, {1.0, 1.0}));
    for (const auto& fam : families) {
        const UniformResult c = classify_uniform(fam, copts);
        const DiscreteUniformResult d = classify_discrete_uniform(semigroup_at(fam, 1.0), dopts);
        CHECK(c.verdict == d.verdict);
        CHECK(c.rho_star == doctest::Approx(d.rho_star).epsilon(1e-9));
    }
}
