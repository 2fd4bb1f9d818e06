#include "mulsemi/cases.hpp"

#include "mulsemi/error.hpp"

#include <cmath>
#include <random>

namespace mulsemi::cases {

namespace {
constexpr const char* kModule = "cases";

Eigen::MatrixXcd gaussian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0 * n));
    Eigen::MatrixXcd m(n, n);
    // Column-major fill keeps the draw order fixed.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}
}  // namespace

PointwiseFamily zabczyk_family(int n_cells, int embed_dim) {
    if (n_cells < 1) throw ShapeError(kModule, "zabczyk_family", "N must be >= 1");
    if (embed_dim < n_cells) throw ShapeError(kModule, "zabczyk_family", "embed_dim must be >= N");
    std::vector<double> weights(static_cast<std::size_t>(n_cells), 1.0);
    std::vector<double> labels(static_cast<std::size_t>(n_cells));
    std::vector<CMatrix> gens;
    std::vector<Eigen::Index> active;
    for (int n = 1; n <= n_cells; ++n) {
        labels[static_cast<std::size_t>(n - 1)] = n;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(embed_dim, embed_dim);
        const Complex diag(-1.0 / n, static_cast<double>(n));
        for (int k = 0; k < n; ++k) a(k, k) = diag;
        for (int k = 0; k + 1 < n; ++k) a(k, k + 1) = 1.0;
        gens.emplace_back(std::move(a));
        active.push_back(n);
    }
    return PointwiseFamily(DiscretizedMeasureSpace::atomic(std::move(weights), std::move(labels)),
                           std::move(gens), std::move(active));
}

PointwiseFamily rotation_family(std::size_t cells) {
    if (cells < 1) throw ShapeError(kModule, "rotation_family", "need at least one cell");
    DiscretizedMeasureSpace space = DiscretizedMeasureSpace::uniform_grid(0.0, 1.0, cells);
    std::vector<CMatrix> gens;
    gens.reserve(cells);
    for (const Cell& c : space.cells()) gens.push_back(CMatrix::diagonal({Complex(0.0, c.label)}));
    return PointwiseFamily(std::move(space), std::move(gens));
}

FamilyGenerator rotation_generator(std::size_t base_cells) {
    return [base_cells](int level) {
        if (level < 1) throw DomainError(kModule, "rotation_generator", "level must be >= 1");
        // Refinement of the level-1 grid; identical to rotation_family at the doubled count.
        DiscretizedMeasureSpace space = DiscretizedMeasureSpace::uniform_grid(0.0, 1.0, base_cells);
        for (int l = 1; l < level; ++l) space = space.refined();
        std::vector<CMatrix> gens;
        gens.reserve(space.size());
        for (const Cell& c : space.cells()) gens.push_back(CMatrix::diagonal({Complex(0.0, c.label)}));
        return PointwiseFamily(std::move(space), std::move(gens));
    };
}

PointwiseFamily random_hurwitz_family(std::uint64_t seed, int n, std::size_t cells, double margin) {
    if (!(margin > 0.0)) throw DomainError(kModule, "random_hurwitz_family", "margin must be > 0");
    if (n < 1 || cells < 1) throw ShapeError(kModule, "random_hurwitz_family", "n and cells must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<CMatrix> gens;
    for (std::size_t i = 0; i < cells; ++i) {
        const CMatrix b(gaussian(rng, n));
        const double shift = spectral_bound(b) + margin;
        gens.emplace_back(b.eigen() - shift * Eigen::MatrixXcd::Identity(n, n));
    }
    return PointwiseFamily(DiscretizedMeasureSpace::atomic(std::vector<double>(cells, 1.0)),
                           std::move(gens));
}

PointwiseFamily diagonal_family(const std::vector<Complex>& rates, const std::vector<double>& weights) {
    if (rates.size() != weights.size())
        throw ShapeError(kModule, "diagonal_family", "rates and weights differ in length");
    if (rates.empty()) throw ShapeError(kModule, "diagonal_family", "no rates");
    std::vector<CMatrix> gens;
    for (const Complex& r : rates) gens.push_back(CMatrix::diagonal({r}));
    return PointwiseFamily(DiscretizedMeasureSpace::atomic(weights), std::move(gens));
}

std::vector<BochnerFunction> random_probes(const DiscretizedMeasureSpace& space, Eigen::Index dim,
                                           std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<BochnerFunction> out;
    for (std::size_t j = 0; j < count; ++j) {
        std::vector<CVector> v(space.size(), CVector(dim));
        for (auto& vec : v)
            for (Eigen::Index k = 0; k < dim; ++k) {
                const double re = normal(rng);
                const double im = normal(rng);
                vec(k) = Complex(re, im);
            }
        out.emplace_back(space, std::move(v));
    }
    return out;
}

CMatrix random_matrix(std::uint64_t seed, int n) {
    if (n < 1) throw ShapeError(kModule, "random_matrix", "n must be >= 1");
    std::mt19937_64 rng(seed);
    return CMatrix(gaussian(rng, n));
}

}  // namespace mulsemi::cases
