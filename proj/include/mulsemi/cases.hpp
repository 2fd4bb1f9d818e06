#pragma once

#include "mulsemi/semigroup.hpp"
#include "mulsemi/stability.hpp"

#include <cstdint>
#include <vector>

namespace mulsemi::cases {

/// N atomic cells of weight 1 labeled n = 1..N. Cell n carries the n x n
/// Jordan-type block with (i n - 1/n) on the diagonal and ones on the
/// superdiagonal, zero-padded to embed_dim with active dimension n.
PointwiseFamily zabczyk_family(int n_cells, int embed_dim);

/// Uniform grid of `cells` intervals on [0, 1]; cell with midpoint s carries
/// the 1 x 1 generator i s.
PointwiseFamily rotation_family(std::size_t cells);

/// rotation_family(base_cells * 2^(level - 1)), for refinement sweeps.
FamilyGenerator rotation_generator(std::size_t base_cells);

/// Reproducible complex Gaussian n x n generators, each shifted so that its
/// spectral bound equals -margin.
PointwiseFamily random_hurwitz_family(std::uint64_t seed, int n, std::size_t cells, double margin);

/// One 1 x 1 cell per rate.
PointwiseFamily diagonal_family(const std::vector<Complex>& rates, const std::vector<double>& weights);

/// Reproducible random Bochner functions (complex Gaussian entries).
std::vector<BochnerFunction> random_probes(const DiscretizedMeasureSpace& space, Eigen::Index dim,
                                           std::size_t count, std::uint64_t seed);

/// Reproducible n x n complex Gaussian matrix with entries of variance 1/n.
CMatrix random_matrix(std::uint64_t seed, int n);

}  // namespace mulsemi::cases
