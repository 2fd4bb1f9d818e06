#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mulsemi {

enum class SpaceMode { Atomic, RefinementFamily };

struct Cell {
    int id = 0;
    double weight = 0.0;
    double label = 0.0;  ///< parameter value s_i the cell represents
};

/// Finite weighted decomposition of a measure space. Null sets are cells of
/// weight zero; "almost everywhere" means "on every cell of positive weight".
class DiscretizedMeasureSpace {
public:
    /// Atomic space with one cell per weight; labels default to 0, 1, 2, ...
    static DiscretizedMeasureSpace atomic(std::vector<double> weights,
                                          std::vector<double> labels = {});

    /// Uniform partition of [lo, hi] into `cells` intervals labeled by their
    /// midpoints, each carrying weight (hi - lo) / cells.
    static DiscretizedMeasureSpace uniform_grid(double lo, double hi, std::size_t cells);

    std::size_t size() const noexcept { return cells_.size(); }
    const std::vector<Cell>& cells() const noexcept { return cells_; }
    const Cell& cell(std::size_t i) const { return cells_.at(i); }
    double weight(std::size_t i) const { return cells_.at(i).weight; }
    double label(std::size_t i) const { return cells_.at(i).label; }
    SpaceMode mode() const noexcept { return mode_; }
    int refinement_level() const noexcept { return level_; }

    /// Label-space width of one cell (RefinementFamily only; 0 for atomic spaces).
    double cell_width() const noexcept { return width_; }

    double total_weight() const noexcept;
    bool is_null(std::size_t i) const { return cells_.at(i).weight <= 0.0; }

    /// Ids of the cells with positive weight, ascending.
    std::vector<int> positive_cells() const;

    /// Splits every cell in two; positive weights are halved, so the total is
    /// preserved. Only valid in RefinementFamily mode.
    DiscretizedMeasureSpace refined() const;

    /// Same cells with all weights multiplied by `factor` > 0.
    DiscretizedMeasureSpace rescaled(double factor) const;

    friend bool operator==(const DiscretizedMeasureSpace&, const DiscretizedMeasureSpace&);

private:
    DiscretizedMeasureSpace(std::vector<Cell> cells, SpaceMode mode, int level, double width);
    void validate() const;

    std::vector<Cell> cells_;
    SpaceMode mode_ = SpaceMode::Atomic;
    int level_ = 1;
    double width_ = 0.0;
};

/// Essential supremum of per-cell nonnegative values: the maximum over cells
/// of positive weight.
double ess_sup(const DiscretizedMeasureSpace& space, std::span<const double> values);

/// Finite-horizon estimate of the density of {t : indicator(t) = 1}. The
/// indicator is sampled on a uniform grid of samples.size() points spanning
/// [0, horizon]; the measure is integrated with the trapezoidal rule.
double density_continuous(std::span<const std::uint8_t> indicator, double horizon);

/// |{k : n_k < horizon}| / horizon for a sorted list of naturals.
double density_discrete(std::span<const std::uint64_t> members, std::uint64_t horizon);

}  // namespace mulsemi
