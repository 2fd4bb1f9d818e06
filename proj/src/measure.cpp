#include "mulsemi/measure.hpp"

#include "mulsemi/error.hpp"

#include <algorithm>
#include <cmath>

namespace mulsemi {

namespace {
constexpr const char* kModule = "measure";
}

DiscretizedMeasureSpace::DiscretizedMeasureSpace(std::vector<Cell> cells, SpaceMode mode, int level,
                                                 double width)
    : cells_(std::move(cells)), mode_(mode), level_(level), width_(width) {
    validate();
}

void DiscretizedMeasureSpace::validate() const {
    if (cells_.empty()) throw ShapeError(kModule, "DiscretizedMeasureSpace", "no cells");
    bool any_positive = false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Cell& c = cells_[i];
        if (c.id != static_cast<int>(i))
            throw ShapeError(kModule, "DiscretizedMeasureSpace", "cell ids must be contiguous from 0");
        if (!std::isfinite(c.weight) || c.weight < 0.0)
            throw DomainError(kModule, "DiscretizedMeasureSpace", "weights must be finite and >= 0");
        if (!std::isfinite(c.label))
            throw DomainError(kModule, "DiscretizedMeasureSpace", "labels must be finite");
        any_positive = any_positive || c.weight > 0.0;
    }
    if (!any_positive)
        throw DegenerateSpaceError(kModule, "DiscretizedMeasureSpace", "all weights are zero");
    if (level_ < 1) throw DomainError(kModule, "DiscretizedMeasureSpace", "refinement level must be >= 1");
}

DiscretizedMeasureSpace DiscretizedMeasureSpace::atomic(std::vector<double> weights,
                                                        std::vector<double> labels) {
    if (!labels.empty() && labels.size() != weights.size())
        throw ShapeError(kModule, "atomic", "labels and weights differ in length");
    std::vector<Cell> cells(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        cells[i] = Cell{static_cast<int>(i), weights[i],
                        labels.empty() ? static_cast<double>(i) : labels[i]};
    return DiscretizedMeasureSpace(std::move(cells), SpaceMode::Atomic, 1, 0.0);
}

DiscretizedMeasureSpace DiscretizedMeasureSpace::uniform_grid(double lo, double hi,
                                                              std::size_t cells) {
    if (cells == 0) throw ShapeError(kModule, "uniform_grid", "need at least one cell");
    if (!(hi > lo)) throw DomainError(kModule, "uniform_grid", "empty interval");
    const double width = (hi - lo) / static_cast<double>(cells);
    std::vector<Cell> out(cells);
    for (std::size_t i = 0; i < cells; ++i)
        out[i] = Cell{static_cast<int>(i), width, lo + (static_cast<double>(i) + 0.5) * width};
    return DiscretizedMeasureSpace(std::move(out), SpaceMode::RefinementFamily, 1, width);
}

double DiscretizedMeasureSpace::total_weight() const noexcept {
    double total = 0.0;
    for (const Cell& c : cells_) total += c.weight;
    return total;
}

std::vector<int> DiscretizedMeasureSpace::positive_cells() const {
    std::vector<int> ids;
    for (const Cell& c : cells_)
        if (c.weight > 0.0) ids.push_back(c.id);
    return ids;
}

DiscretizedMeasureSpace DiscretizedMeasureSpace::refined() const {
    if (mode_ != SpaceMode::RefinementFamily)
        throw DomainError(kModule, "refined", "only RefinementFamily spaces can be refined");
    std::vector<Cell> out;
    out.reserve(2 * cells_.size());
    const double quarter = width_ / 4.0;
    for (const Cell& c : cells_) {
        const double w = c.weight / 2.0;
        out.push_back(Cell{static_cast<int>(out.size()), w, c.label - quarter});
        out.push_back(Cell{static_cast<int>(out.size()), w, c.label + quarter});
    }
    return DiscretizedMeasureSpace(std::move(out), mode_, level_ + 1, width_ / 2.0);
}

DiscretizedMeasureSpace DiscretizedMeasureSpace::rescaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw DomainError(kModule, "rescaled", "factor must be positive");
    std::vector<Cell> out = cells_;
    for (Cell& c : out) c.weight *= factor;
    return DiscretizedMeasureSpace(std::move(out), mode_, level_, width_);
}

bool operator==(const DiscretizedMeasureSpace& a, const DiscretizedMeasureSpace& b) {
    if (a.mode_ != b.mode_ || a.level_ != b.level_ || a.width_ != b.width_ ||
        a.cells_.size() != b.cells_.size())
        return false;
    for (std::size_t i = 0; i < a.cells_.size(); ++i)
        if (a.cells_[i].weight != b.cells_[i].weight || a.cells_[i].label != b.cells_[i].label)
            return false;
    return true;
}

double ess_sup(const DiscretizedMeasureSpace& space, std::span<const double> values) {
    if (values.size() != space.size())
        throw ShapeError(kModule, "ess_sup", "expected one value per cell");
    double best = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (space.weight(i) <= 0.0) continue;
        best = seen ? std::max(best, values[i]) : values[i];
        seen = true;
    }
    if (!seen) throw DegenerateSpaceError(kModule, "ess_sup", "all weights are zero");
    return best;
}

double density_continuous(std::span<const std::uint8_t> indicator, double horizon) {
    if (indicator.size() < 2)
        throw ShapeError(kModule, "density_continuous", "need at least two grid points");
    if (!(horizon > 0.0)) throw DomainError(kModule, "density_continuous", "horizon must be > 0");
    const double h = horizon / static_cast<double>(indicator.size() - 1);
    double measure = 0.0;
    for (std::size_t k = 0; k + 1 < indicator.size(); ++k)
        measure += 0.5 * h * (static_cast<double>(indicator[k] != 0) + static_cast<double>(indicator[k + 1] != 0));
    return std::clamp(measure / horizon, 0.0, 1.0);
}

double density_discrete(std::span<const std::uint64_t> members, std::uint64_t horizon) {
    if (horizon == 0) throw DomainError(kModule, "density_discrete", "horizon must be >= 1");
    const auto below = std::lower_bound(members.begin(), members.end(), horizon);
    return static_cast<double>(below - members.begin()) / static_cast<double>(horizon);
}

}  // namespace mulsemi
