#pragma once

#include "mulsemi/linalg.hpp"
#include "mulsemi/measure.hpp"

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mulsemi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A cell contracts at t when ||e^{tA}|| is below this; the slack keeps
/// rounded unitary norms from counting.
inline constexpr double kContraction = 1.0 - 1e-10;

/// The map s -> A(s): one generator per cell acting on X = C^dim.
///
/// A cell may declare an active dimension smaller than `dim`; its generator is
/// then the leading active x active block, embedded with zero padding. All
/// spectral and norm queries use the active block only, and the padded
/// coordinates are annihilated by the cell's semigroup.
class PointwiseFamily {
public:
    PointwiseFamily(DiscretizedMeasureSpace space, std::vector<CMatrix> generators,
                    std::vector<Eigen::Index> active_dims = {});

    const DiscretizedMeasureSpace& space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return generators_.size(); }
    const CMatrix& generator(std::size_t cell) const { return generators_.at(cell); }
    Eigen::Index active_dim(std::size_t cell) const { return active_.at(cell); }

    /// Leading active block of the generator at `cell`.
    CMatrix active_generator(std::size_t cell) const;

    /// Copy with a generator replaced (same space and dimension).
    PointwiseFamily with_generator(std::size_t cell, CMatrix generator) const;

private:
    DiscretizedMeasureSpace space_;
    Eigen::Index dim_ = 0;
    std::vector<CMatrix> generators_;
    std::vector<Eigen::Index> active_;
};

/// The map s -> M(s), one matrix per cell; `time` is set when the matrices
/// are e^{tA(s)}.
class OperatorSample {
public:
    OperatorSample(DiscretizedMeasureSpace space, std::vector<CMatrix> matrices,
                   std::optional<double> time = std::nullopt);

    static OperatorSample identity(DiscretizedMeasureSpace space, Eigen::Index dim);

    const DiscretizedMeasureSpace& space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return matrices_.size(); }
    const CMatrix& matrix(std::size_t cell) const { return matrices_.at(cell); }
    const std::vector<CMatrix>& matrices() const noexcept { return matrices_; }
    std::optional<double> time() const noexcept { return time_; }

private:
    DiscretizedMeasureSpace space_;
    Eigen::Index dim_ = 0;
    std::vector<CMatrix> matrices_;
    std::optional<double> time_;
};

/// f in L^p(Omega, C^dim): one vector per cell.
class BochnerFunction {
public:
    BochnerFunction(DiscretizedMeasureSpace space, std::vector<CVector> vectors);

    static BochnerFunction zero(DiscretizedMeasureSpace space, Eigen::Index dim);
    /// x * 1_{cell}
    static BochnerFunction indicator(DiscretizedMeasureSpace space, std::size_t cell, const CVector& x);
    /// x on every cell.
    static BochnerFunction constant(DiscretizedMeasureSpace space, const CVector& x);

    const DiscretizedMeasureSpace& space() const noexcept { return space_; }
    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    const CVector& vector(std::size_t cell) const { return vectors_.at(cell); }
    const std::vector<CVector>& vectors() const noexcept { return vectors_; }

private:
    DiscretizedMeasureSpace space_;
    Eigen::Index dim_ = 0;
    std::vector<CVector> vectors_;
};

/// (M f)(s) = M(s) f(s)
BochnerFunction apply(const OperatorSample& m, const BochnerFunction& f);

/// Bochner norm; p = kInfinity gives the essential supremum of ||f(s)||_2.
double lp_norm(const BochnerFunction& f, double p);

/// ||M|| = ess sup ||M(s)||_2. The value does not depend on p, which is only
/// validated.
double operator_norm(const OperatorSample& m, double p = 2.0);

/// Cellwise e^{t A(s)} for every t in `times`.
std::vector<OperatorSample> trajectory(const PointwiseFamily& family, std::span<const double> times);

/// e^{t A(s)} at a single time.
OperatorSample semigroup_at(const PointwiseFamily& family, double t);

/// Per-cell ||e^{t A(s)}||_2 for each time: result[k][cell].
std::vector<std::vector<double>> trajectory_cell_norms(const PointwiseFamily& family,
                                                       std::span<const double> times);

struct UniformBound {
    double bound = 0.0;
    /// Every positive-weight cell contracts (||e^{Delta A}|| < 1) at some grid
    /// time, so the supremum over t >= 0 is attained before that time.
    bool certified = false;
    /// When certified, the largest per-cell first contraction time.
    std::optional<double> contraction_time;
};

/// max over the grid of the operator norm of the trajectory sample.
UniformBound uniform_bound_estimate(const PointwiseFamily& family, std::span<const double> t_grid,
                                    double horizon);

/// n points spread over [0, horizon]: uniform, or 0 followed by a geometric
/// sequence from horizon * 1e-4 to horizon.
std::vector<double> time_grid(double horizon, std::size_t points, bool log_spacing);

}  // namespace mulsemi
