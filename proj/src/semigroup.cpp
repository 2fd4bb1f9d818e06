#include "mulsemi/semigroup.hpp"

#include "mulsemi/error.hpp"
#include "mulsemi/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mulsemi {

namespace {

constexpr const char* kModule = "semigroup";

void check_p(double p, const char* op) {
    if (!(p >= 1.0)) throw DomainError(kModule, op, "p must be >= 1 or infinity");
}

void check_same_space(const DiscretizedMeasureSpace& a, const DiscretizedMeasureSpace& b,
                      const char* op) {
    if (!(a == b)) throw ShapeError(kModule, op, "operands live on different measure spaces");
}

CMatrix embed(const CMatrix& block, Eigen::Index dim) {
    if (block.dim() == dim) return block;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m.topLeftCorner(block.dim(), block.dim()) = block.eigen();
    return CMatrix(std::move(m));
}

}  // namespace

PointwiseFamily::PointwiseFamily(DiscretizedMeasureSpace space, std::vector<CMatrix> generators,
                                 std::vector<Eigen::Index> active_dims)
    : space_(std::move(space)), generators_(std::move(generators)), active_(std::move(active_dims)) {
    if (generators_.size() != space_.size())
        throw ShapeError(kModule, "PointwiseFamily", "need one generator per cell");
    dim_ = generators_.front().dim();
    for (const CMatrix& g : generators_)
        if (g.dim() != dim_) throw ShapeError(kModule, "PointwiseFamily", "generators differ in dimension");
    if (active_.empty()) active_.assign(generators_.size(), dim_);
    if (active_.size() != generators_.size())
        throw ShapeError(kModule, "PointwiseFamily", "need one active dimension per cell");
    for (std::size_t i = 0; i < active_.size(); ++i) {
        if (active_[i] < 1 || active_[i] > dim_)
            throw ShapeError(kModule, "PointwiseFamily", "active dimension out of range");
        const Eigen::Index a = active_[i];
        const auto& g = generators_[i].eigen();
        const bool padded_zero = (a == dim_) || (g.rightCols(dim_ - a).cwiseAbs().maxCoeff() == 0.0 &&
                                                 g.bottomRows(dim_ - a).cwiseAbs().maxCoeff() == 0.0);
        if (!padded_zero)
            throw ShapeError(kModule, "PointwiseFamily", "generator is nonzero outside its active block");
    }
}

CMatrix PointwiseFamily::active_generator(std::size_t cell) const {
    const Eigen::Index a = active_dim(cell);
    if (a == dim_) return generators_[cell];
    return CMatrix(generators_[cell].eigen().topLeftCorner(a, a));
}

PointwiseFamily PointwiseFamily::with_generator(std::size_t cell, CMatrix generator) const {
    std::vector<CMatrix> g = generators_;
    std::vector<Eigen::Index> act = active_;
    g.at(cell) = std::move(generator);
    act.at(cell) = g[cell].dim();
    return PointwiseFamily(space_, std::move(g), std::move(act));
}

OperatorSample::OperatorSample(DiscretizedMeasureSpace space, std::vector<CMatrix> matrices,
                               std::optional<double> time)
    : space_(std::move(space)), matrices_(std::move(matrices)), time_(time) {
    if (matrices_.size() != space_.size())
        throw ShapeError(kModule, "OperatorSample", "need one matrix per cell");
    dim_ = matrices_.front().dim();
    for (const CMatrix& m : matrices_)
        if (m.dim() != dim_) throw ShapeError(kModule, "OperatorSample", "matrices differ in dimension");
    if (time_ && !(*time_ >= 0.0)) throw DomainError(kModule, "OperatorSample", "time must be >= 0");
}

OperatorSample OperatorSample::identity(DiscretizedMeasureSpace space, Eigen::Index dim) {
    std::vector<CMatrix> m(space.size(), CMatrix::identity(dim));
    return OperatorSample(std::move(space), std::move(m));
}

BochnerFunction::BochnerFunction(DiscretizedMeasureSpace space, std::vector<CVector> vectors)
    : space_(std::move(space)), vectors_(std::move(vectors)) {
    if (vectors_.size() != space_.size())
        throw ShapeError(kModule, "BochnerFunction", "need one vector per cell");
    dim_ = vectors_.front().size();
    if (dim_ == 0) throw ShapeError(kModule, "BochnerFunction", "empty vectors");
    for (const CVector& v : vectors_) {
        if (v.size() != dim_) throw ShapeError(kModule, "BochnerFunction", "vectors differ in dimension");
        if (!v.allFinite()) throw DomainError(kModule, "BochnerFunction", "non-finite entry");
    }
}

BochnerFunction BochnerFunction::zero(DiscretizedMeasureSpace space, Eigen::Index dim) {
    std::vector<CVector> v(space.size(), CVector::Zero(dim));
    return BochnerFunction(std::move(space), std::move(v));
}

BochnerFunction BochnerFunction::indicator(DiscretizedMeasureSpace space, std::size_t cell,
                                           const CVector& x) {
    std::vector<CVector> v(space.size(), CVector::Zero(x.size()));
    v.at(cell) = x;
    return BochnerFunction(std::move(space), std::move(v));
}

BochnerFunction BochnerFunction::constant(DiscretizedMeasureSpace space, const CVector& x) {
    std::vector<CVector> v(space.size(), x);
    return BochnerFunction(std::move(space), std::move(v));
}

BochnerFunction apply(const OperatorSample& m, const BochnerFunction& f) {
    check_same_space(m.space(), f.space(), "apply");
    if (m.dim() != f.dim()) throw ShapeError(kModule, "apply", "dimension mismatch");
    std::vector<CVector> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = m.matrix(i) * f.vector(i);
    return BochnerFunction(f.space(), std::move(out));
}

double lp_norm(const BochnerFunction& f, double p) {
    check_p(p, "lp_norm");
    std::vector<double> norms(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) norms[i] = f.vector(i).stableNorm();
    if (std::isinf(p)) return ess_sup(f.space(), norms);
    // Scale by the largest norm so that large p does not overflow.
    const double scale = ess_sup(f.space(), norms);
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = f.space().weight(i);
        if (w > 0.0) sum += std::pow(norms[i] / scale, p) * w;
    }
    return scale * std::pow(sum, 1.0 / p);
}

double operator_norm(const OperatorSample& m, double p) {
    check_p(p, "operator_norm");
    const auto norms = parallel_map<double>(m.size(), [&](std::size_t i) {
        return m.space().is_null(i) ? 0.0 : norm2(m.matrix(i));
    });
    return ess_sup(m.space(), norms);
}

OperatorSample semigroup_at(const PointwiseFamily& family, double t) {
    auto mats = parallel_map<CMatrix>(family.size(), [&](std::size_t i) {
        return embed(expm(family.active_generator(i), t), family.dim());
    });
    return OperatorSample(family.space(), std::move(mats), t);
}

std::vector<OperatorSample> trajectory(const PointwiseFamily& family, std::span<const double> times) {
    if (times.empty()) throw ShapeError(kModule, "trajectory", "no times given");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw DomainError(kModule, "trajectory", "times must be >= 0");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw DomainError(kModule, "trajectory", "times must be increasing");
    }
    std::vector<OperatorSample> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(semigroup_at(family, t));
    return out;
}

std::vector<std::vector<double>> trajectory_cell_norms(const PointwiseFamily& family,
                                                       std::span<const double> times) {
    const std::size_t cells = family.size();
    // Per cell, per time: independent work, filled into fixed slots.
    const auto by_cell = parallel_map<std::vector<double>>(cells, [&](std::size_t i) {
        std::vector<double> norms(times.size(), 0.0);
        if (family.space().is_null(i)) return norms;
        const CMatrix a = family.active_generator(i);
        for (std::size_t k = 0; k < times.size(); ++k) norms[k] = norm2(expm(a, times[k]));
        return norms;
    });
    std::vector<std::vector<double>> out(times.size(), std::vector<double>(cells, 0.0));
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t k = 0; k < times.size(); ++k) out[k][i] = by_cell[i][k];
    return out;
}

UniformBound uniform_bound_estimate(const PointwiseFamily& family, std::span<const double> t_grid,
                                    double horizon) {
    if (t_grid.empty()) throw ShapeError(kModule, "uniform_bound_estimate", "empty time grid");
    for (double t : t_grid)
        if (!(t >= 0.0) || t > horizon)
            throw DomainError(kModule, "uniform_bound_estimate", "grid must lie in [0, horizon]");
    const auto norms = trajectory_cell_norms(family, t_grid);
    UniformBound out;
    for (const auto& row : norms) out.bound = std::max(out.bound, ess_sup(family.space(), row));
    out.certified = true;
    double latest = 0.0;
    for (std::size_t i = 0; i < family.size() && out.certified; ++i) {
        if (family.space().is_null(i)) continue;
        bool contracts = false;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            if (t_grid[k] > 0.0 && norms[k][i] < kContraction) {
                contracts = true;
                latest = std::max(latest, t_grid[k]);
                break;
            }
        }
        out.certified = contracts;
    }
    if (out.certified) out.contraction_time = latest;
    return out;
}

std::vector<double> time_grid(double horizon, std::size_t points, bool log_spacing) {
    if (!(horizon > 0.0)) throw DomainError(kModule, "time_grid", "horizon must be > 0");
    if (points < 2) throw ShapeError(kModule, "time_grid", "need at least two points");
    std::vector<double> t(points);
    t[0] = 0.0;
    if (!log_spacing) {
        for (std::size_t k = 1; k < points; ++k)
            t[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);
    } else {
        const double lo = std::log(horizon * 1e-4);
        const double hi = std::log(horizon);
        const std::size_t m = points - 1;
        for (std::size_t k = 0; k < m; ++k)
            t[k + 1] = m == 1 ? horizon
                              : std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1));
        t.back() = horizon;
    }
    return t;
}

}  // namespace mulsemi
