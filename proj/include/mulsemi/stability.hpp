#pragma once

#include "mulsemi/semigroup.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mulsemi {

enum class Verdict { Stable, NotStable, Inconclusive };
enum class AnalysisMode { Atomic, NonAtomicLimit };

const char* to_string(Verdict v) noexcept;
const char* to_string(AnalysisMode m) noexcept;

/// Evidence for a verdict. `cell` is -1 for family-level evidence (probes).
/// `value` is an eigenvalue, a spectral radius or a time, per `kind`.
struct Witness {
    int cell = -1;
    Complex value{};
    std::string kind;
};

/// Every tolerance and horizon a classification uses. Serialized verbatim
/// into reports.
struct AnalysisOptions {
    double p = 2.0;
    double t0 = 1.0;
    double margin = 1e-6;
    double re_tol = 1e-9;
    double match_tol = 1e-6;
    double eps = 1e-3;
    double horizon = 100.0;
    std::size_t grid_points = 401;
    bool log_spacing = false;
    /// Ess-sup trajectory norm level that confirms norm convergence.
    double norm_decay_level = 1e-3;
    /// Probe orbits must reach this fraction of their initial norm.
    double probe_decay_ratio = 1e-6;
    /// Weak-orbit density tests pass at or below this bad-set density.
    double density_pass = 0.05;
    std::size_t density_grid_points = 4001;
    /// Bounds above this are flagged as large transients.
    double transient_flag = 1e3;
    AnalysisMode mode = AnalysisMode::Atomic;
    std::vector<double> limit_deltas{0.1, 0.05, 0.025};
    std::vector<int> limit_levels{1, 2, 3, 4};
    std::uint64_t seed = 0;

    std::vector<double> grid() const { return time_grid(horizon, grid_points, log_spacing); }
};

struct UniformResult {
    Verdict verdict = Verdict::Inconclusive;
    double rho_star = 0.0;
    std::optional<double> decay_eps;
    /// Stable: M with ||e^{tA(s)}|| <= M e^{-eps t} at every grid time.
    /// Otherwise the largest ess-sup norm seen on the grid.
    double bound_M = 0.0;
    /// Norm cross-check: the ess-sup trajectory norm fell below norm_decay_level.
    bool norm_decay_confirmed = false;
    std::optional<double> norm_decay_time;
    /// The fitted (M, eps) bound holds at every grid time.
    bool exponential_bound_holds = false;
    std::vector<Witness> witnesses;
    std::string gate;
};

struct StrongResult {
    Verdict verdict = Verdict::Inconclusive;
    double bound_M = 0.0;
    bool bound_certified = false;
    bool large_transient = false;
    bool semigroup_unbounded = false;
    std::optional<double> slowest_probe_decay_time;
    std::vector<Witness> witnesses;
    std::string gate;
    std::vector<std::string> notes;
};

struct Cluster {
    Complex lambda{};
    std::vector<int> cells;
    double measure = 0.0;
};

struct LimitPoint {
    int level = 1;
    double delta = 0.0;
    double cell_width = 0.0;
    double max_measure = 0.0;
};

struct AlmostWeakResult {
    Verdict verdict = Verdict::Inconclusive;
    AnalysisMode mode = AnalysisMode::Atomic;
    std::vector<Cluster> clusters;
    /// mu of the union of all imaginary-eigenvalue clusters.
    double cluster_measure = 0.0;
    bool semigroup_unbounded = false;
    std::vector<LimitPoint> limit;
    std::optional<double> limit_slope;
    std::optional<double> limit_intercept;
    std::optional<double> max_bad_density;
    std::optional<bool> density_corroborated;
    std::vector<Witness> witnesses;
    std::string gate;
};

struct StabilityReport {
    UniformResult uniform;
    StrongResult strong;
    AlmostWeakResult almost_weak;
    AnalysisOptions tolerances;
};

/// rho* = ess sup r(e^{t0 A(s)}) against 1 - margin, with the norm-decay and
/// exponential-bound cross-checks evaluated on the options' time grid.
UniformResult classify_uniform(const PointwiseFamily& family, const AnalysisOptions& opts);

/// Pointwise strong stability s(A(s)) < 0 a.e., gated on boundedness and
/// corroborated by probe orbits.
StrongResult classify_strong(const PointwiseFamily& family, std::span<const BochnerFunction> probes,
                             const AnalysisOptions& opts);

/// Imaginary-axis eigenvalues of positive-weight cells, clustered across
/// cells by single linkage at distance match_tol.
std::vector<Cluster> imaginary_point_spectrum(const PointwiseFamily& family, double re_tol,
                                              double match_tol);

/// Largest mu{s : some imaginary eigenvalue of A(s) lies within delta of
/// lambda} over the imaginary eigenvalues lambda of the family.
double max_neighborhood_measure(const PointwiseFamily& family, double re_tol, double delta);

using FamilyGenerator = std::function<PointwiseFamily(int level)>;

/// Atomic mode uses `family` directly. NonAtomicLimit sweeps only the given
/// family's own level.
AlmostWeakResult classify_almost_weak(const PointwiseFamily& family, const AnalysisOptions& opts);

/// NonAtomicLimit across refinement levels: the family is rebuilt at each of
/// opts.limit_levels and the neighborhood measure is fitted against delta.
AlmostWeakResult classify_almost_weak(const FamilyGenerator& generator, const AnalysisOptions& opts);

struct DensityTest {
    double bad_density = 1.0;
    bool pass = false;
};

/// Samples w(t) = |<e^{tA} x, phi>| on a uniform grid over [0, horizon] and
/// measures the density of {t : w(t) >= eps ||x|| ||phi||}. Finite-horizon
/// evidence only.
DensityTest weak_orbit_density_test(const CMatrix& a, const CVector& x, const CVector& phi,
                                    double horizon, double eps, std::size_t grid_points = 4001,
                                    double pass_level = 0.05);

struct CesaroResidual {
    double t = 0.0;
    double residual = 0.0;
};

/// ||S(t)x - Px|| for each t, with P the mean ergodic projection.
std::vector<CesaroResidual> cesaro_verify(const CMatrix& a, const CVector& x,
                                          std::span<const double> t_list, double re_tol = 1e-9);

/// Boundedness of every positive-weight cell: contraction on the grid, or a
/// spectrum in the closed left half-plane whose imaginary eigenvalues are
/// semisimple.
bool boundedness_certified(const PointwiseFamily& family, std::span<const double> grid, double re_tol);

/// Runs all three continuous-time classifiers.
StabilityReport analyze(const PointwiseFamily& family, std::span<const BochnerFunction> probes,
                        const AnalysisOptions& opts,
                        const FamilyGenerator& generator = nullptr);

}  // namespace mulsemi
