#include "mulsemi/stability.hpp"

#include "mulsemi/error.hpp"
#include "mulsemi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mulsemi {

namespace {

constexpr const char* kModule = "stability";

struct CellSpectrum {
    SpectralSummary summary;
    bool defective_imaginary = false;
    Complex rightmost{};
};

std::vector<CellSpectrum> cell_spectra(const PointwiseFamily& family, double re_tol) {
    return parallel_map<CellSpectrum>(family.size(), [&](std::size_t i) {
        CellSpectrum cs;
        if (family.space().is_null(i)) return cs;
        const CMatrix a = family.active_generator(i);
        cs.summary = spectral_summary(a, re_tol);
        cs.rightmost = *std::max_element(
            cs.summary.eigenvalues.begin(), cs.summary.eigenvalues.end(),
            [](const Complex& l, const Complex& r) { return l.real() < r.real(); });
        for (const Complex& l : cs.summary.imaginary_eigs)
            if (!is_semisimple(a, l, re_tol)) cs.defective_imaginary = true;
        return cs;
    });
}

std::vector<double> ess_sup_rows(const DiscretizedMeasureSpace& space,
                                 const std::vector<std::vector<double>>& norms) {
    std::vector<double> out(norms.size());
    for (std::size_t k = 0; k < norms.size(); ++k) out[k] = ess_sup(space, norms[k]);
    return out;
}

bool certified_from(const PointwiseFamily& family, std::span<const double> grid,
                    const std::vector<std::vector<double>>& norms,
                    const std::vector<CellSpectrum>& spectra, double re_tol) {
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (family.space().is_null(i)) continue;
        bool contracts = false;
        for (std::size_t k = 0; k < grid.size() && !contracts; ++k)
            contracts = grid[k] > 0.0 && norms[k][i] < kContraction;
        if (contracts) continue;
        const CellSpectrum& cs = spectra[i];
        const bool marginal = cs.summary.spectral_bound <= re_tol && !cs.summary.imaginary_eigs.empty() &&
                              !cs.defective_imaginary;
        if (!marginal) return false;
    }
    return true;
}

CVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(normal(rng), normal(rng));
    return v / v.norm();
}

struct Candidate {
    Complex lambda;
    int cell;
    double weight;
    double label;
};

std::vector<Candidate> imaginary_candidates(const PointwiseFamily& family, double re_tol) {
    const auto spectra = parallel_map<std::vector<Complex>>(family.size(), [&](std::size_t i) {
        if (family.space().is_null(i)) return std::vector<Complex>{};
        return spectral_summary(family.active_generator(i), re_tol).imaginary_eigs;
    });
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < spectra.size(); ++i)
        for (const Complex& l : spectra[i])
            out.push_back(Candidate{l, static_cast<int>(i), family.space().weight(i), family.space().label(i)});
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        if (a.weight != b.weight) return a.weight < b.weight;
        return a.label < b.label;
    });
    return out;
}

double measure_of_cells(const DiscretizedMeasureSpace& space, std::vector<int>& cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    double m = 0.0;
    for (int c : cells) m += space.weight(static_cast<std::size_t>(c));
    return m;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    return f;
}

void validate(const AnalysisOptions& o) {
    if (!(o.t0 > 0.0)) throw DomainError(kModule, "options", "t0 must be > 0");
    if (!(o.margin > 0.0)) throw DomainError(kModule, "options", "margin must be > 0");
    if (!(o.re_tol > 0.0) || !(o.match_tol > 0.0) || !(o.eps > 0.0))
        throw DomainError(kModule, "options", "tolerances must be > 0");
    if (!(o.p >= 1.0)) throw DomainError(kModule, "options", "p must be >= 1");
}

// Flags unbounded cells and records witnesses; returns true if any.
bool unbounded_witnesses(const PointwiseFamily& family, const std::vector<CellSpectrum>& spectra,
                         double re_tol, std::vector<Witness>& witnesses) {
    bool any = false;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (family.space().is_null(i)) continue;
        const CellSpectrum& cs = spectra[i];
        if (cs.summary.spectral_bound > re_tol) {
            witnesses.push_back({static_cast<int>(i), cs.rightmost, "eigenvalue_positive_real_part"});
            any = true;
        } else if (cs.defective_imaginary) {
            for (const Complex& l : cs.summary.imaginary_eigs) {
                if (!is_semisimple(family.active_generator(i), l, re_tol)) {
                    witnesses.push_back({static_cast<int>(i), l, "defective_imaginary_eigenvalue"});
                    break;
                }
            }
            any = true;
        }
    }
    return any;
}

AlmostWeakResult almost_weak_limit(const FamilyGenerator& generator, const AnalysisOptions& opts,
                                   std::vector<int> levels) {
    validate(opts);
    if (opts.limit_deltas.size() < 2)
        throw DomainError(kModule, "classify_almost_weak", "need at least two deltas");
    if (levels.empty()) throw DomainError(kModule, "classify_almost_weak", "need at least one level");
    AlmostWeakResult out;
    out.mode = AnalysisMode::NonAtomicLimit;
    std::sort(levels.begin(), levels.end());

    std::optional<PointwiseFamily> finest;
    std::vector<double> finest_measures;
    for (int level : levels) {
        PointwiseFamily fam = generator(level);
        std::vector<double> ms;
        for (double delta : opts.limit_deltas) {
            const double m = max_neighborhood_measure(fam, opts.re_tol, delta);
            out.limit.push_back({level, delta, fam.space().cell_width(), m});
            ms.push_back(m);
        }
        finest_measures = std::move(ms);
        finest.emplace(std::move(fam));
    }
    const PointwiseFamily& fam = *finest;
    const LineFit fit = least_squares(opts.limit_deltas, finest_measures);
    out.limit_slope = fit.slope;
    out.limit_intercept = fit.intercept;

    out.clusters = imaginary_point_spectrum(fam, opts.re_tol, opts.match_tol);
    std::vector<int> all;
    for (const Cluster& c : out.clusters) all.insert(all.end(), c.cells.begin(), c.cells.end());
    out.cluster_measure = measure_of_cells(fam.space(), all);

    const auto spectra = cell_spectra(fam, opts.re_tol);
    if (unbounded_witnesses(fam, spectra, opts.re_tol, out.witnesses)) {
        out.semigroup_unbounded = true;
        out.verdict = Verdict::NotStable;
        out.gate = "semigroup unbounded";
        return out;
    }

    double resolution = fam.space().cell_width();
    if (resolution <= 0.0)
        for (const Cell& c : fam.space().cells()) resolution = std::max(resolution, c.weight);
    const double intercept_tol = 2.0 * resolution;
    if (fit.intercept > intercept_tol) {
        // Positive-measure eigenvalue support survives the limit.
        double best = -1.0;
        for (const Cluster& c : out.clusters)
            if (c.measure > best) {
                best = c.measure;
                out.witnesses.clear();
                out.witnesses.push_back({c.cells.front(), c.lambda, "imaginary_eigenvalue_positive_measure"});
            }
        out.verdict = Verdict::NotStable;
        return out;
    }

    const auto grid = opts.grid();
    const auto norms = trajectory_cell_norms(fam, grid);
    if (!certified_from(fam, grid, norms, spectra, opts.re_tol)) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "boundedness not certified";
        return out;
    }
    out.verdict = Verdict::Stable;
    return out;
}

}  // namespace

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Stable: return "Stable";
        case Verdict::NotStable: return "NotStable";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

const char* to_string(AnalysisMode m) noexcept {
    return m == AnalysisMode::Atomic ? "Atomic" : "NonAtomicLimit";
}

UniformResult classify_uniform(const PointwiseFamily& family, const AnalysisOptions& opts) {
    validate(opts);
    const DiscretizedMeasureSpace& space = family.space();
    const auto radii = parallel_map<double>(family.size(), [&](std::size_t i) {
        return space.is_null(i) ? 0.0 : spectral_radius(expm(family.active_generator(i), opts.t0));
    });
    UniformResult out;
    out.rho_star = ess_sup(space, radii);

    const auto grid = opts.grid();
    const auto norms = trajectory_cell_norms(family, grid);
    const auto ess = ess_sup_rows(space, norms);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (ess[k] < opts.norm_decay_level) {
            out.norm_decay_confirmed = true;
            out.norm_decay_time = grid[k];
            break;
        }
    }

    if (out.rho_star < 1.0 - opts.margin) {
        out.verdict = Verdict::Stable;
        double eps = -std::log(out.rho_star) / opts.t0;
        if (out.rho_star == 0.0) {
            // e^{t0 s(A)} underflowed; fall back to the spectral bound.
            double s = -kInfinity;
            for (std::size_t i = 0; i < family.size(); ++i)
                if (!space.is_null(i)) s = std::max(s, spectral_bound(family.active_generator(i)));
            eps = -s;
        }
        out.decay_eps = eps;
        double log_m = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (ess[k] > 0.0) log_m = std::max(log_m, std::log(ess[k]) + eps * grid[k]);
        out.bound_M = std::exp(log_m);
        out.exponential_bound_holds = true;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double cap = std::exp(log_m - eps * grid[k]) * (1.0 + 1e-12);
            for (std::size_t i = 0; i < family.size(); ++i)
                if (!space.is_null(i) && norms[k][i] > cap) out.exponential_bound_holds = false;
        }
        return out;
    }

    out.bound_M = *std::max_element(ess.begin(), ess.end());
    // Radii within re_tol of 1 are rounding images of axis eigenvalues.
    const bool unstable = out.rho_star >= 1.0 - opts.re_tol;
    out.verdict = unstable ? Verdict::NotStable : Verdict::Inconclusive;
    const double threshold = unstable ? 1.0 - opts.re_tol : 1.0 - opts.margin;
    for (std::size_t i = 0; i < family.size(); ++i)
        if (!space.is_null(i) && radii[i] >= threshold)
            out.witnesses.push_back({static_cast<int>(i), Complex(radii[i], 0.0),
                                     unstable ? "spectral_radius_at_t0" : "spectral_radius_in_margin"});
    if (!unstable) out.gate = "rho_star within margin of 1";
    return out;
}

StrongResult classify_strong(const PointwiseFamily& family, std::span<const BochnerFunction> probes,
                             const AnalysisOptions& opts) {
    validate(opts);
    if (probes.empty()) throw DomainError(kModule, "classify_strong", "need at least one probe");
    const DiscretizedMeasureSpace& space = family.space();
    const auto spectra = cell_spectra(family, opts.re_tol);
    const auto grid = opts.grid();
    const UniformBound ub = uniform_bound_estimate(family, grid, opts.horizon);

    StrongResult out;
    out.bound_M = ub.bound;
    out.bound_certified = ub.certified;
    out.large_transient = ub.bound > opts.transient_flag;
    if (!ub.certified) out.notes.push_back("bound_M observed on grid only");
    if (out.large_transient)
        out.notes.push_back("large transient growth: bound_M exceeds transient_flag; "
                            "compare bound_M across truncation sizes for uniform boundedness");

    out.semigroup_unbounded = unbounded_witnesses(family, spectra, opts.re_tol, out.witnesses);
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (space.is_null(i)) continue;
        const CellSpectrum& cs = spectra[i];
        if (cs.summary.spectral_bound >= -opts.re_tol && cs.summary.spectral_bound <= opts.re_tol &&
            !cs.defective_imaginary)
            out.witnesses.push_back({static_cast<int>(i), cs.rightmost, "eigenvalue_on_imaginary_axis"});
    }
    if (!out.witnesses.empty()) {
        out.verdict = Verdict::NotStable;
        return out;
    }
    if (!ub.certified) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "boundedness not certified within horizon";
        return out;
    }

    std::vector<double> initial(probes.size());
    for (std::size_t j = 0; j < probes.size(); ++j) {
        initial[j] = lp_norm(probes[j], opts.p);
        if (!(initial[j] > 0.0)) throw DomainError(kModule, "classify_strong", "probe has zero norm");
    }
    std::vector<std::optional<double>> decayed(probes.size());
    for (double t : grid) {
        bool pending = false;
        for (const auto& d : decayed) pending = pending || !d;
        if (!pending) break;
        const OperatorSample sample = semigroup_at(family, t);
        for (std::size_t j = 0; j < probes.size(); ++j)
            if (!decayed[j] && lp_norm(apply(sample, probes[j]), opts.p) < opts.probe_decay_ratio * initial[j])
                decayed[j] = t;
    }
    double slowest = 0.0;
    for (std::size_t j = 0; j < probes.size(); ++j) {
        if (!decayed[j]) {
            out.witnesses.push_back({-1, Complex(opts.horizon, 0.0), "probe_" + std::to_string(j) + "_not_decayed"});
            continue;
        }
        slowest = std::max(slowest, *decayed[j]);
    }
    if (!out.witnesses.empty()) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "probe orbit did not decay within horizon";
        return out;
    }
    out.slowest_probe_decay_time = slowest;
    out.verdict = Verdict::Stable;
    return out;
}

std::vector<Cluster> imaginary_point_spectrum(const PointwiseFamily& family, double re_tol,
                                              double match_tol) {
    if (!(re_tol > 0.0) || !(match_tol > 0.0))
        throw DomainError(kModule, "imaginary_point_spectrum", "tolerances must be > 0");
    const auto cands = imaginary_candidates(family, re_tol);
    std::vector<Cluster> out;
    std::size_t begin = 0;
    while (begin < cands.size()) {
        std::size_t end = begin + 1;
        while (end < cands.size() && std::abs(cands[end].lambda - cands[end - 1].lambda) <= match_tol) ++end;
        Complex weighted{};
        double total = 0.0;
        Cluster c;
        for (std::size_t k = begin; k < end; ++k) {
            weighted += cands[k].weight * cands[k].lambda;
            total += cands[k].weight;
            c.cells.push_back(cands[k].cell);
        }
        c.lambda = weighted / total;
        c.measure = measure_of_cells(family.space(), c.cells);
        out.push_back(std::move(c));
        begin = end;
    }
    return out;
}

double max_neighborhood_measure(const PointwiseFamily& family, double re_tol, double delta) {
    if (!(delta > 0.0)) throw DomainError(kModule, "max_neighborhood_measure", "delta must be > 0");
    const auto cands = imaginary_candidates(family, re_tol);
    double best = 0.0;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < cands.size(); ++k) {
        const Complex l = cands[k].lambda;
        while (cands[lo].lambda.imag() <= l.imag() - delta) ++lo;
        std::vector<int> cells;
        for (std::size_t j = lo; j < cands.size() && cands[j].lambda.imag() < l.imag() + delta; ++j)
            if (std::abs(cands[j].lambda - l) < delta) cells.push_back(cands[j].cell);
        best = std::max(best, measure_of_cells(family.space(), cells));
    }
    return best;
}

AlmostWeakResult classify_almost_weak(const PointwiseFamily& family, const AnalysisOptions& opts) {
    if (opts.mode == AnalysisMode::NonAtomicLimit) {
        const int level = family.space().refinement_level();
        return almost_weak_limit([&](int) { return family; }, opts, {level});
    }
    validate(opts);
    const DiscretizedMeasureSpace& space = family.space();
    AlmostWeakResult out;
    out.mode = AnalysisMode::Atomic;
    out.clusters = imaginary_point_spectrum(family, opts.re_tol, opts.match_tol);
    std::vector<int> all;
    for (const Cluster& c : out.clusters) all.insert(all.end(), c.cells.begin(), c.cells.end());
    out.cluster_measure = measure_of_cells(space, all);

    // Corroborating weak-orbit evidence, one random (x, phi) pair per cell.
    std::mt19937_64 rng(opts.seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (space.is_null(i)) continue;
        const CMatrix a = family.active_generator(i);
        const CVector x = random_unit(rng, a.dim());
        const CVector phi = random_unit(rng, a.dim());
        worst = std::max(worst, weak_orbit_density_test(a, x, phi, opts.horizon, opts.eps,
                                                        opts.density_grid_points, opts.density_pass)
                                    .bad_density);
    }
    out.max_bad_density = worst;
    out.density_corroborated = worst <= opts.density_pass;

    const auto spectra = cell_spectra(family, opts.re_tol);
    if (unbounded_witnesses(family, spectra, opts.re_tol, out.witnesses)) {
        out.semigroup_unbounded = true;
        out.verdict = Verdict::NotStable;
        out.gate = "semigroup unbounded";
        return out;
    }
    for (const Cluster& c : out.clusters)
        if (c.measure > 0.0)
            out.witnesses.push_back({c.cells.front(), c.lambda, "imaginary_eigenvalue_positive_measure"});
    if (!out.witnesses.empty()) {
        out.verdict = Verdict::NotStable;
        return out;
    }
    const auto grid = opts.grid();
    const auto norms = trajectory_cell_norms(family, grid);
    if (!certified_from(family, grid, norms, spectra, opts.re_tol)) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "boundedness not certified";
        return out;
    }
    out.verdict = Verdict::Stable;
    return out;
}

AlmostWeakResult classify_almost_weak(const FamilyGenerator& generator, const AnalysisOptions& opts) {
    if (opts.mode == AnalysisMode::Atomic) {
        const int finest = opts.limit_levels.empty()
                               ? 1
                               : *std::max_element(opts.limit_levels.begin(), opts.limit_levels.end());
        return classify_almost_weak(generator(finest), opts);
    }
    return almost_weak_limit(generator, opts, opts.limit_levels);
}

DensityTest weak_orbit_density_test(const CMatrix& a, const CVector& x, const CVector& phi,
                                    double horizon, double eps, std::size_t grid_points,
                                    double pass_level) {
    if (x.size() != a.dim() || phi.size() != a.dim())
        throw ShapeError(kModule, "weak_orbit_density_test", "vector dimension mismatch");
    if (!(x.norm() > 0.0) || !(phi.norm() > 0.0))
        throw DomainError(kModule, "weak_orbit_density_test", "x and phi must be nonzero");
    if (!(horizon > 0.0) || !(eps > 0.0))
        throw DomainError(kModule, "weak_orbit_density_test", "horizon and eps must be > 0");
    if (grid_points < 2) throw ShapeError(kModule, "weak_orbit_density_test", "need two grid points");
    const double h = horizon / static_cast<double>(grid_points - 1);
    const Eigen::MatrixXcd step = expm(a, h).eigen();
    const double level = eps * x.norm() * phi.norm();
    std::vector<std::uint8_t> bad(grid_points);
    CVector v = x;
    for (std::size_t k = 0; k < grid_points; ++k) {
        bad[k] = std::abs(phi.dot(v)) >= level ? 1 : 0;
        v = step * v;
    }
    DensityTest out;
    out.bad_density = density_continuous(bad, horizon);
    out.pass = out.bad_density <= pass_level;
    return out;
}

std::vector<CesaroResidual> cesaro_verify(const CMatrix& a, const CVector& x,
                                          std::span<const double> t_list, double re_tol) {
    if (x.size() != a.dim()) throw ShapeError(kModule, "cesaro_verify", "vector dimension mismatch");
    const CMatrix p = ergodic_projection(a, re_tol);
    const CVector px = p * x;
    std::vector<CesaroResidual> out;
    double prev = 0.0;
    for (double t : t_list) {
        if (!(t > prev)) throw DomainError(kModule, "cesaro_verify", "times must be positive and increasing");
        prev = t;
        CMatrix s;
        try {
            s = cesaro_mean(a, t, CesaroMethod::ClosedForm);
        } catch (const SingularityError&) {
            s = cesaro_mean(a, t, CesaroMethod::Quadrature);
        }
        out.push_back({t, (s * x - px).norm()});
    }
    return out;
}

bool boundedness_certified(const PointwiseFamily& family, std::span<const double> grid, double re_tol) {
    const auto spectra = cell_spectra(family, re_tol);
    const auto norms = trajectory_cell_norms(family, grid);
    return certified_from(family, grid, norms, spectra, re_tol);
}

StabilityReport analyze(const PointwiseFamily& family, std::span<const BochnerFunction> probes,
                        const AnalysisOptions& opts, const FamilyGenerator& generator) {
    StabilityReport r;
    r.tolerances = opts;
    r.uniform = classify_uniform(family, opts);
    r.strong = classify_strong(family, probes, opts);
    if (opts.mode == AnalysisMode::NonAtomicLimit && generator)
        r.almost_weak = classify_almost_weak(generator, opts);
    else
        r.almost_weak = classify_almost_weak(family, opts);
    return r;
}

}  // namespace mulsemi
