#pragma once

#include "mulsemi/semigroup.hpp"
#include "mulsemi/stability.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mulsemi {

struct DiscreteOptions {
    double margin = 1e-6;
    /// |lambda| within this distance of 1 counts as unimodular.
    double re_tol = 1e-9;
    std::uint64_t n_max = 1000;
    double eps = 1e-3;
    double density_pass = 0.05;
    double norm_level = 1e-6;
    double safety_factor = 3.0;
    std::uint64_t seed = 0;
};

struct PowerBound {
    double bound = 0.0;
    bool certified = false;
};

/// max over n <= n_max of ess sup ||M(s)^n||, on the powers of two plus a
/// uniform fill of up to 256 exponents. Certified when every positive-weight
/// cell has r(M(s)) < 1, or r(M(s)) <= 1 with semisimple unimodular
/// eigenvalues.
PowerBound power_bounded_estimate(const OperatorSample& m, std::uint64_t n_max,
                                  double re_tol = 1e-9);

struct DiscreteUniformResult {
    Verdict verdict = Verdict::Inconclusive;
    double rho_star = 0.0;
    /// First n with ess sup ||M(s)^n|| < norm_level (Stable only).
    std::optional<std::uint64_t> norm_decay_n;
    /// norm_decay_n exists and is within safety_factor * ln(norm_level)/ln(rho*).
    bool norm_check_ok = false;
    std::vector<Witness> witnesses;
    std::string gate;
};

struct DiscreteStrongResult {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Witness> witnesses;
    /// Eigenvector of the first unimodular witness: a non-decaying orbit.
    std::optional<CVector> eigenvector;
    std::string gate;
};

struct DiscreteAlmostWeakResult {
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Witness> witnesses;
    double max_bad_density = 0.0;
    bool density_corroborated = false;
    std::string gate;
};

struct DiscreteReport {
    DiscreteUniformResult uniform;
    DiscreteStrongResult strong;
    DiscreteAlmostWeakResult almost_weak;
    PowerBound power;
    DiscreteOptions tolerances;
};

DiscreteUniformResult classify_discrete_uniform(const OperatorSample& m, const DiscreteOptions& opts);
DiscreteStrongResult classify_discrete_strong(const OperatorSample& m, const DiscreteOptions& opts);
DiscreteAlmostWeakResult classify_discrete_almost_weak(const OperatorSample& m, const DiscreteOptions& opts);
DiscreteReport analyze_discrete(const OperatorSample& m, const DiscreteOptions& opts);

/// Density of {n < n_max : |<M^n x, phi>| >= eps ||x|| ||phi||}.
double discrete_orbit_bad_density(const CMatrix& m, const CVector& x, const CVector& phi,
                                  std::uint64_t n_max, double eps);

}  // namespace mulsemi
