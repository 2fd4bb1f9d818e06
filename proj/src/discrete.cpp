#include "mulsemi/discrete.hpp"

#include "mulsemi/error.hpp"
#include "mulsemi/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace mulsemi {

namespace {

constexpr const char* kModule = "discrete";

struct CellInfo {
    double radius = 0.0;
    std::vector<Complex> unimodular;
    bool unimodular_semisimple = true;
};

std::vector<CellInfo> cell_info(const OperatorSample& m, double tol) {
    return parallel_map<CellInfo>(m.size(), [&](std::size_t i) {
        CellInfo ci;
        if (m.space().is_null(i)) return ci;
        for (const Complex& l : eigenvalues(m.matrix(i))) {
            ci.radius = std::max(ci.radius, std::abs(l));
            if (std::abs(std::abs(l) - 1.0) <= tol) {
                ci.unimodular.push_back(l);
                if (!is_semisimple(m.matrix(i), l, tol)) ci.unimodular_semisimple = false;
            }
        }
        return ci;
    });
}

bool certified(const OperatorSample& m, const std::vector<CellInfo>& info, double tol) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.space().is_null(i)) continue;
        const CellInfo& ci = info[i];
        if (ci.radius < 1.0 - tol) continue;
        if (ci.radius <= 1.0 + tol && ci.unimodular_semisimple) continue;
        return false;
    }
    return true;
}

CVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(normal(rng), normal(rng));
    return v / v.norm();
}

void validate(const OperatorSample& m, const DiscreteOptions& o, const char* op) {
    (void)m;
    if (o.n_max < 1) throw DomainError(kModule, op, "n_max must be >= 1");
    if (!(o.margin > 0.0) || !(o.re_tol > 0.0) || !(o.eps > 0.0))
        throw DomainError(kModule, op, "tolerances must be > 0");
}

}  // namespace

PowerBound power_bounded_estimate(const OperatorSample& m, std::uint64_t n_max, double re_tol) {
    if (n_max < 1) throw DomainError(kModule, "power_bounded_estimate", "n_max must be >= 1");
    std::set<std::uint64_t> exponents;
    for (std::uint64_t n = 1; n <= n_max && n != 0; n <<= 1U) exponents.insert(n);
    const std::uint64_t fill = std::min<std::uint64_t>(n_max, 256);
    for (std::uint64_t j = 1; j <= fill; ++j) exponents.insert(std::max<std::uint64_t>(1, j * n_max / fill));
    const std::vector<std::uint64_t> ns(exponents.begin(), exponents.end());

    const auto per_cell = parallel_map<double>(m.size(), [&](std::size_t i) {
        if (m.space().is_null(i)) return 0.0;
        double best = 0.0;
        for (std::uint64_t n : ns) {
            try {
                best = std::max(best, norm2(matrix_power(m.matrix(i), n)));
            } catch (const NumericalFailure&) {
                return kInfinity;
            }
            if (!std::isfinite(best)) return kInfinity;
        }
        return best;
    });
    PowerBound out;
    out.bound = ess_sup(m.space(), per_cell);
    out.certified = certified(m, cell_info(m, re_tol), re_tol);
    return out;
}

DiscreteUniformResult classify_discrete_uniform(const OperatorSample& m, const DiscreteOptions& opts) {
    validate(m, opts, "classify_discrete_uniform");
    const auto info = cell_info(m, opts.re_tol);
    std::vector<double> radii(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) radii[i] = info[i].radius;
    DiscreteUniformResult out;
    out.rho_star = ess_sup(m.space(), radii);

    if (out.rho_star < 1.0 - opts.margin) {
        out.verdict = Verdict::Stable;
        const double predicted =
            out.rho_star > 0.0 ? std::log(opts.norm_level) / std::log(out.rho_star) : 1.0;
        constexpr double kMaxSteps = 1e6;
        const auto limit = static_cast<std::uint64_t>(
            std::min(kMaxSteps, std::ceil(opts.safety_factor * std::max(1.0, predicted))));
        std::vector<Eigen::MatrixXcd> powers;
        for (std::size_t i = 0; i < m.size(); ++i) powers.push_back(m.matrix(i).eigen());
        std::vector<double> norms(m.size());
        for (std::uint64_t n = 1; n <= limit; ++n) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (n > 1) powers[i] = powers[i] * m.matrix(i).eigen();
                norms[i] = m.space().is_null(i) ? 0.0 : norm2(powers[i]);
            }
            if (ess_sup(m.space(), norms) < opts.norm_level) {
                out.norm_decay_n = n;
                break;
            }
        }
        out.norm_check_ok = out.norm_decay_n.has_value();
        return out;
    }
    const bool unstable = out.rho_star >= 1.0 - opts.re_tol;
    out.verdict = unstable ? Verdict::NotStable : Verdict::Inconclusive;
    const double threshold = unstable ? 1.0 - opts.re_tol : 1.0 - opts.margin;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m.space().is_null(i) && radii[i] >= threshold)
            out.witnesses.push_back({static_cast<int>(i), Complex(radii[i], 0.0),
                                     unstable ? "spectral_radius" : "spectral_radius_in_margin"});
    if (!unstable) out.gate = "rho_star within margin of 1";
    return out;
}

DiscreteStrongResult classify_discrete_strong(const OperatorSample& m, const DiscreteOptions& opts) {
    validate(m, opts, "classify_discrete_strong");
    const auto info = cell_info(m, opts.re_tol);
    DiscreteStrongResult out;
    if (!certified(m, info, opts.re_tol)) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "power boundedness not certified";
        return out;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.space().is_null(i) || info[i].unimodular.empty()) continue;
        const Complex l = info[i].unimodular.front();
        out.witnesses.push_back({static_cast<int>(i), l, "unimodular_eigenvalue"});
        if (!out.eigenvector) {
            const Eigen::MatrixXcd b =
                m.matrix(i).eigen() - l * Eigen::MatrixXcd::Identity(m.dim(), m.dim());
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullV);
            out.eigenvector = svd.matrixV().col(m.dim() - 1);
        }
    }
    out.verdict = out.witnesses.empty() ? Verdict::Stable : Verdict::NotStable;
    return out;
}

double discrete_orbit_bad_density(const CMatrix& m, const CVector& x, const CVector& phi,
                                  std::uint64_t n_max, double eps) {
    if (x.size() != m.dim() || phi.size() != m.dim())
        throw ShapeError(kModule, "discrete_orbit_bad_density", "vector dimension mismatch");
    if (n_max < 1) throw DomainError(kModule, "discrete_orbit_bad_density", "n_max must be >= 1");
    const double level = eps * x.norm() * phi.norm();
    std::vector<std::uint64_t> members;
    CVector v = x;
    for (std::uint64_t n = 0; n < n_max; ++n) {
        if (std::abs(phi.dot(v)) >= level) members.push_back(n);
        v = m * v;
    }
    return density_discrete(members, n_max);
}

DiscreteAlmostWeakResult classify_discrete_almost_weak(const OperatorSample& m,
                                                       const DiscreteOptions& opts) {
    validate(m, opts, "classify_discrete_almost_weak");
    const auto info = cell_info(m, opts.re_tol);
    DiscreteAlmostWeakResult out;
    std::mt19937_64 rng(opts.seed);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.space().is_null(i)) continue;
        const CVector x = random_unit(rng, m.dim());
        const CVector phi = random_unit(rng, m.dim());
        out.max_bad_density = std::max(
            out.max_bad_density, discrete_orbit_bad_density(m.matrix(i), x, phi, opts.n_max, opts.eps));
    }
    out.density_corroborated = out.max_bad_density <= opts.density_pass;
    if (!certified(m, info, opts.re_tol)) {
        out.verdict = Verdict::Inconclusive;
        out.gate = "power boundedness not certified";
        return out;
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m.space().is_null(i))
            for (const Complex& l : info[i].unimodular)
                out.witnesses.push_back({static_cast<int>(i), l, "unimodular_eigenvalue"});
    out.verdict = out.witnesses.empty() ? Verdict::Stable : Verdict::NotStable;
    return out;
}

DiscreteReport analyze_discrete(const OperatorSample& m, const DiscreteOptions& opts) {
    DiscreteReport r;
    r.tolerances = opts;
    r.power = power_bounded_estimate(m, opts.n_max, opts.re_tol);
    r.uniform = classify_discrete_uniform(m, opts);
    r.strong = classify_discrete_strong(m, opts);
    r.almost_weak = classify_discrete_almost_weak(m, opts);
    return r;
}

}  // namespace mulsemi
