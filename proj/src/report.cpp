#include "mulsemi/report.hpp"

#include <cmath>
#include <cstdio>

namespace mulsemi {

Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

Json to_json(const Complex& z) { return Json::array({number(z.real()), number(z.imag())}); }

template <typename T>
Json optional_number(const std::optional<T>& v) {
    if (!v) return nullptr;
    return number(static_cast<double>(*v));
}

Json to_json(const Witness& w) {
    return Json{{"cell", w.cell}, {"value", to_json(w.value)}, {"kind", w.kind}};
}

namespace {
Json witnesses(const std::vector<Witness>& ws) {
    Json a = Json::array();
    for (const Witness& w : ws) a.push_back(to_json(w));
    return a;
}

Json gate(const std::string& g) {
    if (g.empty()) return nullptr;
    return g;
}
}  // namespace

Json to_json(const AnalysisOptions& o) {
    Json deltas = Json::array();
    for (double d : o.limit_deltas) deltas.push_back(number(d));
    return Json{{"p", std::isinf(o.p) ? Json("inf") : Json(o.p)},
                {"t0", o.t0},
                {"margin", o.margin},
                {"re_tol", o.re_tol},
                {"match_tol", o.match_tol},
                {"eps", o.eps},
                {"horizon", o.horizon},
                {"grid_points", o.grid_points},
                {"log_spacing", o.log_spacing},
                {"norm_decay_level", o.norm_decay_level},
                {"probe_decay_ratio", o.probe_decay_ratio},
                {"density_pass", o.density_pass},
                {"density_grid_points", o.density_grid_points},
                {"transient_flag", o.transient_flag},
                {"mode", to_string(o.mode)},
                {"limit_levels", o.limit_levels},
                {"limit_deltas", deltas},
                {"seed", o.seed}};
}

Json to_json(const DiscreteOptions& o) {
    return Json{{"margin", o.margin},         {"re_tol", o.re_tol},
                {"n_max", o.n_max},           {"eps", o.eps},
                {"density_pass", o.density_pass}, {"norm_level", o.norm_level},
                {"safety_factor", o.safety_factor}, {"seed", o.seed}};
}

Json to_json(const UniformResult& r) {
    return Json{{"verdict", to_string(r.verdict)},
                {"rho_star", number(r.rho_star)},
                {"decay_eps", optional_number(r.decay_eps)},
                {"bound_M", number(r.bound_M)},
                {"norm_decay_confirmed", r.norm_decay_confirmed},
                {"norm_decay_time", optional_number(r.norm_decay_time)},
                {"exponential_bound_holds", r.exponential_bound_holds},
                {"witnesses", witnesses(r.witnesses)},
                {"gate", gate(r.gate)}};
}

Json to_json(const StrongResult& r) {
    return Json{{"verdict", to_string(r.verdict)},
                {"bound_M", number(r.bound_M)},
                {"bound_certified", r.bound_certified},
                {"large_transient", r.large_transient},
                {"semigroup_unbounded", r.semigroup_unbounded},
                {"slowest_probe_decay_time", optional_number(r.slowest_probe_decay_time)},
                {"witnesses", witnesses(r.witnesses)},
                {"gate", gate(r.gate)},
                {"notes", r.notes}};
}

Json to_json(const AlmostWeakResult& r) {
    Json clusters = Json::array();
    for (const Cluster& c : r.clusters)
        clusters.push_back(Json{{"lambda", to_json(c.lambda)}, {"cells", c.cells}, {"measure", number(c.measure)}});
    Json limit = Json::array();
    for (const LimitPoint& p : r.limit)
        limit.push_back(Json{{"level", p.level},
                             {"delta", number(p.delta)},
                             {"cell_width", number(p.cell_width)},
                             {"max_measure", number(p.max_measure)}});
    return Json{{"verdict", to_string(r.verdict)},
                {"mode", to_string(r.mode)},
                {"clusters", clusters},
                {"cluster_measure", number(r.cluster_measure)},
                {"semigroup_unbounded", r.semigroup_unbounded},
                {"limit", limit},
                {"limit_slope", optional_number(r.limit_slope)},
                {"limit_intercept", optional_number(r.limit_intercept)},
                {"max_bad_density", optional_number(r.max_bad_density)},
                {"density_corroborated", r.density_corroborated ? Json(*r.density_corroborated) : Json(nullptr)},
                {"witnesses", witnesses(r.witnesses)},
                {"gate", gate(r.gate)}};
}

Json to_json(const DiscreteReport& r) {
    Json vec = nullptr;
    if (r.strong.eigenvector) {
        vec = Json::array();
        for (Eigen::Index k = 0; k < r.strong.eigenvector->size(); ++k)
            vec.push_back(to_json((*r.strong.eigenvector)(k)));
    }
    return Json{
        {"power_bound", number(r.power.bound)},
        {"power_bound_certified", r.power.certified},
        {"uniform",
         Json{{"verdict", to_string(r.uniform.verdict)},
              {"rho_star", number(r.uniform.rho_star)},
              {"norm_decay_n", optional_number(r.uniform.norm_decay_n)},
              {"norm_check_ok", r.uniform.norm_check_ok},
              {"witnesses", witnesses(r.uniform.witnesses)},
              {"gate", gate(r.uniform.gate)}}},
        {"strong",
         Json{{"verdict", to_string(r.strong.verdict)},
              {"witnesses", witnesses(r.strong.witnesses)},
              {"eigenvector", vec},
              {"gate", gate(r.strong.gate)}}},
        {"almost_weak",
         Json{{"verdict", to_string(r.almost_weak.verdict)},
              {"criterion", "no unimodular point spectrum on positive measure"},
              {"max_bad_density", number(r.almost_weak.max_bad_density)},
              {"density_corroborated", r.almost_weak.density_corroborated},
              {"witnesses", witnesses(r.almost_weak.witnesses)},
              {"gate", gate(r.almost_weak.gate)}}},
        {"tolerances", to_json(r.tolerances)}};
}

Json report_json(const StabilityReport& r, const std::string& config_hash, const DiscreteReport* discrete) {
    Json doc;
    doc["meta"] = Json{{"version", kVersion},
                       {"config_hash", config_hash},
                       {"norm", kNormDescription},
                       {"tolerances", to_json(r.tolerances)}};
    doc["uniform"] = to_json(r.uniform);
    doc["strong"] = to_json(r.strong);
    doc["almost_weak"] = to_json(r.almost_weak);
    doc["discrete"] = discrete ? to_json(*discrete) : Json(nullptr);
    return doc;
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace mulsemi
