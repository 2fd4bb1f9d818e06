#include "mulsemi/app.hpp"

#include "mulsemi/cases.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mulsemi::app {

namespace {

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

void check_keys(const Json& obj, const char* section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string("section '") + section + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!ok.count(item.key()))
            throw ConfigError(std::string("unknown field '") + item.key() + "' in section '" + section + "'");
}

Json section(const Json& root, const char* name) {
    if (!root.contains(name) || root.at(name).is_null()) return Json::object();
    return root.at(name);
}

Complex parse_complex(const Json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("complex numbers must be [re, im] pairs");
}

CMatrix parse_matrix(const Json& rows) {
    if (!rows.is_array() || rows.empty()) throw ConfigError("matrix must be a nonempty array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ConfigError("matrix must be square");
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = parse_complex(row[static_cast<std::size_t>(j)]);
    }
    try {
        return CMatrix(std::move(m));
    } catch (const InvalidMatrixError& e) {
        throw ConfigError(e.what());
    }
}

// Fills defaults and validates field names; the result is the canonical
// document used for hashing and for building runs.
Json normalize(const Json& in, const Overrides& ov) {
    if (!in.is_object()) throw ConfigError("configuration must be an object");
    check_keys(in, "root",
               {"space", "family", "p", "time", "tolerances", "probes", "discrete", "limit", "sweep", "output"});
    Json out;

    Json fam = section(in, "family");
    if (fam.empty()) throw ConfigError("missing section 'family'");
    Json space = section(in, "space");
    check_keys(space, "space", {"weights", "labels", "grid", "mode"});
    const std::string mode = get_or<std::string>(space, "mode", "Atomic");
    if (mode != "Atomic" && mode != "NonAtomicLimit") throw ConfigError("space.mode must be Atomic or NonAtomicLimit");

    Json nf;
    if (fam.contains("builtin")) {
        const std::string name = get_or<std::string>(fam, "builtin", "");
        nf["builtin"] = name;
        if (name == "zabczyk") {
            check_keys(fam, "family", {"builtin", "N", "embed_dim"});
            const int n = get_or<int>(fam, "N", 10);
            nf["N"] = n;
            nf["embed_dim"] = get_or<int>(fam, "embed_dim", n);
        } else if (name == "rotation") {
            check_keys(fam, "family", {"builtin", "cells"});
            nf["cells"] = get_or<std::size_t>(fam, "cells", 37);
        } else if (name == "random-hurwitz") {
            check_keys(fam, "family", {"builtin", "seed", "n", "cells", "margin"});
            nf["seed"] = ov.seed ? *ov.seed : get_or<std::uint64_t>(fam, "seed", 0);
            nf["n"] = get_or<int>(fam, "n", 4);
            nf["cells"] = get_or<std::size_t>(fam, "cells", 8);
            nf["margin"] = get_or<double>(fam, "margin", 0.2);
        } else if (name == "diagonal") {
            check_keys(fam, "family", {"builtin", "rates", "weights"});
            if (!fam.contains("rates") || !fam["rates"].is_array()) throw ConfigError("diagonal family needs 'rates'");
            Json rates = Json::array();
            for (const Json& r : fam["rates"]) rates.push_back(to_json(parse_complex(r)));
            nf["rates"] = rates;
            nf["weights"] = fam.contains("weights") ? fam["weights"]
                                                    : Json(std::vector<double>(rates.size(), 1.0));
        } else {
            throw ConfigError("unknown builtin family '" + name + "'");
        }
    } else if (fam.contains("matrices")) {
        check_keys(fam, "family", {"matrices"});
        Json mats = Json::array();
        for (const Json& m : fam["matrices"]) {
            const CMatrix c = parse_matrix(m);
            Json rows = Json::array();
            for (Eigen::Index i = 0; i < c.dim(); ++i) {
                Json row = Json::array();
                for (Eigen::Index j = 0; j < c.dim(); ++j) row.push_back(to_json(c(i, j)));
                rows.push_back(row);
            }
            mats.push_back(rows);
        }
        if (mats.empty()) throw ConfigError("family.matrices is empty");
        nf["matrices"] = mats;
    } else {
        throw ConfigError("family needs 'builtin' or 'matrices'");
    }
    out["family"] = nf;

    Json ns;
    ns["mode"] = mode;
    if (space.contains("grid")) {
        const Json& g = space["grid"];
        check_keys(g, "space.grid", {"lo", "hi", "cells"});
        ns["grid"] = Json{{"lo", get_or<double>(g, "lo", 0.0)},
                          {"hi", get_or<double>(g, "hi", 1.0)},
                          {"cells", get_or<std::size_t>(g, "cells", 1)}};
    }
    if (space.contains("weights")) ns["weights"] = space["weights"];
    if (space.contains("labels")) ns["labels"] = space["labels"];
    out["space"] = ns;

    if (in.contains("p")) {
        const Json& p = in["p"];
        if (p.is_string() && p.get<std::string>() == "inf") out["p"] = "inf";
        else if (p.is_number() && p.get<double>() >= 1.0) out["p"] = p.get<double>();
        else throw ConfigError("p must be a real >= 1 or \"inf\"");
    } else {
        out["p"] = 2.0;
    }

    const Json time = section(in, "time");
    check_keys(time, "time", {"t0", "horizon", "grid_points", "log_spacing", "points"});
    Json nt{{"t0", get_or<double>(time, "t0", 1.0)},
            {"horizon", get_or<double>(time, "horizon", 100.0)},
            {"grid_points", get_or<std::size_t>(time, "grid_points", 401)},
            {"log_spacing", get_or<bool>(time, "log_spacing", false)}};
    if (time.contains("points")) nt["points"] = time["points"].get<std::vector<double>>();
    out["time"] = nt;

    const Json tol = section(in, "tolerances");
    check_keys(tol, "tolerances", {"re_tol", "match_tol", "margin", "eps"});
    out["tolerances"] = Json{{"re_tol", get_or<double>(tol, "re_tol", 1e-9)},
                             {"match_tol", get_or<double>(tol, "match_tol", 1e-6)},
                             {"margin", get_or<double>(tol, "margin", 1e-6)},
                             {"eps", get_or<double>(tol, "eps", 1e-3)}};

    const Json probes = section(in, "probes");
    check_keys(probes, "probes", {"count", "seed", "vectors"});
    Json np;
    if (probes.contains("vectors")) {
        np["vectors"] = probes["vectors"];
    } else {
        np["count"] = get_or<std::size_t>(probes, "count", 3);
    }
    np["seed"] = ov.seed ? *ov.seed : get_or<std::uint64_t>(probes, "seed", 0);
    out["probes"] = np;

    const Json disc = section(in, "discrete");
    check_keys(disc, "discrete", {"enabled", "n_max"});
    out["discrete"] = Json{{"enabled", get_or<bool>(disc, "enabled", false)},
                           {"n_max", get_or<std::uint64_t>(disc, "n_max", 1000)}};

    const Json lim = section(in, "limit");
    check_keys(lim, "limit", {"levels", "deltas"});
    out["limit"] = Json{{"levels", get_or<std::vector<int>>(lim, "levels", {1, 2, 3, 4})},
                        {"deltas", get_or<std::vector<double>>(lim, "deltas", {0.1, 0.05, 0.025})}};

    const Json sweep = section(in, "sweep");
    check_keys(sweep, "sweep", {"parameter", "values"});
    out["sweep"] = Json{{"parameter", get_or<std::string>(sweep, "parameter", "")},
                        {"values", get_or<std::vector<double>>(sweep, "values", {})}};

    const Json output = section(in, "output");
    check_keys(output, "output", {"json_path", "csv_path"});
    out["output"] = Json{{"json_path", output.contains("json_path") ? output["json_path"] : Json(nullptr)},
                         {"csv_path", output.contains("csv_path") ? output["csv_path"] : Json(nullptr)}};
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Setup {
    std::optional<PointwiseFamily> family;
    FamilyGenerator generator;
    std::vector<BochnerFunction> probes;
    AnalysisOptions opts;
    DiscreteOptions dopts;
    bool discrete = false;
};

DiscretizedMeasureSpace inline_space(const Json& ns, std::size_t cells) {
    if (ns.contains("grid")) {
        const Json& g = ns["grid"];
        if (g["cells"].get<std::size_t>() != cells) throw ConfigError("space.grid.cells differs from the matrix count");
        return DiscretizedMeasureSpace::uniform_grid(g["lo"].get<double>(), g["hi"].get<double>(), cells);
    }
    std::vector<double> weights = ns.contains("weights") ? ns["weights"].get<std::vector<double>>()
                                                         : std::vector<double>(cells, 1.0);
    std::vector<double> labels = ns.contains("labels") ? ns["labels"].get<std::vector<double>>()
                                                       : std::vector<double>{};
    if (weights.size() != cells) throw ConfigError("space.weights must have one entry per matrix");
    return DiscretizedMeasureSpace::atomic(std::move(weights), std::move(labels));
}

PointwiseFamily build_family(const Json& doc, FamilyGenerator* generator) {
    const Json& f = doc["family"];
    if (f.contains("matrices")) {
        std::vector<CMatrix> mats;
        for (const Json& m : f["matrices"]) mats.push_back(parse_matrix(m));
        DiscretizedMeasureSpace space = inline_space(doc["space"], mats.size());
        return PointwiseFamily(std::move(space), std::move(mats));
    }
    const std::string name = f["builtin"].get<std::string>();
    if (name == "zabczyk") return cases::zabczyk_family(f["N"].get<int>(), f["embed_dim"].get<int>());
    if (name == "rotation") {
        const auto cells = f["cells"].get<std::size_t>();
        if (generator) *generator = cases::rotation_generator(cells);
        return cases::rotation_family(cells);
    }
    if (name == "random-hurwitz")
        return cases::random_hurwitz_family(f["seed"].get<std::uint64_t>(), f["n"].get<int>(),
                                            f["cells"].get<std::size_t>(), f["margin"].get<double>());
    std::vector<Complex> rates;
    for (const Json& r : f["rates"]) rates.push_back(parse_complex(r));
    return cases::diagonal_family(rates, f["weights"].get<std::vector<double>>());
}

Setup build(const Config& config) {
    const Json& doc = config.normalized();
    Setup s;
    s.family.emplace(build_family(doc, &s.generator));
    const PointwiseFamily& fam = *s.family;

    AnalysisOptions& o = s.opts;
    o.p = doc["p"].is_string() ? kInfinity : doc["p"].get<double>();
    o.t0 = doc["time"]["t0"].get<double>();
    o.horizon = doc["time"]["horizon"].get<double>();
    o.grid_points = doc["time"]["grid_points"].get<std::size_t>();
    o.log_spacing = doc["time"]["log_spacing"].get<bool>();
    o.re_tol = doc["tolerances"]["re_tol"].get<double>();
    o.match_tol = doc["tolerances"]["match_tol"].get<double>();
    o.margin = doc["tolerances"]["margin"].get<double>();
    o.eps = doc["tolerances"]["eps"].get<double>();
    o.mode = doc["space"]["mode"].get<std::string>() == "Atomic" ? AnalysisMode::Atomic
                                                                  : AnalysisMode::NonAtomicLimit;
    o.limit_levels = doc["limit"]["levels"].get<std::vector<int>>();
    o.limit_deltas = doc["limit"]["deltas"].get<std::vector<double>>();
    o.seed = doc["probes"]["seed"].get<std::uint64_t>();
    if (!(o.horizon > 0.0) || !(o.t0 > 0.0) || o.grid_points < 2)
        throw ConfigError("time.t0 and time.horizon must be > 0 and grid_points >= 2");

    const Json& pr = doc["probes"];
    if (pr.contains("vectors")) {
        for (const Json& probe : pr["vectors"]) {
            if (!probe.is_array() || probe.size() != fam.size())
                throw ConfigError("each inline probe needs one vector per cell");
            std::vector<CVector> vecs;
            for (const Json& v : probe) {
                if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != fam.dim())
                    throw ConfigError("probe vectors must match the family dimension");
                CVector x(fam.dim());
                for (Eigen::Index k = 0; k < fam.dim(); ++k) x(k) = parse_complex(v[static_cast<std::size_t>(k)]);
                vecs.push_back(std::move(x));
            }
            s.probes.emplace_back(fam.space(), std::move(vecs));
        }
    } else {
        s.probes = cases::random_probes(fam.space(), fam.dim(), pr["count"].get<std::size_t>(), o.seed);
    }
    if (s.probes.empty()) throw ConfigError("at least one probe is required");

    s.discrete = doc["discrete"]["enabled"].get<bool>();
    s.dopts.n_max = doc["discrete"]["n_max"].get<std::uint64_t>();
    s.dopts.margin = o.margin;
    s.dopts.re_tol = o.re_tol;
    s.dopts.eps = o.eps;
    s.dopts.seed = o.seed;
    return s;
}

}  // namespace

Config Config::parse(const std::string& text, const Overrides& overrides) {
    Json raw;
    try {
        raw = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line/column position.
        std::size_t line = 1, column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ": " + e.what(),
                          line, column);
    }
    Config c;
    c.doc_ = normalize(raw, overrides);
    return c;
}

Config Config::load(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), overrides);
}

std::string Config::hash() const {
    Json semantic = doc_;
    semantic.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(semantic.dump())));
    return buf;
}

std::optional<std::string> Config::json_path() const {
    const Json& p = doc_["output"]["json_path"];
    if (p.is_string()) return p.get<std::string>();
    return std::nullopt;
}

std::optional<std::string> Config::csv_path() const {
    const Json& p = doc_["output"]["csv_path"];
    if (p.is_string()) return p.get<std::string>();
    return std::nullopt;
}

std::string run_analyze(const Config& config) {
    Setup s = build(config);
    const StabilityReport report = analyze(*s.family, s.probes, s.opts, s.generator);
    std::optional<DiscreteReport> discrete;
    if (s.discrete) discrete = analyze_discrete(semigroup_at(*s.family, s.opts.t0), s.dopts);
    return report_json(report, config.hash(), discrete ? &*discrete : nullptr).dump(2) + "\n";
}

std::string run_sweep(const Config& config, const std::string& parameter) {
    Setup s = build(config);
    const Json& doc = config.normalized();
    const std::string param = parameter.empty() ? doc["sweep"]["parameter"].get<std::string>() : parameter;
    const auto values = doc["sweep"]["values"].get<std::vector<double>>();
    if (values.empty()) throw ConfigError("sweep.values is empty");
    const Json& fam = doc["family"];
    const bool is_builtin = fam.contains("builtin");
    const std::string builtin = is_builtin ? fam["builtin"].get<std::string>() : "";

    std::ostringstream csv;
    csv << "param,decay_eps,bound_M,max_cluster_measure\n";
    auto row = [&](double value, const PointwiseFamily& f, double cluster_measure) {
        const UniformResult u = classify_uniform(f, s.opts);
        const auto grid = s.opts.grid();
        const UniformBound ub = uniform_bound_estimate(f, grid, s.opts.horizon);
        csv << csv_number(value) << ',' << (u.decay_eps ? csv_number(*u.decay_eps) : "") << ','
            << csv_number(ub.bound) << ',' << csv_number(cluster_measure) << '\n';
    };
    auto max_cluster = [&](const PointwiseFamily& f, double tol) {
        double best = 0.0;
        for (const Cluster& c : imaginary_point_spectrum(f, s.opts.re_tol, tol)) best = std::max(best, c.measure);
        return best;
    };

    if (param == "N") {
        if (builtin != "zabczyk") throw ConfigError("sweep over N requires the zabczyk family");
        for (double v : values) {
            const int n = static_cast<int>(std::lround(v));
            if (n < 1) throw ConfigError("sweep values for N must be >= 1");
            const PointwiseFamily f = cases::zabczyk_family(n, n);
            row(v, f, max_cluster(f, s.opts.match_tol));
        }
    } else if (param == "level") {
        if (!s.generator) throw ConfigError("sweep over level requires a refinable family (rotation)");
        for (double v : values) {
            const int level = static_cast<int>(std::lround(v));
            if (level < 1) throw ConfigError("sweep values for level must be >= 1");
            const PointwiseFamily f = s.generator(level);
            row(v, f, max_cluster(f, s.opts.match_tol));
        }
    } else if (param == "delta") {
        for (double v : values) {
            if (!(v > 0.0)) throw ConfigError("sweep values for delta must be > 0");
            row(v, *s.family, max_neighborhood_measure(*s.family, s.opts.re_tol, v));
        }
    } else {
        throw ConfigError("sweep parameter must be N, level or delta");
    }
    return csv.str();
}

std::string run_trajectory(const Config& config) {
    Setup s = build(config);
    const Json& time = config.normalized()["time"];
    const std::vector<double> times =
        time.contains("points") ? time["points"].get<std::vector<double>>() : s.opts.grid();
    if (times.empty()) throw ConfigError("time.points is empty");
    std::ostringstream csv;
    csv << "t,ess_sup_norm";
    for (std::size_t j = 0; j < s.probes.size(); ++j) csv << ",probe_" << j;
    csv << '\n';
    for (const OperatorSample& sample : trajectory(*s.family, times)) {
        csv << csv_number(*sample.time()) << ',' << csv_number(operator_norm(sample, s.opts.p));
        for (const BochnerFunction& f : s.probes) csv << ',' << csv_number(lp_norm(apply(sample, f), s.opts.p));
        csv << '\n';
    }
    return csv.str();
}

}  // namespace mulsemi::app
