#include "mixedrobust/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mixedrobust {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& need(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) fail(std::string(where) + ": missing field '" + key + "'");
    return *it;
}

double need_number(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) fail(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

int need_int(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_number_integer()) fail(std::string(where) + ": '" + key + "' must be an integer");
    return v.get<int>();
}

std::vector<double> need_vector(const json& j, const char* key, const char* where) {
    const json& v = need(j, key, where);
    if (!v.is_array()) fail(std::string(where) + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail(std::string(where) + ": '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Expression parse_cfg_expr(const std::string& text, int n, int m, const char* where) {
    try {
        return parse_expression(text, n, m);
    } catch (const Error& e) {
        fail(std::string(where) + ": in expression \"" + text + "\": " + e.what());
    }
}

Param parse_param(const json& v, int n, const char* where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_cfg_expr(v.get<std::string>(), n, 0, where);
    fail(std::string(where) + ": parameter must be a number or an expression string");
}

UncertaintySet parse_q_set(const json& j, int n, int m) {
    const char* where = "q_set";
    std::string type = need(j, "type", where).get<std::string>();
    if (type == "box") {
        Box box{need_vector(j, "lo", where), need_vector(j, "hi", where)};
        if (static_cast<int>(box.lo.size()) != n) fail("q_set: box dimension must equal dims.n");
        return box;
    }
    if (type == "axis_ellipsoid") {
        AxisEllipsoid ell{need_vector(j, "weights", where), need_vector(j, "center", where),
                          need_number(j, "bound", where)};
        if (static_cast<int>(ell.weights.size()) != n) {
            fail("q_set: ellipsoid dimension must equal dims.n");
        }
        return ell;
    }
    if (type == "discrete") {
        DiscreteSet set;
        for (const auto& pt : need(j, "points", where)) {
            std::vector<double> coords;
            for (const auto& x : pt) coords.push_back(x.get<double>());
            if (static_cast<int>(coords.size()) != n) {
                fail("q_set: discrete point dimension must equal dims.n");
            }
            set.points.push_back(std::move(coords));
        }
        if (set.points.empty()) fail("q_set: discrete set needs points");
        return set;
    }
    if (type == "param_box") {
        ParamBox pb;
        const json& lo = need(j, "lo", where);
        const json& hi = need(j, "hi", where);
        if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() ||
            static_cast<int>(lo.size()) != n) {
            fail("q_set: param_box lo/hi must be expression arrays of length dims.n");
        }
        for (const auto& e : lo) pb.lo.push_back(parse_cfg_expr(e.get<std::string>(), 0, m, where));
        for (const auto& e : hi) pb.hi.push_back(parse_cfg_expr(e.get<std::string>(), 0, m, where));
        return pb;
    }
    if (type == "param_discrete") {
        ParamDiscrete pd;
        for (const auto& pt : need(j, "points", where)) {
            std::vector<Expression> coords;
            for (const auto& e : pt) coords.push_back(parse_cfg_expr(e.get<std::string>(), 0, m, where));
            if (static_cast<int>(coords.size()) != n) {
                fail("q_set: param_discrete point dimension must equal dims.n");
            }
            pd.points.push_back(std::move(coords));
        }
        if (pd.points.empty()) fail("q_set: param_discrete needs points");
        return pd;
    }
    fail("q_set: unknown type '" + type + "'");
}

DistributionSpec parse_dist(const json& j, int n, int m) {
    const char* where = "delta_dist";
    DistributionSpec dist;
    const json& marg = need(j, "marginals", where);
    if (!marg.is_array() || static_cast<int>(marg.size()) != m) {
        fail("delta_dist: needs exactly dims.m marginals");
    }
    for (const auto& mj : marg) {
        std::string type = need(mj, "type", where).get<std::string>();
        if (type == "uniform") {
            dist.marginals.push_back(UniformDist{parse_param(need(mj, "lo", where), n, where),
                                                 parse_param(need(mj, "hi", where), n, where)});
        } else if (type == "normal") {
            dist.marginals.push_back(NormalDist{parse_param(need(mj, "mean", where), n, where),
                                                parse_param(need(mj, "std", where), n, where)});
        } else if (type == "laplace") {
            dist.marginals.push_back(
                LaplaceDist{parse_param(need(mj, "location", where), n, where),
                            parse_param(need(mj, "scale", where), n, where)});
        } else if (type == "discrete") {
            DiscretePMF pmf;
            for (const auto& v : need(mj, "values", where)) pmf.values.push_back(parse_param(v, n, where));
            for (const auto& p : need(mj, "probs", where)) pmf.probs.push_back(parse_param(p, n, where));
            dist.marginals.push_back(std::move(pmf));
        } else {
            fail("delta_dist: unknown marginal type '" + type + "'");
        }
    }
    return dist;
}

void parse_search(const json& j, int m, TwoStepOptions& opts) {
    const json& s = j.at("search");
    if (!s.is_array() || s.size() != 2) fail("method.search must be [lo, hi]");
    if (s[0].is_number() && m == 1) {
        opts.search_lo = {s[0].get<double>()};
        opts.search_hi = {s[1].get<double>()};
        return;
    }
    if (s[0].is_array()) {
        opts.search_lo = s[0].get<std::vector<double>>();
        opts.search_hi = s[1].get<std::vector<double>>();
        if (static_cast<int>(opts.search_lo.size()) != m) {
            fail("method.search bounds must match dims.m");
        }
        return;
    }
    fail("method.search must hold numbers (m = 1) or per-axis arrays");
}

RobustMethod parse_robust_method(const json& j) {
    std::string name = j.value("robust_method", "auto");
    if (name == "auto") return AutoMethod{};
    if (name == "kharitonov") return KharitonovMethod{};
    if (name == "zero_exclusion") {
        ZeroExclusionMethod ze;
        ze.omega_max = j.value("omega_max", 0.0);
        ze.omega_points = j.value("omega_points", 1024);
        return ze;
    }
    if (name == "grid") {
        GridFallbackMethod gf;
        gf.resolution = j.value("grid_resolution", 41);
        return gf;
    }
    fail("method.robust_method: unknown value '" + name + "'");
}

MethodConfig parse_method(const json& j, int m) {
    MethodConfig out;
    if (j.is_null()) return out;
    std::string strategy = j.value("strategy", "auto");
    if (strategy == "auto") {
        out.kind = StrategyKind::Auto;
    } else if (strategy == "two_step") {
        out.kind = StrategyKind::TwoStep;
    } else if (strategy == "scenario") {
        out.kind = StrategyKind::Scenario;
    } else if (strategy == "discrete") {
        out.kind = StrategyKind::Discrete;
    } else if (strategy == "bounds") {
        out.kind = StrategyKind::Bounds;
    } else if (strategy == "quantile") {
        out.kind = StrategyKind::Quantile;
    } else {
        fail("method.strategy: unknown value '" + strategy + "'");
    }

    RobustMethod rm = parse_robust_method(j);
    out.two_step.method = rm;
    out.scenario.method = rm;
    out.delta_of_q.inner.method = rm;

    if (j.contains("search")) parse_search(j, m, out.two_step);
    out.two_step.h = j.value("h", 0.0);
    out.two_step.tol = j.value("tol", 1e-6);
    out.two_step.resolution = j.value("resolution", 400);
    out.two_step.refine_depth = j.value("refine_depth", 2);
    out.delta_of_q.inner = out.two_step;
    out.delta_of_q.q_resolution = j.value("q_resolution", 41);
    out.delta_of_q.refine = j.value("refine", 2);

    out.scenario.epsilon = j.value("epsilon", 0.01);
    out.scenario.theta = j.value("theta", 1e-7);
    if (j.contains("samples")) out.scenario.samples_override = j.at("samples").get<long long>();

    out.bounds.truncation_mass = j.value("truncation_mass", 1.0 - 1e-9);
    out.bounds.delta_grid = j.value("delta_grid", 1025);
    out.bounds.inner.two_step = out.two_step;
    out.bounds.inner.scenario = out.scenario;

    out.quantile_p = j.value("p", 0.5);

    if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
    return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string tool_version() {
#ifdef MIXEDROBUST_VERSION
    return MIXEDROBUST_VERSION;
#else
    return "0.0.0";
#endif
}

AnalysisConfig load_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    AnalysisConfig out;
    out.digest = fnv1a_hex(json_text);

    std::string stability = need(j, "stability", "config").get<std::string>();
    StabilityKind kind;
    if (stability == "hurwitz") {
        kind = StabilityKind::Hurwitz;
    } else if (stability == "schur") {
        kind = StabilityKind::Schur;
    } else {
        fail("config: stability must be \"hurwitz\" or \"schur\"");
    }

    const json& dims = need(j, "dims", "config");
    int n = need_int(dims, "n", "dims");
    int m = need_int(dims, "m", "dims");
    if (n < 0 || m < 0) fail("dims: n and m must be nonnegative");

    const json& poly = need(j, "polynomial", "config");
    if (!poly.is_array() || poly.size() < 2) {
        fail("config: polynomial must list at least two coefficient expressions");
    }
    // Config lists descending powers (the way characteristic polynomials
    // are written); internally coefficients are ascending.
    std::vector<Expression> coeffs;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
        coeffs.push_back(parse_cfg_expr(it->get<std::string>(), n, m, "polynomial"));
    }
    out.spec.map = CoefficientMap(kind, n, m, std::move(coeffs));

    out.spec.q_set = parse_q_set(need(j, "q_set", "config"), n, m);
    out.spec.delta_dist = parse_dist(need(j, "delta_dist", "config"), n, m);

    std::string problem = need(j, "problem", "config").get<std::string>();
    if (problem == "q_delta") {
        out.spec.problem = ProblemType::QDelta;
    } else if (problem == "q_of_delta") {
        out.spec.problem = ProblemType::QofDelta;
    } else if (problem == "delta_of_q") {
        out.spec.problem = ProblemType::DeltaOfQ;
    } else {
        fail("config: problem must be q_delta, q_of_delta or delta_of_q");
    }

    out.method = parse_method(j.contains("method") ? j.at("method") : json(nullptr), m);

    try {
        out.spec.validate();
    } catch (const Error& e) {
        fail(std::string("config: ") + e.what());
    }
    return out;
}

AnalysisConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

std::uint64_t effective_seed(const AnalysisConfig& cfg, std::optional<std::uint64_t> flag_seed) {
    if (flag_seed) return *flag_seed;
    if (cfg.method.seed) return *cfg.method.seed;
    if (const char* env = std::getenv("MIXEDROBUST_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 1;
}

AnalysisResult run_analysis(const AnalysisConfig& cfg, std::uint64_t seed) {
    AnalysisResult out;
    MethodConfig method = cfg.method;
    method.scenario.seed = seed;
    method.bounds.inner.scenario.seed = seed;

    SolveOptions solve_opts;
    solve_opts.two_step = method.two_step;
    solve_opts.scenario = method.scenario;

    auto note_scenario = [&] {
        out.notes.push_back(
            "scenario sample size N = ceil(ln(2/theta)/(2*epsilon^2)); the 1/(2*epsilon) "
            "variant sometimes quoted does not reproduce N = 84057 at epsilon = 0.01, "
            "theta = 1e-7");
    };

    auto note_scan_step = [&] {
        if (cfg.spec.map.m != 1) return;
        double h = method.two_step.h;
        std::string step = h > 0.0 ? std::to_string(h) : "(search span)/2000";
        out.notes.push_back("1-D D-partition scan step " + step +
                            "; stability features narrower than the step can be missed");
    };

    switch (cfg.spec.problem) {
        case ProblemType::QDelta:
        case ProblemType::QofDelta: {
            auto solve = cfg.spec.problem == ProblemType::QDelta ? solve_q_delta : solve_q_of_delta;
            switch (method.kind) {
                case StrategyKind::Auto:
                    solve_opts.strategy = SolveStrategy::Auto;
                    out.estimate = solve(cfg.spec, solve_opts);
                    if (cfg.spec.map.m <= 2) note_scan_step();
                    break;
                case StrategyKind::TwoStep:
                    solve_opts.strategy = SolveStrategy::TwoStep;
                    out.estimate = solve(cfg.spec, solve_opts);
                    note_scan_step();
                    break;
                case StrategyKind::Scenario:
                    solve_opts.strategy = SolveStrategy::Scenario;
                    out.estimate = solve(cfg.spec, solve_opts);
                    note_scenario();
                    break;
                case StrategyKind::Discrete:
                    out.estimate = solve_discrete(cfg.spec, method.two_step.method);
                    break;
                case StrategyKind::Bounds: {
                    if (cfg.spec.problem != ProblemType::QofDelta) {
                        throw MethodInapplicableError("bounds strategy needs problem q_of_delta");
                    }
                    auto [lower, upper] = bounds_q_of_delta(cfg.spec, method.bounds);
                    out.estimate = lower;
                    out.estimate.bracket = std::make_pair(lower.value, upper.value);
                    out.notes.push_back(
                        "union/intersection bounds: probability is the guaranteed lower bound; "
                        "bracket holds [union lower, intersection upper]");
                    break;
                }
                case StrategyKind::Quantile: {
                    auto cert = quantile_lower_bound(cfg.spec, method.quantile_p, method.quantile);
                    out.estimate.value = cert.certified ? method.quantile_p : 0.0;
                    out.estimate.method = EstimateMethod::Geometric;
                    out.estimate.guarantee = cert.guarantee;
                    out.notes.push_back(cert.certified
                                            ? "quantile-set check certifies probability >= p"
                                            : "quantile-set check could not certify level p; "
                                              "reported probability is the trivial lower bound 0");
                    break;
                }
            }
            break;
        }
        case ProblemType::DeltaOfQ: {
            if (method.kind == StrategyKind::Discrete) {
                out.estimate = solve_discrete(cfg.spec, method.two_step.method);
            } else {
                out.estimate = solve_delta_of_q(cfg.spec, method.delta_of_q);
                note_scan_step();
                out.notes.push_back(
                    "Problem III minimum is an upper bound on the infimum at q grid resolution " +
                    std::to_string(method.delta_of_q.q_resolution) + " with " +
                    std::to_string(method.delta_of_q.refine) + " refinement rounds");
            }
            break;
        }
    }
    return out;
}

Report make_report(const AnalysisConfig& cfg, const AnalysisResult& result, std::uint64_t seed) {
    Report rep;
    rep.probability = result.estimate.value;
    rep.method = to_string(result.estimate.method);
    rep.guarantee = to_string(result.estimate.guarantee);
    rep.exact = result.estimate.exact;
    rep.bracket = result.estimate.bracket;
    rep.scenario = result.estimate.scenario;
    rep.worst_q = result.estimate.worst_q;
    rep.config_digest = cfg.digest;
    rep.seed = seed;
    rep.notes = result.notes;
    return rep;
}

std::string Report::to_json() const {
    json j;
    j["probability"] = probability;
    j["method"] = method;
    j["guarantee"] = guarantee;
    j["exact"] = exact;
    if (bracket) j["bracket"] = {{"lo", bracket->first}, {"hi", bracket->second}};
    if (scenario) {
        j["scenario"] = {{"epsilon", scenario->epsilon},
                         {"theta", scenario->theta},
                         {"samples", scenario->samples}};
    }
    if (worst_q) j["worst_q"] = *worst_q;
    if (region_file) j["region_file"] = *region_file;
    j["config_digest"] = config_digest;
    j["seed"] = seed;
    j["notes"] = notes;
    j["meta"] = {{"tool_version", tool_version()}};
    return j.dump(2) + "\n";
}

}  // namespace mixedrobust
