#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mixedrobust/config.hpp"
#include "mixedrobust/repro.hpp"

namespace {

using namespace mixedrobust;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMethod = 3;
constexpr int kExitReproFail = 4;

bool is_method_error(const Error& e) {
    return dynamic_cast<const MethodInapplicableError*>(&e) != nullptr ||
           dynamic_cast<const DimensionTooHighError*>(&e) != nullptr ||
           dynamic_cast<const DimensionMismatchError*>(&e) != nullptr ||
           dynamic_cast<const NotDiscreteError*>(&e) != nullptr ||
           dynamic_cast<const UnboundedSupportError*>(&e) != nullptr;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

// The nominal system: Q collapsed to its center (or first point).
UncertaintySet nominal_q(const UncertaintySet& q_set) {
    DiscreteSet single;
    if (const auto* box = std::get_if<Box>(&q_set)) {
        std::vector<double> c(box->lo.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (box->lo[i] + box->hi[i]);
        single.points.push_back(c);
    } else if (const auto* ell = std::get_if<AxisEllipsoid>(&q_set)) {
        single.points.push_back(ell->center);
    } else if (const auto* disc = std::get_if<DiscreteSet>(&q_set)) {
        single.points.push_back(disc->points.front());
    } else {
        throw MethodInapplicableError("no nominal point for a delta-parameterized Q");
    }
    return single;
}

struct RegionFiles {
    std::string csv;
    std::string svg;
    bool nominal = false;
};

// Build the delta-space region of a config and write the requested files.
void emit_region(const AnalysisConfig& cfg, const RegionFiles& files) {
    if (cfg.spec.problem == ProblemType::DeltaOfQ) {
        throw MethodInapplicableError("region export applies to problems q_delta and q_of_delta");
    }
    const TwoStepOptions& ts = cfg.method.two_step;
    int m = cfg.spec.map.m;
    if (m > 2) throw DimensionTooHighError("region export handles one or two random axes");

    std::vector<double> lo = ts.search_lo, hi = ts.search_hi;
    if (lo.empty()) {
        for (const auto& marg : resolve_distribution(cfg.spec.delta_dist, {})) {
            auto iv = std::holds_alternative<RUniform>(marg) || std::holds_alternative<RDiscrete>(marg)
                          ? central_interval(marg, 1.0)
                          : central_interval(marg, 1.0 - 1e-9);
            lo.push_back(iv.first);
            hi.push_back(iv.second);
        }
    }

    if (m == 1) {
        IntervalUnion region = stability_intervals_1d(cfg.spec.map, cfg.spec.q_set, lo[0], hi[0],
                                                      ts.h, ts.tol, ts.method);
        std::ostringstream csv;
        write_intervals_csv(csv, region);
        if (files.csv.empty()) {
            std::cout << csv.str();
        } else {
            write_file(files.csv, csv.str());
        }
        if (!files.svg.empty()) {
            std::ostringstream svg;
            write_intervals_svg(svg, region, lo[0], hi[0]);
            write_file(files.svg, svg.str());
        }
        return;
    }

    PolygonRegion region = stability_region_2d(cfg.spec.map, cfg.spec.q_set, {lo[0], lo[1]},
                                               {hi[0], hi[1]}, ts.resolution, ts.refine_depth,
                                               ts.method);
    std::ostringstream csv;
    write_polygons_csv(csv, region);
    if (files.csv.empty()) {
        std::cout << csv.str();
    } else {
        write_file(files.csv, csv.str());
    }
    if (!files.svg.empty()) {
        std::optional<PolygonRegion> nominal;
        if (files.nominal) {
            nominal = stability_region_2d(cfg.spec.map, nominal_q(cfg.spec.q_set), {lo[0], lo[1]},
                                          {hi[0], hi[1]}, ts.resolution, ts.refine_depth,
                                          ts.method);
        }
        std::ostringstream svg;
        write_region_svg(svg, region, nominal ? &*nominal : nullptr);
        write_file(files.svg, svg.str());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"mixed deterministic/random parametric robust stability analysis"};
    app.require_subcommand(1);

    std::string config_path, out_path, region_csv, svg_path;
    std::optional<std::uint64_t> seed_flag;
    bool nominal_overlay = false;

    auto* analyze = app.add_subcommand("analyze", "run the solver for a problem configuration");
    analyze->add_option("config", config_path, "problem configuration (JSON)")->required();
    analyze->add_option("--out", out_path, "write the report here (default: stdout)");
    analyze->add_option("--region-csv", region_csv, "also export the stable region as CSV");
    analyze->add_option("--svg", svg_path, "also export the stable region as SVG");
    analyze->add_option("--seed", seed_flag, "seed override");

    auto* region = app.add_subcommand("region", "export the stable region in delta space");
    region->add_option("config", config_path, "problem configuration (JSON)")->required();
    region->add_option("--csv", region_csv, "CSV output path (default: stdout)");
    region->add_option("--svg", svg_path, "SVG output path");
    region->add_flag("--nominal", nominal_overlay, "overlay the nominal-system boundary (dashed)");
    region->add_option("--seed", seed_flag, "seed override");

    std::string repro_id;
    bool repro_all = false;
    auto* repro = app.add_subcommand("repro", "reproduce the built-in reference examples");
    repro->add_option("id", repro_id, "example id (5.1, 5.2, 5.3.1, 5.3.2, 5.3.3, 5.3.4)");
    repro->add_flag("--all", repro_all, "run every example");
    repro->add_option("--seed", seed_flag, "seed override");

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) {
        AnalysisConfig cfg = load_config_file(config_path);
        std::uint64_t seed = effective_seed(cfg, seed_flag);
        AnalysisResult result = run_analysis(cfg, seed);
        Report report = make_report(cfg, result, seed);
        if (!region_csv.empty() || !svg_path.empty()) {
            emit_region(cfg, {region_csv, svg_path, false});
            if (!region_csv.empty()) report.region_file = region_csv;
        }
        std::string text = report.to_json();
        if (out_path.empty()) {
            std::cout << text;
        } else {
            write_file(out_path, text);
        }
        return kExitOk;
    }

    if (region->parsed()) {
        AnalysisConfig cfg = load_config_file(config_path);
        emit_region(cfg, {region_csv, svg_path, nominal_overlay});
        return kExitOk;
    }

    // repro
    std::vector<std::string> ids;
    if (repro_all) {
        ids = repro_ids();
    } else if (!repro_id.empty()) {
        ids.push_back(repro_id);
    } else {
        std::cerr << "repro: give an example id or --all\n";
        return kExitConfig;
    }
    bool all_pass = true;
    for (const std::string& id : ids) {
        std::uint64_t seed = seed_flag.value_or(1);
        if (const char* env = std::getenv("MIXEDROBUST_SEED"); env != nullptr && !seed_flag) {
            seed = std::strtoull(env, nullptr, 10);
        }
        ReproResult r = run_repro(id, seed);
        for (const ReproCheck& c : r.checks) {
            std::printf("%s %s: %s expected %.6g got %.6g (tol %.2g)\n",
                        c.pass ? "PASS" : "FAIL", r.id.c_str(), c.name.c_str(), c.expected, c.got,
                        c.tolerance);
        }
        for (const std::string& note : r.notes) std::printf("note %s: %s\n", r.id.c_str(), note.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? kExitOk : kExitReproFail;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        if (is_method_error(e)) {
            std::cerr << "method error: " << e.what() << "\n";
            return kExitMethod;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
