#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mixedrobust/repro.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = MIXEDROBUST_CLI_PATH;

struct RunOutput {
    int exit_code;
    std::string stdout_text;
    std::string stderr_text;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunOutput run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    fs::path out = fs::temp_directory_path() / ("mr_cli_out_" + std::to_string(counter));
    fs::path err = fs::temp_directory_path() / ("mr_cli_err_" + std::to_string(counter));
    ++counter;
    std::string cmd =
        env_prefix + kCli + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    RunOutput result{WEXITSTATUS(status), slurp(out), slurp(err)};
    fs::remove(out);
    fs::remove(err);
    return result;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("analyze produces a valid report") {
    fs::path cfg = write_config("mr_531.json", mixedrobust::repro_config_json("5.3.1"));
    RunOutput r = run_cli("analyze " + cfg.string());
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.stdout_text);
    CHECK(std::abs(rep.at("probability").get<double>() - 1.0 / 3.0) < 1e-9);
    CHECK(rep.at("method") == "exact_cdf");
    CHECK(rep.at("guarantee").is_string());
    CHECK(rep.at("config_digest").get<std::string>().size() == 16);
    CHECK(rep.contains("seed"));
    CHECK(rep.at("meta").contains("tool_version"));
}

TEST_CASE("schema violations exit with code 2 and cite the expression") {
    fs::path cfg = write_config("mr_bad.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 2, "m": 1},
      "polynomial": ["1", "q3 + d1", "2"],
      "q_set": {"type": "box", "lo": [0, 0], "hi": [1, 1]},
      "delta_dist": {"marginals": [{"type": "uniform", "lo": 0, "hi": 1}]},
      "problem": "q_delta"
    })json");
    RunOutput r = run_cli("analyze " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.find("q3") != std::string::npos);
    CHECK(r.stderr_text.find("byte 0") != std::string::npos);

    RunOutput missing = run_cli("analyze /nonexistent/config.json");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("dimension-too-high requests exit with code 3") {
    fs::path cfg = write_config("mr_m3.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 0, "m": 3},
      "polynomial": ["1", "d1 + d2 + d3 + 4"],
      "q_set": {"type": "box", "lo": [], "hi": []},
      "delta_dist": {"marginals": [
        {"type": "uniform", "lo": 0, "hi": 1},
        {"type": "uniform", "lo": 0, "hi": 1},
        {"type": "uniform", "lo": 0, "hi": 1}]},
      "problem": "q_delta",
      "method": {"strategy": "two_step"}
    })json");
    RunOutput r = run_cli("analyze " + cfg.string());
    CHECK(r.exit_code == 3);
}

TEST_CASE("fixed seed gives byte-identical reports") {
    std::string scenario_cfg = R"json({
      "stability": "hurwitz",
      "dims": {"n": 1, "m": 1},
      "polynomial": ["1", "2 - abs(q1 - d1)", "2", "3"],
      "q_set": {"type": "box", "lo": [1.0], "hi": [1.5]},
      "delta_dist": {"marginals": [{"type": "uniform", "lo": 0.25, "hi": 1.75}]},
      "problem": "q_delta",
      "method": {"strategy": "scenario", "epsilon": 0.05, "theta": 0.01, "samples": 4000}
    })json";
    fs::path cfg = write_config("mr_seeded.json", scenario_cfg);
    RunOutput a = run_cli("analyze " + cfg.string() + " --seed 77");
    RunOutput b = run_cli("analyze " + cfg.string() + " --seed 77");
    REQUIRE(a.exit_code == 0);
    CHECK(a.stdout_text == b.stdout_text);
    json rep = json::parse(a.stdout_text);
    CHECK(rep.at("seed") == 77);
    CHECK(rep.at("scenario").at("samples") == 4000);
}

TEST_CASE("environment seed is honored") {
    fs::path cfg = write_config("mr_env.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 1, "m": 1},
      "polynomial": ["1", "2 - abs(q1 - d1)", "2", "3"],
      "q_set": {"type": "box", "lo": [1.0], "hi": [1.5]},
      "delta_dist": {"marginals": [{"type": "uniform", "lo": 0.25, "hi": 1.75}]},
      "problem": "q_delta",
      "method": {"strategy": "scenario", "epsilon": 0.2, "theta": 0.1, "samples": 100}
    })json");
    RunOutput r = run_cli("analyze " + cfg.string(), "MIXEDROBUST_SEED=31415 ");
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.stdout_text);
    CHECK(rep.at("seed") == 31415);
}

TEST_CASE("region export for a 1-D problem") {
    fs::path cfg = write_config("mr_region1d.json", mixedrobust::repro_config_json("5.3.1"));
    RunOutput r = run_cli("region " + cfg.string());
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.stdout_text);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "interval_id,a,b");
    double a = 0, b = 0;
    REQUIRE(std::sscanf(row.c_str(), "0,%lf,%lf", &a, &b) == 2);
    CHECK(std::abs(a - 1.0) < 1e-6);
    CHECK(std::abs(b - 1.5) < 1e-6);
}

TEST_CASE("region export of an always-unstable config is empty but succeeds") {
    fs::path cfg = write_config("mr_unstable.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 0, "m": 1},
      "polynomial": ["1", "0*d1 - 1", "2"],
      "q_set": {"type": "box", "lo": [], "hi": []},
      "delta_dist": {"marginals": [{"type": "uniform", "lo": 0, "hi": 1}]},
      "problem": "q_delta",
      "method": {"strategy": "two_step", "search": [0, 1]}
    })json");
    RunOutput r = run_cli("region " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text == "interval_id,a,b\n");
}

TEST_CASE("svg export renders") {
    fs::path cfg = write_config("mr_svg.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 0, "m": 2},
      "polynomial": ["1 - d1*d1 - d2*d2", "1"],
      "q_set": {"type": "box", "lo": [], "hi": []},
      "delta_dist": {"marginals": [
        {"type": "uniform", "lo": -1.2, "hi": 1.2},
        {"type": "uniform", "lo": -1.2, "hi": 1.2}]},
      "problem": "q_delta",
      "method": {"strategy": "two_step", "resolution": 48, "refine_depth": 1}
    })json");
    fs::path svg = fs::temp_directory_path() / "mr_disk.svg";
    fs::path csv = fs::temp_directory_path() / "mr_disk.csv";
    RunOutput r =
        run_cli("region " + cfg.string() + " --csv " + csv.string() + " --svg " + svg.string());
    REQUIRE(r.exit_code == 0);
    std::string svg_text = slurp(svg);
    CHECK(svg_text.rfind("<svg", 0) == 0);
    CHECK(svg_text.find("</svg>") != std::string::npos);
    CHECK(svg_text.find("robust stable set") != std::string::npos);
    CHECK(slurp(csv).rfind("polygon_id,vertex_index,delta1,delta2", 0) == 0);
    fs::remove(svg);
    fs::remove(csv);
}

TEST_CASE("analyze can attach a region file to the report") {
    fs::path cfg = write_config("mr_attach.json", mixedrobust::repro_config_json("5.3.1"));
    fs::path csv = fs::temp_directory_path() / "mr_attach.csv";
    fs::path out = fs::temp_directory_path() / "mr_attach_report.json";
    RunOutput r = run_cli("analyze " + cfg.string() + " --region-csv " + csv.string() + " --out " +
                          out.string());
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(slurp(out));
    CHECK(rep.at("region_file") == csv.string());
    CHECK(slurp(csv).rfind("interval_id,a,b", 0) == 0);
    fs::remove(csv);
    fs::remove(out);
}

TEST_CASE("repro subcommand runs the reference examples") {
    RunOutput r = run_cli("repro 5.3.1");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("PASS 5.3.1") != std::string::npos);
    CHECK(r.stdout_text.find("FAIL") == std::string::npos);

    RunOutput bad = run_cli("repro nosuch");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("csv region round-trips the geometric measure") {
    fs::path cfg = write_config("mr_52_small.json", R"json({
      "stability": "hurwitz",
      "dims": {"n": 2, "m": 2},
      "polynomial": ["0.7 + q1", "5.5 + q2 + d1", "-1 - 15*d1 + d2", "-15*d2"],
      "q_set": {"type": "axis_ellipsoid", "weights": [100, 25], "center": [0, 0], "bound": 9},
      "delta_dist": {"marginals": [
        {"type": "uniform", "lo": -4, "hi": -2},
        {"type": "uniform", "lo": -7, "hi": -2}]},
      "problem": "q_delta",
      "method": {"strategy": "two_step", "resolution": 200, "refine_depth": 1}
    })json");
    fs::path csv = fs::temp_directory_path() / "mr_52.csv";
    fs::path svg = fs::temp_directory_path() / "mr_52.svg";
    RunOutput r = run_cli("region " + cfg.string() + " --csv " + csv.string() + " --svg " +
                          svg.string() + " --nominal");
    REQUIRE(r.exit_code == 0);

    // Shoelace over the exported polygons (holes come out negative).
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);  // header
    std::map<int, std::vector<std::array<double, 2>>> polys;
    while (std::getline(in, line)) {
        int pid, vid;
        double d1, d2;
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &pid, &vid, &d1, &d2) == 4);
        polys[pid].push_back({d1, d2});
    }
    double area = 0.0;
    for (const auto& [pid, poly] : polys) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const auto& p = poly[i];
            const auto& n = poly[(i + 1) % poly.size()];
            area += 0.5 * (p[0] * n[1] - n[0] * p[1]);
        }
    }
    double ratio = area / 10.0;  // support rectangle area 2 x 5
    CHECK(std::abs(ratio - 0.68901) <= 5e-3);

    std::string svg_text = slurp(svg);
    CHECK(svg_text.find("nominal boundary") != std::string::npos);
    CHECK(svg_text.find("stroke-dasharray") != std::string::npos);
    fs::remove(csv);
    fs::remove(svg);
}
