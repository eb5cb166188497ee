#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mixedrobust/config.hpp"
#include "mixedrobust/repro.hpp"

namespace py = pybind11;
using namespace mixedrobust;

namespace {

Polynomial make_poly(const std::vector<double>& ascending) { return Polynomial(ascending); }

std::string analyze_config(const std::string& json_text, std::optional<std::uint64_t> seed) {
    AnalysisConfig cfg = load_config_text(json_text);
    std::uint64_t s = effective_seed(cfg, seed);
    AnalysisResult result = run_analysis(cfg, s);
    return make_report(cfg, result, s).to_json();
}

}  // namespace

PYBIND11_MODULE(_mixedrobust, m) {
    m.doc() = "mixed deterministic/random parametric robust stability analysis";

    m.def("roots", [](const std::vector<double>& c) { return roots(make_poly(c)); },
          py::arg("coeffs_ascending"),
          "All roots (with multiplicity) of the polynomial given by ascending coefficients.");
    m.def("is_hurwitz", [](const std::vector<double>& c) { return is_hurwitz(make_poly(c)); },
          py::arg("coeffs_ascending"));
    m.def("is_schur", [](const std::vector<double>& c) { return is_schur(make_poly(c)); },
          py::arg("coeffs_ascending"));
    m.def("stability_margin",
          [](const std::vector<double>& c, const std::string& kind) {
              StabilityKind k = kind == "schur" ? StabilityKind::Schur : StabilityKind::Hurwitz;
              return stability_margin(make_poly(c), k);
          },
          py::arg("coeffs_ascending"), py::arg("kind") = "hurwitz");
    m.def("chernoff_sample_size", &chernoff_sample_size, py::arg("epsilon"), py::arg("theta"));
    m.def("analyze", &analyze_config, py::arg("config_json"), py::arg("seed") = std::nullopt,
          "Run the solver for a JSON problem configuration; returns the report as JSON text.");
    m.def("example_config", &repro_config_json, py::arg("example_id"),
          "Built-in configuration JSON for one of the reference examples.");
    m.def("kharitonov_hurwitz", &kharitonov_hurwitz, py::arg("intervals"),
          "Robust Hurwitz stability of an interval polynomial family (ascending coefficient "
          "ranges).");

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<Error>(m, "MixedRobustError");
}
