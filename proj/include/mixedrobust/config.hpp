#pragma once

#include <cstdint>
#include <string>

#include "mixedrobust/mixed.hpp"

namespace mixedrobust {

/// Which solver family a config requests.
enum class StrategyKind { Auto, TwoStep, Scenario, Discrete, Bounds, Quantile };

struct MethodConfig {
    StrategyKind kind = StrategyKind::Auto;
    TwoStepOptions two_step;
    ScenarioOptions scenario;
    DeltaOfQOptions delta_of_q;
    BoundsOptions bounds;
    QuantileOptions quantile;
    double quantile_p = 0.5;
    std::optional<std::uint64_t> seed;
};

struct AnalysisConfig {
    ProblemSpec spec;
    MethodConfig method;
    std::string digest;  // FNV-1a 64 of the config bytes, hex
};

/// Parse and validate a problem configuration. Schema violations raise
/// ConfigError with a message naming the offending field.
AnalysisConfig load_config_text(const std::string& json_text);
AnalysisConfig load_config_file(const std::string& path);

struct Report {
    double probability = 0.0;
    std::string method;
    std::string guarantee;
    bool exact = false;
    std::optional<std::pair<double, double>> bracket;
    std::optional<ScenarioCertificate> scenario;
    std::optional<std::vector<double>> worst_q;
    std::optional<std::string> region_file;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;

    /// Deterministic JSON: volatile fields (tool version) are segregated
    /// under "meta" so reports from identical runs are byte-identical.
    std::string to_json() const;
};

struct AnalysisResult {
    ProbabilityEstimate estimate;
    std::vector<std::string> notes;
};

/// Run the solver selected by the config. The seed argument overrides the
/// config-level seed (CLI flag or environment).
AnalysisResult run_analysis(const AnalysisConfig& cfg, std::uint64_t seed);

Report make_report(const AnalysisConfig& cfg, const AnalysisResult& result, std::uint64_t seed);

/// Resolve the effective seed: explicit flag, else config, else
/// MIXEDROBUST_SEED from the environment, else 1.
std::uint64_t effective_seed(const AnalysisConfig& cfg, std::optional<std::uint64_t> flag_seed);

std::string fnv1a_hex(const std::string& bytes);

std::string tool_version();

}  // namespace mixedrobust
