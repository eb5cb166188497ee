#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixedrobust/robust.hpp"

namespace mixedrobust {

enum class EstimateMethod { ExactCdf, Geometric, Quadrature, Scenario, DiscreteSum };

std::string to_string(EstimateMethod m);
std::string to_string(Guarantee g);

struct ScenarioCertificate {
    double epsilon = 0.0;
    double theta = 0.0;
    long long samples = 0;
};

/// A probability in [0,1] with its method tag and error certificate.
struct ProbabilityEstimate {
    double value = 0.0;
    EstimateMethod method = EstimateMethod::ExactCdf;
    Guarantee guarantee = Guarantee::Certified;
    bool exact = false;
    std::optional<std::pair<double, double>> bracket;  // region methods
    std::optional<ScenarioCertificate> scenario;       // scenario method
    std::optional<std::vector<double>> worst_q;        // Problem III
};

}  // namespace mixedrobust
