#include "mixedrobust/estimate.hpp"

namespace mixedrobust {

std::string to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::ExactCdf: return "exact_cdf";
        case EstimateMethod::Geometric: return "geometric";
        case EstimateMethod::Quadrature: return "quadrature";
        case EstimateMethod::Scenario: return "scenario";
        case EstimateMethod::DiscreteSum: return "discrete_sum";
    }
    return "unknown";
}

std::string to_string(Guarantee g) {
    return g == Guarantee::Certified ? "certified" : "sampled";
}

}  // namespace mixedrobust
