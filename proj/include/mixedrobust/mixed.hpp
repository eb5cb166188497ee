#pragma once

#include "mixedrobust/region.hpp"

namespace mixedrobust {

enum class ProblemType { QDelta, QofDelta, DeltaOfQ };

/**
 * One mixed-robustness problem instance: characteristic polynomial map,
 * deterministic set Q (possibly delta-parameterized for Problem II), and
 * the law of delta (possibly q-parameterized for Problem III).
 */
struct ProblemSpec {
    CoefficientMap map;
    UncertaintySet q_set;
    DistributionSpec delta_dist;
    ProblemType problem = ProblemType::QDelta;

    void validate() const;
};

/// N = ceil(ln(2/theta) / (2 epsilon^2)), floored at one sample.
long long chernoff_sample_size(double epsilon, double theta);

struct ScenarioOptions {
    double epsilon = 0.01;
    double theta = 1e-7;
    std::uint64_t seed = 1;
    RobustMethod method = AutoMethod{};
    std::optional<long long> samples_override;
};

/**
 * Scenario estimate of the mixed-robustness probability: draw N samples of
 * delta, evaluate the robust indicator per sample, report the success
 * fraction with the (epsilon, theta, N) certificate. The success count is
 * an order-independent integer reduction, so results are identical for a
 * fixed seed under any parallel schedule.
 */
ProbabilityEstimate scenario_estimate(const ProblemSpec& spec, const ScenarioOptions& opts = {});

struct TwoStepOptions {
    std::vector<double> search_lo, search_hi;  // empty: derived from the support
    double h = 0.0;                            // 1-D scan step; 0 -> span/2000
    double tol = 1e-6;                         // 1-D bisection width
    int resolution = 400;                      // 2-D grid
    int refine_depth = 2;
    RobustMethod method = AutoMethod{};
};

enum class SolveStrategy { Auto, TwoStep, Scenario };

struct SolveOptions {
    SolveStrategy strategy = SolveStrategy::Auto;
    TwoStepOptions two_step;
    ScenarioOptions scenario;
};

/// Problem I. TwoStep = D-partition in delta space, then measure.
ProbabilityEstimate solve_q_delta(const ProblemSpec& spec, const SolveOptions& opts = {});

/// Problem II. Identical pipeline with Q(delta) resolved per delta.
ProbabilityEstimate solve_q_of_delta(const ProblemSpec& spec, const SolveOptions& opts = {});

struct DeltaOfQOptions {
    int q_resolution = 41;
    int refine = 2;
    TwoStepOptions inner;
};

/**
 * Problem III: evaluate p(q) on a grid over Q (vertices included), refine
 * locally around the incumbent minimum, and report min p with its argmin.
 * The result is an upper bound on the true infimum at the disclosed grid
 * resolution.
 */
ProbabilityEstimate solve_delta_of_q(const ProblemSpec& spec, const DeltaOfQOptions& opts = {});

/// p(q) for one fixed deterministic point (the curve Problem III minimizes).
ProbabilityEstimate delta_of_q_pointwise(const ProblemSpec& spec, std::span<const double> q,
                                         const TwoStepOptions& inner = {});

/**
 * Exact solutions for finite supports: the weighted indicator sum for
 * Problems I/II with discrete delta, and the min-over-q form for Problem
 * III with discrete Q and discrete delta laws.
 */
ProbabilityEstimate solve_discrete(const ProblemSpec& spec,
                                   const RobustMethod& method = AutoMethod{});

struct BoundsOptions {
    double truncation_mass = 1.0 - 1e-9;  // central quantile for unbounded supports
    int delta_grid = 1025;                // range-analysis grid per delta axis
    SolveOptions inner;
};

/**
 * Problem II bracketed by two Problem I instances: the interval hull of
 * the union of Q(delta) gives the lower estimate, the intersection gives
 * the upper one; an empty intersection is vacuously robust (upper = 1).
 */
std::pair<ProbabilityEstimate, ProbabilityEstimate> bounds_q_of_delta(
    const ProblemSpec& spec, const BoundsOptions& opts = {});

struct QuantileOptions {
    int delta_grid = 129;   // union-hull grid per delta axis (Problem II)
    int q_resolution = 33;  // validity grid over Q (Problem III)
};

struct QuantileCertificate {
    bool certified = false;  // true certifies p* >= p
    Guarantee guarantee = Guarantee::Certified;
    std::vector<std::pair<double, double>> quantile_box;
};

/**
 * Robust stability over the quantile box Q_p (central interval per axis at
 * level p^(1/m)) treated as a second deterministic block; success
 * certifies p* >= p.
 */
QuantileCertificate quantile_lower_bound(const ProblemSpec& spec, double p,
                                         const QuantileOptions& opts = {});

}  // namespace mixedrobust
