#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mixedrobust/expr.hpp"

namespace mixedrobust {

// ---------------------------------------------------------------------------
// Deterministic uncertainty sets Q
// ---------------------------------------------------------------------------

struct Box {
    std::vector<double> lo, hi;
};

/// sum_i weights[i] * (q_i - center[i])^2 <= bound
struct AxisEllipsoid {
    std::vector<double> weights;
    std::vector<double> center;
    double bound = 1.0;
};

struct DiscreteSet {
    std::vector<std::vector<double>> points;
};

/// Box whose endpoints are expressions over d (Problem II). The set is
/// empty at a given delta when lo(delta) > hi(delta) on some axis.
struct ParamBox {
    std::vector<Expression> lo, hi;
};

/// Finite point set whose coordinates are expressions over d; covers the
/// discrete Q(Delta) dependence that a box cannot express.
struct ParamDiscrete {
    std::vector<std::vector<Expression>> points;
};

using UncertaintySet = std::variant<Box, AxisEllipsoid, DiscreteSet, ParamBox, ParamDiscrete>;

int q_dimension(const UncertaintySet& set);
void validate(const UncertaintySet& set);
bool is_parameterized(const UncertaintySet& set);

/// Resolve a delta-parameterized set at a concrete delta. nullopt means the
/// set is empty there. Non-parameterized sets pass through unchanged.
std::optional<UncertaintySet> resolve_set(const UncertaintySet& set, std::span<const double> delta);

bool membership(const UncertaintySet& set, std::span<const double> q,
                std::span<const double> delta = {});

/**
 * Probe points covering the set. Discrete variants return their points.
 * Box: tensor grid of `resolution` points per axis including endpoints.
 * AxisEllipsoid: grid over the bounding box filtered by membership, plus
 * `resolution` boundary points per principal arc (2-D), or the axis
 * extreme points in other dimensions.
 */
std::vector<std::vector<double>> enumerate_q(const UncertaintySet& set, int resolution,
                                             std::span<const double> delta = {});

// ---------------------------------------------------------------------------
// Random-parameter distributions
// ---------------------------------------------------------------------------

/// Scalar distribution parameter: a constant, or an expression over q
/// (Problem III's q-parameterized laws).
using Param = std::variant<double, Expression>;

struct UniformDist {
    Param lo, hi;
};
struct NormalDist {
    Param mean, stddev;
};
struct LaplaceDist {
    Param location, scale;
};
struct DiscretePMF {
    std::vector<Param> values;
    std::vector<Param> probs;
};

using Marginal = std::variant<UniformDist, NormalDist, LaplaceDist, DiscretePMF>;

/// Independent marginals, one per delta component.
struct DistributionSpec {
    std::vector<Marginal> marginals;

    int dimension() const { return static_cast<int>(marginals.size()); }
    bool depends_on_q() const;
};

// Resolved (all-numeric) marginals, validated at resolution time.
struct RUniform {
    double lo, hi;
};
struct RNormal {
    double mean, stddev;
};
struct RLaplace {
    double location, scale;
};
struct RDiscrete {
    std::vector<double> values;
    std::vector<double> probs;
};
using ResolvedMarginal = std::variant<RUniform, RNormal, RLaplace, RDiscrete>;

ResolvedMarginal resolve_marginal(const Marginal& m, std::span<const double> q = {});
std::vector<ResolvedMarginal> resolve_distribution(const DistributionSpec& dist,
                                                   std::span<const double> q = {});

/// Exact closed-form CDF. Discrete marginals are right-continuous steps.
double cdf_scalar(const ResolvedMarginal& m, double x);

/// Inverse CDF for u in (0,1); the sampling primitive.
double quantile_scalar(const ResolvedMarginal& m, double u);

/// Central interval holding at least `mass` probability; used for support
/// truncation and quantile sets. Bounded supports are returned exactly.
std::pair<double, double> central_interval(const ResolvedMarginal& m, double mass);

bool is_discrete(const ResolvedMarginal& m);

/**
 * `count` draws of the delta vector. Sample i is a pure function of
 * (seed, i), so any parallel partition of the index range produces the
 * identical stream. q must be supplied iff some parameter is a
 * q-expression.
 */
std::vector<std::vector<double>> sample(const DistributionSpec& dist, std::span<const double> q,
                                        std::uint64_t seed, std::size_t count);

/// Single uniform draw in (0,1), pure in (seed, index, component).
double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t component);

}  // namespace mixedrobust
