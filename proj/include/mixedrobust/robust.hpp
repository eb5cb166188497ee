#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "mixedrobust/param.hpp"
#include "mixedrobust/poly.hpp"

namespace mixedrobust {

/**
 * (q, delta) -> Polynomial through parsed coefficient expressions,
 * ascending powers. Houses the parameterized characteristic polynomial.
 */
struct CoefficientMap {
    StabilityKind kind = StabilityKind::Hurwitz;
    int n = 0;
    int m = 0;
    std::vector<Expression> coeff_exprs;  // index i multiplies x^i

    CoefficientMap() = default;
    CoefficientMap(StabilityKind kind, int n, int m, std::vector<Expression> coeffs);

    Polynomial evaluate(std::span<const double> q, std::span<const double> delta) const;

    /// Stability with the degree-drop rule: a vanished leading coefficient
    /// counts as unstable.
    bool stable_at(std::span<const double> q, std::span<const double> delta) const;

    /// True when every coefficient passes the structural affinity test in q.
    bool affine_in_q_all() const;

    /// Populated at construction when every coefficient is affine in q.
    std::optional<std::vector<AffineDecomposition>> affine_decomp;
};

struct AutoMethod {};
struct KharitonovMethod {};
struct ZeroExclusionMethod {
    double omega_max = 0.0;  // 0 = derive from the Cauchy root bound
    int omega_points = 1024;
};
struct GridFallbackMethod {
    int resolution = 41;
};
using RobustMethod = std::variant<AutoMethod, KharitonovMethod, ZeroExclusionMethod, GridFallbackMethod>;

enum class Guarantee { Certified, Sampled };

struct IndicatorResult {
    bool robust = false;
    Guarantee guarantee = Guarantee::Certified;
};

/**
 * F(delta): is the polynomial family robustly stable over Q at this delta?
 * Auto picks the strongest applicable certified method (Kharitonov for
 * independent interval structure over a box, zero exclusion for affine
 * maps over convex sets), else the grid fallback. An empty resolved Q is
 * vacuously robust (certified).
 */
IndicatorResult indicator_f(const CoefficientMap& map, const UncertaintySet& q_set,
                            std::span<const double> delta, const RobustMethod& method = AutoMethod{});

/**
 * Hurwitz stability of the whole interval polynomial family via the four
 * Kharitonov corner polynomials. `intervals` are ascending-power
 * coefficient ranges.
 */
bool kharitonov_hurwitz(const std::vector<std::pair<double, double>>& intervals);

/**
 * Value-set zero-exclusion sweep for coefficient maps affine in q over a
 * box or axis ellipsoid (Hurwitz only). Checks stability at the set
 * center, a sign-definite leading coefficient over Q, and origin
 * exclusion of the value set at every frequency on the sweep grid
 * (zonotope for a box image, ellipse for an ellipsoid image). One
 * refinement pass doubles the grid when the sweep passes within 1e-3 of
 * the origin.
 */
bool zero_exclusion_affine(const CoefficientMap& map, const UncertaintySet& q_set,
                           std::span<const double> delta, double omega_max = 0.0,
                           int omega_points = 1024);

/// Coefficient positivity over Q: necessary for robust Hurwitz stability.
bool necessary_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                         std::span<const double> delta);

/// Kharitonov over the componentwise coefficient-range hull: sufficient.
bool sufficient_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                          std::span<const double> delta);

/// Per-coefficient value ranges over Q (exact for affine maps over boxes
/// and axis ellipsoids, grid hull otherwise).
std::vector<std::pair<double, double>> coefficient_ranges(const CoefficientMap& map,
                                                          const UncertaintySet& q_set,
                                                          std::span<const double> delta);

}  // namespace mixedrobust
