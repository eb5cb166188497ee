#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>

#include "mixedrobust/estimate.hpp"

namespace mixedrobust {

/**
 * Delta_stab in one dimension: sorted disjoint intervals, half-open (a, b]
 * by convention (irrelevant for continuous laws, honored for discrete
 * ones). Ends may be infinite.
 */
struct IntervalUnion {
    struct Interval {
        double a, b;
    };
    std::vector<Interval> intervals;
    Guarantee guarantee = Guarantee::Certified;
    double scan_step = 0.0;  // reported: features narrower than this can be missed

    bool contains(double x) const;
};

/**
 * Delta_stab in two dimensions. Committed leaf cells carry the certified
 * area bracket; polygons come from marching squares over the refined
 * classification and exist for export and area computation.
 */
struct PolygonRegion {
    struct Cell {
        std::array<double, 2> lo, hi;
        bool inside;  // committed inside; false = unresolved boundary cell
    };

    std::vector<std::vector<std::array<double, 2>>> polygons;  // CCW outer, CW holes
    std::vector<Cell> cells;
    std::array<double, 2> bounds_lo{}, bounds_hi{};
    double inside_area_fraction = 0.0;
    double boundary_area_fraction = 0.0;
    int resolution = 0;
    int refine_depth = 0;
    Guarantee guarantee = Guarantee::Certified;
};

/// F(delta) together with the guarantee of the method that produced it.
using RobustIndicator = std::function<IndicatorResult(std::span<const double>)>;

/// Indicator bound to a coefficient map and q set via indicator_f.
RobustIndicator make_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                               const RobustMethod& method = AutoMethod{});

/**
 * One-dimensional robust D-partition: scan F on the grid lo, lo+h, ..., hi,
 * bracket each flip by bisection to width <= tol, and assemble the
 * intervals where F holds. Correct relative to the assumption that F has
 * no feature narrower than h.
 */
IntervalUnion stability_intervals_1d(const RobustIndicator& indicator, double lo, double hi,
                                     double h, double tol);
IntervalUnion stability_intervals_1d(const CoefficientMap& map, const UncertaintySet& q_set,
                                     double lo, double hi, double h = 0.0, double tol = 1e-6,
                                     const RobustMethod& method = AutoMethod{});

/**
 * Two-dimensional robust D-partition over the bounds rectangle: classify an
 * RxR cell grid (cells whose four corners and center agree are committed),
 * subdivide disagreeing cells up to refine_depth, then run marching squares
 * over the refined classification.
 */
PolygonRegion stability_region_2d(const RobustIndicator& indicator,
                                  std::array<double, 2> bounds_lo, std::array<double, 2> bounds_hi,
                                  int resolution = 400, int refine_depth = 2);
PolygonRegion stability_region_2d(const CoefficientMap& map, const UncertaintySet& q_set,
                                  std::array<double, 2> bounds_lo, std::array<double, 2> bounds_hi,
                                  int resolution = 400, int refine_depth = 2,
                                  const RobustMethod& method = AutoMethod{});

/**
 * Probability measure of the region under the distribution: exact CDF sums
 * for interval unions; per-cell product-marginal mass with a certified
 * [inside, inside+boundary] bracket for polygon regions. Mass outside the
 * classification bounds counts toward the bracket width.
 */
ProbabilityEstimate measure(const IntervalUnion& region, const DistributionSpec& dist,
                            std::span<const double> q = {});
ProbabilityEstimate measure(const PolygonRegion& region, const DistributionSpec& dist,
                            std::span<const double> q = {});

/// Shoelace area; positive for counterclockwise orientation.
double polygon_area(const std::vector<std::array<double, 2>>& polygon);

void write_intervals_csv(std::ostream& os, const IntervalUnion& region);
void write_polygons_csv(std::ostream& os, const PolygonRegion& region);
void write_region_svg(std::ostream& os, const PolygonRegion& region,
                      const PolygonRegion* nominal = nullptr);
void write_intervals_svg(std::ostream& os, const IntervalUnion& region, double lo, double hi);

}  // namespace mixedrobust
