#include "mixedrobust/robust.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

namespace mixedrobust {

namespace {

using Complex = std::complex<double>;

// Numeric affine decomposition of every coefficient at a fixed delta:
// coeff_j(q, delta) = c[j] + sum_i L[j][i] * q_i.
struct NumericAffine {
    std::vector<double> c;
    std::vector<std::vector<double>> L;
};

NumericAffine numeric_affine(const CoefficientMap& map, std::span<const double> delta) {
    NumericAffine out;
    const auto& decomp = *map.affine_decomp;
    std::vector<double> zeros(static_cast<std::size_t>(map.n), 0.0);
    for (const AffineDecomposition& a : decomp) {
        out.c.push_back(a.constant.evaluate(zeros, delta));
        std::vector<double> row;
        row.reserve(a.q_coeffs.size());
        for (const Expression& e : a.q_coeffs) row.push_back(e.evaluate(zeros, delta));
        out.L.push_back(std::move(row));
    }
    return out;
}

std::vector<double> set_center(const UncertaintySet& q_set) {
    if (const auto* box = std::get_if<Box>(&q_set)) {
        std::vector<double> c(box->lo.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (box->lo[i] + box->hi[i]);
        return c;
    }
    return std::get<AxisEllipsoid>(q_set).center;
}

// Exact range of an affine function c + sum L_i q_i over a box or axis ellipsoid.
std::pair<double, double> affine_range(double c, std::span<const double> L,
                                       const UncertaintySet& q_set) {
    if (const auto* box = std::get_if<Box>(&q_set)) {
        double mid = c, rad = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i) {
            mid += L[i] * 0.5 * (box->lo[i] + box->hi[i]);
            rad += std::abs(L[i]) * 0.5 * (box->hi[i] - box->lo[i]);
        }
        return {mid - rad, mid + rad};
    }
    const auto& ell = std::get<AxisEllipsoid>(q_set);
    double mid = c, acc = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        mid += L[i] * ell.center[i];
        acc += L[i] * L[i] / ell.weights[i];
    }
    double rad = std::sqrt(ell.bound * acc);
    return {mid - rad, mid + rad};
}

// Separation of the origin from the zonotope center + sum_i [-1,1] g_i.
// Positive means excluded; the magnitude is a lower bound on the distance.
// The facet normals of a planar zonotope are the generators' perpendiculars,
// so testing those axes is exact for full-rank sets; the generator
// directions themselves are added so rank-one (segment) sets are decided
// too. Every axis test is sound: the support radius along any axis is the
// sum of the projected generator lengths.
double zonotope_separation(Complex center, const std::vector<Complex>& gens) {
    double scale = std::abs(center);
    for (const Complex& g : gens) scale = std::max(scale, std::abs(g));
    if (scale <= 0.0) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    bool any_axis = false;
    auto test_axis = [&](double ax, double ay) {
        double proj = std::abs(ax * center.real() + ay * center.imag());
        double radius = 0.0;
        for (const Complex& h : gens) radius += std::abs(ax * h.real() + ay * h.imag());
        best = std::max(best, proj - radius);
    };
    for (const Complex& g : gens) {
        double glen = std::abs(g);
        if (glen <= 1e-14 * scale) continue;
        any_axis = true;
        test_axis(-g.imag() / glen, g.real() / glen);
        test_axis(g.real() / glen, g.imag() / glen);
    }
    if (!any_axis) return std::abs(center);  // value set degenerates to a point
    return best;
}

// Separation of the origin from the ellipse {center + M u : |u| <= 1} with
// M given by columns. Positive means excluded.
double ellipse_separation(Complex center, const std::vector<Complex>& cols) {
    double g00 = 0.0, g01 = 0.0, g11 = 0.0;
    for (const Complex& c : cols) {
        g00 += c.real() * c.real();
        g01 += c.real() * c.imag();
        g11 += c.imag() * c.imag();
    }
    double norm_c = std::abs(center);
    double scale = std::max({g00, g11, norm_c * norm_c, 1e-300});

    // Eigen-decomposition of the 2x2 Gram matrix.
    double tr = g00 + g11, det = g00 * g11 - g01 * g01;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    double l1 = tr / 2.0 + disc, l2 = tr / 2.0 - disc;
    double v1x, v1y;
    if (std::abs(g01) > 1e-300) {
        v1x = l1 - g11;
        v1y = g01;
    } else if (g00 >= g11) {
        v1x = 1.0;
        v1y = 0.0;
    } else {
        v1x = 0.0;
        v1y = 1.0;
    }
    double v1n = std::hypot(v1x, v1y);
    v1x /= v1n;
    v1y /= v1n;
    double v2x = -v1y, v2y = v1x;

    double p1 = v1x * center.real() + v1y * center.imag();
    double p2 = v2x * center.real() + v2y * center.imag();
    double lambda_tol = 1e-14 * scale;
    double z_tol = 1e-14 * std::sqrt(scale);

    double rho2 = 0.0;
    bool outside_span = false;
    for (auto [lam, proj] : {std::pair{l1, p1}, std::pair{l2, p2}}) {
        if (lam <= lambda_tol) {
            if (std::abs(proj) > z_tol) outside_span = true;
        } else {
            rho2 += proj * proj / lam;
        }
    }
    if (outside_span) {
        // Off the affine span: the span-normal projection bounds the distance.
        return l1 <= lambda_tol ? norm_c : std::abs(p2);
    }
    double rho = std::sqrt(rho2);
    double sigma_min = std::sqrt(std::max(l2, 0.0));
    // The affine map stretches distances by at least sigma_min, so the
    // preimage gap (rho - 1) scales into a certified Euclidean bound;
    // negative when the origin is inside.
    double sep = (rho - 1.0) * sigma_min;
    if (rho <= 1.0) return sep;
    if (norm_c > 0.0) {
        double ux = center.real() / norm_c, uy = center.imag() / norm_c;
        double support =
            std::sqrt(std::max(0.0, ux * ux * g00 + 2 * ux * uy * g01 + uy * uy * g11));
        sep = std::max(sep, norm_c - support);
    }
    return sep;
}

struct SweepResult {
    bool excluded;
    double min_separation;
};

// One frequency slice of the sweep: the value-set center and generators.
struct ValueSlice {
    Complex c;
    std::vector<Complex> gens;
};

// Support radius of the value set along a unit axis: generators add up for
// a box image (zonotope), in quadrature for an ellipsoid image (ellipse).
double support_radius(const ValueSlice& vs, bool ellipse, double ax, double ay) {
    double acc = 0.0;
    for (const Complex& g : vs.gens) {
        double p = ax * g.real() + ay * g.imag();
        acc += ellipse ? p * p : std::abs(p);
    }
    return ellipse ? std::sqrt(acc) : acc;
}

// Principal direction and rank information of the generator set.
struct SliceShape {
    double l1 = 0.0, l2 = 0.0;  // Gram eigenvalues, l1 >= l2 >= 0
    double tx = 1.0, ty = 0.0;  // principal direction
};

SliceShape slice_shape(const ValueSlice& vs) {
    double g00 = 0.0, g01 = 0.0, g11 = 0.0;
    for (const Complex& g : vs.gens) {
        g00 += g.real() * g.real();
        g01 += g.real() * g.imag();
        g11 += g.imag() * g.imag();
    }
    SliceShape out;
    double tr = g00 + g11, det = g00 * g11 - g01 * g01;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    out.l1 = tr / 2.0 + disc;
    out.l2 = std::max(0.0, tr / 2.0 - disc);
    if (std::abs(g01) > 1e-300) {
        out.tx = out.l1 - g11;
        out.ty = g01;
    } else if (g00 >= g11) {
        out.tx = 1.0;
        out.ty = 0.0;
    } else {
        out.tx = 0.0;
        out.ty = 1.0;
    }
    double n = std::hypot(out.tx, out.ty);
    if (n > 0.0) {
        out.tx /= n;
        out.ty /= n;
    }
    return out;
}

// Lower bound on the origin distance of one slice; nonpositive when the
// origin lies in (or cannot be separated from) the value set.
double slice_separation(const ValueSlice& vs, bool ellipse) {
    SliceShape shape = slice_shape(vs);
    double scale2 = std::max({shape.l1, std::norm(vs.c), 1e-300});
    if (shape.l2 > 1e-14 * scale2) {
        return ellipse ? ellipse_separation(vs.c, vs.gens) : zonotope_separation(vs.c, vs.gens);
    }
    // Rank-deficient slice: a segment (or point). The distance to its
    // supporting line and the overshoot along it both bound the distance.
    double along = std::abs(shape.tx * vs.c.real() + shape.ty * vs.c.imag());
    double offset = std::abs(shape.tx * vs.c.imag() - shape.ty * vs.c.real());
    double radius = support_radius(vs, ellipse, shape.tx, shape.ty);
    return std::max(offset, along - radius);
}

/**
 * Certified origin-exclusion sweep over [0, omega_max]. The base grid has
 * `points` nodes; every gap is then cleared by the derivative-bound
 * certificate sep > B * gap/2 at both ends, where B bounds |dP/d omega|
 * over Q and the gap, and gaps that fail are split recursively. Thin
 * crossings (the value set touching the origin on a frequency window far
 * narrower than the grid) are therefore caught instead of sampled over;
 * gaps that shrink below the floor without a verdict count as crossings,
 * so tangencies resolve conservatively to "not excluded".
 */
SweepResult sweep_value_sets(const NumericAffine& na, const UncertaintySet& q_set,
                             const std::vector<double>& center, double omega_max, int points,
                             const std::vector<std::pair<double, double>>& ranges) {
    std::size_t count = na.c.size();
    std::size_t nq = center.size();
    const auto* box = std::get_if<Box>(&q_set);
    const auto* ell = std::get_if<AxisEllipsoid>(&q_set);
    bool ellipse = ell != nullptr;

    std::vector<double> half(nq);
    if (box) {
        for (std::size_t i = 0; i < nq; ++i) half[i] = 0.5 * (box->hi[i] - box->lo[i]);
    } else {
        for (std::size_t i = 0; i < nq; ++i) half[i] = std::sqrt(ell->bound / ell->weights[i]);
    }
    std::vector<double> centered(count);
    for (std::size_t j = 0; j < count; ++j) {
        centered[j] = na.c[j];
        for (std::size_t i = 0; i < nq; ++i) centered[j] += na.L[j][i] * center[i];
    }

    auto eval_at = [&](double omega) {
        ValueSlice vs;
        vs.gens.resize(nq);
        Complex s(0.0, omega);
        Complex z0 = 0.0;
        for (std::size_t j = count; j-- > 0;) z0 = z0 * s + centered[j];
        vs.c = z0;
        for (std::size_t i = 0; i < nq; ++i) {
            Complex v = 0.0;
            for (std::size_t j = count; j-- > 0;) v = v * s + na.L[j][i];
            vs.gens[i] = v * half[i];
        }
        return vs;
    };

    // |a_j| over Q, for the frequency-derivative bound.
    std::vector<double> coeff_mag(count);
    for (std::size_t j = 0; j < count; ++j) {
        coeff_mag[j] = std::max(std::abs(ranges[j].first), std::abs(ranges[j].second));
    }
    auto deriv_bound = [&](double omega_hi) {
        double acc = 0.0;
        double pw = 1.0;
        for (std::size_t j = 1; j < count; ++j) {
            acc += static_cast<double>(j) * coeff_mag[j] * pw;
            pw *= omega_hi;
        }
        return acc;
    };

    double min_sep = std::numeric_limits<double>::infinity();
    double floor_w = 1e-13 * std::max(1.0, omega_max);

    // Certify [a, b] given separations at the endpoints.
    std::function<bool(double, double, double, double)> clear_gap =
        [&](double a, double b, double sep_a, double sep_b) -> bool {
        if (sep_a <= 0.0 || sep_b <= 0.0) return false;
        double w = b - a;
        double bound = deriv_bound(b) * 0.5 * w;
        if (sep_a > bound && sep_b > bound) return true;
        if (w < floor_w) return false;  // unresolved tangency: count as a crossing
        double mid = 0.5 * (a + b);
        double sep_m = slice_separation(eval_at(mid), ellipse);
        min_sep = std::min(min_sep, sep_m);
        return clear_gap(a, mid, sep_a, sep_m) && clear_gap(mid, b, sep_m, sep_b);
    };

    std::vector<double> seps(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        double omega = omega_max * static_cast<double>(k) / (points - 1);
        seps[static_cast<std::size_t>(k)] = slice_separation(eval_at(omega), ellipse);
        if (seps[static_cast<std::size_t>(k)] <= 0.0) return {false, 0.0};
        min_sep = std::min(min_sep, seps[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k + 1 < points; ++k) {
        double a = omega_max * static_cast<double>(k) / (points - 1);
        double b = omega_max * static_cast<double>(k + 1) / (points - 1);
        if (!clear_gap(a, b, seps[static_cast<std::size_t>(k)],
                       seps[static_cast<std::size_t>(k + 1)])) {
            return {false, 0.0};
        }
    }
    return {true, min_sep};
}

bool grid_fallback(const CoefficientMap& map, const UncertaintySet& q_set,
                   std::span<const double> delta, int resolution) {
    if (resolution < 2) throw InvalidParamsError("grid fallback resolution must be >= 2");
    for (const auto& q : enumerate_q(q_set, resolution)) {
        if (!map.stable_at(q, delta)) return false;
    }
    return true;
}

// Each q variable feeding at most one coefficient makes the coefficient
// intervals vary independently, which is Kharitonov's hypothesis.
bool independent_interval_structure(const NumericAffine& na) {
    if (na.L.empty()) return true;
    std::size_t nq = na.L.front().size();
    for (std::size_t i = 0; i < nq; ++i) {
        int used_by = 0;
        for (std::size_t j = 0; j < na.L.size(); ++j) {
            if (na.L[j][i] != 0.0) ++used_by;
        }
        if (used_by > 1) return false;
    }
    return true;
}

std::vector<std::pair<double, double>> ranges_from_affine(const NumericAffine& na,
                                                          const UncertaintySet& q_set) {
    std::vector<std::pair<double, double>> out;
    out.reserve(na.c.size());
    for (std::size_t j = 0; j < na.c.size(); ++j) out.push_back(affine_range(na.c[j], na.L[j], q_set));
    return out;
}

}  // namespace

CoefficientMap::CoefficientMap(StabilityKind kind, int n, int m, std::vector<Expression> coeffs)
    : kind(kind), n(n), m(m), coeff_exprs(std::move(coeffs)) {
    if (coeff_exprs.size() < 2) {
        throw InvalidParamsError("coefficient map needs at least 2 coefficients");
    }
    for (const Expression& e : coeff_exprs) {
        if (e.n_q != n || e.m_d != m) {
            throw DimensionMismatchError("coefficient expression dimensions disagree with the map");
        }
    }
    std::vector<AffineDecomposition> decomp;
    bool all_affine = true;
    for (const Expression& e : coeff_exprs) {
        auto a = affine_in_q(e);
        if (!a) {
            all_affine = false;
            break;
        }
        decomp.push_back(std::move(*a));
    }
    if (all_affine) affine_decomp = std::move(decomp);
}

Polynomial CoefficientMap::evaluate(std::span<const double> q,
                                    std::span<const double> delta) const {
    if (static_cast<int>(q.size()) != n || static_cast<int>(delta.size()) != m) {
        throw DimensionMismatchError("coefficient map evaluated with wrong vector lengths");
    }
    std::vector<double> coeffs;
    coeffs.reserve(coeff_exprs.size());
    for (const Expression& e : coeff_exprs) coeffs.push_back(e.evaluate(q, delta));
    return Polynomial(std::move(coeffs));
}

bool CoefficientMap::stable_at(std::span<const double> q, std::span<const double> delta) const {
    Polynomial p = evaluate(q, delta);
    if (std::abs(p.coeffs.back()) <= kLeadingTol) return false;  // degree drop
    return is_stable(p, kind);
}

bool CoefficientMap::affine_in_q_all() const { return affine_decomp.has_value(); }

bool kharitonov_hurwitz(const std::vector<std::pair<double, double>>& intervals) {
    if (intervals.size() < 2) throw InvalidParamsError("need at least two coefficient intervals");
    for (const auto& [lo, hi] : intervals) {
        if (lo > hi) throw InvalidParamsError("coefficient interval needs lo <= hi");
    }
    const auto& [llo, lhi] = intervals.back();
    if (llo <= kLeadingTol && lhi >= -kLeadingTol) return false;  // degree can drop

    // Corner patterns, ascending powers, period 4.
    static constexpr bool kUseHi[4][4] = {
        {false, false, true, true},
        {true, true, false, false},
        {false, true, true, false},
        {true, false, false, true},
    };
    for (int k = 0; k < 4; ++k) {
        std::vector<double> coeffs(intervals.size());
        for (std::size_t j = 0; j < intervals.size(); ++j) {
            coeffs[j] = kUseHi[k][j % 4] ? intervals[j].second : intervals[j].first;
        }
        if (!is_hurwitz(Polynomial(std::move(coeffs)))) return false;
    }
    return true;
}

bool zero_exclusion_affine(const CoefficientMap& map, const UncertaintySet& q_set,
                           std::span<const double> delta, double omega_max, int omega_points) {
    if (map.kind != StabilityKind::Hurwitz) {
        throw MethodInapplicableError("zero exclusion sweep applies to the Hurwitz case only");
    }
    if (!std::holds_alternative<Box>(q_set) && !std::holds_alternative<AxisEllipsoid>(q_set)) {
        throw MethodInapplicableError("zero exclusion needs a box or axis-ellipsoid q set");
    }
    if (!map.affine_in_q_all()) {
        throw MethodInapplicableError("zero exclusion needs coefficients affine in q");
    }
    if (omega_points < 64) throw InvalidParamsError("omega_points must be >= 64");

    NumericAffine na = numeric_affine(map, delta);
    auto ranges = ranges_from_affine(na, q_set);

    // Leading coefficient must be sign-definite over Q.
    const auto& [llo, lhi] = ranges.back();
    if (!(llo > kLeadingTol || lhi < -kLeadingTol)) return false;

    std::vector<double> center = set_center(q_set);
    if (!map.stable_at(center, delta)) return false;

    if (omega_max <= 0.0) {
        // Cauchy root bound from the coefficient ranges over Q.
        double lead_min = std::min(std::abs(llo), std::abs(lhi));
        double worst = 0.0;
        for (std::size_t j = 0; j + 1 < ranges.size(); ++j) {
            double mag = std::max(std::abs(ranges[j].first), std::abs(ranges[j].second));
            worst = std::max(worst, mag / lead_min);
        }
        omega_max = 1.0 + (1.0 + worst);
    }

    SweepResult r = sweep_value_sets(na, q_set, center, omega_max, omega_points, ranges);
    return r.excluded;
}

std::vector<std::pair<double, double>> coefficient_ranges(const CoefficientMap& map,
                                                          const UncertaintySet& q_set,
                                                          std::span<const double> delta) {
    bool convex = std::holds_alternative<Box>(q_set) || std::holds_alternative<AxisEllipsoid>(q_set);
    if (map.affine_in_q_all() && convex) {
        return ranges_from_affine(numeric_affine(map, delta), q_set);
    }
    int resolution = map.n <= 2 ? 21 : 5;
    auto probes = enumerate_q(q_set, resolution, delta);
    std::vector<std::pair<double, double>> out(
        map.coeff_exprs.size(),
        {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (const auto& q : probes) {
        for (std::size_t j = 0; j < map.coeff_exprs.size(); ++j) {
            double v = map.coeff_exprs[j].evaluate(q, delta);
            out[j].first = std::min(out[j].first, v);
            out[j].second = std::max(out[j].second, v);
        }
    }
    return out;
}

bool necessary_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                         std::span<const double> delta) {
    if (map.kind != StabilityKind::Hurwitz) {
        throw MethodInapplicableError("coefficient positivity is a Hurwitz-side criterion");
    }
    auto resolved = resolve_set(q_set, delta);
    if (!resolved) return true;
    auto ranges = coefficient_ranges(map, *resolved, delta);
    // Sign-normalize by the leading coefficient so that robustly stable
    // families always pass (F implies this test).
    if (ranges.back().first > 0.0) {
        for (const auto& [lo, hi] : ranges) {
            if (!(lo > 0.0)) return false;
        }
        return true;
    }
    if (ranges.back().second < 0.0) {
        for (const auto& [lo, hi] : ranges) {
            if (!(hi < 0.0)) return false;
        }
        return true;
    }
    return false;
}

bool sufficient_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                          std::span<const double> delta) {
    if (map.kind != StabilityKind::Hurwitz) {
        throw MethodInapplicableError("the Kharitonov hull surrogate is Hurwitz-only");
    }
    auto resolved = resolve_set(q_set, delta);
    if (!resolved) return true;
    return kharitonov_hurwitz(coefficient_ranges(map, *resolved, delta));
}

IndicatorResult indicator_f(const CoefficientMap& map, const UncertaintySet& q_set,
                            std::span<const double> delta, const RobustMethod& method) {
    if (q_dimension(q_set) != map.n) {
        throw DimensionMismatchError("q set dimension does not match the coefficient map");
    }
    if (static_cast<int>(delta.size()) != map.m) {
        throw DimensionMismatchError("delta dimension does not match the coefficient map");
    }
    auto resolved = resolve_set(q_set, delta);
    if (!resolved) return {true, Guarantee::Certified};  // for-all over the empty set
    const UncertaintySet& q = *resolved;

    if (std::holds_alternative<KharitonovMethod>(method)) {
        if (map.kind != StabilityKind::Hurwitz) {
            throw MethodInapplicableError("no Kharitonov analogue exists for the Schur case");
        }
        if (!map.affine_in_q_all() || !std::holds_alternative<Box>(q)) {
            throw MethodInapplicableError("Kharitonov needs affine coefficients over a box");
        }
        NumericAffine na = numeric_affine(map, delta);
        if (!independent_interval_structure(na)) {
            throw MethodInapplicableError(
                "Kharitonov needs independently varying coefficient intervals");
        }
        return {kharitonov_hurwitz(ranges_from_affine(na, q)), Guarantee::Certified};
    }
    if (const auto* ze = std::get_if<ZeroExclusionMethod>(&method)) {
        return {zero_exclusion_affine(map, q, delta, ze->omega_max, ze->omega_points),
                Guarantee::Certified};
    }
    if (const auto* gf = std::get_if<GridFallbackMethod>(&method)) {
        return {grid_fallback(map, q, delta, gf->resolution), Guarantee::Sampled};
    }

    // Auto: strongest applicable certified method first.
    if (const auto* disc = std::get_if<DiscreteSet>(&q)) {
        for (const auto& point : disc->points) {
            if (!map.stable_at(point, delta)) return {false, Guarantee::Certified};
        }
        return {true, Guarantee::Certified};  // exhaustive over a finite set
    }
    bool convex = std::holds_alternative<Box>(q) || std::holds_alternative<AxisEllipsoid>(q);
    if (map.kind == StabilityKind::Hurwitz && map.affine_in_q_all() && convex) {
        NumericAffine na = numeric_affine(map, delta);
        if (std::holds_alternative<Box>(q) && independent_interval_structure(na)) {
            return {kharitonov_hurwitz(ranges_from_affine(na, q)), Guarantee::Certified};
        }
        return {zero_exclusion_affine(map, q, delta), Guarantee::Certified};
    }
    return {grid_fallback(map, q, delta, GridFallbackMethod{}.resolution), Guarantee::Sampled};
}

}  // namespace mixedrobust
