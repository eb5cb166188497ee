#include "mixedrobust/region.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "parallel_util.hpp"

namespace mixedrobust {

namespace {

double bisect_boundary(const RobustIndicator& f, double x0, double x1, bool f0, double tol,
                       bool& sampled) {
    while (x1 - x0 > tol) {
        double mid = 0.5 * (x0 + x1);
        if (mid <= x0 || mid >= x1) break;  // double resolution exhausted
        IndicatorResult r = f(std::span<const double>(&mid, 1));
        if (r.guarantee == Guarantee::Sampled) sampled = true;
        if (r.robust == f0) {
            x0 = mid;
        } else {
            x1 = mid;
        }
    }
    return 0.5 * (x0 + x1);
}

}  // namespace

bool IntervalUnion::contains(double x) const {
    for (const auto& iv : intervals) {
        if (x > iv.a && x <= iv.b) return true;
    }
    return false;
}

RobustIndicator make_indicator(const CoefficientMap& map, const UncertaintySet& q_set,
                               const RobustMethod& method) {
    return [&map, q_set, method](std::span<const double> delta) {
        return indicator_f(map, q_set, delta, method);
    };
}

IntervalUnion stability_intervals_1d(const RobustIndicator& indicator, double lo, double hi,
                                     double h, double tol) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidParamsError("search bounds must be finite with lo < hi");
    }
    if (h <= 0.0) h = (hi - lo) / 2000.0;
    if (tol <= 0.0) throw InvalidParamsError("tolerance must be positive");

    std::size_t steps = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    std::vector<double> xs(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) xs[k] = lo + (hi - lo) * static_cast<double>(k) / steps;

    std::vector<char> flags(xs.size());
    std::atomic<bool> sampled{false};
    detail::parallel_chunks(xs.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            IndicatorResult r = indicator(std::span<const double>(&xs[k], 1));
            flags[k] = r.robust ? 1 : 0;
            if (r.guarantee == Guarantee::Sampled) sampled.store(true, std::memory_order_relaxed);
        }
    });

    bool sampled_flag = sampled.load();
    IntervalUnion out;
    out.scan_step = (hi - lo) / static_cast<double>(steps);
    bool state = flags[0] != 0;
    double start = lo;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        if ((flags[k] != 0) == (flags[k + 1] != 0)) continue;
        double boundary =
            bisect_boundary(indicator, xs[k], xs[k + 1], flags[k] != 0, tol, sampled_flag);
        if (state) {
            out.intervals.push_back({start, boundary});
        } else {
            start = boundary;
        }
        state = !state;
    }
    if (state) out.intervals.push_back({start, hi});
    out.guarantee = sampled_flag ? Guarantee::Sampled : Guarantee::Certified;
    return out;
}

IntervalUnion stability_intervals_1d(const CoefficientMap& map, const UncertaintySet& q_set,
                                     double lo, double hi, double h, double tol,
                                     const RobustMethod& method) {
    if (map.m != 1) throw DimensionMismatchError("the 1-D scan needs a scalar delta");
    return stability_intervals_1d(make_indicator(map, q_set, method), lo, hi, h, tol);
}

// ---------------------------------------------------------------------------
// 2-D classification + marching squares
// ---------------------------------------------------------------------------

namespace {

struct Classifier {
    Classifier(const RobustIndicator& f, std::array<double, 2> lo, std::array<double, 2> hi,
               int depth, double dx, double dy)
        : f(f), lo(lo), hi(hi), depth(depth), dx(dx), dy(dy) {}

    const RobustIndicator& f;
    std::array<double, 2> lo, hi;
    int depth;
    double dx, dy;
    std::atomic<bool> sampled{false};

    // Corner values at refinement levels, keyed by (level, ix, iy).
    std::map<std::tuple<int, long long, long long>, bool> memo;

    bool eval(double x, double y) {
        std::array<double, 2> delta{x, y};
        IndicatorResult r = f(delta);
        if (r.guarantee == Guarantee::Sampled) sampled.store(true, std::memory_order_relaxed);
        return r.robust;
    }

    // Lattice coordinate (ix, iy) at `level`: spacing halves per level.
    bool corner(int level, long long ix, long long iy) {
        auto key = std::make_tuple(level, ix, iy);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        double scale = std::ldexp(1.0, -level);  // 2^-level
        double x = lo[0] + dx * scale * static_cast<double>(ix);
        double y = lo[1] + dy * scale * static_cast<double>(iy);
        bool v = eval(x, y);
        memo.emplace(key, v);
        return v;
    }
};

struct LeafCell {
    long long ix, iy;  // cell index at `level`
    int level;
    int state;  // 1 inside, 0 boundary (outside cells are dropped)
    bool center_value;
};

// Classify one cell at (level, ix, iy); recurse into disagreeing cells.
void classify_cell(Classifier& ctx, int level, long long ix, long long iy,
                   std::vector<LeafCell>& leaves) {
    bool c00 = ctx.corner(level, ix, iy);
    bool c10 = ctx.corner(level, ix + 1, iy);
    bool c01 = ctx.corner(level, ix, iy + 1);
    bool c11 = ctx.corner(level, ix + 1, iy + 1);
    double scale = std::ldexp(1.0, -level);
    double cx = ctx.lo[0] + ctx.dx * scale * (static_cast<double>(ix) + 0.5);
    double cy = ctx.lo[1] + ctx.dy * scale * (static_cast<double>(iy) + 0.5);
    bool cc = ctx.eval(cx, cy);

    int trues = int(c00) + int(c10) + int(c01) + int(c11) + int(cc);
    if (trues == 5) {
        leaves.push_back({ix, iy, level, 1, cc});
        return;
    }
    if (trues == 0) return;  // committed outside
    if (level >= ctx.depth) {
        leaves.push_back({ix, iy, level, 0, cc});
        return;
    }
    for (int sy = 0; sy < 2; ++sy) {
        for (int sx = 0; sx < 2; ++sx) {
            classify_cell(ctx, level + 1, 2 * ix + sx, 2 * iy + sy, leaves);
        }
    }
}

struct Segment {
    long long x0, y0, x1, y1;  // half-unit pixel-center coordinates
};

// Marching squares over a boolean pixel grid (pixel (i,j) centered at
// half-coordinates (2i, 2j)); interior is kept on the left of each segment.
std::vector<std::vector<std::array<long long, 2>>> march(const std::vector<char>& pix, long long N) {
    auto at = [&](long long i, long long j) -> bool {
        if (i < 0 || j < 0 || i >= N || j >= N) return false;
        return pix[static_cast<std::size_t>(j * N + i)] != 0;
    };
    std::vector<Segment> segs;
    for (long long j = -1; j < N; ++j) {
        for (long long i = -1; i < N; ++i) {
            bool a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
            int code = int(a) | (int(b) << 1) | (int(c) << 2) | (int(d) << 3);
            if (code == 0 || code == 15) continue;
            long long S0 = 2 * i + 1, S1 = 2 * j;
            long long E0 = 2 * i + 2, E1 = 2 * j + 1;
            long long Nx = 2 * i + 1, Ny = 2 * j + 2;
            long long W0 = 2 * i, W1 = 2 * j + 1;
            switch (code) {
                case 1: segs.push_back({S0, S1, W0, W1}); break;
                case 2: segs.push_back({E0, E1, S0, S1}); break;
                case 3: segs.push_back({E0, E1, W0, W1}); break;
                case 4: segs.push_back({Nx, Ny, E0, E1}); break;
                case 5:
                    segs.push_back({S0, S1, W0, W1});
                    segs.push_back({Nx, Ny, E0, E1});
                    break;
                case 6: segs.push_back({Nx, Ny, S0, S1}); break;
                case 7: segs.push_back({Nx, Ny, W0, W1}); break;
                case 8: segs.push_back({W0, W1, Nx, Ny}); break;
                case 9: segs.push_back({S0, S1, Nx, Ny}); break;
                case 10:
                    segs.push_back({E0, E1, S0, S1});
                    segs.push_back({W0, W1, Nx, Ny});
                    break;
                case 11: segs.push_back({E0, E1, Nx, Ny}); break;
                case 12: segs.push_back({W0, W1, E0, E1}); break;
                case 13: segs.push_back({S0, S1, E0, E1}); break;
                case 14: segs.push_back({W0, W1, S0, S1}); break;
                default: break;
            }
        }
    }

    auto key = [N](long long x, long long y) { return (x + 4) * (4 * N + 16) + (y + 4); };
    std::map<long long, std::size_t> by_start;
    for (std::size_t s = 0; s < segs.size(); ++s) by_start[key(segs[s].x0, segs[s].y0)] = s;

    std::vector<std::vector<std::array<long long, 2>>> loops;
    std::vector<char> used(segs.size(), 0);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        std::vector<std::array<long long, 2>> loop;
        std::size_t cur = s;
        for (;;) {
            used[cur] = 1;
            loop.push_back({segs[cur].x0, segs[cur].y0});
            auto it = by_start.find(key(segs[cur].x1, segs[cur].y1));
            if (it == by_start.end()) break;  // open chain: should not happen
            cur = it->second;
            if (cur == s) break;
        }
        if (loop.size() >= 3) loops.push_back(std::move(loop));
    }
    return loops;
}

}  // namespace

PolygonRegion stability_region_2d(const RobustIndicator& indicator, std::array<double, 2> bounds_lo,
                                  std::array<double, 2> bounds_hi, int resolution,
                                  int refine_depth) {
    if (resolution < 16) throw InvalidParamsError("2-D grid resolution must be >= 16");
    if (refine_depth < 0) throw InvalidParamsError("refine_depth must be >= 0");
    if (!(bounds_lo[0] < bounds_hi[0]) || !(bounds_lo[1] < bounds_hi[1])) {
        throw InvalidParamsError("bounds rectangle must be nondegenerate");
    }

    Classifier ctx(indicator, bounds_lo, bounds_hi, refine_depth,
                   (bounds_hi[0] - bounds_lo[0]) / resolution,
                   (bounds_hi[1] - bounds_lo[1]) / resolution);

    // Base corner lattice and cell centers, evaluated in parallel rows.
    long long R = resolution;
    std::vector<char> corners(static_cast<std::size_t>((R + 1) * (R + 1)));
    detail::parallel_chunks(static_cast<std::size_t>(R + 1), [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (long long i = 0; i <= R; ++i) {
                double x = bounds_lo[0] + ctx.dx * static_cast<double>(i);
                double y = bounds_lo[1] + ctx.dy * static_cast<double>(j);
                corners[j * (R + 1) + static_cast<std::size_t>(i)] = ctx.eval(x, y) ? 1 : 0;
            }
        }
    });
    std::vector<char> centers(static_cast<std::size_t>(R * R));
    detail::parallel_chunks(static_cast<std::size_t>(R), [&](std::size_t jb, std::size_t je) {
        for (std::size_t j = jb; j < je; ++j) {
            for (long long i = 0; i < R; ++i) {
                double x = bounds_lo[0] + ctx.dx * (static_cast<double>(i) + 0.5);
                double y = bounds_lo[1] + ctx.dy * (static_cast<double>(j) + 0.5);
                centers[j * R + static_cast<std::size_t>(i)] = ctx.eval(x, y) ? 1 : 0;
            }
        }
    });
    // Seed the level-0 memo so refinement reuses the lattice.
    for (long long j = 0; j <= R; ++j) {
        for (long long i = 0; i <= R; ++i) {
            ctx.memo.emplace(std::make_tuple(0, i, j),
                             corners[static_cast<std::size_t>(j * (R + 1) + i)] != 0);
        }
    }

    std::vector<LeafCell> leaves;
    for (long long j = 0; j < R; ++j) {
        for (long long i = 0; i < R; ++i) {
            bool c00 = corners[static_cast<std::size_t>(j * (R + 1) + i)] != 0;
            bool c10 = corners[static_cast<std::size_t>(j * (R + 1) + i + 1)] != 0;
            bool c01 = corners[static_cast<std::size_t>((j + 1) * (R + 1) + i)] != 0;
            bool c11 = corners[static_cast<std::size_t>((j + 1) * (R + 1) + i + 1)] != 0;
            bool cc = centers[static_cast<std::size_t>(j * R + i)] != 0;
            int trues = int(c00) + int(c10) + int(c01) + int(c11) + int(cc);
            if (trues == 5) {
                leaves.push_back({i, j, 0, 1, cc});
            } else if (trues > 0) {
                if (refine_depth == 0) {
                    leaves.push_back({i, j, 0, 0, cc});
                } else {
                    for (int sy = 0; sy < 2; ++sy) {
                        for (int sx = 0; sx < 2; ++sx) {
                            classify_cell(ctx, 1, 2 * i + sx, 2 * j + sy, leaves);
                        }
                    }
                }
            }
        }
    }

    PolygonRegion out;
    out.bounds_lo = bounds_lo;
    out.bounds_hi = bounds_hi;
    out.resolution = resolution;
    out.refine_depth = refine_depth;
    out.guarantee = ctx.sampled.load() ? Guarantee::Sampled : Guarantee::Certified;

    double total_area = (bounds_hi[0] - bounds_lo[0]) * (bounds_hi[1] - bounds_lo[1]);
    for (const LeafCell& leaf : leaves) {
        double scale = std::ldexp(1.0, -leaf.level);
        std::array<double, 2> clo{bounds_lo[0] + ctx.dx * scale * static_cast<double>(leaf.ix),
                                  bounds_lo[1] + ctx.dy * scale * static_cast<double>(leaf.iy)};
        std::array<double, 2> chi{clo[0] + ctx.dx * scale, clo[1] + ctx.dy * scale};
        out.cells.push_back({clo, chi, leaf.state == 1});
        double frac = (ctx.dx * scale) * (ctx.dy * scale) / total_area;
        if (leaf.state == 1) {
            out.inside_area_fraction += frac;
        } else {
            out.boundary_area_fraction += frac;
        }
    }

    // Paint the refined classification onto a uniform fine grid and trace
    // the boundary with marching squares.
    int fine_shift = refine_depth;
    long long N = R << fine_shift;
    while (N > 4096 && fine_shift > 0) {
        --fine_shift;
        N = R << fine_shift;
    }
    std::vector<char> pix(static_cast<std::size_t>(N * N), 0);
    for (const LeafCell& leaf : leaves) {
        bool fill = leaf.state == 1 || leaf.center_value;
        if (!fill) continue;
        int shift = fine_shift - leaf.level;
        long long x0, y0, span;
        if (shift >= 0) {
            x0 = leaf.ix << shift;
            y0 = leaf.iy << shift;
            span = 1LL << shift;
        } else {
            x0 = leaf.ix >> (-shift);
            y0 = leaf.iy >> (-shift);
            span = 1;
        }
        for (long long yy = y0; yy < std::min(y0 + span, N); ++yy) {
            for (long long xx = x0; xx < std::min(x0 + span, N); ++xx) {
                pix[static_cast<std::size_t>(yy * N + xx)] = 1;
            }
        }
    }
    double fx = (bounds_hi[0] - bounds_lo[0]) / static_cast<double>(N);
    double fy = (bounds_hi[1] - bounds_lo[1]) / static_cast<double>(N);
    for (auto& loop : march(pix, N)) {
        std::vector<std::array<double, 2>> poly;
        poly.reserve(loop.size());
        for (const auto& v : loop) {
            poly.push_back({bounds_lo[0] + (static_cast<double>(v[0]) + 2.0) * fx / 2.0,
                            bounds_lo[1] + (static_cast<double>(v[1]) + 2.0) * fy / 2.0});
        }
        out.polygons.push_back(std::move(poly));
    }
    return out;
}

PolygonRegion stability_region_2d(const CoefficientMap& map, const UncertaintySet& q_set,
                                  std::array<double, 2> bounds_lo, std::array<double, 2> bounds_hi,
                                  int resolution, int refine_depth, const RobustMethod& method) {
    if (map.m != 2) throw DimensionMismatchError("the 2-D region needs a two-dimensional delta");
    return stability_region_2d(make_indicator(map, q_set, method), bounds_lo, bounds_hi, resolution,
                               refine_depth);
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

ProbabilityEstimate measure(const IntervalUnion& region, const DistributionSpec& dist,
                            std::span<const double> q) {
    if (dist.dimension() != 1) {
        throw DimensionMismatchError("interval-union measure needs a scalar distribution");
    }
    ResolvedMarginal m = resolve_marginal(dist.marginals[0], q);
    double p = 0.0;
    for (const auto& iv : region.intervals) {
        double ca = std::isfinite(iv.a) ? cdf_scalar(m, iv.a) : (iv.a < 0 ? 0.0 : 1.0);
        double cb = std::isfinite(iv.b) ? cdf_scalar(m, iv.b) : (iv.b < 0 ? 0.0 : 1.0);
        p += cb - ca;
    }
    ProbabilityEstimate out;
    out.value = std::clamp(p, 0.0, 1.0);
    out.method = EstimateMethod::ExactCdf;
    out.guarantee = region.guarantee;
    out.exact = true;
    return out;
}

ProbabilityEstimate measure(const PolygonRegion& region, const DistributionSpec& dist,
                            std::span<const double> q) {
    if (dist.dimension() != 2) {
        throw DimensionMismatchError("polygon-region measure needs a 2-D distribution");
    }
    auto ms = resolve_distribution(dist, q);
    auto cell_mass = [&](const std::array<double, 2>& lo, const std::array<double, 2>& hi) {
        return (cdf_scalar(ms[0], hi[0]) - cdf_scalar(ms[0], lo[0])) *
               (cdf_scalar(ms[1], hi[1]) - cdf_scalar(ms[1], lo[1]));
    };
    double inside = 0.0, boundary = 0.0;
    for (const auto& cell : region.cells) {
        double mass = cell_mass(cell.lo, cell.hi);
        (cell.inside ? inside : boundary) += mass;
    }
    double bounds_mass = cell_mass(region.bounds_lo, region.bounds_hi);
    double unknown_outside = std::max(0.0, 1.0 - bounds_mass);

    double lo = std::clamp(inside, 0.0, 1.0);
    double hi = std::clamp(inside + boundary + unknown_outside, 0.0, 1.0);

    bool uniform = std::holds_alternative<RUniform>(ms[0]) && std::holds_alternative<RUniform>(ms[1]);
    ProbabilityEstimate out;
    out.value = 0.5 * (lo + hi);
    out.method = uniform ? EstimateMethod::Geometric : EstimateMethod::Quadrature;
    out.guarantee = region.guarantee;
    out.bracket = std::make_pair(lo, hi);
    return out;
}

double polygon_area(const std::vector<std::array<double, 2>>& polygon) {
    if (polygon.size() < 3) throw DegeneratePolygonError("polygon needs at least 3 vertices");
    double acc = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const auto& p = polygon[i];
        const auto& n = polygon[(i + 1) % polygon.size()];
        acc += p[0] * n[1] - n[0] * p[1];
    }
    return 0.5 * acc;
}

}  // namespace mixedrobust
