#include "mixedrobust/param.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixedrobust {

namespace {

constexpr double kProbTol = 1e-12;

double resolve_param(const Param& p, std::span<const double> q) {
    if (std::holds_alternative<double>(p)) return std::get<double>(p);
    const Expression& e = std::get<Expression>(p);
    if (e.depends_on_q() && q.empty()) {
        throw InvalidParamsError("q-parameterized distribution resolved without q");
    }
    std::vector<double> qv(q.begin(), q.end());
    qv.resize(static_cast<std::size_t>(e.n_q), 0.0);
    return e.evaluate(qv, {});
}

// Inverse standard-normal CDF, Wichura's PPND16 (AS 241), |err| ~ 1e-15.
double norm_quantile(double u) {
    double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -value : value;
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void check_dim(const UncertaintySet& set, std::size_t qsize) {
    if (q_dimension(set) != static_cast<int>(qsize)) {
        throw DimensionMismatchError("q vector length does not match the uncertainty set");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// UncertaintySet
// ---------------------------------------------------------------------------

int q_dimension(const UncertaintySet& set) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lo.size());
            if constexpr (std::is_same_v<T, AxisEllipsoid>)
                return static_cast<int>(s.weights.size());
            if constexpr (std::is_same_v<T, DiscreteSet>)
                return s.points.empty() ? 0 : static_cast<int>(s.points.front().size());
            if constexpr (std::is_same_v<T, ParamBox>) return static_cast<int>(s.lo.size());
            if constexpr (std::is_same_v<T, ParamDiscrete>)
                return s.points.empty() ? 0 : static_cast<int>(s.points.front().size());
        },
        set);
}

void validate(const UncertaintySet& set) {
    if (const auto* box = std::get_if<Box>(&set)) {
        if (box->lo.size() != box->hi.size()) throw InvalidParamsError("box lo/hi size mismatch");
        for (std::size_t i = 0; i < box->lo.size(); ++i) {
            if (box->lo[i] > box->hi[i]) throw InvalidParamsError("box needs lo <= hi");
        }
    } else if (const auto* ell = std::get_if<AxisEllipsoid>(&set)) {
        if (ell->weights.size() != ell->center.size()) {
            throw InvalidParamsError("ellipsoid weights/center size mismatch");
        }
        if (ell->bound <= 0.0) throw InvalidParamsError("ellipsoid bound must be positive");
        for (double w : ell->weights) {
            if (w <= 0.0) throw InvalidParamsError("ellipsoid weights must be positive");
        }
    } else if (const auto* disc = std::get_if<DiscreteSet>(&set)) {
        if (disc->points.empty()) throw InvalidParamsError("discrete set needs at least one point");
        for (const auto& pt : disc->points) {
            if (pt.size() != disc->points.front().size()) {
                throw InvalidParamsError("discrete set points have mixed dimensions");
            }
        }
    } else if (const auto* pb = std::get_if<ParamBox>(&set)) {
        if (pb->lo.size() != pb->hi.size()) throw InvalidParamsError("param_box lo/hi size mismatch");
    } else if (const auto* pd = std::get_if<ParamDiscrete>(&set)) {
        if (pd->points.empty()) throw InvalidParamsError("param_discrete needs at least one point");
    }
}

bool is_parameterized(const UncertaintySet& set) {
    return std::holds_alternative<ParamBox>(set) || std::holds_alternative<ParamDiscrete>(set);
}

std::optional<UncertaintySet> resolve_set(const UncertaintySet& set,
                                          std::span<const double> delta) {
    if (const auto* pb = std::get_if<ParamBox>(&set)) {
        Box box;
        std::vector<double> dv(delta.begin(), delta.end());
        for (std::size_t i = 0; i < pb->lo.size(); ++i) {
            double lo = pb->lo[i].evaluate({}, dv);
            double hi = pb->hi[i].evaluate({}, dv);
            if (lo > hi) return std::nullopt;  // empty at this delta
            box.lo.push_back(lo);
            box.hi.push_back(hi);
        }
        return UncertaintySet(box);
    }
    if (const auto* pd = std::get_if<ParamDiscrete>(&set)) {
        DiscreteSet out;
        std::vector<double> dv(delta.begin(), delta.end());
        for (const auto& pt : pd->points) {
            std::vector<double> coords;
            coords.reserve(pt.size());
            for (const Expression& e : pt) coords.push_back(e.evaluate({}, dv));
            out.points.push_back(std::move(coords));
        }
        return UncertaintySet(out);
    }
    return set;
}

bool membership(const UncertaintySet& set, std::span<const double> q,
                std::span<const double> delta) {
    if (is_parameterized(set)) {
        if (delta.empty()) throw DimensionMismatchError("parameterized set needs delta");
        auto resolved = resolve_set(set, delta);
        if (!resolved) return false;
        return membership(*resolved, q);
    }
    check_dim(set, q.size());
    if (const auto* box = std::get_if<Box>(&set)) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] < box->lo[i] || q[i] > box->hi[i]) return false;
        }
        return true;
    }
    if (const auto* ell = std::get_if<AxisEllipsoid>(&set)) {
        double acc = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            double t = q[i] - ell->center[i];
            acc += ell->weights[i] * t * t;
        }
        return acc <= ell->bound;  // boundary counts as inside
    }
    const auto& disc = std::get<DiscreteSet>(set);
    for (const auto& pt : disc.points) {
        bool same = true;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (pt[i] != q[i]) {
                same = false;
                break;
            }
        }
        if (same) return true;
    }
    return false;
}

std::vector<std::vector<double>> enumerate_q(const UncertaintySet& set, int resolution,
                                             std::span<const double> delta) {
    if (resolution < 2) throw InvalidParamsError("enumeration resolution must be >= 2");
    if (is_parameterized(set)) {
        auto resolved = resolve_set(set, delta);
        if (!resolved) throw EmptySetError("parameterized set is empty at this delta");
        return enumerate_q(*resolved, resolution);
    }
    if (const auto* disc = std::get_if<DiscreteSet>(&set)) return disc->points;

    if (const auto* box = std::get_if<Box>(&set)) {
        std::size_t n = box->lo.size();
        std::vector<std::vector<double>> out;
        if (n == 0) {
            out.push_back({});
            return out;
        }
        std::vector<int> idx(n, 0);
        for (;;) {
            std::vector<double> pt(n);
            for (std::size_t i = 0; i < n; ++i) {
                double t = (resolution == 1) ? 0.0
                                             : static_cast<double>(idx[i]) / (resolution - 1);
                pt[i] = box->lo[i] + t * (box->hi[i] - box->lo[i]);
            }
            out.push_back(std::move(pt));
            std::size_t k = 0;
            while (k < n && ++idx[k] == resolution) idx[k++] = 0;
            if (k == n) break;
        }
        return out;
    }

    const auto& ell = std::get<AxisEllipsoid>(set);
    std::size_t n = ell.weights.size();
    std::vector<double> half(n);
    for (std::size_t i = 0; i < n; ++i) half[i] = std::sqrt(ell.bound / ell.weights[i]);
    Box bounding;
    for (std::size_t i = 0; i < n; ++i) {
        bounding.lo.push_back(ell.center[i] - half[i]);
        bounding.hi.push_back(ell.center[i] + half[i]);
    }
    std::vector<std::vector<double>> out;
    for (auto& pt : enumerate_q(UncertaintySet(bounding), resolution)) {
        if (membership(set, pt)) out.push_back(std::move(pt));
    }
    if (n == 2) {
        // `resolution` boundary points per quarter arc between principal
        // axes, pulled inward by one ulp-scale factor so the exact
        // membership predicate accepts them.
        int per_arc = resolution;
        double inward = 1.0 - 1e-12;
        for (int arc = 0; arc < 4; ++arc) {
            for (int k = 0; k < per_arc; ++k) {
                double theta = (arc + static_cast<double>(k) / per_arc) * M_PI / 2.0;
                out.push_back({ell.center[0] + inward * half[0] * std::cos(theta),
                               ell.center[1] + inward * half[1] * std::sin(theta)});
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (double s : {-1.0, 1.0}) {
                std::vector<double> pt = ell.center;
                pt[i] += s * half[i];
                out.push_back(std::move(pt));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

bool DistributionSpec::depends_on_q() const {
    for (const Marginal& m : marginals) {
        bool dep = std::visit(
            [](const auto& d) -> bool {
                using T = std::decay_t<decltype(d)>;
                auto param_dep = [](const Param& p) {
                    return std::holds_alternative<Expression>(p) &&
                           std::get<Expression>(p).depends_on_q();
                };
                if constexpr (std::is_same_v<T, DiscretePMF>) {
                    for (const Param& p : d.values)
                        if (param_dep(p)) return true;
                    for (const Param& p : d.probs)
                        if (param_dep(p)) return true;
                    return false;
                } else if constexpr (std::is_same_v<T, UniformDist>) {
                    return param_dep(d.lo) || param_dep(d.hi);
                } else if constexpr (std::is_same_v<T, NormalDist>) {
                    return param_dep(d.mean) || param_dep(d.stddev);
                } else {
                    return param_dep(d.location) || param_dep(d.scale);
                }
            },
            m);
        if (dep) return true;
    }
    return false;
}

ResolvedMarginal resolve_marginal(const Marginal& m, std::span<const double> q) {
    if (const auto* u = std::get_if<UniformDist>(&m)) {
        RUniform r{resolve_param(u->lo, q), resolve_param(u->hi, q)};
        if (!(r.lo < r.hi)) throw InvalidParamsError("uniform marginal needs lo < hi");
        return r;
    }
    if (const auto* nd = std::get_if<NormalDist>(&m)) {
        RNormal r{resolve_param(nd->mean, q), resolve_param(nd->stddev, q)};
        if (!(r.stddev > 0.0)) throw InvalidParamsError("normal marginal needs std > 0");
        return r;
    }
    if (const auto* l = std::get_if<LaplaceDist>(&m)) {
        RLaplace r{resolve_param(l->location, q), resolve_param(l->scale, q)};
        if (!(r.scale > 0.0)) throw InvalidParamsError("laplace marginal needs scale > 0");
        return r;
    }
    const auto& d = std::get<DiscretePMF>(m);
    RDiscrete r;
    if (d.values.size() != d.probs.size() || d.values.empty()) {
        throw InvalidParamsError("discrete marginal needs matching nonempty values/probs");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        double v = resolve_param(d.values[i], q);
        double p = resolve_param(d.probs[i], q);
        if (p < 0.0) throw InvalidParamsError("discrete probabilities must be nonnegative");
        r.values.push_back(v);
        r.probs.push_back(p);
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol) {
        throw InvalidParamsError("discrete probabilities must sum to 1");
    }
    // Sort by value for a right-continuous CDF.
    std::vector<std::size_t> order(r.values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return r.values[a] < r.values[b]; });
    RDiscrete sorted;
    for (std::size_t i : order) {
        sorted.values.push_back(r.values[i]);
        sorted.probs.push_back(r.probs[i]);
    }
    return sorted;
}

std::vector<ResolvedMarginal> resolve_distribution(const DistributionSpec& dist,
                                                   std::span<const double> q) {
    std::vector<ResolvedMarginal> out;
    out.reserve(dist.marginals.size());
    for (const Marginal& m : dist.marginals) out.push_back(resolve_marginal(m, q));
    return out;
}

double cdf_scalar(const ResolvedMarginal& m, double x) {
    if (const auto* u = std::get_if<RUniform>(&m)) {
        if (x <= u->lo) return 0.0;
        if (x >= u->hi) return 1.0;
        return (x - u->lo) / (u->hi - u->lo);
    }
    if (const auto* n = std::get_if<RNormal>(&m)) {
        return norm_cdf((x - n->mean) / n->stddev);
    }
    if (const auto* l = std::get_if<RLaplace>(&m)) {
        double z = (x - l->location) / l->scale;
        return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    }
    const auto& d = std::get<RDiscrete>(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (d.values[i] <= x) acc += d.probs[i];
    }
    return std::min(acc, 1.0);
}

double quantile_scalar(const ResolvedMarginal& m, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile argument must lie in (0,1)");
    if (const auto* uni = std::get_if<RUniform>(&m)) {
        return uni->lo + u * (uni->hi - uni->lo);
    }
    if (const auto* n = std::get_if<RNormal>(&m)) {
        return n->mean + n->stddev * norm_quantile(u);
    }
    if (const auto* l = std::get_if<RLaplace>(&m)) {
        return u < 0.5 ? l->location + l->scale * std::log(2.0 * u)
                       : l->location - l->scale * std::log(2.0 * (1.0 - u));
    }
    const auto& d = std::get<RDiscrete>(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        acc += d.probs[i];
        if (u <= acc) return d.values[i];
    }
    return d.values.back();
}

std::pair<double, double> central_interval(const ResolvedMarginal& m, double mass) {
    if (!(mass >= 0.0 && mass <= 1.0)) throw DomainError("interval mass must lie in [0,1]");
    if (const auto* u = std::get_if<RUniform>(&m)) {
        if (mass >= 1.0) return {u->lo, u->hi};
    }
    if (const auto* d = std::get_if<RDiscrete>(&m)) {
        if (mass >= 1.0) return {d->values.front(), d->values.back()};
    }
    if (mass >= 1.0) throw UnboundedSupportError("full mass requested from an unbounded law");
    if (mass == 0.0) return {std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN()};
    double tail = (1.0 - mass) / 2.0;
    if (std::holds_alternative<RDiscrete>(m)) {
        const auto& d = std::get<RDiscrete>(m);
        // Smallest central value window with mass >= requested.
        double lo = d.values.front(), hi = d.values.back();
        double acc = 0.0;
        std::size_t i = 0;
        for (; i < d.probs.size() && acc + d.probs[i] <= tail; ++i) acc += d.probs[i];
        lo = d.values[i];
        acc = 0.0;
        std::size_t j = d.probs.size();
        for (; j > 0 && acc + d.probs[j - 1] <= tail; --j) acc += d.probs[j - 1];
        hi = d.values[j - 1];
        return {lo, hi};
    }
    return {quantile_scalar(m, tail), quantile_scalar(m, 1.0 - tail)};
}

bool is_discrete(const ResolvedMarginal& m) { return std::holds_alternative<RDiscrete>(m); }

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t component) {
    std::uint64_t h = splitmix(splitmix(seed + 0x632BE59BD9B4E019ull * (index + 1)) +
                               0x9E3779B97F4A7C15ull * (component + 1));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<std::vector<double>> sample(const DistributionSpec& dist, std::span<const double> q,
                                        std::uint64_t seed, std::size_t count) {
    if (dist.depends_on_q() && q.empty()) {
        throw InvalidParamsError("q-parameterized distribution sampled without q");
    }
    auto resolved = resolve_distribution(dist, q);
    std::vector<std::vector<double>> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> draw(resolved.size());
        for (std::size_t c = 0; c < resolved.size(); ++c) {
            draw[c] = quantile_scalar(resolved[c], uniform01(seed, i, c));
        }
        out[i] = std::move(draw);
    }
    return out;
}

}  // namespace mixedrobust
