#include "mixedrobust/mixed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>

#include "parallel_util.hpp"

namespace mixedrobust {

namespace {

// Search window for the delta scan: the support, exactly, for bounded
// laws; the 1-1e-9 central interval otherwise. Mass outside the window is
// either zero or already accounted to the measure bracket.
std::pair<double, double> auto_search_window(const ResolvedMarginal& m) {
    if (std::holds_alternative<RUniform>(m) || std::holds_alternative<RDiscrete>(m)) {
        return central_interval(m, 1.0);
    }
    return central_interval(m, 1.0 - 1e-9);
}

ProbabilityEstimate two_step(const ProblemSpec& spec, const TwoStepOptions& opts,
                             std::span<const double> q_fixed, const UncertaintySet& q_set) {
    int m = spec.map.m;
    if (m > 2) throw DimensionTooHighError("the two-step route handles at most two random axes");
    auto resolved = resolve_distribution(spec.delta_dist, q_fixed);

    std::vector<double> lo = opts.search_lo, hi = opts.search_hi;
    if (lo.empty() || hi.empty()) {
        lo.clear();
        hi.clear();
        for (const auto& marg : resolved) {
            auto [a, b] = auto_search_window(marg);
            lo.push_back(a);
            hi.push_back(b);
        }
    }
    if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m) {
        throw DimensionMismatchError("search bounds dimension does not match delta");
    }

    if (m == 1) {
        IntervalUnion region =
            stability_intervals_1d(spec.map, q_set, lo[0], hi[0], opts.h, opts.tol, opts.method);
        return measure(region, spec.delta_dist, q_fixed);
    }
    PolygonRegion region =
        stability_region_2d(spec.map, q_set, {lo[0], lo[1]}, {hi[0], hi[1]}, opts.resolution,
                            opts.refine_depth, opts.method);
    return measure(region, spec.delta_dist, q_fixed);
}

ProbabilityEstimate solve_generic(const ProblemSpec& spec, const SolveOptions& opts) {
    SolveStrategy strategy = opts.strategy;
    if (strategy == SolveStrategy::Auto) {
        strategy = spec.map.m <= 2 ? SolveStrategy::TwoStep : SolveStrategy::Scenario;
    }
    if (strategy == SolveStrategy::TwoStep) return two_step(spec, opts.two_step, {}, spec.q_set);
    return scenario_estimate(spec, opts.scenario);
}

std::vector<std::pair<double, double>> delta_support(const ProblemSpec& spec,
                                                     double truncation_mass) {
    std::vector<std::pair<double, double>> out;
    for (const auto& marg : resolve_distribution(spec.delta_dist, {})) {
        if (std::holds_alternative<RUniform>(marg) || std::holds_alternative<RDiscrete>(marg)) {
            out.push_back(central_interval(marg, 1.0));
        } else if (truncation_mass >= 1.0) {
            throw UnboundedSupportError("unbounded delta support and truncation disabled");
        } else {
            out.push_back(central_interval(marg, truncation_mass));
        }
    }
    return out;
}

// Odometer over a per-axis grid of the delta support box.
void for_each_grid_point(const std::vector<std::pair<double, double>>& box, int per_axis,
                         const std::function<void(std::span<const double>)>& fn) {
    std::size_t m = box.size();
    std::vector<int> idx(m, 0);
    std::vector<double> point(m);
    for (;;) {
        for (std::size_t i = 0; i < m; ++i) {
            double t = per_axis == 1 ? 0.0 : static_cast<double>(idx[i]) / (per_axis - 1);
            point[i] = box[i].first + t * (box[i].second - box[i].first);
        }
        fn(point);
        std::size_t k = 0;
        while (k < m && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == m) break;
    }
}

// Joint support of an all-discrete delta law: values with probabilities.
struct JointSupport {
    std::vector<std::vector<double>> points;
    std::vector<double> probs;
};

JointSupport joint_discrete_support(const std::vector<ResolvedMarginal>& marginals) {
    JointSupport out;
    std::size_t m = marginals.size();
    std::vector<const RDiscrete*> ds(m);
    for (std::size_t i = 0; i < m; ++i) {
        ds[i] = std::get_if<RDiscrete>(&marginals[i]);
        if (ds[i] == nullptr) throw NotDiscreteError("delta law is not discrete on every axis");
    }
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
        std::vector<double> pt(m);
        double p = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            pt[i] = ds[i]->values[idx[i]];
            p *= ds[i]->probs[idx[i]];
        }
        out.points.push_back(std::move(pt));
        out.probs.push_back(p);
        std::size_t k = 0;
        while (k < m && ++idx[k] == ds[k]->values.size()) idx[k++] = 0;
        if (k == m) break;
    }
    return out;
}

Expression shift_d_to_q(const Expression& e) {
    Expression out = e;
    out.n_q = e.n_q + e.m_d;
    out.m_d = 0;
    for (auto& node : out.nodes) {
        if (node.kind == Expression::Kind::VarD) {
            node.kind = Expression::Kind::VarQ;
            node.index += e.n_q;
        }
    }
    return out;
}

// Range of an expression in d over a delta box: exact for affine-in-d
// structure, dense grid otherwise.
std::pair<double, double> expr_range_over_delta(const Expression& e,
                                                const std::vector<std::pair<double, double>>& box,
                                                int grid) {
    if (auto aff = affine_in_d(e)) {
        std::vector<double> zeros_q(static_cast<std::size_t>(e.n_q), 0.0);
        std::vector<double> zeros_d(static_cast<std::size_t>(e.m_d), 0.0);
        double mid = aff->constant.evaluate(zeros_q, zeros_d);
        double rad = 0.0;
        for (std::size_t i = 0; i < box.size(); ++i) {
            double L = aff->q_coeffs[i].evaluate(zeros_q, zeros_d);
            mid += L * 0.5 * (box[i].first + box[i].second);
            rad += std::abs(L) * 0.5 * (box[i].second - box[i].first);
        }
        return {mid - rad, mid + rad};
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<double> zeros_q(static_cast<std::size_t>(e.n_q), 0.0);
    for_each_grid_point(box, grid, [&](std::span<const double> d) {
        double v = e.evaluate(zeros_q, d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    });
    return {lo, hi};
}

ProbabilityEstimate vacuous_estimate() {
    ProbabilityEstimate out;
    out.value = 1.0;
    out.method = EstimateMethod::ExactCdf;
    out.guarantee = Guarantee::Certified;
    out.exact = true;
    return out;
}

}  // namespace

void ProblemSpec::validate() const {
    mixedrobust::validate(q_set);
    if (q_dimension(q_set) != map.n) {
        throw DimensionMismatchError("q set dimension does not match the map");
    }
    if (delta_dist.dimension() != map.m) {
        throw DimensionMismatchError("distribution dimension does not match the map");
    }
    bool q_param = is_parameterized(q_set);
    bool d_param = delta_dist.depends_on_q();
    switch (problem) {
        case ProblemType::QDelta:
            if (q_param) throw InvalidParamsError("Problem I forbids a delta-parameterized Q");
            if (d_param) throw InvalidParamsError("Problem I forbids a q-parameterized law");
            break;
        case ProblemType::QofDelta:
            if (d_param) throw InvalidParamsError("Problem II needs a q-free law");
            break;
        case ProblemType::DeltaOfQ:
            if (q_param) throw InvalidParamsError("Problem III needs a non-parameterized Q");
            break;
    }
}

long long chernoff_sample_size(double epsilon, double theta) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(theta > 0.0 && theta < 1.0)) {
        throw DomainError("epsilon and theta must lie in (0,1)");
    }
    double n = std::ceil(std::log(2.0 / theta) / (2.0 * epsilon * epsilon));
    return std::max(1LL, static_cast<long long>(n));
}

ProbabilityEstimate scenario_estimate(const ProblemSpec& spec, const ScenarioOptions& opts) {
    spec.validate();
    if (spec.problem == ProblemType::DeltaOfQ) {
        throw InvalidParamsError("the scenario engine covers Problems I and II");
    }
    long long n = opts.samples_override.value_or(chernoff_sample_size(opts.epsilon, opts.theta));
    auto draws = sample(spec.delta_dist, {}, opts.seed, static_cast<std::size_t>(n));

    std::atomic<long long> successes{0};
    std::atomic<bool> sampled{false};
    detail::parallel_chunks(draws.size(), [&](std::size_t begin, std::size_t end) {
        long long local = 0;
        bool local_sampled = false;
        for (std::size_t i = begin; i < end; ++i) {
            IndicatorResult r = indicator_f(spec.map, spec.q_set, draws[i], opts.method);
            if (r.robust) ++local;
            if (r.guarantee == Guarantee::Sampled) local_sampled = true;
        }
        successes.fetch_add(local, std::memory_order_relaxed);
        if (local_sampled) sampled.store(true, std::memory_order_relaxed);
    });

    ProbabilityEstimate out;
    out.value = static_cast<double>(successes.load()) / static_cast<double>(n);
    out.method = EstimateMethod::Scenario;
    out.guarantee = sampled.load() ? Guarantee::Sampled : Guarantee::Certified;
    out.scenario = ScenarioCertificate{opts.epsilon, opts.theta, n};
    return out;
}

ProbabilityEstimate solve_q_delta(const ProblemSpec& spec, const SolveOptions& opts) {
    if (spec.problem != ProblemType::QDelta) throw InvalidParamsError("expected a Problem I spec");
    spec.validate();
    return solve_generic(spec, opts);
}

ProbabilityEstimate solve_q_of_delta(const ProblemSpec& spec, const SolveOptions& opts) {
    if (spec.problem != ProblemType::QofDelta) {
        throw InvalidParamsError("expected a Problem II spec");
    }
    spec.validate();
    return solve_generic(spec, opts);
}

ProbabilityEstimate delta_of_q_pointwise(const ProblemSpec& spec, std::span<const double> q,
                                         const TwoStepOptions& inner) {
    DiscreteSet singleton;
    singleton.points.push_back(std::vector<double>(q.begin(), q.end()));
    return two_step(spec, inner, q, UncertaintySet(singleton));
}

ProbabilityEstimate solve_delta_of_q(const ProblemSpec& spec, const DeltaOfQOptions& opts) {
    if (spec.problem != ProblemType::DeltaOfQ) {
        throw InvalidParamsError("expected a Problem III spec");
    }
    spec.validate();
    if (spec.map.m > 2) throw DimensionTooHighError("Problem III measure needs m <= 2");

    auto evaluate_batch = [&](const std::vector<std::vector<double>>& qs,
                              std::vector<ProbabilityEstimate>& out) {
        out.resize(qs.size());
        detail::parallel_chunks(qs.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = delta_of_q_pointwise(spec, qs[i], opts.inner);
            }
        });
    };

    auto better = [](const std::pair<double, std::vector<double>>& a,
                     const std::pair<double, std::vector<double>>& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;  // lexicographically smallest q wins ties
    };

    std::vector<std::vector<double>> grid = enumerate_q(spec.q_set, opts.q_resolution);
    std::vector<ProbabilityEstimate> values;
    evaluate_batch(grid, values);

    std::pair<double, std::vector<double>> incumbent{std::numeric_limits<double>::infinity(), {}};
    ProbabilityEstimate incumbent_est;
    bool any_sampled = false;
    auto absorb = [&](const std::vector<std::vector<double>>& qs,
                      const std::vector<ProbabilityEstimate>& vals) {
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if (vals[i].guarantee == Guarantee::Sampled) any_sampled = true;
            std::pair<double, std::vector<double>> cand{vals[i].value, qs[i]};
            if (better(cand, incumbent)) {
                incumbent = cand;
                incumbent_est = vals[i];
            }
        }
    };
    absorb(grid, values);

    const auto* box = std::get_if<Box>(&spec.q_set);
    if (box != nullptr) {
        std::vector<double> spacing(box->lo.size());
        for (std::size_t i = 0; i < spacing.size(); ++i) {
            spacing[i] = (box->hi[i] - box->lo[i]) / std::max(1, opts.q_resolution - 1);
        }
        for (int round = 0; round < opts.refine; ++round) {
            Box local;
            for (std::size_t i = 0; i < spacing.size(); ++i) {
                local.lo.push_back(std::max(box->lo[i], incumbent.second[i] - spacing[i]));
                local.hi.push_back(std::min(box->hi[i], incumbent.second[i] + spacing[i]));
                spacing[i] = (local.hi[i] - local.lo[i]) / std::max(1, opts.q_resolution - 1);
            }
            grid = enumerate_q(UncertaintySet(local), opts.q_resolution);
            evaluate_batch(grid, values);
            absorb(grid, values);
        }
    }

    ProbabilityEstimate out = incumbent_est;
    out.worst_q = incumbent.second;
    if (any_sampled) out.guarantee = Guarantee::Sampled;
    return out;
}

ProbabilityEstimate solve_discrete(const ProblemSpec& spec, const RobustMethod& method) {
    spec.validate();
    bool any_sampled = false;

    if (spec.problem == ProblemType::DeltaOfQ) {
        const auto* qset = std::get_if<DiscreteSet>(&spec.q_set);
        if (qset == nullptr) throw NotDiscreteError("Problem III closed form needs a discrete Q");
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> best_q;
        for (const auto& q : qset->points) {
            JointSupport joint = joint_discrete_support(resolve_distribution(spec.delta_dist, q));
            double acc = 0.0;
            for (std::size_t j = 0; j < joint.points.size(); ++j) {
                if (spec.map.stable_at(q, joint.points[j])) acc += joint.probs[j];
            }
            if (acc < best || (acc == best && q < best_q)) {
                best = acc;
                best_q = q;
            }
        }
        ProbabilityEstimate out;
        out.value = best;
        out.method = EstimateMethod::DiscreteSum;
        out.guarantee = Guarantee::Certified;
        out.exact = true;
        out.worst_q = best_q;
        return out;
    }

    // Problems I and II: sum of indicator terms over the delta support.
    JointSupport joint = joint_discrete_support(resolve_distribution(spec.delta_dist, {}));
    double acc = 0.0;
    for (std::size_t j = 0; j < joint.points.size(); ++j) {
        IndicatorResult r = indicator_f(spec.map, spec.q_set, joint.points[j], method);
        if (r.guarantee == Guarantee::Sampled) any_sampled = true;
        if (r.robust) acc += joint.probs[j];
    }
    ProbabilityEstimate out;
    out.value = acc;
    out.method = EstimateMethod::DiscreteSum;
    out.guarantee = any_sampled ? Guarantee::Sampled : Guarantee::Certified;
    out.exact = true;
    return out;
}

std::pair<ProbabilityEstimate, ProbabilityEstimate> bounds_q_of_delta(const ProblemSpec& spec,
                                                                      const BoundsOptions& opts) {
    if (spec.problem != ProblemType::QofDelta) {
        throw InvalidParamsError("the union/intersection bounds apply to Problem II");
    }
    spec.validate();
    const auto* pbox = std::get_if<ParamBox>(&spec.q_set);
    if (pbox == nullptr) {
        throw InvalidParamsError("the union/intersection bounds need a param_box Q(delta)");
    }
    auto support = delta_support(spec, opts.truncation_mass);
    std::size_t n = pbox->lo.size();

    // Prefer the exact affine ranges; emptiness of some Q(delta) forces the
    // grid path so empty slices can be skipped in the union.
    bool maybe_empty = false;
    std::vector<std::pair<double, double>> lo_rng(n), hi_rng(n);
    bool all_affine = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!affine_in_d(pbox->lo[i]) || !affine_in_d(pbox->hi[i])) {
            all_affine = false;
            break;
        }
    }
    if (all_affine) {
        for (std::size_t i = 0; i < n; ++i) {
            lo_rng[i] = expr_range_over_delta(pbox->lo[i], support, opts.delta_grid);
            hi_rng[i] = expr_range_over_delta(pbox->hi[i], support, opts.delta_grid);
        }
        // If some slice might be empty (pessimistic, ranges ignore the
        // lo/hi correlation), fall back to the grid so empties are skipped.
        for (std::size_t i = 0; i < n && !maybe_empty; ++i) {
            if (hi_rng[i].first < lo_rng[i].second) maybe_empty = true;
        }
    }

    Box union_box, inter_box;
    bool union_empty = true, inter_empty = false;
    bool saw_empty_slice = false;
    if (all_affine && !maybe_empty) {
        union_empty = false;
        for (std::size_t i = 0; i < n; ++i) {
            union_box.lo.push_back(lo_rng[i].first);
            union_box.hi.push_back(hi_rng[i].second);
            inter_box.lo.push_back(lo_rng[i].second);
            inter_box.hi.push_back(hi_rng[i].first);
            if (inter_box.lo[i] > inter_box.hi[i]) inter_empty = true;
        }
    } else {
        union_box.lo.assign(n, std::numeric_limits<double>::infinity());
        union_box.hi.assign(n, -std::numeric_limits<double>::infinity());
        inter_box.lo.assign(n, -std::numeric_limits<double>::infinity());
        inter_box.hi.assign(n, std::numeric_limits<double>::infinity());
        for_each_grid_point(support, opts.delta_grid, [&](std::span<const double> d) {
            auto resolved = resolve_set(spec.q_set, d);
            if (!resolved) {
                saw_empty_slice = true;
                return;
            }
            const Box& b = std::get<Box>(*resolved);
            union_empty = false;
            for (std::size_t i = 0; i < n; ++i) {
                union_box.lo[i] = std::min(union_box.lo[i], b.lo[i]);
                union_box.hi[i] = std::max(union_box.hi[i], b.hi[i]);
                inter_box.lo[i] = std::max(inter_box.lo[i], b.lo[i]);
                inter_box.hi[i] = std::min(inter_box.hi[i], b.hi[i]);
            }
        });
        if (saw_empty_slice) inter_empty = true;
        for (std::size_t i = 0; i < n && !inter_empty; ++i) {
            if (inter_box.lo[i] > inter_box.hi[i]) inter_empty = true;
        }
    }

    auto problem_one = [&](const Box& q_box) {
        ProblemSpec inner{spec.map, UncertaintySet(q_box), spec.delta_dist, ProblemType::QDelta};
        return solve_q_delta(inner, opts.inner);
    };

    ProbabilityEstimate lower = union_empty ? vacuous_estimate() : problem_one(union_box);
    ProbabilityEstimate upper = inter_empty ? vacuous_estimate() : problem_one(inter_box);
    return {lower, upper};
}

QuantileCertificate quantile_lower_bound(const ProblemSpec& spec, double p,
                                         const QuantileOptions& opts) {
    spec.validate();
    QuantileCertificate out;
    if (p <= 0.0) {
        out.certified = true;  // empty quantile set, vacuous
        return out;
    }
    if (p >= 1.0) throw DomainError("quantile level must be below 1");
    int m = spec.map.m;
    double per_axis = std::pow(p, 1.0 / m);

    // Build the quantile box, valid for every q when the law is
    // q-parameterized (Problem III).
    std::vector<std::pair<double, double>> qp(static_cast<std::size_t>(m));
    if (!spec.delta_dist.depends_on_q()) {
        auto ms = resolve_distribution(spec.delta_dist, {});
        for (int i = 0; i < m; ++i) {
            qp[static_cast<std::size_t>(i)] = central_interval(ms[static_cast<std::size_t>(i)],
                                                               per_axis);
        }
    } else {
        auto q_grid = enumerate_q(spec.q_set, opts.q_resolution);
        for (int i = 0; i < m; ++i) {
            qp[static_cast<std::size_t>(i)] = {-std::numeric_limits<double>::infinity(),
                                               std::numeric_limits<double>::infinity()};
        }
        for (const auto& q : q_grid) {
            auto ms = resolve_distribution(spec.delta_dist, q);
            for (int i = 0; i < m; ++i) {
                auto iv = central_interval(ms[static_cast<std::size_t>(i)], per_axis);
                auto& slot = qp[static_cast<std::size_t>(i)];
                slot.first = std::max(slot.first, iv.first);
                slot.second = std::min(slot.second, iv.second);
            }
        }
        for (const auto& [a, b] : qp) {
            if (!(a <= b)) return out;  // no common quantile box; cannot certify
        }
        // Verify the box really captures mass >= p for every probed q.
        for (const auto& q : q_grid) {
            auto ms = resolve_distribution(spec.delta_dist, q);
            double mass = 1.0;
            for (int i = 0; i < m; ++i) {
                const auto& slot = qp[static_cast<std::size_t>(i)];
                mass *= cdf_scalar(ms[static_cast<std::size_t>(i)], slot.second) -
                        cdf_scalar(ms[static_cast<std::size_t>(i)], slot.first);
            }
            if (mass < p - 1e-12) return out;
        }
    }
    out.quantile_box = qp;

    // Deterministic block in q: Q itself, or the hull of Q(delta) over the
    // quantile box for Problem II.
    UncertaintySet base_q = spec.q_set;
    if (is_parameterized(spec.q_set)) {
        std::size_t n = static_cast<std::size_t>(spec.map.n);
        Box hull;
        hull.lo.assign(n, std::numeric_limits<double>::infinity());
        hull.hi.assign(n, -std::numeric_limits<double>::infinity());
        bool nonempty = false;
        for_each_grid_point(qp, opts.delta_grid, [&](std::span<const double> d) {
            auto resolved = resolve_set(spec.q_set, d);
            if (!resolved) return;
            nonempty = true;
            for (const auto& pt : enumerate_q(*resolved, 2)) {
                for (std::size_t i = 0; i < n; ++i) {
                    hull.lo[i] = std::min(hull.lo[i], pt[i]);
                    hull.hi[i] = std::max(hull.hi[i], pt[i]);
                }
            }
        });
        if (!nonempty) {
            out.certified = true;  // Q(delta) empty across Q_p: vacuous
            return out;
        }
        base_q = UncertaintySet(hull);
    }

    if (const auto* box = std::get_if<Box>(&base_q)) {
        // Combined deterministic block (q, delta) over Box x Q_p.
        std::vector<Expression> combined;
        combined.reserve(spec.map.coeff_exprs.size());
        for (const Expression& e : spec.map.coeff_exprs) combined.push_back(shift_d_to_q(e));
        CoefficientMap cmap(spec.map.kind, spec.map.n + m, 0, std::move(combined));
        Box cbox = *box;
        for (int i = 0; i < m; ++i) {
            cbox.lo.push_back(qp[static_cast<std::size_t>(i)].first);
            cbox.hi.push_back(qp[static_cast<std::size_t>(i)].second);
        }
        IndicatorResult r = indicator_f(cmap, UncertaintySet(cbox), {});
        out.certified = r.robust;
        out.guarantee = r.guarantee;
        return out;
    }

    // Product of a non-box Q with the quantile box: probe delta on a grid.
    bool ok = true;
    Guarantee g = Guarantee::Sampled;  // the delta grid itself is a sample
    for_each_grid_point(qp, opts.q_resolution, [&](std::span<const double> d) {
        if (!ok) return;
        IndicatorResult r = indicator_f(spec.map, base_q, d);
        if (!r.robust) ok = false;
    });
    out.certified = ok;
    out.guarantee = g;
    return out;
}

}  // namespace mixedrobust
