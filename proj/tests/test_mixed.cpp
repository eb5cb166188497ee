#include <doctest.h>

#include <cmath>
#include <random>

#include "mixedrobust/mixed.hpp"

using namespace mixedrobust;

namespace {

std::vector<Expression> banded_coeffs() {
    std::vector<Expression> coeffs;
    coeffs.push_back(parse_expression("3", 1, 1));
    coeffs.push_back(parse_expression("2", 1, 1));
    coeffs.push_back(parse_expression("2 - abs(q1 - d1)", 1, 1));
    coeffs.push_back(parse_expression("1", 1, 1));
    return coeffs;
}

// |q - delta| < 0.5 is the exact stability condition of this family.
CoefficientMap banded_cubic() {
    return CoefficientMap(StabilityKind::Hurwitz, 1, 1, banded_coeffs());
}

ProblemSpec spec_531() {
    ProblemSpec spec;
    spec.map = banded_cubic();
    spec.q_set = Box{{1.0}, {1.5}};
    spec.delta_dist.marginals.push_back(UniformDist{0.25, 1.75});
    spec.problem = ProblemType::QDelta;
    return spec;
}

ParamBox param_box_532() {
    ParamBox pb;
    pb.lo.push_back(parse_expression("1 - d1/3", 0, 1));
    pb.hi.push_back(parse_expression("2 - d1", 0, 1));
    return pb;
}

ProblemSpec spec_532() {
    ProblemSpec spec;
    spec.map = banded_cubic();
    spec.q_set = param_box_532();
    spec.delta_dist.marginals.push_back(UniformDist{0.25, 1.5});
    spec.problem = ProblemType::QofDelta;
    return spec;
}

ProblemSpec spec_533() {
    ProblemSpec spec;
    spec.map = banded_cubic();
    ParamBox pb;
    pb.lo.push_back(parse_expression("0.5*(1.5 - d1/3 + abs(0.5 - d1/3))", 0, 1));
    pb.hi.push_back(parse_expression("0.5*(2.5 - d1 + abs(1.5 - d1))", 0, 1));
    spec.q_set = pb;
    spec.delta_dist.marginals.push_back(LaplaceDist{1.0, 0.1});
    spec.problem = ProblemType::QofDelta;
    return spec;
}

ProblemSpec spec_534() {
    ProblemSpec spec;
    spec.map = banded_cubic();
    spec.q_set = Box{{0.7}, {1.1}};
    spec.delta_dist.marginals.push_back(
        NormalDist{parse_expression("1.4 - 0.5*q1", 1, 0), parse_expression("q1/8", 1, 0)});
    spec.problem = ProblemType::DeltaOfQ;
    return spec;
}

TwoStepOptions tight_1d(double lo, double hi) {
    TwoStepOptions opts;
    opts.search_lo = {lo};
    opts.search_hi = {hi};
    opts.tol = 1e-12;
    return opts;
}

}  // namespace

TEST_CASE("chernoff sample size") {
    CHECK(chernoff_sample_size(0.01, 1e-7) == 84057);
    CHECK(chernoff_sample_size(0.05, 0.01) == 1060);
    CHECK(chernoff_sample_size(0.99, 0.99) == 1);  // floored at one sample
    CHECK_THROWS_AS(chernoff_sample_size(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(chernoff_sample_size(0.5, 1.0), DomainError);

    // Nonincreasing in both arguments.
    long long prev = chernoff_sample_size(0.001, 0.5);
    for (double eps : {0.005, 0.01, 0.05, 0.2, 0.8}) {
        long long n = chernoff_sample_size(eps, 0.5);
        CHECK(n <= prev);
        prev = n;
    }
    prev = chernoff_sample_size(0.05, 1e-9);
    for (double theta : {1e-6, 1e-3, 0.1, 0.9}) {
        long long n = chernoff_sample_size(0.05, theta);
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("scenario on constant families hits the exact endpoints") {
    ProblemSpec stable;
    std::vector<Expression> cs;
    for (const char* t : {"3", "2", "2", "1"}) cs.push_back(parse_expression(t, 1, 1));
    stable.map = CoefficientMap(StabilityKind::Hurwitz, 1, 1, std::move(cs));
    stable.q_set = Box{{-1.0}, {1.0}};
    stable.delta_dist.marginals.push_back(UniformDist{-1.0, 1.0});
    stable.problem = ProblemType::QDelta;
    ScenarioOptions opts;
    opts.epsilon = 0.05;
    opts.theta = 0.01;
    ProbabilityEstimate p = scenario_estimate(stable, opts);
    CHECK(p.value == 1.0);
    CHECK(p.method == EstimateMethod::Scenario);
    REQUIRE(p.scenario.has_value());
    CHECK(p.scenario->samples == 1060);

    ProblemSpec unstable = stable;
    std::vector<Expression> cu;
    for (const char* t : {"3", "2", "1.4", "1"}) cu.push_back(parse_expression(t, 1, 1));
    unstable.map = CoefficientMap(StabilityKind::Hurwitz, 1, 1, std::move(cu));
    CHECK(scenario_estimate(unstable, opts).value == 0.0);
}

TEST_CASE("two-step solutions of the banded-cubic examples") {
    SolveOptions opts;
    opts.strategy = SolveStrategy::TwoStep;
    opts.two_step = tight_1d(0.0, 3.0);

    ProbabilityEstimate p1 = solve_q_delta(spec_531(), opts);
    CHECK(std::abs(p1.value - 1.0 / 3.0) < 1e-9);
    CHECK(p1.method == EstimateMethod::ExactCdf);

    ProbabilityEstimate p2 = solve_q_of_delta(spec_532(), opts);
    CHECK(std::abs(p2.value - 0.3) < 1e-6);

    ProbabilityEstimate p3 = solve_q_of_delta(spec_533(), opts);
    CHECK(std::abs(p3.value - 0.8157) < 5e-4);
}

TEST_CASE("vacuously robust Problem II solves to one") {
    ProblemSpec spec = spec_532();
    ParamBox pb;  // empty at every delta in the support
    pb.lo.push_back(parse_expression("2", 0, 1));
    pb.hi.push_back(parse_expression("1", 0, 1));
    spec.q_set = pb;
    SolveOptions opts;
    opts.strategy = SolveStrategy::TwoStep;
    opts.two_step = tight_1d(0.0, 3.0);
    CHECK(solve_q_of_delta(spec, opts).value == doctest::Approx(1.0));
}

TEST_CASE("scenario and two-step agree within the certificate") {
    SolveOptions two_step;
    two_step.strategy = SolveStrategy::TwoStep;
    two_step.two_step = tight_1d(0.0, 3.0);
    struct Case {
        ProblemSpec spec;
        double exact;
    };
    Case cases[] = {{spec_531(), 1.0 / 3.0}, {spec_532(), 0.3}, {spec_533(), 0.8157051}};
    for (const Case& c : cases) {
        for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
            ScenarioOptions sc;
            sc.seed = seed;
            ProbabilityEstimate est = scenario_estimate(c.spec, sc);
            CHECK(std::abs(est.value - c.exact) <= sc.epsilon);
        }
    }
}

TEST_CASE("Problem III on the q-dependent normal law") {
    DeltaOfQOptions opts;
    opts.inner = tight_1d(-0.5, 3.0);
    opts.inner.tol = 1e-9;
    ProbabilityEstimate est = solve_delta_of_q(spec_534(), opts);
    CHECK(std::abs(est.value - 0.9568) < 1e-3);
    REQUIRE(est.worst_q.has_value());
    CHECK(std::abs(est.worst_q->at(0) - 0.7) < 5e-3);

    // Interior probe of the p(q) curve.
    ProbabilityEstimate probe =
        delta_of_q_pointwise(spec_534(), std::vector<double>{1.1}, opts.inner);
    CHECK(std::abs(probe.value - 0.9655) < 1e-3);

    // Internal consistency: the reported minimum is <= p(q) at probes.
    for (double q : {0.7, 0.8, 0.9, 1.0, 1.1}) {
        ProbabilityEstimate at =
            delta_of_q_pointwise(spec_534(), std::vector<double>{q}, opts.inner);
        CHECK(est.value <= at.value + 1e-12);
    }
}

TEST_CASE("Problem III reduces to Problem I when nothing depends on q") {
    ProblemSpec spec = spec_531();
    spec.problem = ProblemType::DeltaOfQ;
    spec.q_set = DiscreteSet{{{1.25}}};
    DeltaOfQOptions opts;
    opts.inner = tight_1d(0.0, 3.0);
    ProbabilityEstimate est = solve_delta_of_q(spec, opts);
    // Singleton q: p = Prob[|1.25 - delta| < 0.5] = Prob[0.75 < delta < 1.75] = 2/3.
    CHECK(std::abs(est.value - 2.0 / 3.0) < 1e-9);
    REQUIRE(est.worst_q.has_value());
    CHECK(est.worst_q->at(0) == doctest::Approx(1.25));
}

TEST_CASE("discrete closed forms") {
    // M = 1 with unit probability reduces to the deterministic indicator.
    ProblemSpec one = spec_531();
    one.delta_dist.marginals.clear();
    one.delta_dist.marginals.push_back(DiscretePMF{{1.25}, {1.0}});
    ProbabilityEstimate p_one = solve_discrete(one);
    CHECK(p_one.value == 1.0);
    CHECK(p_one.exact);
    one.delta_dist.marginals.clear();
    one.delta_dist.marginals.push_back(DiscretePMF{{2.5}, {1.0}});
    CHECK(solve_discrete(one).value == 0.0);

    // Hand-built 2x2 instance: delta in {1.2 w.p. 0.6, 2.0 w.p. 0.4},
    // Q = {1.0, 1.4}; only delta = 1.2 is robust.
    ProblemSpec inst;
    inst.map = banded_cubic();
    inst.q_set = DiscreteSet{{{1.0}, {1.4}}};
    inst.delta_dist.marginals.push_back(DiscretePMF{{1.2, 2.0}, {0.6, 0.4}});
    inst.problem = ProblemType::QDelta;
    ProbabilityEstimate p = solve_discrete(inst);
    CHECK(p.value == 0.6);
    CHECK(p.method == EstimateMethod::DiscreteSum);
    CHECK(p.guarantee == Guarantee::Certified);

    // Problem III with two alternatives equals the hand-enumerated minimum.
    ProblemSpec third;
    third.map = banded_cubic();
    third.q_set = DiscreteSet{{{1.0}, {1.4}}};
    third.delta_dist.marginals.push_back(DiscretePMF{{0.8, 1.2, 1.6}, {0.3, 0.5, 0.2}});
    third.problem = ProblemType::DeltaOfQ;
    ProbabilityEstimate p3 = solve_discrete(third);
    // q = 1.0: stable deltas {0.8, 1.2} -> 0.8; q = 1.4: stable {1.2, 1.6} -> 0.7.
    CHECK(p3.value == doctest::Approx(0.7));
    REQUIRE(p3.worst_q.has_value());
    CHECK(p3.worst_q->at(0) == doctest::Approx(1.4));

    CHECK_THROWS_AS(solve_discrete(spec_531()), NotDiscreteError);
}

TEST_CASE("discrete solver equals brute-force enumeration") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> value(0.0, 2.5);
    std::uniform_real_distribution<double> prob(0.05, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        int m = count(rng), k = count(rng);
        std::vector<double> deltas(m), probs(m);
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            deltas[j] = value(rng);
            probs[j] = prob(rng);
            total += probs[j];
        }
        for (double& p : probs) p /= total;
        // Renormalize exactly once more so the sum is 1 within 1e-12.
        double sum = 0.0;
        for (double p : probs) sum += p;
        probs[0] += 1.0 - sum;

        DiscreteSet qset;
        for (int i = 0; i < k; ++i) qset.points.push_back({value(rng)});

        ProblemSpec spec;
        spec.map = banded_cubic();
        spec.q_set = qset;
        DiscretePMF pmf;
        for (int j = 0; j < m; ++j) {
            pmf.values.push_back(deltas[j]);
            pmf.probs.push_back(probs[j]);
        }
        spec.delta_dist.marginals.push_back(pmf);
        spec.problem = ProblemType::QDelta;

        // Oracle: enumerate all (q, delta) pairs against |q - delta| < 0.5.
        auto marg = resolve_marginal(spec.delta_dist.marginals[0], {});
        const auto& sorted = std::get<RDiscrete>(marg);
        double expected = 0.0;
        for (std::size_t j = 0; j < sorted.values.size(); ++j) {
            bool robust = true;
            for (const auto& qpt : qset.points) {
                if (!(std::abs(qpt[0] - sorted.values[j]) < 0.5)) robust = false;
            }
            if (robust) expected += sorted.probs[j];
        }
        CHECK(solve_discrete(spec).value == expected);
    }
}

TEST_CASE("union and intersection bounds bracket the Problem II answer") {
    BoundsOptions opts;
    opts.inner.strategy = SolveStrategy::TwoStep;
    opts.inner.two_step = tight_1d(0.0, 3.0);
    auto [lower, upper] = bounds_q_of_delta(spec_532(), opts);
    CHECK(lower.value == doctest::Approx(0.0));
    CHECK(upper.value == doctest::Approx(1.0));

    // Constant Q(delta) collapses both bounds onto the exact answer.
    ProblemSpec constant = spec_532();
    ParamBox pb;
    pb.lo.push_back(parse_expression("1 + 0*d1", 0, 1));
    pb.hi.push_back(parse_expression("1.5 + 0*d1", 0, 1));
    constant.q_set = pb;
    constant.delta_dist.marginals.clear();
    constant.delta_dist.marginals.push_back(UniformDist{0.25, 1.75});
    auto [clo, chi] = bounds_q_of_delta(constant, opts);
    CHECK(std::abs(clo.value - 1.0 / 3.0) < 1e-9);
    CHECK(std::abs(chi.value - 1.0 / 3.0) < 1e-9);

    SolveOptions exact_opts;
    exact_opts.strategy = SolveStrategy::TwoStep;
    exact_opts.two_step = tight_1d(0.0, 3.0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> jitter(-0.08, 0.08);
    for (int trial = 0; trial < 30; ++trial) {
        ProblemSpec spec = spec_532();
        ParamBox perturbed;
        double a = jitter(rng), b = jitter(rng);
        perturbed.lo.push_back(
            parse_expression("1 - d1/3 + " + std::to_string(a), 0, 1));
        perturbed.hi.push_back(parse_expression("2 - d1 + " + std::to_string(b), 0, 1));
        spec.q_set = perturbed;
        auto [lo, hi] = bounds_q_of_delta(spec, opts);
        ProbabilityEstimate exact = solve_q_of_delta(spec, exact_opts);
        CHECK(lo.value <= exact.value + 1e-9);
        CHECK(exact.value <= hi.value + 1e-9);
    }
}

TEST_CASE("quantile lower bound certificates") {
    // Central interval [0.775, 1.225] is too wide against Q = [1, 1.5].
    QuantileCertificate cert = quantile_lower_bound(spec_531(), 0.3);
    CHECK_FALSE(cert.certified);

    ProblemSpec shrunk = spec_531();
    shrunk.q_set = DiscreteSet{{{1.25}}};
    QuantileCertificate cert2 = quantile_lower_bound(shrunk, 0.3);
    CHECK(cert2.certified);

    CHECK(quantile_lower_bound(spec_531(), 0.0).certified);  // empty quantile set
}

TEST_CASE("problem spec validation") {
    ProblemSpec bad = spec_532();
    bad.problem = ProblemType::QDelta;  // Problem I forbids Q(delta)
    CHECK_THROWS_AS(bad.validate(), InvalidParamsError);

    ProblemSpec bad2 = spec_534();
    bad2.problem = ProblemType::QofDelta;  // Problem II needs a q-free law
    CHECK_THROWS_AS(bad2.validate(), InvalidParamsError);

    ProblemSpec bad3 = spec_531();
    bad3.q_set = Box{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(bad3.validate(), DimensionMismatchError);

    CHECK_THROWS_AS(scenario_estimate(spec_534(), {}), InvalidParamsError);
}

TEST_CASE("auto strategy falls back to the scenario engine above two random axes") {
    ProblemSpec spec;
    std::vector<Expression> coeffs;
    coeffs.push_back(parse_expression("d1 + d2 + d3", 0, 3));
    coeffs.push_back(parse_expression("1", 0, 3));
    spec.map = CoefficientMap(StabilityKind::Hurwitz, 0, 3, std::move(coeffs));
    spec.q_set = Box{{}, {}};
    for (int i = 0; i < 3; ++i) spec.delta_dist.marginals.push_back(UniformDist{-1.0, 1.0});
    spec.problem = ProblemType::QDelta;

    SolveOptions opts;  // Auto
    opts.scenario.samples_override = 4000;
    opts.scenario.seed = 11;
    ProbabilityEstimate est = solve_q_delta(spec, opts);
    CHECK(est.method == EstimateMethod::Scenario);
    // Stable iff d1 + d2 + d3 > 0; symmetric law, so p = 1/2.
    CHECK(std::abs(est.value - 0.5) < 0.05);

    SolveOptions forced;
    forced.strategy = SolveStrategy::TwoStep;
    CHECK_THROWS_AS(solve_q_delta(spec, forced), DimensionTooHighError);
}
