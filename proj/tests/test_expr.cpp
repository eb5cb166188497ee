#include <doctest.h>

#include <cmath>
#include <random>

#include "mixedrobust/expr.hpp"

using namespace mixedrobust;

namespace {

double eval(const std::string& text, int n, int m, std::vector<double> q, std::vector<double> d) {
    return parse_expression(text, n, m).evaluate(q, d);
}

}  // namespace

TEST_CASE("parse examples") {
    Expression e = parse_expression("2 - abs(q1 - d1)", 1, 1);
    CHECK(e.evaluate(std::vector<double>{1.2}, std::vector<double>{1.0}) ==
          doctest::Approx(1.8));

    CHECK_THROWS_AS(parse_expression("q3", 2, 1), UnknownVariableError);

    Expression affine = parse_expression("1.4 - 0.5*q1", 1, 0);
    CHECK(affine.evaluate(std::vector<double>{2.0}, {}) == doctest::Approx(0.4));
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        parse_expression("1 + * 2", 0, 0);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 4);
    }
    try {
        parse_expression("2 * q9", 1, 0);
        FAIL("expected an unknown-variable error");
    } catch (const UnknownVariableError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS(parse_expression("", 0, 0), SyntaxError);
    CHECK_THROWS_AS(parse_expression("(1 + 2", 0, 0), SyntaxError);
    CHECK_THROWS_AS(parse_expression("abs 2", 0, 0), SyntaxError);
}

TEST_CASE("evaluation semantics") {
    CHECK(eval("100*q1*q1 + 25*q2*q2", 2, 0, {0.3, 0.0}, {}) == doctest::Approx(9.0));
    CHECK_THROWS_AS(eval("1/(q1)", 1, 0, {0.0}, {}), DivisionByZeroError);
    try {
        eval("2 + 1/(q1 - q1)", 1, 0, {3.0}, {});
        FAIL("expected division by zero");
    } catch (const DivisionByZeroError& e) {
        CHECK(e.fragment.find("1/(q1 - q1)") != std::string::npos);
    }
}

TEST_CASE("twenty fixed evaluation triples") {
    struct Row {
        const char* text;
        int n, m;
        std::vector<double> q, d;
        double expected;
    };
    const Row rows[] = {
        {"1 + 2", 0, 0, {}, {}, 3.0},
        {"2*3 + 4", 0, 0, {}, {}, 10.0},
        {"2*(3 + 4)", 0, 0, {}, {}, 14.0},
        {"-5 + 2", 0, 0, {}, {}, -3.0},
        {"--5", 0, 0, {}, {}, 5.0},
        {"10/4", 0, 0, {}, {}, 2.5},
        {"1 - 2 - 3", 0, 0, {}, {}, -4.0},
        {"12/3/2", 0, 0, {}, {}, 2.0},
        {"abs(-7)", 0, 0, {}, {}, 7.0},
        {"1.5e2", 0, 0, {}, {}, 150.0},
        {"2.5E-1", 0, 0, {}, {}, 0.25},
        {"q1", 1, 0, {4.25}, {}, 4.25},
        {"d1*d2", 0, 2, {}, {2.0, 3.5}, 7.0},
        {"q1 - d1", 1, 1, {1.0, }, {0.25}, 0.75},
        {"2 - abs(q1 - d1)", 1, 1, {0.3}, {0.8}, 1.5},
        {"(1 + q1)*2 + d1", 1, 1, {2.0}, {0.5}, 6.5},
        {"q1*q2 - q1/q2", 2, 0, {6.0, 2.0}, {}, 9.0},
        {"1 - d1/3", 0, 1, {}, {1.5}, 0.5},
        {"abs(q1)*abs(d1)", 1, 1, {-2.0}, {-3.0}, 6.0},
        {"0.5*(2.5 - d1 + abs(1.5 - d1))", 0, 1, {}, {2.0}, 0.5},
    };
    for (const Row& row : rows) {
        CAPTURE(row.text);
        CHECK(eval(row.text, row.n, row.m, row.q, row.d) == doctest::Approx(row.expected));
    }
}

TEST_CASE("print round trip is idempotent") {
    const char* samples[] = {
        "2 - abs(q1 - d1)",
        "(1 + q1)*2 + d1",
        "-(q1 + d1)*3 - 4/d2",
        "1.25e-3*q2 - abs(d1*(2 - q1))",
        "1 - 2 - 3 - q1/(d1 - 5)",
    };
    for (const char* text : samples) {
        CAPTURE(text);
        Expression first = parse_expression(text, 2, 2);
        std::string printed = to_string(first);
        Expression second = parse_expression(printed, 2, 2);
        CHECK(to_string(second) == printed);

        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> q{u(rng), u(rng)}, d{u(rng), u(rng)};
            double a, b;
            try {
                a = first.evaluate(q, d);
                b = second.evaluate(q, d);
            } catch (const DivisionByZeroError&) {
                continue;
            }
            CHECK(a == b);  // bit-identical evaluation
        }
    }
}

TEST_CASE("affine detection and extraction") {
    Expression e = parse_expression("(1 + q1)*2 + d1", 1, 1);
    auto aff = affine_in_q(e);
    REQUIRE(aff.has_value());
    std::vector<double> d{0.75};
    std::vector<double> zero_q{0.0};
    CHECK(aff->constant.evaluate(zero_q, d) == doctest::Approx(2.75));
    CHECK(aff->q_coeffs[0].evaluate(zero_q, d) == doctest::Approx(2.0));

    CHECK_FALSE(is_affine_in_q(parse_expression("2 - abs(q1 - d1)", 1, 1)));
    CHECK_FALSE(is_affine_in_q(parse_expression("q1*q1", 1, 0)));
    CHECK_FALSE(is_affine_in_q(parse_expression("q1/2", 1, 0)));  // division disables the path
    CHECK(is_affine_in_q(parse_expression("abs(d1)*q1 + d2", 1, 2)));
}

TEST_CASE("affine expressions are linear in q (three-point collinearity)") {
    const char* samples[] = {
        "(1 + q1)*2 + d1",
        "3*q1 - q2*abs(d1) + 5",
        "d1*(q1 + q2) - 2*q2 + d2",
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const char* text : samples) {
        Expression e = parse_expression(text, 2, 2);
        REQUIRE(is_affine_in_q(e));
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> d{u(rng), u(rng)};
            std::vector<double> q0{u(rng), u(rng)}, q1{u(rng), u(rng)};
            std::vector<double> mid{0.5 * (q0[0] + q1[0]), 0.5 * (q0[1] + q1[1])};
            double f0 = e.evaluate(q0, d), f1 = e.evaluate(q1, d), fm = e.evaluate(mid, d);
            CHECK(fm == doctest::Approx(0.5 * (f0 + f1)).epsilon(1e-12));
        }
    }
}
