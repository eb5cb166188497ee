#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "mixedrobust/poly.hpp"

using namespace mixedrobust;

namespace {

// Independent oracle: stability read directly off the computed roots.
double max_real_part(const Polynomial& p) {
    double worst = -1e300;
    for (const auto& r : roots(p)) worst = std::max(worst, r.real());
    return worst;
}

double max_modulus(const Polynomial& p) {
    double worst = 0.0;
    for (const auto& r : roots(p)) worst = std::max(worst, std::abs(r));
    return worst;
}

Polynomial random_poly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(1, max_degree);
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    int d = deg(rng);
    std::vector<double> c(static_cast<std::size_t>(d) + 1);
    for (double& v : c) v = coeff(rng);
    if (std::abs(c.back()) < 0.1) c.back() = c.back() < 0 ? -0.1 : 0.1;
    return Polynomial(c);
}

}  // namespace

TEST_CASE("roots of factored forms") {
    auto r1 = roots(Polynomial({-1.0, 0.0, 1.0}));  // x^2 - 1
    std::sort(r1.begin(), r1.end(), [](auto a, auto b) { return a.real() < b.real(); });
    CHECK(std::abs(r1[0] - std::complex<double>(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(r1[1] - std::complex<double>(1.0, 0.0)) < 1e-12);

    auto r2 = roots(Polynomial({1.0, 0.0, 1.0}));  // x^2 + 1
    std::sort(r2.begin(), r2.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(std::abs(r2[0] - std::complex<double>(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(r2[1] - std::complex<double>(0.0, 1.0)) < 1e-12);
}

TEST_CASE("cubic with positive Routh test has left-half-plane roots") {
    Polynomial p({3.0, 2.0, 2.0, 1.0});  // s^3 + 2s^2 + 2s + 3, 2*2 > 1*3
    for (const auto& r : roots(p)) CHECK(r.real() < 0.0);
    CHECK(is_hurwitz(p));
    CHECK(stability_margin(p, StabilityKind::Hurwitz) == doctest::Approx(-max_real_part(p)));
    CHECK(stability_margin(p, StabilityKind::Hurwitz) > 0.0);
}

TEST_CASE("is_hurwitz examples") {
    CHECK(is_hurwitz(Polynomial({1.0, 1.0})));          // s + 1
    CHECK_FALSE(is_hurwitz(Polynomial({3.0, 2.0, 1.4, 1.0})));  // 1.4*2 < 3
}

TEST_CASE("is_schur examples") {
    CHECK(is_schur(Polynomial({0.0, 1.0})));         // z
    CHECK_FALSE(is_schur(Polynomial({-2.0, 1.0})));  // z - 2
    // (z - 0.5)(z - 0.25)(z + 0.9) and (z - 1.2)(z^2 + 0.25), expanded.
    CHECK(is_schur(Polynomial({0.1125, -0.55, 0.15, 1.0})));
    CHECK_FALSE(is_schur(Polynomial({-0.3, 0.25, -1.2, 1.0})));
}

TEST_CASE("stability_margin trivial values") {
    CHECK(stability_margin(Polynomial({1.0, 1.0}), StabilityKind::Hurwitz) ==
          doctest::Approx(1.0));
    CHECK(stability_margin(Polynomial({-2.0, 1.0}), StabilityKind::Schur) ==
          doctest::Approx(-1.0));
}

TEST_CASE("zero polynomial raises") {
    CHECK_THROWS_AS(roots(Polynomial({0.0, 1e-15})), ZeroPolynomialError);
    CHECK_THROWS_AS(stability_margin(Polynomial({0.0}), StabilityKind::Hurwitz),
                    ZeroPolynomialError);
}

TEST_CASE("routh and schur-cohn agree with the roots oracle") {
    std::mt19937_64 rng(20240601);
    int checked = 0, skipped = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        Polynomial p = random_poly(rng, 8);
        double margin_h = -max_real_part(p);
        if (std::abs(margin_h) > 1e-6) {
            ++checked;
            CHECK(is_hurwitz(p) == (margin_h > 0.0));
        } else {
            ++skipped;
        }
        double margin_s = 1.0 - max_modulus(p);
        if (std::abs(margin_s) > 1e-6) {
            CHECK(is_schur(p) == (margin_s > 0.0));
        }
    }
    CHECK(checked > 1900);  // near-marginal random draws are rare
    CHECK(skipped < 20);
}

TEST_CASE("routh test is scale invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        Polynomial p = random_poly(rng, 6);
        double c = scale(rng);
        Polynomial scaled = p;
        for (double& v : scaled.coeffs) v *= c;
        CHECK(is_hurwitz(p) == is_hurwitz(scaled));
    }
}

TEST_CASE("roots reassemble the polynomial") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        Polynomial p = random_poly(rng, 8);
        auto rs = roots(p);
        std::vector<std::complex<double>> prod{p.coeffs.back()};
        for (const auto& r : rs) {
            std::vector<std::complex<double>> next(prod.size() + 1, 0.0);
            for (std::size_t i = 0; i < prod.size(); ++i) {
                next[i] += prod[i] * (-r);
                next[i + 1] += prod[i];
            }
            prod = std::move(next);
        }
        double scale = 0.0;
        for (double v : p.coeffs) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
            CHECK(std::abs(prod[i].real() - p.coeffs[i]) <= 1e-6 * scale);
            CHECK(std::abs(prod[i].imag()) <= 1e-6 * scale);
        }
    }
}
