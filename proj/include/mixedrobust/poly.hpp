#pragma once

#include <complex>
#include <vector>

#include "mixedrobust/errors.hpp"

namespace mixedrobust {

/// Coefficients with magnitude at or below this are treated as zero when
/// determining the degree. A vanished leading coefficient of a polynomial
/// family member counts as instability (degree-drop boundary).
inline constexpr double kLeadingTol = 1e-12;

enum class StabilityKind { Hurwitz, Schur };

/**
 * Real-coefficient univariate polynomial, ascending powers:
 * coeffs[i] multiplies x^i. The stability tests consume this type.
 */
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() : coeffs{0.0} {}
    explicit Polynomial(std::vector<double> c);

    /// Highest index with |coeff| > kLeadingTol, or -1 if none.
    int degree() const;

    /// Copy with trailing near-zero coefficients removed.
    Polynomial trimmed() const;

    double evaluate(double x) const;
    std::complex<double> evaluate(std::complex<double> x) const;
};

/**
 * All roots (with multiplicity) via companion-matrix eigenvalues.
 * Throws ZeroPolynomialError when every coefficient is below the
 * leading tolerance.
 */
std::vector<std::complex<double>> roots(const Polynomial& p);

/**
 * Strict Hurwitz test by the Routh table: true iff every first-column
 * entry is strictly positive after normalizing the leading coefficient
 * positive. Zero or negative pivots, including degenerate rows, return
 * false. No epsilon-perturbation tricks; correctness is cross-checked
 * against the roots oracle by property tests.
 */
bool is_hurwitz(const Polynomial& p);

/**
 * Strict Schur test by the Schur-Cohn reflection-coefficient recursion.
 * Degenerate recursion steps (|reflection| >= 1) return false.
 */
bool is_schur(const Polynomial& p);

/// Dispatch on kind.
bool is_stable(const Polynomial& p, StabilityKind kind);

/// Hurwitz: -max Re(root). Schur: 1 - max|root|. Positive iff stable.
double stability_margin(const Polynomial& p, StabilityKind kind);

}  // namespace mixedrobust
