#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixedrobust/errors.hpp"

namespace mixedrobust {

/**
 * Parsed arithmetic expression over the variables q1..qn, d1..dm.
 *
 * Grammar:
 *   expr   := term (('+'|'-') term)*
 *   term   := factor (('*'|'/') factor)*
 *   factor := number | 'q'INT | 'd'INT | '-' factor | 'abs' '(' expr ')' | '(' expr ')'
 *
 * Whitespace is insignificant. Numbers are decimal with optional fraction
 * and exponent. Nodes live in a flat arena; expressions are immutable and
 * evaluation is pure, so sharing across threads is safe.
 */
struct Expression {
    enum class Kind { Constant, VarQ, VarD, Neg, Abs, Add, Sub, Mul, Div };

    struct Node {
        Kind kind;
        double value = 0.0;  // Constant
        int index = 0;       // VarQ/VarD, zero-based
        int lhs = -1;
        int rhs = -1;
        std::size_t src_begin = 0;  // byte range into source, for diagnostics
        std::size_t src_end = 0;
    };

    std::vector<Node> nodes;
    int root = -1;
    int n_q = 0;
    int m_d = 0;
    std::string source;

    double evaluate(std::span<const double> q, std::span<const double> d) const;
    bool depends_on_q() const;
    bool depends_on_d() const;
    bool has_division() const;
};

Expression parse_expression(const std::string& text, int n, int m);

/// Round-trip printer; parse(to_string(e)) evaluates identically to e.
std::string to_string(const Expression& e);

/// e == constant + sum_i q_coeffs[i] * q_i, with both parts free of q.
struct AffineDecomposition {
    Expression constant;
    std::vector<Expression> q_coeffs;  // one per q dimension
};

/**
 * Conservative structural affinity test in the q variables. True only for
 * sums of terms at most degree 1 in q with q-free multipliers; any division
 * node disables the fast path. May return nullopt for algebraically-affine
 * but structurally-disguised inputs.
 */
std::optional<AffineDecomposition> affine_in_q(const Expression& e);

bool is_affine_in_q(const Expression& e);

/// Same decomposition with the roles of q and d swapped (affinity in d).
std::optional<AffineDecomposition> affine_in_d(const Expression& e);

/// Convenience constructors used by solvers when synthesizing expressions.
Expression make_constant(double value, int n, int m);

}  // namespace mixedrobust
