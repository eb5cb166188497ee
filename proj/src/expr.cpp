#include "mixedrobust/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>

namespace mixedrobust {

namespace {

class Parser {
public:
    Parser(const std::string& text, int n, int m) : text_(text), n_(n), m_(m) {
        if (text.empty()) throw SyntaxError("empty expression", 0);
        expr_.n_q = n;
        expr_.m_d = m;
        expr_.source = text;
    }

    Expression run() {
        expr_.root = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return std::move(expr_);
    }

private:
    const std::string& text_;
    int n_;
    int m_;
    std::size_t pos_ = 0;
    Expression expr_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add_node(Expression::Node node) {
        expr_.nodes.push_back(node);
        return static_cast<int>(expr_.nodes.size()) - 1;
    }

    int parse_expr() {
        std::size_t begin = current_pos();
        int lhs = parse_term();
        for (;;) {
            if (eat('+')) {
                int rhs = parse_term();
                lhs = add_node({Expression::Kind::Add, 0, 0, lhs, rhs, begin, pos_});
            } else if (eat('-')) {
                int rhs = parse_term();
                lhs = add_node({Expression::Kind::Sub, 0, 0, lhs, rhs, begin, pos_});
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        std::size_t begin = current_pos();
        int lhs = parse_factor();
        for (;;) {
            if (eat('*')) {
                int rhs = parse_factor();
                lhs = add_node({Expression::Kind::Mul, 0, 0, lhs, rhs, begin, pos_});
            } else if (eat('/')) {
                int rhs = parse_factor();
                lhs = add_node({Expression::Kind::Div, 0, 0, lhs, rhs, begin, pos_});
            } else {
                return lhs;
            }
        }
    }

    std::size_t current_pos() {
        skip_ws();
        return pos_;
    }

    int parse_factor() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        std::size_t begin = pos_;
        char c = text_[pos_];

        if (c == '-') {
            ++pos_;
            int child = parse_factor();
            return add_node({Expression::Kind::Neg, 0, 0, child, -1, begin, pos_});
        }
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (c == 'q' || c == 'd') {
            // Could be a variable; 'd' with no digits is a syntax error anyway.
            return parse_variable();
        }
        if (c == 'a' && text_.compare(pos_, 3, "abs") == 0) {
            pos_ += 3;
            if (!eat('(')) throw SyntaxError("expected '(' after abs", pos_);
            int inner = parse_expr();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return add_node({Expression::Kind::Abs, 0, 0, inner, -1, begin, pos_});
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                pos_ = mark;  // not an exponent after all
            } else {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = std::stod(text_.substr(begin, pos_ - begin));
        return add_node({Expression::Kind::Constant, value, 0, -1, -1, begin, pos_});
    }

    int parse_variable() {
        std::size_t begin = pos_;
        char kind = text_[pos_++];
        std::size_t digits_begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits_begin) {
            throw SyntaxError(std::string("expected index after '") + kind + "'", begin);
        }
        int index = std::stoi(text_.substr(digits_begin, pos_ - digits_begin));
        int limit = (kind == 'q') ? n_ : m_;
        if (index < 1 || index > limit) {
            throw UnknownVariableError(text_.substr(begin, pos_ - begin), begin);
        }
        Expression::Kind k = (kind == 'q') ? Expression::Kind::VarQ : Expression::Kind::VarD;
        return add_node({k, 0, index - 1, -1, -1, begin, pos_});
    }
};

double eval_node(const Expression& e, int idx, std::span<const double> q, std::span<const double> d) {
    const Expression::Node& node = e.nodes[static_cast<std::size_t>(idx)];
    switch (node.kind) {
        case Expression::Kind::Constant: return node.value;
        case Expression::Kind::VarQ: return q[static_cast<std::size_t>(node.index)];
        case Expression::Kind::VarD: return d[static_cast<std::size_t>(node.index)];
        case Expression::Kind::Neg: return -eval_node(e, node.lhs, q, d);
        case Expression::Kind::Abs: return std::abs(eval_node(e, node.lhs, q, d));
        case Expression::Kind::Add: return eval_node(e, node.lhs, q, d) + eval_node(e, node.rhs, q, d);
        case Expression::Kind::Sub: return eval_node(e, node.lhs, q, d) - eval_node(e, node.rhs, q, d);
        case Expression::Kind::Mul: return eval_node(e, node.lhs, q, d) * eval_node(e, node.rhs, q, d);
        case Expression::Kind::Div: {
            double num = eval_node(e, node.lhs, q, d);
            double den = eval_node(e, node.rhs, q, d);
            if (den == 0.0) {
                throw DivisionByZeroError(e.source.substr(node.src_begin, node.src_end - node.src_begin));
            }
            return num / den;
        }
    }
    throw Error("corrupt expression node");
}

bool node_has(const Expression& e, int idx, Expression::Kind kind) {
    const Expression::Node& node = e.nodes[static_cast<std::size_t>(idx)];
    if (node.kind == kind) return true;
    if (node.lhs >= 0 && node_has(e, node.lhs, kind)) return true;
    if (node.rhs >= 0 && node_has(e, node.rhs, kind)) return true;
    return false;
}

int precedence(Expression::Kind k) {
    switch (k) {
        case Expression::Kind::Add:
        case Expression::Kind::Sub: return 1;
        case Expression::Kind::Mul:
        case Expression::Kind::Div: return 2;
        default: return 3;
    }
}

void print_node(const Expression& e, int idx, std::string& out) {
    const Expression::Node& node = e.nodes[static_cast<std::size_t>(idx)];
    auto child = [&](int c, bool parens) {
        if (parens) out += '(';
        print_node(e, c, out);
        if (parens) out += ')';
    };
    switch (node.kind) {
        case Expression::Kind::Constant: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", node.value);
            out += buf;
            return;
        }
        case Expression::Kind::VarQ: out += 'q' + std::to_string(node.index + 1); return;
        case Expression::Kind::VarD: out += 'd' + std::to_string(node.index + 1); return;
        case Expression::Kind::Neg:
            out += '-';
            child(node.lhs, precedence(e.nodes[static_cast<std::size_t>(node.lhs)].kind) < 3);
            return;
        case Expression::Kind::Abs:
            out += "abs(";
            print_node(e, node.lhs, out);
            out += ')';
            return;
        default: break;
    }
    int prec = precedence(node.kind);
    int lp = precedence(e.nodes[static_cast<std::size_t>(node.lhs)].kind);
    int rp = precedence(e.nodes[static_cast<std::size_t>(node.rhs)].kind);
    bool right_strict =
        node.kind == Expression::Kind::Sub || node.kind == Expression::Kind::Div;
    child(node.lhs, lp < prec);
    switch (node.kind) {
        case Expression::Kind::Add: out += " + "; break;
        case Expression::Kind::Sub: out += " - "; break;
        case Expression::Kind::Mul: out += "*"; break;
        case Expression::Kind::Div: out += "/"; break;
        default: break;
    }
    child(node.rhs, rp < prec || (rp == prec && right_strict));
}

// ---- affine decomposition machinery ----

// Copy the subtree rooted at idx into a fresh expression.
Expression subtree(const Expression& e, int idx) {
    Expression out;
    out.n_q = e.n_q;
    out.m_d = e.m_d;
    out.source = e.source;
    std::function<int(int)> copy = [&](int i) -> int {
        Expression::Node node = e.nodes[static_cast<std::size_t>(i)];
        if (node.lhs >= 0) node.lhs = copy(node.lhs);
        if (node.rhs >= 0) node.rhs = copy(node.rhs);
        out.nodes.push_back(node);
        return static_cast<int>(out.nodes.size()) - 1;
    };
    out.root = copy(idx);
    return out;
}

Expression combine(Expression::Kind kind, const Expression& a, const Expression& b) {
    Expression out = a;
    int offset = static_cast<int>(out.nodes.size());
    for (Expression::Node node : b.nodes) {
        if (node.lhs >= 0) node.lhs += offset;
        if (node.rhs >= 0) node.rhs += offset;
        out.nodes.push_back(node);
    }
    out.nodes.push_back({kind, 0, 0, a.root, b.root + offset, 0, 0});
    out.root = static_cast<int>(out.nodes.size()) - 1;
    return out;
}

Expression negate(const Expression& a) {
    Expression out = a;
    out.nodes.push_back({Expression::Kind::Neg, 0, 0, a.root, -1, 0, 0});
    out.root = static_cast<int>(out.nodes.size()) - 1;
    return out;
}

// "Structurally zero" is represented by nullopt so sums stay compact.
struct Linear {
    std::optional<Expression> cst;
    std::vector<std::optional<Expression>> lin;
};

std::optional<Expression> opt_add(Expression::Kind kind, const std::optional<Expression>& a,
                                  const std::optional<Expression>& b) {
    if (!a && !b) return std::nullopt;
    if (!a) return kind == Expression::Kind::Sub ? std::optional<Expression>(negate(*b)) : b;
    if (!b) return a;
    return combine(kind, *a, *b);
}

std::optional<Expression> opt_mul(const Expression& factor, const std::optional<Expression>& x) {
    if (!x) return std::nullopt;
    return combine(Expression::Kind::Mul, factor, *x);
}

bool depends_on_kind(const Expression& e, int idx, Expression::Kind var_kind) {
    const Expression::Node& node = e.nodes[static_cast<std::size_t>(idx)];
    if (node.kind == var_kind) return true;
    if (node.lhs >= 0 && depends_on_kind(e, node.lhs, var_kind)) return true;
    if (node.rhs >= 0 && depends_on_kind(e, node.rhs, var_kind)) return true;
    return false;
}

// Decompose the subtree as constant + sum of linear terms in `var_kind`
// variables. Returns nullopt when the structure is not visibly affine.
std::optional<Linear> linear_in(const Expression& e, int idx, Expression::Kind var_kind,
                                std::size_t dim) {
    const Expression::Node& node = e.nodes[static_cast<std::size_t>(idx)];
    Linear out;
    out.lin.resize(dim);
    switch (node.kind) {
        case Expression::Kind::Constant:
        case Expression::Kind::VarQ:
        case Expression::Kind::VarD:
            if (node.kind == var_kind) {
                out.lin[static_cast<std::size_t>(node.index)] = make_constant(1.0, e.n_q, e.m_d);
            } else {
                out.cst = subtree(e, idx);
            }
            return out;
        case Expression::Kind::Neg: {
            auto inner = linear_in(e, node.lhs, var_kind, dim);
            if (!inner) return std::nullopt;
            if (inner->cst) out.cst = negate(*inner->cst);
            for (std::size_t i = 0; i < dim; ++i) {
                if (inner->lin[i]) out.lin[i] = negate(*inner->lin[i]);
            }
            return out;
        }
        case Expression::Kind::Abs:
            if (depends_on_kind(e, node.lhs, var_kind)) return std::nullopt;
            out.cst = subtree(e, idx);
            return out;
        case Expression::Kind::Add:
        case Expression::Kind::Sub: {
            auto a = linear_in(e, node.lhs, var_kind, dim);
            auto b = linear_in(e, node.rhs, var_kind, dim);
            if (!a || !b) return std::nullopt;
            out.cst = opt_add(node.kind, a->cst, b->cst);
            for (std::size_t i = 0; i < dim; ++i) {
                out.lin[i] = opt_add(node.kind, a->lin[i], b->lin[i]);
            }
            return out;
        }
        case Expression::Kind::Mul: {
            bool lhs_free = !depends_on_kind(e, node.lhs, var_kind);
            bool rhs_free = !depends_on_kind(e, node.rhs, var_kind);
            if (lhs_free && rhs_free) {
                out.cst = subtree(e, idx);
                return out;
            }
            if (!lhs_free && !rhs_free) return std::nullopt;
            int free_idx = lhs_free ? node.lhs : node.rhs;
            int affine_idx = lhs_free ? node.rhs : node.lhs;
            auto inner = linear_in(e, affine_idx, var_kind, dim);
            if (!inner) return std::nullopt;
            Expression factor = subtree(e, free_idx);
            out.cst = opt_mul(factor, inner->cst);
            for (std::size_t i = 0; i < dim; ++i) out.lin[i] = opt_mul(factor, inner->lin[i]);
            return out;
        }
        case Expression::Kind::Div:
            return std::nullopt;  // division disables the affine fast path
    }
    return std::nullopt;
}

std::optional<AffineDecomposition> decompose(const Expression& e, Expression::Kind var_kind) {
    if (e.has_division()) return std::nullopt;
    std::size_t dim =
        var_kind == Expression::Kind::VarQ ? static_cast<std::size_t>(e.n_q)
                                           : static_cast<std::size_t>(e.m_d);
    auto lin = linear_in(e, e.root, var_kind, dim);
    if (!lin) return std::nullopt;
    AffineDecomposition out;
    out.constant = lin->cst ? *lin->cst : make_constant(0.0, e.n_q, e.m_d);
    out.q_coeffs.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out.q_coeffs.push_back(lin->lin[i] ? *lin->lin[i] : make_constant(0.0, e.n_q, e.m_d));
    }
    return out;
}

}  // namespace

double Expression::evaluate(std::span<const double> q, std::span<const double> d) const {
    if (static_cast<int>(q.size()) != n_q || static_cast<int>(d.size()) != m_d) {
        throw DimensionMismatchError("expression evaluated with wrong vector lengths");
    }
    return eval_node(*this, root, q, d);
}

bool Expression::depends_on_q() const { return node_has(*this, root, Kind::VarQ); }
bool Expression::depends_on_d() const { return node_has(*this, root, Kind::VarD); }
bool Expression::has_division() const { return node_has(*this, root, Kind::Div); }

Expression parse_expression(const std::string& text, int n, int m) {
    if (n < 0 || m < 0) throw InvalidParamsError("negative dimension");
    return Parser(text, n, m).run();
}

std::string to_string(const Expression& e) {
    std::string out;
    print_node(e, e.root, out);
    return out;
}

std::optional<AffineDecomposition> affine_in_q(const Expression& e) {
    return decompose(e, Expression::Kind::VarQ);
}

bool is_affine_in_q(const Expression& e) { return affine_in_q(e).has_value(); }

std::optional<AffineDecomposition> affine_in_d(const Expression& e) {
    return decompose(e, Expression::Kind::VarD);
}

Expression make_constant(double value, int n, int m) {
    Expression out;
    out.n_q = n;
    out.m_d = m;
    out.nodes.push_back({Expression::Kind::Constant, value, 0, -1, -1, 0, 0});
    out.root = 0;
    return out;
}

}  // namespace mixedrobust
