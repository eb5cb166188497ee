#include "mixedrobust/poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mixedrobust {

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) throw InvalidParamsError("polynomial needs at least one coefficient");
}

int Polynomial::degree() const {
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
        if (std::abs(coeffs[static_cast<std::size_t>(i)]) > kLeadingTol) return i;
    }
    return -1;
}

Polynomial Polynomial::trimmed() const {
    int d = degree();
    if (d < 0) throw ZeroPolynomialError();
    return Polynomial(std::vector<double>(coeffs.begin(), coeffs.begin() + d + 1));
}

double Polynomial::evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::complex<double> Polynomial::evaluate(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<std::complex<double>> roots(const Polynomial& p) {
    Polynomial t = p.trimmed();  // throws ZeroPolynomialError
    int n = t.degree();
    if (n < 1) return {};

    // Monic companion matrix; Eigen's Schur iteration handles the rest.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    double lead = t.coeffs[static_cast<std::size_t>(n)];
    for (int i = 0; i < n; ++i) {
        companion(i, n - 1) = -t.coeffs[static_cast<std::size_t>(i)] / lead;
        if (i + 1 < n) companion(i + 1, i) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

bool is_hurwitz(const Polynomial& p) {
    Polynomial t = p.trimmed();
    int n = t.degree();
    if (n < 1) return true;  // constant: no roots

    std::vector<double> c = t.coeffs;
    if (c[static_cast<std::size_t>(n)] < 0) {
        for (double& v : c) v = -v;
    }

    // Routh rows, descending powers.
    std::vector<double> prev, cur;
    for (int i = n; i >= 0; i -= 2) prev.push_back(c[static_cast<std::size_t>(i)]);
    for (int i = n - 1; i >= 0; i -= 2) cur.push_back(c[static_cast<std::size_t>(i)]);

    if (prev[0] <= 0.0) return false;
    while (!cur.empty()) {
        if (cur[0] <= 0.0) return false;  // strictness: zero pivot counts as unstable
        std::size_t len = prev.size() - 1;
        if (len == 0) break;
        std::vector<double> next(len, 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            double a = (i + 1 < prev.size()) ? prev[i + 1] : 0.0;
            double b = (i + 1 < cur.size()) ? cur[i + 1] : 0.0;
            next[i] = (cur[0] * a - prev[0] * b) / cur[0];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return true;
}

bool is_schur(const Polynomial& p) {
    Polynomial t = p.trimmed();
    int n = t.degree();
    if (n < 1) return true;

    std::vector<double> c = t.coeffs;
    while (n >= 1) {
        double a0 = c[0];
        double an = c[static_cast<std::size_t>(n)];
        if (std::abs(a0) >= std::abs(an)) return false;  // |reflection| >= 1, strict

        // Reduced polynomial (an*P - a0*P*)/z, degree n-1.
        std::vector<double> next(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            next[static_cast<std::size_t>(i - 1)] =
                an * c[static_cast<std::size_t>(i)] - a0 * c[static_cast<std::size_t>(n - i)];
        }
        // Rescale to keep magnitudes in range across the recursion.
        double scale = 0.0;
        for (double v : next) scale = std::max(scale, std::abs(v));
        if (scale <= kLeadingTol) return false;  // degenerate step
        for (double& v : next) v /= scale;
        c = std::move(next);
        --n;
    }
    return true;
}

bool is_stable(const Polynomial& p, StabilityKind kind) {
    return kind == StabilityKind::Hurwitz ? is_hurwitz(p) : is_schur(p);
}

double stability_margin(const Polynomial& p, StabilityKind kind) {
    auto rs = roots(p);
    if (rs.empty()) throw ZeroPolynomialError();
    if (kind == StabilityKind::Hurwitz) {
        double worst = rs[0].real();
        for (const auto& r : rs) worst = std::max(worst, r.real());
        return -worst;
    }
    double worst = std::abs(rs[0]);
    for (const auto& r : rs) worst = std::max(worst, std::abs(r));
    return 1.0 - worst;
}

}  // namespace mixedrobust
