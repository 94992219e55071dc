#include "cbb/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace cbb {

namespace {

Eigen::VectorXd trim_trailing_zeros(Eigen::VectorXd c) {
    Eigen::Index n = c.size();
    while (n > 1 && c[n - 1] == 0.0) --n;
    return c.head(n).eval();
}

}  // namespace

Polynomial::Polynomial(Eigen::VectorXd coeffs) {
    if (coeffs.size() == 0) {
        throw DomainError("polynomial needs at least one coefficient");
    }
    c_ = trim_trailing_zeros(std::move(coeffs));
    if (c_.size() - 1 > kMaxPolyDegree) {
        throw DegreeError("polynomial degree " + std::to_string(c_.size() - 1) +
                          " exceeds supported bound " +
                          std::to_string(kMaxPolyDegree));
    }
}

Polynomial::Polynomial(std::initializer_list<double> coeffs)
    : Polynomial(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(),
                                                   static_cast<Eigen::Index>(
                                                       coeffs.size()))
                     .eval()) {}

Polynomial Polynomial::constant(double value) {
    Eigen::VectorXd c(1);
    c[0] = value;
    return Polynomial(std::move(c));
}

int Polynomial::lowest_nonzero() const {
    if (is_zero()) return -1;
    for (Eigen::Index k = 0; k < c_.size(); ++k) {
        if (c_[k] != 0.0) return static_cast<int>(k);
    }
    return -1;
}

Polynomial Polynomial::derivative() const {
    if (degree() == 0) return Polynomial::constant(0.0);
    Eigen::VectorXd d(c_.size() - 1);
    for (Eigen::Index k = 1; k < c_.size(); ++k) d[k - 1] = k * c_[k];
    return Polynomial(std::move(d));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    const auto& ca = a.coeffs();
    const auto& cb = b.coeffs();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ca.size() + cb.size() - 1);
    for (Eigen::Index i = 0; i < ca.size(); ++i) {
        for (Eigen::Index j = 0; j < cb.size(); ++j) {
            out[i + j] += ca[i] * cb[j];
        }
    }
    return Polynomial(std::move(out));
}

Polynomial operator*(double k, const Polynomial& p) {
    return Polynomial((k * p.coeffs()).eval());
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Eigen::Index n = std::max(a.coeffs().size(), b.coeffs().size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    out.head(a.coeffs().size()) = a.coeffs();
    out.head(b.coeffs().size()) += b.coeffs();
    return Polynomial(std::move(out));
}

std::vector<std::complex<double>> roots(const Polynomial& p) {
    if (p.degree() < 1) {
        throw DegreeError("degree-0 polynomial has no roots");
    }

    // Factor out s^k for zero low-order coefficients: exact roots at the
    // origin, and the companion matrix of the remainder stays nonsingular.
    const int low = p.lowest_nonzero();
    std::vector<std::complex<double>> out(static_cast<size_t>(low), {0.0, 0.0});

    const Eigen::VectorXd c = p.coeffs().tail(p.coeffs().size() - low).eval();
    const Eigen::Index n = c.size() - 1;  // degree of the remainder
    if (n == 0) return out;

    // Rescale the variable so root magnitudes sit near unity; coefficient
    // spans of 1e-12..1e12 are routine for loop-gain denominators here and
    // the raw companion matrix would be badly balanced.
    double rho = std::pow(std::abs(c[0] / c[n]), 1.0 / static_cast<double>(n));
    if (!std::isfinite(rho) || rho <= 0.0) rho = 1.0;

    Eigen::VectorXd cs(n + 1);
    double scale = 1.0;
    for (Eigen::Index k = 0; k <= n; ++k) {
        cs[k] = c[k] * scale;
        scale *= rho;
    }
    cs /= cs[n];

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -cs[i];

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("companion-matrix eigensolver failed");
    }

    const Polynomial dp = p.derivative();
    for (Eigen::Index i = 0; i < n; ++i) {
        std::complex<double> r = solver.eigenvalues()[i] * rho;
        // Newton polishing; keep a step only while it reduces the residual.
        for (int it = 0; it < 3; ++it) {
            std::complex<double> f = p(r);
            std::complex<double> df = dp(r);
            if (std::abs(df) == 0.0) break;
            std::complex<double> r_next = r - f / df;
            if (std::abs(p(r_next)) < std::abs(f)) {
                r = r_next;
            } else {
                break;
            }
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace cbb
