#pragma once

#include <Eigen/Core>
#include <complex>
#include <initializer_list>
#include <vector>

#include "cbb/errors.hpp"

namespace cbb {

/// Highest polynomial degree the library supports. Loop compositions in this
/// tool top out at degree 5; the bound leaves headroom without inviting
/// ill-conditioned monsters.
inline constexpr int kMaxPolyDegree = 16;

/// Real-coefficient polynomial in s.
///
/// Coefficients are stored in ascending powers: c[0] + c[1]*s + c[2]*s^2 + ...
/// This convention is fixed across the whole repository. Exact trailing
/// (highest-power) zero coefficients are trimmed on construction; no
/// magnitude-based rounding is ever applied.
class Polynomial {
  public:
    /// Zero polynomial.
    Polynomial() : c_(Eigen::VectorXd::Zero(1)) {}

    explicit Polynomial(Eigen::VectorXd coeffs);
    Polynomial(std::initializer_list<double> coeffs);

    static Polynomial constant(double value);

    const Eigen::VectorXd& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    /// Coefficient of s^k; zero beyond the stored degree.
    double coeff(int k) const {
        return (k >= 0 && k < c_.size()) ? c_[k] : 0.0;
    }

    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

    /// Index of the lowest-power nonzero coefficient (s^k factor count);
    /// returns -1 for the zero polynomial.
    int lowest_nonzero() const;

    /// Horner evaluation. Scalar is double or std::complex<double>.
    template <typename Scalar>
    Scalar operator()(const Scalar& s) const {
        Scalar acc = Scalar(c_[c_.size() - 1]);
        for (Eigen::Index k = c_.size() - 2; k >= 0; --k) {
            acc = acc * s + Scalar(c_[k]);
        }
        return acc;
    }

    /// Derivative polynomial.
    Polynomial derivative() const;

  private:
    Eigen::VectorXd c_;
};

Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double k, const Polynomial& p);
Polynomial operator+(const Polynomial& a, const Polynomial& b);

/// All complex roots of p, found as eigenvalues of the magnitude-prescaled
/// companion matrix, then polished with a few guarded Newton steps.
/// Relative accuracy is ~1e-9 or better on well-conditioned inputs and may
/// degrade toward 1e-6 near multiple roots. Throws DegreeError for degree 0.
std::vector<std::complex<double>> roots(const Polynomial& p);

}  // namespace cbb
