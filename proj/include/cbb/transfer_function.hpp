#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cbb/polynomial.hpp"

namespace cbb {

/// Rational transfer function num(s)/den(s) with real coefficients.
///
/// No pole/zero cancellation happens implicitly anywhere in the library: a
/// right-half-plane plant zero must never vanish because a compensator root
/// lands on top of it numerically.
struct TransferFunction {
    Polynomial num;
    Polynomial den;

    TransferFunction() : num{0.0}, den{1.0} {}
    TransferFunction(Polynomial n, Polynomial d);

    static TransferFunction constant(double k);
};

/// num(jw)/den(jw). Throws PoleError if jw lands on a denominator root.
std::complex<double> eval_jw(const TransferFunction& tf, double omega);

/// lim s->0 of tf. `infinite` is set when the denominator has a root at the
/// origin that the numerator does not share; shared s^k factors are reduced.
struct DcGain {
    bool is_infinite = false;
    double value = 0.0;
};
DcGain dc_gain(const TransferFunction& tf);

/// Series interconnection a*b (polynomial products, no cancellation).
TransferFunction series(const TransferFunction& a, const TransferFunction& b);

/// Unity-feedback closure t/(1+t) computed as num/(den+num).
TransferFunction unity_feedback(const TransferFunction& t);

/// Scalar gain k*t.
TransferFunction scale(double k, const TransferFunction& t);

std::vector<std::complex<double>> poles(const TransferFunction& tf);
std::vector<std::complex<double>> zeros(const TransferFunction& tf);

}  // namespace cbb
