#include "cbb/transfer_function.hpp"

#include <cmath>

namespace cbb {

TransferFunction::TransferFunction(Polynomial n, Polynomial d)
    : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) {
        throw DomainError("transfer-function denominator is identically zero");
    }
}

TransferFunction TransferFunction::constant(double k) {
    return TransferFunction(Polynomial::constant(k), Polynomial::constant(1.0));
}

std::complex<double> eval_jw(const TransferFunction& tf, double omega) {
    const std::complex<double> s(0.0, omega);
    const std::complex<double> d = tf.den(s);

    // Scale-aware pole detection: compare |den(jw)| against the magnitude the
    // evaluation would have if no cancellation occurred.
    double mag_bound = 0.0;
    double w_pow = 1.0;
    for (Eigen::Index k = 0; k < tf.den.coeffs().size(); ++k) {
        mag_bound += std::abs(tf.den.coeffs()[k]) * w_pow;
        w_pow *= std::abs(omega);
    }
    if (std::abs(d) <= 1e-14 * mag_bound || d == std::complex<double>(0.0)) {
        throw PoleError(omega);
    }
    return tf.num(s) / d;
}

DcGain dc_gain(const TransferFunction& tf) {
    const int kn = tf.num.lowest_nonzero();
    const int kd = tf.den.lowest_nonzero();
    if (kn < 0) return {false, 0.0};  // zero numerator
    if (kn > kd) return {false, 0.0};
    if (kn < kd) return {true, 0.0};
    return {false, tf.num.coeff(kn) / tf.den.coeff(kd)};
}

TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(a.num * b.num, a.den * b.den);
}

TransferFunction unity_feedback(const TransferFunction& t) {
    return TransferFunction(t.num, t.den + t.num);
}

TransferFunction scale(double k, const TransferFunction& t) {
    return TransferFunction(k * t.num, t.den);
}

std::vector<std::complex<double>> poles(const TransferFunction& tf) {
    return roots(tf.den);
}

std::vector<std::complex<double>> zeros(const TransferFunction& tf) {
    return roots(tf.num);
}

}  // namespace cbb
