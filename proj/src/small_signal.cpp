#include "cbb/small_signal.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cbb {

TransferFunction inductor_impedance(const CircuitParams& params) {
    return TransferFunction(Polynomial{params.r_l, params.l},
                            Polynomial::constant(1.0));
}

TransferFunction output_filter_impedance(const CircuitParams& params,
                                         double r_load) {
    if (!(r_load > 0.0)) {
        throw DomainError("output_filter_impedance: r_load must be > 0");
    }
    return TransferFunction(
        Polynomial{r_load, r_load * params.c * params.r_c},
        Polynomial{1.0, params.c * (r_load + params.r_c)});
}

AveragedDerivatives averaged_derivatives(const CircuitParams& params,
                                         Mode mode, double r_load,
                                         const AveragedState& state,
                                         const PlantInputs& inputs) {
    if (!(inputs.duty >= 0.0 && inputs.duty <= 1.0)) {
        throw DomainError("averaged_derivatives: duty outside [0, 1]");
    }
    const double v_src = params.v_in + inputs.v_i;
    const double d = inputs.duty;

    // Fraction of the inductor current injected into the output network.
    const double inject = (mode == Mode::Buck) ? 1.0 : (1.0 - d);
    const double i_inj = inject * state.i_l;

    // Node equation with the capacitor ESR kept:
    //   C dv_c/dt = i_inj - i_o - v_o/R,   v_o = v_c + r_c * C dv_c/dt
    const double v_out = r_load * (state.v_c + params.r_c * (i_inj - inputs.i_o)) /
                         (r_load + params.r_c);
    const double dv_c = (i_inj - inputs.i_o - v_out / r_load) / params.c;

    double di_l;
    if (mode == Mode::Buck) {
        di_l = (d * v_src - v_out - params.r_l * state.i_l) / params.l;
    } else {
        di_l = (v_src - (1.0 - d) * v_out - params.r_l * state.i_l) / params.l;
    }
    return {di_l, dv_c, v_out};
}

namespace {

// Central finite difference of f at x with the policy shared by the
// Jacobian, input-column and output-row computations.
double fd_step(double x) {
    return std::max(1e-6 * std::abs(x), 1e-9);
}

struct Linearization {
    Eigen::Matrix2d a;
    Eigen::Vector2d b;
    Eigen::RowVector2d c_row;
    double d_term;
};

Linearization linearize_at(const CircuitParams& params, Mode mode,
                           double r_load, const AveragedState& x0,
                           double duty) {
    auto eval = [&](double i_l, double v_c, double d) {
        return averaged_derivatives(params, mode, r_load, {i_l, v_c},
                                    {d, 0.0, 0.0});
    };

    Linearization lin;
    const double hi = fd_step(x0.i_l);
    const double hv = fd_step(x0.v_c);
    const double hd = fd_step(duty);

    const auto fip = eval(x0.i_l + hi, x0.v_c, duty);
    const auto fim = eval(x0.i_l - hi, x0.v_c, duty);
    const auto fvp = eval(x0.i_l, x0.v_c + hv, duty);
    const auto fvm = eval(x0.i_l, x0.v_c - hv, duty);
    const auto fdp = eval(x0.i_l, x0.v_c, duty + hd);
    const auto fdm = eval(x0.i_l, x0.v_c, duty - hd);

    lin.a << (fip.di_l_dt - fim.di_l_dt) / (2 * hi),
        (fvp.di_l_dt - fvm.di_l_dt) / (2 * hv),
        (fip.dv_c_dt - fim.dv_c_dt) / (2 * hi),
        (fvp.dv_c_dt - fvm.dv_c_dt) / (2 * hv);
    lin.b << (fdp.di_l_dt - fdm.di_l_dt) / (2 * hd),
        (fdp.dv_c_dt - fdm.dv_c_dt) / (2 * hd);
    lin.c_row << (fip.v_out - fim.v_out) / (2 * hi),
        (fvp.v_out - fvm.v_out) / (2 * hv);
    lin.d_term = (fdp.v_out - fdm.v_out) / (2 * hd);
    return lin;
}

}  // namespace

AveragedState averaged_equilibrium(const CircuitParams& params, Mode mode,
                                   double r_load, double duty) {
    // Ideal-converter seed; the residual from the parasitics is small.
    AveragedState x;
    if (mode == Mode::Buck) {
        x.v_c = duty * params.v_in;
        x.i_l = x.v_c / r_load;
    } else {
        x.v_c = params.v_in / std::max(1.0 - duty, 1e-3);
        x.i_l = x.v_c / (r_load * std::max(1.0 - duty, 1e-3));
    }

    auto residual = [&](const AveragedState& s) {
        const auto f = averaged_derivatives(params, mode, r_load, s,
                                            {duty, 0.0, 0.0});
        return Eigen::Vector2d(f.di_l_dt, f.dv_c_dt);
    };

    const double tol = 1e-10;
    for (int it = 0; it < 200; ++it) {
        const Eigen::Vector2d f = residual(x);
        // Scale the convergence test so ampere- and volt-sized states are
        // treated evenly.
        const double err = std::abs(f[0]) * params.l / params.v_in +
                           std::abs(f[1]) * params.c;
        if (err < tol) return x;

        const auto lin = linearize_at(params, mode, r_load, x, duty);
        Eigen::Vector2d step = lin.a.fullPivLu().solve(-f);

        double damping = 1.0;
        const double f0 = f.norm();
        for (int back = 0; back < 30; ++back) {
            AveragedState trial{x.i_l + damping * step[0],
                                x.v_c + damping * step[1]};
            if (residual(trial).norm() < f0) {
                x = trial;
                break;
            }
            damping *= 0.5;
            if (back == 29) x = trial;  // accept the tiny step and re-iterate
        }
    }
    throw ConvergenceError(
        "averaged-model equilibrium solve did not converge in 200 iterations");
}

TransferFunction buck_control_to_output(const CircuitParams& params,
                                        const OperatingPoint& op) {
    if (op.mode != Mode::Buck) {
        throw ModeError("buck_control_to_output: operating point is not buck");
    }
    const double rl = op.r_load;
    const double l = params.l, c = params.c;
    const double r_l = params.r_l, r_c = params.r_c;

    const double gain = params.v_in * rl * r_c / (l * (rl + r_c));
    const Polynomial num = gain * Polynomial{1.0 / (c * r_c), 1.0};
    const Polynomial den{(rl + r_l) / (l * c * (rl + r_c)),
                         (c * (rl * r_c + rl * r_l + r_c * r_l) + l) /
                             (l * c * (rl + r_c)),
                         1.0};
    return TransferFunction(num, den);
}

TransferFunction boost_control_to_output(const CircuitParams& params,
                                         const OperatingPoint& op) {
    if (op.mode != Mode::Boost) {
        throw ModeError("boost_control_to_output: operating point is not boost");
    }
    const double rl = op.r_load;
    const double l = params.l, c = params.c;
    const double r_l = params.r_l, r_c = params.r_c;
    const double dp = 1.0 - op.duty;  // complementary duty

    const double gain = op.v_out * r_c / ((op.duty - 1.0) * (rl + r_c));
    const Polynomial esr_zero{1.0 / (c * r_c), 1.0};
    const Polynomial rhp_zero{-(rl * dp * dp - r_l) / l, 1.0};
    const Polynomial num = gain * (esr_zero * rhp_zero);

    const double s_coeff = (c * (r_l * (rl + r_c) + dp * dp * rl * r_c) + l) /
                           (l * c * (rl + r_c));
    const double s0_coeff = (r_l + dp * dp * rl) / (l * c * (rl + r_c));
    return TransferFunction(num, Polynomial{s0_coeff, s_coeff, 1.0});
}

TransferFunction control_to_output(const CircuitParams& params,
                                   const OperatingPoint& op) {
    return op.mode == Mode::Buck ? buck_control_to_output(params, op)
                                 : boost_control_to_output(params, op);
}

TransferFunction control_to_output_numeric(const CircuitParams& params,
                                           const OperatingPoint& op) {
    const AveragedState x0 =
        averaged_equilibrium(params, op.mode, op.r_load, op.duty);
    const auto lin = linearize_at(params, op.mode, op.r_load, x0, op.duty);

    // H(s) = C (sI - A)^{-1} B + D for the 2-state realization, expanded
    // analytically through the adjugate of (sI - A).
    const double tr = lin.a.trace();
    const double det = lin.a.determinant();
    const double cb = lin.c_row * lin.b;
    const double cadjb =
        -lin.c_row[0] * lin.a(1, 1) * lin.b[0] +
        lin.c_row[0] * lin.a(0, 1) * lin.b[1] +
        lin.c_row[1] * lin.a(1, 0) * lin.b[0] -
        lin.c_row[1] * lin.a(0, 0) * lin.b[1];

    const Polynomial num{cadjb + lin.d_term * det, cb - lin.d_term * tr,
                         lin.d_term};
    const Polynomial den{det, -tr, 1.0};
    return TransferFunction(num, den);
}

}  // namespace cbb
