#include "aeq/blockade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aeq/units.hpp"

namespace aeq::blockade {

using cd = std::complex<double>;

void BlockadeParams::validate() const {
    if (!(omega > 0)) throw std::invalid_argument("blockade: Omega must be > 0");
    if (gamma < 0) throw std::invalid_argument("blockade: Gamma must be >= 0");
    if (!std::isfinite(delta_u)) throw std::invalid_argument("blockade: Delta_U must be finite");
}

TwoLevelAmplitudes evolve(const BlockadeParams& params,
                          const TwoLevelAmplitudes& psi0, double t) {
    params.validate();
    if (t < 0) throw std::invalid_argument("blockade: t must be >= 0");

    const cd d(-params.delta_u, -0.5 * params.gamma);  // H_ee
    const cd mu = 0.5 * d;
    const cd s = std::sqrt(0.25 * d * d + 0.25 * params.omega * params.omega);

    // Both eigenvalues mu +- s have non-positive imaginary part (passive
    // system), so the exponentials below never overflow.
    cd cos_term;   // e^{-i mu t} cos(st)
    cd sinc_term;  // e^{-i mu t} sin(st)/s
    const cd i_unit(0.0, 1.0);
    if (std::abs(s) * t < 1e-4) {
        // Series in (st)^2; at s = 0 this is exactly the Jordan propagator.
        const cd st2 = s * s * (t * t);
        const cd emu = std::exp(-i_unit * mu * t);
        cos_term = emu * (1.0 - st2 / 2.0 + st2 * st2 / 24.0);
        sinc_term = emu * t * (1.0 - st2 / 6.0 + st2 * st2 / 120.0);
    } else {
        const cd ep = std::exp(-i_unit * (mu + s) * t);
        const cd em = std::exp(-i_unit * (mu - s) * t);
        cos_term = 0.5 * (ep + em);
        sinc_term = (em - ep) / (2.0 * i_unit * s);
    }

    // M = H - mu I: M_gg = -mu, M_ee = +mu (d - mu), M_ge = M_eg = Omega/2.
    const double half_omega = 0.5 * params.omega;
    const cd u_gg = cos_term + i_unit * sinc_term * mu;
    const cd u_ee = cos_term - i_unit * sinc_term * mu;
    const cd u_ge = -i_unit * sinc_term * half_omega;

    TwoLevelAmplitudes out;
    out.c_g = u_gg * psi0.c_g + u_ge * psi0.c_e;
    out.c_e = u_ge * psi0.c_g + u_ee * psi0.c_e;
    return out;
}

double rk4_step_bound(const BlockadeParams& params) {
    params.validate();
    double bound = units::kTwoPi / params.omega;
    if (params.gamma > 0) bound = std::min(bound, 1.0 / params.gamma);
    if (params.delta_u != 0)
        bound = std::min(bound, units::kTwoPi / std::abs(params.delta_u));
    return 0.01 * bound;
}

TwoLevelAmplitudes evolve_rk4(const BlockadeParams& params,
                              const TwoLevelAmplitudes& psi0, double t,
                              double dt) {
    params.validate();
    if (t < 0) throw std::invalid_argument("blockade: t must be >= 0");
    if (!(dt > 0) || dt > rk4_step_bound(params))
        throw std::invalid_argument("blockade: RK4 step exceeds the stability bound");
    if (t == 0) return psi0;

    const cd d(-params.delta_u, -0.5 * params.gamma);
    const double half_omega = 0.5 * params.omega;
    const cd i_unit(0.0, 1.0);
    const auto deriv = [&](cd g, cd e, cd& dg, cd& de) {
        dg = -i_unit * (half_omega * e);
        de = -i_unit * (half_omega * g + d * e);
    };

    const long n = static_cast<long>(std::ceil(t / dt));
    const double h = t / static_cast<double>(n);
    cd g = psi0.c_g, e = psi0.c_e;
    for (long k = 0; k < n; ++k) {
        cd g1, e1, g2, e2, g3, e3, g4, e4;
        deriv(g, e, g1, e1);
        deriv(g + 0.5 * h * g1, e + 0.5 * h * e1, g2, e2);
        deriv(g + 0.5 * h * g2, e + 0.5 * h * e2, g3, e3);
        deriv(g + h * g3, e + h * e3, g4, e4);
        g += h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
        e += h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
    }
    return {g, e};
}

double gamma_eff(const BlockadeParams& params) {
    params.validate();
    if (params.gamma == 0) return 0.0;
    return params.omega * params.omega * params.gamma /
           (4.0 * (params.delta_u * params.delta_u +
                   0.25 * params.gamma * params.gamma));
}

double loss_probability(const BlockadeParams& params, double t,
                        LossMethod method) {
    if (t < 0) throw std::invalid_argument("blockade: t must be >= 0");
    double loss = 0.0;
    if (method == LossMethod::analytic) {
        loss = 1.0 - evolve(params, {}, t).norm2();
    } else {
        loss = 1.0 - std::exp(-gamma_eff(params) * t);
    }
    return std::clamp(loss, 0.0, 1.0);
}

LossCurve loss_curve(const BlockadeParams& params, double t_max, int n_points) {
    params.validate();
    if (n_points < 2) throw std::invalid_argument("blockade: need n_points >= 2");
    if (t_max < 0) throw std::invalid_argument("blockade: t_max must be >= 0");
    LossCurve curve;
    curve.omega_t.reserve(n_points);
    curve.loss.reserve(n_points);
    for (int k = 0; k < n_points; ++k) {
        const double t = t_max * static_cast<double>(k) /
                         static_cast<double>(n_points - 1);
        curve.omega_t.push_back(params.omega * t);
        curve.loss.push_back(loss_probability(params, t, LossMethod::analytic));
    }
    return curve;
}

GateOutcome blockade_gate_outcome(const BlockadeParams& params) {
    const double t = units::kTwoPi / params.omega;
    const TwoLevelAmplitudes psi = evolve(params, {}, t);
    GateOutcome out;
    out.loss_01 = std::clamp(1.0 - psi.norm2(), 0.0, 1.0);
    out.phase_01 = std::arg(psi.c_g);
    out.residual_phase = out.phase_01;  // ideal blocked phase is zero
    return out;
}

}  // namespace aeq::blockade
