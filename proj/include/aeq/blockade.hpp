#pragma once

#include <complex>
#include <vector>

namespace aeq::blockade {

// Parameters of the two-level non-Hermitian Hamiltonian
//   H = Omega/2 (|e><g| + |g><e|) + (-Delta_U - i Gamma/2) |e><e|
// with |g> = |0x,1> and |e> = |0x,1x>.  All three are angular frequencies;
// callers working in Hz convert at the boundary.  The natural scale is
// Omega, so dimensionless work sets Omega = 1.
struct BlockadeParams {
    double omega = 1.0;    // coupling |g> <-> |e>
    double delta_u = 0.0;  // blockade shift
    double gamma = 0.0;    // two-body loss rate

    void validate() const;
};

struct TwoLevelAmplitudes {
    std::complex<double> c_g{1.0, 0.0};
    std::complex<double> c_e{0.0, 0.0};

    double norm2() const { return std::norm(c_g) + std::norm(c_e); }
};

struct LossCurve {
    std::vector<double> omega_t;  // dimensionless times
    std::vector<double> loss;     // in [0, 1], non-decreasing
};

enum class LossMethod { analytic, perturbative };

// exp(-iHt) psi0 in closed form.  The propagator is evaluated through the
// traceless split H = mu I + M with M^2 = s^2 I:
//   exp(-iHt) = e^{-i mu t} [ cos(st) I - i (sin(st)/s) M ],
// with sin(st)/s computed by series for small |st|.  The series limit IS the
// degenerate (Jordan) propagator e^{-i mu t}(I - iMt), so the exceptional
// point Gamma = 2 Omega, Delta_U = 0 needs no special casing and no
// eigenvector inversion happens anywhere.
TwoLevelAmplitudes evolve(const BlockadeParams& params,
                          const TwoLevelAmplitudes& psi0, double t);

// Independent fixed-step RK4 oracle for evolve.  Requires
//   dt <= 0.01 * min(2pi/Omega, 1/Gamma [Gamma>0], 2pi/|Delta_U| [!=0]).
TwoLevelAmplitudes evolve_rk4(const BlockadeParams& params,
                              const TwoLevelAmplitudes& psi0, double t,
                              double dt);

// Largest admissible RK4 step for these parameters.
double rk4_step_bound(const BlockadeParams& params);

// Perturbative decay rate of the blocked ground state:
//   Gamma_eff = Omega^2 Gamma / [4 (Delta_U^2 + Gamma^2/4)];  0 for Gamma=0.
double gamma_eff(const BlockadeParams& params);

// analytic: 1 - |exp(-iHt)(1,0)|^2;  perturbative: 1 - exp(-Gamma_eff t).
double loss_probability(const BlockadeParams& params, double t,
                        LossMethod method = LossMethod::analytic);

// Analytic loss on a uniform grid over [0, t_max]; times reported as
// Omega*t.
LossCurve loss_curve(const BlockadeParams& params, double t_max, int n_points);

// Blocked-branch report for one 2pi pulse (t = 2pi/Omega) starting from |g>:
// the loss, the phase collected by c_g, and its deviation from the ideal 0
// (the paper's phi ~ Omega/Delta_U).  Phase reference is the free Gamma=0,
// Omega=0 phase, i.e. zero.
struct GateOutcome {
    double phase_01 = 0.0;
    double loss_01 = 0.0;
    double residual_phase = 0.0;
};

GateOutcome blockade_gate_outcome(const BlockadeParams& params);

}  // namespace aeq::blockade
