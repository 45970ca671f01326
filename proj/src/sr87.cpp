#include "aeq/sr87.hpp"

namespace aeq::atomdata {

// Sources, by field:
//  - zeeman_hz_per_gauss_per_m of 1S0 / 3P0: measured clock-transition
//    coefficients (-185 / -295 Hz/G per m_I) for 87Sr.
//  - lifetime_s: scattering-limited lifetimes in the combined lattice at
//    25 kHz trap frequency (1S0 ~20 s, 3P0 ~2 s, 3P2 ~1 s).
//  - lines: transition energies from the NIST ASD term values; oscillator
//    strengths f = (2/3) * omega[a.u.] * |<l||d||u>|^2 / (2J_l+1) with
//    reduced matrix elements from Porsev et al. (1S0-1P1 f = 1.92,
//    1S0-3P1 f = 1.0e-3 from the 21.4 us 3P1 lifetime; 3P0 elements
//    2.675 / 1.962 / 2.450 / 2.605 / 0.516 / 1.161 a.u.).
// The list is truncated to the strong lines that dominate the 600-700 nm
// dispersion; static limits therefore sit a few percent below tabulated
// values.
const std::string& sr87_document() {
    static const std::string doc = R"json({
  "name": "87Sr",
  "nuclear_spin": "9/2",
  "levels": [
    { "name": "1S0", "J": 0, "zeeman_hz_per_gauss_per_m": -185.0, "lifetime_s": 20.0 },
    { "name": "3P0", "J": 0, "zeeman_hz_per_gauss_per_m": -295.0, "lifetime_s": 2.0 },
    { "name": "3P1", "J": 1, "g_J": 1.5 },
    { "name": "3P2", "J": 2, "g_J": 1.5, "lifetime_s": 1.0 },
    { "name": "1P1", "J": 1, "g_J": 1.0 },
    { "name": "5s6s_3S1", "J": 1, "g_J": 2.0 },
    { "name": "5s7s_3S1", "J": 1, "g_J": 2.0 },
    { "name": "5p2_3P1",  "J": 1, "g_J": 1.5 },
    { "name": "5s4d_3D1", "J": 1, "g_J": 0.5 },
    { "name": "5s5d_3D1", "J": 1, "g_J": 0.5 },
    { "name": "5s6d_3D1", "J": 1, "g_J": 0.5 }
  ],
  "lines": [
    { "lower": "1S0", "upper": "1P1",      "wavelength_nm": 460.862,  "oscillator_strength": 1.92 },
    { "lower": "1S0", "upper": "3P1",      "wavelength_nm": 689.449,  "oscillator_strength": 1.0e-3 },
    { "lower": "3P0", "upper": "5s4d_3D1", "wavelength_nm": 2563.263, "oscillator_strength": 0.084797 },
    { "lower": "3P0", "upper": "5s6s_3S1", "wavelength_nm": 679.289,  "oscillator_strength": 0.172134 },
    { "lower": "3P0", "upper": "5s5d_3D1", "wavelength_nm": 482.989,  "oscillator_strength": 0.377502 },
    { "lower": "3P0", "upper": "5p2_3P1",  "wavelength_nm": 474.325,  "oscillator_strength": 0.434574 },
    { "lower": "3P0", "upper": "5s7s_3S1", "wavelength_nm": 432.771,  "oscillator_strength": 0.018688 },
    { "lower": "3P0", "upper": "5s6d_3D1", "wavelength_nm": 394.205,  "oscillator_strength": 0.103864 }
  ]
})json";
    return doc;
}

const SpeciesModel& sr87() {
    static const SpeciesModel model = load_species(sr87_document());
    return model;
}

}  // namespace aeq::atomdata
