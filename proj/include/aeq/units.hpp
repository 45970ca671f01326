#pragma once

#include <cmath>

// Unit conventions used throughout:
//  - wavelengths in nm, magnetic fields in G, gradients in G/cm, times in s;
//  - frequencies crossing module boundaries are ordinary frequencies in Hz,
//    except the blockade module, whose (Omega, Delta_U, Gamma) are angular;
//  - polarizabilities and the internal sum-over-lines frequencies are in
//    atomic units.  nm <-> a.u. conversion lives here and nowhere else.

namespace aeq::units {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// lambda[nm] * omega[Hartree] = 1e7 / (Hartree in cm^-1)
inline constexpr double kHartreeNm = 1e7 / 219474.6313632;

// Bohr magneton / h, Hz per gauss.
inline constexpr double kBohrMagnetonHzPerGauss = 1.399624e6;

inline double omega_au_from_wavelength_nm(double wavelength_nm) {
    return kHartreeNm / wavelength_nm;
}

inline double wavelength_nm_from_omega_au(double omega_au) {
    return kHartreeNm / omega_au;
}

}  // namespace aeq::units
