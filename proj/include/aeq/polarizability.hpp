#pragma once

#include <string>
#include <vector>

#include "aeq/atomdata.hpp"

namespace aeq::polar {

struct PolarizabilitySample {
    double wavelength_nm = 0.0;
    double alpha_au = 0.0;
};

// One optical lattice: wavelength, intensity relative to the reference I0,
// and the level it traps.  depth = alpha * intensity (in a.u. * I0 unless a
// Hz conversion constant is configured on the call).
struct LatticeSpec {
    double wavelength_nm = 0.0;
    double intensity = 1.0;
    std::string level;
};

struct ScanOptions {
    // Samples closer than this to a line resonance of the level are
    // rejected (alpha) or skipped (scans).  The 689.2 nm operating point
    // sits 0.25 nm from the 689.449 nm 3P1 line, so keep this small.
    double resonance_window_nm = 0.01;
};

// AC polarizability at angular frequency omega (atomic units):
//   alpha(omega) = sum_k f_k / (omega_k^2 - omega^2)
// over the lines whose lower level is `level`.  omega = 0 gives the static
// sum exactly.
double alpha_at_omega(const atomdata::SpeciesModel& species,
                      const std::string& level, double omega_au);

// Same, addressed by wavelength; throws validation_error when the
// wavelength falls inside the resonance window of one of the level's lines.
double alpha(const atomdata::SpeciesModel& species, const std::string& level,
             double wavelength_nm, const ScanOptions& opt = {});

std::vector<PolarizabilitySample> scan(const atomdata::SpeciesModel& species,
                                       const std::string& level,
                                       double lo_nm, double hi_nm,
                                       double step_nm,
                                       const ScanOptions& opt = {});

// Tune-out wavelengths: brackets sign changes of alpha on the sampled grid
// (skipping resonance windows and brackets that straddle a pole) and
// refines each by bisection.  Result is sorted ascending; no crossings is a
// valid empty result.
std::vector<double> find_zero_crossings(const atomdata::SpeciesModel& species,
                                        const std::string& level,
                                        double lo_nm, double hi_nm,
                                        double step_nm,
                                        const ScanOptions& opt = {});

// depth = alpha(level, lambda) * intensity * hz_per_au (default 1: depths in
// a.u. * I0).
double lattice_depth(const LatticeSpec& spec,
                     const atomdata::SpeciesModel& species,
                     double hz_per_au = 1.0, const ScanOptions& opt = {});

// Transport intensity, relative to the storage intensity, that equalizes
// the two depths: alpha_storage / alpha_transport.
double match_depths(const LatticeSpec& storage, const LatticeSpec& transport,
                    const atomdata::SpeciesModel& species,
                    const ScanOptions& opt = {});

}  // namespace aeq::polar
