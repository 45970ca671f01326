#include "aeq/polarizability.hpp"

#include <algorithm>
#include <cmath>

#include "aeq/errors.hpp"
#include "aeq/units.hpp"

namespace aeq::polar {

namespace {

std::vector<const atomdata::TransitionLine*> lines_of(
    const atomdata::SpeciesModel& species, const std::string& level) {
    species.level(level);  // throws on unknown level
    std::vector<const atomdata::TransitionLine*> out;
    for (const auto& ln : species.lines)
        if (ln.lower == level) out.push_back(&ln);
    return out;
}

bool in_resonance_window(const atomdata::SpeciesModel& species,
                         const std::string& level, double wavelength_nm,
                         double window_nm) {
    for (const auto& ln : species.lines)
        if (ln.lower == level &&
            std::abs(ln.wavelength_nm - wavelength_nm) < window_nm)
            return true;
    return false;
}

bool bracket_straddles_pole(const atomdata::SpeciesModel& species,
                            const std::string& level, double a_nm,
                            double b_nm) {
    for (const auto& ln : species.lines)
        if (ln.lower == level && ln.wavelength_nm > a_nm && ln.wavelength_nm < b_nm)
            return true;
    return false;
}

}  // namespace

double alpha_at_omega(const atomdata::SpeciesModel& species,
                      const std::string& level, double omega_au) {
    double sum = 0.0;
    for (const auto* ln : lines_of(species, level)) {
        const double wk = units::omega_au_from_wavelength_nm(ln->wavelength_nm);
        sum += ln->oscillator_strength / (wk * wk - omega_au * omega_au);
    }
    return sum;
}

double alpha(const atomdata::SpeciesModel& species, const std::string& level,
             double wavelength_nm, const ScanOptions& opt) {
    if (wavelength_nm <= 0)
        throw validation_error("wavelength must be > 0");
    species.level(level);
    if (in_resonance_window(species, level, wavelength_nm, opt.resonance_window_nm))
        throw validation_error("wavelength " + std::to_string(wavelength_nm) +
                               " nm is within the resonance exclusion window of a " +
                               level + " line");
    return alpha_at_omega(species, level,
                          units::omega_au_from_wavelength_nm(wavelength_nm));
}

std::vector<PolarizabilitySample> scan(const atomdata::SpeciesModel& species,
                                       const std::string& level, double lo_nm,
                                       double hi_nm, double step_nm,
                                       const ScanOptions& opt) {
    if (!(lo_nm < hi_nm)) throw validation_error("empty wavelength range");
    if (step_nm <= 0) throw validation_error("step must be > 0");
    species.level(level);
    std::vector<PolarizabilitySample> out;
    for (double w = lo_nm; w <= hi_nm + 0.5 * step_nm; w += step_nm) {
        const double wl = std::min(w, hi_nm);
        if (in_resonance_window(species, level, wl, opt.resonance_window_nm))
            continue;
        out.push_back({wl, alpha_at_omega(species, level,
                                          units::omega_au_from_wavelength_nm(wl))});
        if (wl >= hi_nm) break;
    }
    return out;
}

std::vector<double> find_zero_crossings(const atomdata::SpeciesModel& species,
                                        const std::string& level, double lo_nm,
                                        double hi_nm, double step_nm,
                                        const ScanOptions& opt) {
    const auto samples = scan(species, level, lo_nm, hi_nm, step_nm, opt);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        double a = samples[i].wavelength_nm;
        double b = samples[i + 1].wavelength_nm;
        double fa = samples[i].alpha_au;
        double fb = samples[i + 1].alpha_au;
        if (fa == 0.0) {
            // a grid point landing exactly on a zero; an identically zero
            // alpha (level with no lines) has no sign changes and no roots
            const bool isolated =
                fb != 0.0 && (i == 0 || samples[i - 1].alpha_au != 0.0);
            if (isolated) roots.push_back(a);
            continue;
        }
        if (fa * fb >= 0.0) continue;
        // A sign change across a pole is not a zero.
        if (bracket_straddles_pole(species, level, a, b)) continue;
        // Bisection; guaranteed bracketing even on steep dispersion.
        for (int it = 0; it < 200 && (b - a) > 1e-13 * std::abs(a); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = alpha_at_omega(
                species, level, units::omega_au_from_wavelength_nm(mid));
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if (fa * fm < 0.0) {
                b = mid;
                fb = fm;
            } else {
                a = mid;
                fa = fm;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double lattice_depth(const LatticeSpec& spec,
                     const atomdata::SpeciesModel& species, double hz_per_au,
                     const ScanOptions& opt) {
    if (spec.intensity < 0)
        throw validation_error("lattice intensity must be >= 0");
    return alpha(species, spec.level, spec.wavelength_nm, opt) * spec.intensity *
           hz_per_au;
}

double match_depths(const LatticeSpec& storage, const LatticeSpec& transport,
                    const atomdata::SpeciesModel& species,
                    const ScanOptions& opt) {
    const double a_s = alpha(species, storage.level, storage.wavelength_nm, opt);
    const double a_t = alpha(species, transport.level, transport.wavelength_nm, opt);
    if (a_t == 0.0)
        throw validation_error("transport polarizability is zero; depths cannot be matched");
    return a_s / a_t;
}

}  // namespace aeq::polar
