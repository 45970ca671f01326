#pragma once

#include <optional>
#include <string>
#include <vector>

namespace aeq::atomdata {

// One atomic level.  `zeeman_hz_per_gauss_per_m` is the linear shift
// coefficient kappa: shift = kappa * m * B for levels where the magnetic
// response is carried by the nuclear spin (J = 0).  Levels with electronic
// angular momentum use g_j and the hyperfine Lande formula instead.
struct LevelModel {
    std::string name;
    double j = 0.0;
    std::optional<double> zeeman_hz_per_gauss_per_m;
    std::optional<double> g_j;
    std::optional<double> lifetime_s;  // in the combined lattice
};

struct TransitionLine {
    std::string lower;
    std::string upper;
    double wavelength_nm = 0.0;
    double oscillator_strength = 0.0;
};

struct SpeciesModel {
    std::string name;
    double nuclear_spin = 0.0;
    std::vector<LevelModel> levels;
    std::vector<TransitionLine> lines;

    const LevelModel& level(const std::string& name) const;
    const LevelModel* find_level(const std::string& name) const;
};

// A concrete internal state: level plus magnetic quantum number.  For J = 0
// levels m is m_I and f is absent; for hyperfine states f is the total
// angular momentum and m is m_F.
struct AtomicState {
    std::string level;
    std::optional<double> f;
    double m = 0.0;

    bool operator==(const AtomicState&) const = default;
};

std::string to_string(const AtomicState& state);

// Parses half-integer text: "9/2", "-13/2", "4.5", "3".
double parse_half_integer(const std::string& text);

// Parses a species document (UTF-8 JSON, see README for the schema) and
// validates all invariants.  Throws parse_error / validation_error.
SpeciesModel load_species(const std::string& json_text);

// Throws validation_error if `state` is inconsistent with `species`
// (unknown level, |m| out of range, F outside |J-I|..J+I).
void validate_state(const SpeciesModel& species, const AtomicState& state);

// Hyperfine Lande factor with the nuclear contribution neglected.
double lande_g_f(double g_j, double f, double j, double i);

// First-order Zeeman shift of `state` in a field of b_gauss, in Hz.
// J = 0 levels use kappa * m * B; hyperfine states use m_F * g_F * mu_B * B.
double zeeman_shift(const SpeciesModel& species, const AtomicState& state,
                    double b_gauss);

// Energy difference between neighboring lattice sites for an atom in `state`
// under a field gradient, in Hz.
double gradient_site_splitting(const SpeciesModel& species,
                               const AtomicState& state,
                               double gradient_g_per_cm, double spacing_nm);

}  // namespace aeq::atomdata
