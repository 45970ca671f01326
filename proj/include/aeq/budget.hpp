#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aeq/atomdata.hpp"

namespace aeq::budget {

// Environmental noise inputs.  Lifetimes are per-level in the combined
// lattice; collisional_stability_time_s is the 3P0 two-atom window the paper
// requires only ~100 ms of.
struct NoiseModel {
    double delta_b_gauss = 1e-3;
    double relative_intensity_stability = 1e-6;
    std::map<std::string, double> lifetimes_s;
    double collisional_stability_time_s = 0.1;

    void validate() const;

    // delta_B / stability / stability window defaults with the bundled
    // species' lifetimes.
    static NoiseModel defaults(const atomdata::SpeciesModel& species);
};

// One contiguous piece of a schedule, reduced to what the budget needs:
// which levels are occupied for how long (the transported atom's excursion
// and its partner), how long two atoms share a site, and the wall-clock
// duration.  Keeping segments separate keeps the budget's product form exact
// under schedule concatenation.
struct TimelineSegment {
    std::string label;
    std::vector<std::pair<std::string, double>> occupation;  // (level, s)
    double two_atom_window_s = 0.0;
    double duration_s = 0.0;
};

struct ScheduleTimeline {
    std::vector<TimelineSegment> segments;
    double trap_frequency_hz = 25e3;

    double total_duration_s() const;
};

struct BudgetItem {
    std::string source;
    double infidelity = 0.0;
};

struct FidelityBudget {
    std::vector<BudgetItem> items;

    double total_fidelity() const;  // product form: prod(1 - item)
    std::string to_json() const;
};

// |zeeman_shift(state0, dB) - zeeman_shift(state1, dB)| in Hz.
double magnetic_noise_shift_hz(const atomdata::SpeciesModel& species,
                               const atomdata::AtomicState& state0,
                               const atomdata::AtomicState& state1,
                               double delta_b_gauss);

// Differential ground-state energy shift from relative intensity noise,
// via harmonic zero-point scaling: E0 = omega_t/2 and E0 ~ sqrt(I), so
// dE = (omega_t/4) * dI/I with omega_t = 2pi * trap_frequency_hz, quoted in
// Hz.
double intensity_noise_shift_hz(double trap_frequency_hz,
                                double relative_stability);

// 1 - prod exp(-duration/lifetime) over the occupation timeline.
double scattering_infidelity(
    const std::vector<std::pair<std::string, double>>& occupation,
    const std::map<std::string, double>& lifetimes_s);

// Itemized infidelity budget for a schedule: per-segment scattering,
// collisional exposure (1 - exp(-t_shared/t_stability)), magnetic and
// intensity dephasing via the small-angle (phi^2)/2 model, plus the supplied
// blockade loss.
FidelityBudget gate_fidelity_estimate(const ScheduleTimeline& timeline,
                                      const NoiseModel& noise,
                                      double blockade_loss,
                                      const atomdata::SpeciesModel& species,
                                      const atomdata::AtomicState& qubit0,
                                      const atomdata::AtomicState& qubit1);

NoiseModel noise_from_json(const std::string& json_text);

}  // namespace aeq::budget
