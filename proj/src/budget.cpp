#include "aeq/budget.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "aeq/errors.hpp"
#include "aeq/units.hpp"

namespace aeq::budget {

void NoiseModel::validate() const {
    if (delta_b_gauss < 0)
        throw validation_error("noise: delta_b_gauss must be >= 0");
    if (relative_intensity_stability < 0)
        throw validation_error("noise: relative_intensity_stability must be >= 0");
    if (collisional_stability_time_s <= 0)
        throw validation_error("noise: collisional_stability_time_s must be > 0");
    for (const auto& [level, tau] : lifetimes_s)
        if (tau <= 0)
            throw validation_error("noise: lifetime of " + level + " must be > 0");
}

NoiseModel NoiseModel::defaults(const atomdata::SpeciesModel& species) {
    NoiseModel n;
    for (const auto& lv : species.levels)
        if (lv.lifetime_s) n.lifetimes_s[lv.name] = *lv.lifetime_s;
    return n;
}

double ScheduleTimeline::total_duration_s() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_s;
    return t;
}

double FidelityBudget::total_fidelity() const {
    double f = 1.0;
    for (const auto& item : items) f *= 1.0 - item.infidelity;
    return f;
}

std::string FidelityBudget::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& item : items)
        arr.push_back({{"source", item.source}, {"infidelity", item.infidelity}});
    const nlohmann::json doc{{"items", std::move(arr)},
                             {"total_fidelity", total_fidelity()}};
    return doc.dump(2) + "\n";
}

double magnetic_noise_shift_hz(const atomdata::SpeciesModel& species,
                               const atomdata::AtomicState& state0,
                               const atomdata::AtomicState& state1,
                               double delta_b_gauss) {
    return std::abs(atomdata::zeeman_shift(species, state0, delta_b_gauss) -
                    atomdata::zeeman_shift(species, state1, delta_b_gauss));
}

double intensity_noise_shift_hz(double trap_frequency_hz,
                                double relative_stability) {
    if (trap_frequency_hz < 0)
        throw validation_error("intensity shift: trap frequency must be >= 0");
    return 0.25 * units::kTwoPi * trap_frequency_hz * relative_stability;
}

double scattering_infidelity(
    const std::vector<std::pair<std::string, double>>& occupation,
    const std::map<std::string, double>& lifetimes_s) {
    double exponent = 0.0;
    for (const auto& [level, duration] : occupation) {
        if (duration < 0)
            throw validation_error("scattering: negative duration");
        if (duration == 0) continue;
        const auto it = lifetimes_s.find(level);
        if (it == lifetimes_s.end())
            throw validation_error("scattering: no lifetime for level " + level);
        exponent += duration / it->second;
    }
    return 1.0 - std::exp(-exponent);
}

namespace {

double dephasing_infidelity(double shift_hz, double duration_s) {
    const double phi = units::kTwoPi * shift_hz * duration_s;
    return std::min(1.0, 0.5 * phi * phi);
}

}  // namespace

FidelityBudget gate_fidelity_estimate(const ScheduleTimeline& timeline,
                                      const NoiseModel& noise,
                                      double blockade_loss,
                                      const atomdata::SpeciesModel& species,
                                      const atomdata::AtomicState& qubit0,
                                      const atomdata::AtomicState& qubit1) {
    noise.validate();
    if (blockade_loss < 0 || blockade_loss > 1)
        throw validation_error("budget: blockade_loss outside [0,1]");

    const double dw_b = magnetic_noise_shift_hz(species, qubit0, qubit1,
                                                noise.delta_b_gauss);
    const double dw_i = intensity_noise_shift_hz(
        timeline.trap_frequency_hz, noise.relative_intensity_stability);

    FidelityBudget budget;
    const bool tag = timeline.segments.size() > 1;
    for (std::size_t k = 0; k < timeline.segments.size(); ++k) {
        const auto& seg = timeline.segments[k];
        const std::string suffix =
            tag ? "[" + (seg.label.empty() ? std::to_string(k) : seg.label) + "]"
                : "";
        budget.items.push_back(
            {"scattering" + suffix,
             scattering_infidelity(seg.occupation, noise.lifetimes_s)});
        budget.items.push_back(
            {"collisional" + suffix,
             1.0 - std::exp(-seg.two_atom_window_s /
                            noise.collisional_stability_time_s)});
        budget.items.push_back({"dephasing_magnetic" + suffix,
                                dephasing_infidelity(dw_b, seg.duration_s)});
        budget.items.push_back({"dephasing_intensity" + suffix,
                                dephasing_infidelity(dw_i, seg.duration_s)});
    }
    budget.items.push_back({"blockade_loss", blockade_loss});
    return budget;
}

NoiseModel noise_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("noise document: ") + e.what());
    }
    NoiseModel n;
    try {
        if (doc.contains("delta_b_gauss"))
            n.delta_b_gauss = doc.at("delta_b_gauss").get<double>();
        if (doc.contains("relative_intensity_stability"))
            n.relative_intensity_stability =
                doc.at("relative_intensity_stability").get<double>();
        if (doc.contains("collisional_stability_time_s"))
            n.collisional_stability_time_s =
                doc.at("collisional_stability_time_s").get<double>();
        if (doc.contains("lifetimes_s"))
            for (const auto& [level, tau] : doc.at("lifetimes_s").items())
                n.lifetimes_s[level] = tau.get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("noise document: ") + e.what());
    }
    n.validate();
    return n;
}

}  // namespace aeq::budget
