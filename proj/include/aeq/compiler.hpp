#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aeq/atomdata.hpp"
#include "aeq/blockade.hpp"
#include "aeq/budget.hpp"
#include "aeq/register.hpp"
#include "aeq/units.hpp"

namespace aeq::compiler {

enum class GateKind { rz, rx, cz, cz_layer };

std::string to_string(GateKind kind);

struct Gate {
    GateKind kind = GateKind::cz;
    std::vector<int> targets;  // CZ_layer: flattened pairs, empty = all even-odd
    double angle_rad = 0.0;    // single-qubit gates
};

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    void validate() const;
};

enum class GateMechanism { collisional, blockade };

// Device description consumed by the compiler.  Qubit q lives at site q;
// gates between distant sites transport the |0> branch there and back.
struct DeviceConfig {
    int n_sites = 0;
    double spacing_nm = 344.6;
    double b_gauss = 0.0;
    double gradient_g_per_cm = 0.0;
    reg::TimingConfig timing;
    double pulse_rabi_hz = 1e4;
    GateMechanism gate_mechanism = GateMechanism::collisional;
    double hold_u_hz = 1e3;    // collisional phase: phi = 2pi * U * T
    double hold_t_s = 5e-4;
    blockade::BlockadeParams blockade{units::kTwoPi * 200.0, 0.0,
                                      units::kTwoPi * 20e3};

    // Atom-free register with this device's geometry/timing; the op duration
    // model is shared with the register module through it.
    reg::Register make_register() const;
};

struct ScheduleLayer {
    std::vector<reg::ProtocolOp> ops;  // parallel; must touch disjoint sites
    double duration_s = 0.0;
};

struct Schedule {
    DeviceConfig device;
    std::vector<ScheduleLayer> layers;
    double total_duration_s = 0.0;
    budget::ScheduleTimeline timeline;    // structural, per gate window
    std::vector<double> blockade_losses;  // one per blockade-mechanism CZ

    void validate() const;  // layer disjointness + duration consistency
};

// Lowers the circuit onto the device: CZ(i,j) becomes
// [site-selective transfer of |0> at {i,j}] shift(j-i) [hold or pi/2pi/pi
// blockade pulses] shift(i-j) [transfer back]; single-qubit gates become
// site-targeted pulses, batched into parallel layers while targets stay
// disjoint.  Throws protocol_error for unschedulable circuits.
Schedule compile_circuit(const Circuit& circuit, const DeviceConfig& device,
                         const atomdata::SpeciesModel& species);

double schedule_duration(const Schedule& schedule);

// Flattens the schedule and executes it on `start` (layer order, ops within
// a layer in listed order; disjointness makes that equivalent to parallel).
reg::RunResult execute(const Schedule& schedule, reg::Register start,
                       const atomdata::SpeciesModel& species);

// Budget for the schedule's active branch: delegates to
// budget::gate_fidelity_estimate with the schedule's timeline and the
// combined blockade loss.
budget::FidelityBudget price(const Schedule& schedule,
                             const budget::NoiseModel& noise,
                             const atomdata::SpeciesModel& species);

Circuit circuit_from_json(const std::string& json_text);
DeviceConfig device_from_json(const std::string& json_text);
std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& json_text);

}  // namespace aeq::compiler
