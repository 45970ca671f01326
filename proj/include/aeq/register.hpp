#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aeq/atomdata.hpp"
#include "aeq/blockade.hpp"

namespace aeq::reg {

enum class Lattice { storage, transport };

std::string to_string(Lattice lattice);

// Nuclear-spin qubit encoding plus the 3P2 readout levels.  Defaults are the
// 87Sr choice: |0> = |1S0, m_I=-9/2>, |1> = |1S0, m_I=-7/2>, readout states
// |0x> = |3P2, F=13/2, m_F=-13/2>, |1x> = |3P2, F=13/2, m_F=-11/2>.
struct QubitEncoding {
    std::string storage_level = "1S0";
    std::string transport_level = "3P0";
    double m0 = -4.5;
    double m1 = -3.5;
    atomdata::AtomicState readout0{"3P2", 6.5, -6.5};
    atomdata::AtomicState readout1{"3P2", 6.5, -5.5};

    atomdata::AtomicState storage_form(int qubit) const;
    atomdata::AtomicState transport_form(int qubit) const;
};

struct FieldConfig {
    double b_gauss = 0.0;
    double gradient_g_per_cm = 0.0;
};

// Device timing knobs.  Frequencies are ordinary frequencies in Hz; the
// one-over-frequency periods implement the paper-level 2pi/omega rule under
// the Hz boundary convention.  Readout depth fractions are the relative trap
// depths of the |0x> / |1x> levels in the combined lattice; trap frequencies
// scale as sqrt(depth).
struct TimingConfig {
    double storage_trap_frequency_hz = 25e3;
    double transport_trap_frequency_hz = 25e3;
    double margin = 10.0;                // operationalizes ">>"
    double shift_time_per_site_s = 50e-6;
    double readout_depth_fraction_0x = 2.0 / 3.0;
    double readout_depth_fraction_1x = 1.0 / 3.0;
};

struct AtomRecord {
    atomdata::AtomicState internal;
    Lattice lattice = Lattice::storage;
    int site = 0;
    double phase = 0.0;      // accumulated; report modulo 2pi
    bool lost = false;       // lost atoms participate in no further ops
    double survival = 1.0;   // deterministic branch-probability bookkeeping
};

struct LogEntry {
    std::string op;
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    std::vector<std::string> warnings;
    std::optional<int> measurement;
};

struct Register {
    int n_sites = 0;
    double spacing_nm = 344.6;  // 689.2 nm transport lattice period
    FieldConfig field;
    TimingConfig timing;
    QubitEncoding encoding;
    std::vector<AtomRecord> atoms;
    std::vector<LogEntry> event_log;
    double elapsed_s = 0.0;

    // Throws validation_error on slot conflicts or out-of-range sites.
    void validate() const;
};

double phase_mod_2pi(double phase);

// ---- protocol operations ------------------------------------------------

// Resonant two-level rotation on (from, to) with the |a> -> -i|b> pi-pulse
// convention.  A pulse whose `blockade` parameters are set is blocked for
// atoms sharing a site with a 3P2-family atom; the blocked branch evolves
// under the lossy-blockade Hamiltonian (Omega = 2pi * rabi_hz).
struct PulseOp {
    atomdata::AtomicState from;
    atomdata::AtomicState to;
    double area_rad = 0.0;
    std::optional<int> target;  // absent = global
    double detuning_hz = 0.0;
    double rabi_hz = 1e4;
    struct BlockadeSpec {
        double delta_u_rad_per_s = 0.0;
        double gamma_rad_per_s = 0.0;
    };
    std::optional<BlockadeSpec> blockade;
    std::optional<double> duration_s;
};

// State-selectively moves one qubit branch between the lattices, mapping the
// internal level storage <-> transport (1S0 <-> 3P0) with m preserved.
// Transfers are phase-neutral; round trips close exactly.
struct TransferOp {
    enum class Direction { storage_to_transport, transport_to_storage };
    Direction direction = Direction::storage_to_transport;
    int qubit = 0;  // 0 or 1
    bool site_selective = false;
    std::vector<int> sites;  // used when site_selective
    std::optional<double> duration_s;
};

struct ShiftOp {
    int delta_sites = 0;
    std::optional<double> duration_s;
};

// Free evolution.  Accumulates Zeeman phases from the (possibly reversed)
// gradient; with collision_u_hz != 0 a storage+transport pair sharing a site
// collects the conditional phase 2pi*U*T on the transport member.  A
// hold/reversed-hold pair echoes the gradient phases.  Collisional loss
// during the window is deterministic bookkeeping: shared-site pairs decay
// their survival weight at collision_loss_rate_hz (no random sampling).
struct HoldOp {
    double duration_s = 0.0;
    double collision_u_hz = 0.0;        // 0 = collision phase disabled
    bool reverse_gradient = false;
    double collision_loss_rate_hz = 0.0;
};

struct MeasureOp {
    int site = 0;  // observable: 3P2 occupation of the site
};

using ProtocolOp = std::variant<PulseOp, TransferOp, ShiftOp, HoldOp, MeasureOp>;

std::string op_label(const ProtocolOp& op);

// Effective duration: the explicit duration when set, otherwise the device
// default (transfer and site-selective ops cost margin * max of the relevant
// periods; shifts cost shift_time_per_site per site; holds cost T).
double op_duration(const Register& reg, const ProtocolOp& op,
                   const atomdata::SpeciesModel& species);

Register apply_op(Register reg, const ProtocolOp& op,
                  const atomdata::SpeciesModel& species);

struct RunResult {
    Register reg;            // final, or state before the failing op
    bool ok = true;
    std::string error;       // set when !ok
    std::size_t failed_index = 0;
};

// Folds apply_op left to right; the first hard error aborts with the partial
// event log preserved.
RunResult run_protocol(Register reg, const std::vector<ProtocolOp>& ops,
                       const atomdata::SpeciesModel& species);

// ---- timing -------------------------------------------------------------

struct TimingConstraint {
    double omega_t_hz = 0.0;  // smallest relevant trap frequency
    double omega_e_hz = 0.0;  // neighbor splitting; 0 when not site-selective
    double margin = 10.0;
};

double required_transfer_time(const TimingConstraint& constraint);

// ok (true) iff tau_transfer >= margin * max(period_t, period_e).
bool validate_transfer_timing(const TimingConstraint& constraint,
                              double tau_transfer_s);

// ---- canned protocols and truth tables -----------------------------------

// Steps (i)-(iv) of the transport phase gate between sites i and j:
// transfer |0> to the transport lattice, shift j-i, collisional hold, shift
// back, transfer back.  Needs sites up to 2j-i in range.
std::vector<ProtocolOp> phase_gate_protocol(int site_i, int site_j,
                                            double collision_u_hz,
                                            double hold_t_s);

// Same transport wrapper with the pi / 2pi / pi blockade pulse sequence in
// place of the hold.
std::vector<ProtocolOp> blockade_gate_protocol(
    int site_i, int site_j, const blockade::BlockadeParams& params,
    double readout_pulse_rabi_hz = 1e4);

// Basis order (|0,0>, |0,1>, |1,0>, |1,1>); phases reported in [0, 2pi).
struct PhaseGateTable {
    std::array<double, 4> phases{};
};

// Executes the transport protocol on a fresh register for each basis state;
// nothing is hard-coded.
PhaseGateTable phase_gate_truth_table(double collision_u_hz, double hold_t_s,
                                      const atomdata::SpeciesModel& species);

struct BlockadeGateTable {
    std::array<double, 4> phases{};
    std::array<double, 4> losses{};
    std::array<bool, 4> basis_preserved{};
    double residual_phase_01 = 0.0;  // phases[1] - pi, wrapped to (-pi, pi]
};

BlockadeGateTable blockade_gate_truth_table(
    const blockade::BlockadeParams& params,
    const atomdata::SpeciesModel& species);

// Seeded Monte Carlo over the deterministic survival bookkeeping: per-atom
// survivor counts over n trajectories.
std::vector<int> sample_loss_trajectories(const Register& reg,
                                          int n_trajectories,
                                          std::uint64_t seed);

// ---- documents ------------------------------------------------------------

Register register_from_json(const std::string& json_text);
std::string register_to_json(const Register& reg);
std::vector<ProtocolOp> protocol_from_json(const std::string& json_text);
std::string protocol_to_json(const std::vector<ProtocolOp>& ops);
std::string event_log_to_jsonl(const std::vector<LogEntry>& log);

// Single-op round trip (compact JSON object), shared with the schedule format.
ProtocolOp protocol_op_from_json_text(const std::string& json_text);
std::string protocol_op_to_json_text(const ProtocolOp& op);

}  // namespace aeq::reg
