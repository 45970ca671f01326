#include "aeq/register.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "aeq/errors.hpp"
#include "aeq/units.hpp"

namespace aeq::reg {

namespace {

constexpr double kPi = units::kTwoPi / 2.0;

bool is_3p2_family(const std::string& level) {
    return level.rfind("3P2", 0) == 0;
}

bool same_state(const atomdata::AtomicState& a, const atomdata::AtomicState& b) {
    return a.level == b.level && a.f == b.f && a.m == b.m;
}

const AtomRecord* occupant(const std::vector<AtomRecord>& atoms, int site,
                           Lattice lattice, const AtomRecord* skip = nullptr) {
    for (const auto& a : atoms) {
        if (&a == skip || a.lost) continue;
        if (a.site == site && a.lattice == lattice) return &a;
    }
    return nullptr;
}

}  // namespace

std::string to_string(Lattice lattice) {
    return lattice == Lattice::storage ? "storage" : "transport";
}

atomdata::AtomicState QubitEncoding::storage_form(int qubit) const {
    return {storage_level, std::nullopt, qubit == 0 ? m0 : m1};
}

atomdata::AtomicState QubitEncoding::transport_form(int qubit) const {
    return {transport_level, std::nullopt, qubit == 0 ? m0 : m1};
}

void Register::validate() const {
    if (n_sites <= 0) throw validation_error("register: n_sites must be > 0");
    if (spacing_nm <= 0) throw validation_error("register: spacing_nm must be > 0");
    std::set<std::pair<int, int>> slots;
    for (const auto& a : atoms) {
        if (a.site < 0 || a.site >= n_sites)
            throw validation_error("register: atom site out of range");
        if (a.survival < 0 || a.survival > 1.0 + 1e-12)
            throw validation_error("register: atom survival out of [0,1]");
        if (a.lost) continue;
        if (!slots.insert({a.site, a.lattice == Lattice::storage ? 0 : 1}).second)
            throw validation_error("register: two atoms share a (site, lattice) slot");
    }
}

double phase_mod_2pi(double phase) {
    double p = std::fmod(phase, units::kTwoPi);
    if (p < 0) p += units::kTwoPi;
    return p;
}

std::string op_label(const ProtocolOp& op) {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PulseOp>) return "pulse";
            else if constexpr (std::is_same_v<T, TransferOp>) return "transfer";
            else if constexpr (std::is_same_v<T, ShiftOp>) return "shift";
            else if constexpr (std::is_same_v<T, HoldOp>) return "hold";
            else return "measure";
        },
        op);
}

double required_transfer_time(const TimingConstraint& constraint) {
    if (constraint.omega_t_hz <= 0)
        throw validation_error("timing: omega_t must be > 0");
    if (constraint.margin < 1)
        throw validation_error("timing: margin must be >= 1");
    double period = 1.0 / constraint.omega_t_hz;
    if (constraint.omega_e_hz > 0)
        period = std::max(period, 1.0 / constraint.omega_e_hz);
    return constraint.margin * period;
}

bool validate_transfer_timing(const TimingConstraint& constraint,
                              double tau_transfer_s) {
    return tau_transfer_s >= required_transfer_time(constraint);
}

namespace {

// Trap frequency seen by an atom in `state`: lattice frequency for the qubit
// levels, scaled by sqrt(relative depth) for the 3P2 readout levels.
double trap_frequency_for_state(const Register& reg,
                                const atomdata::AtomicState& state) {
    const auto& t = reg.timing;
    if (is_3p2_family(state.level)) {
        const double frac = same_state(state, reg.encoding.readout1)
                                ? t.readout_depth_fraction_1x
                                : t.readout_depth_fraction_0x;
        return t.storage_trap_frequency_hz * std::sqrt(frac);
    }
    if (state.level == reg.encoding.transport_level)
        return t.transport_trap_frequency_hz;
    return t.storage_trap_frequency_hz;
}

// True when another (non-lost) atom on the same site sits in a 3P2-family
// level, i.e. the collision partner that blocks the probe pulse.
bool occupant_in_3p2(const Register& reg, const AtomRecord& self) {
    for (const auto& a : reg.atoms) {
        if (&a == &self || a.lost) continue;
        if (a.site == self.site && is_3p2_family(a.internal.level)) return true;
    }
    return false;
}

double neighbor_splitting_hz(const Register& reg,
                             const atomdata::SpeciesModel& species) {
    if (reg.field.gradient_g_per_cm <= 0) return 0.0;
    return atomdata::gradient_site_splitting(species, reg.encoding.readout0,
                                             reg.field.gradient_g_per_cm,
                                             reg.spacing_nm);
}

double default_pulse_duration(const Register& reg, const PulseOp& op,
                              const atomdata::SpeciesModel& species) {
    double dur = op.area_rad / (units::kTwoPi * op.rabi_hz);
    // Pulses into/out of 3P2 are transfer processes in the paper's sense:
    // they swap the trapping potential, so the adiabaticity rule applies.
    if (is_3p2_family(op.from.level) || is_3p2_family(op.to.level)) {
        const double ft = std::min(trap_frequency_for_state(reg, op.from),
                                   trap_frequency_for_state(reg, op.to));
        dur = std::max(dur, reg.timing.margin / ft);
    }
    if (op.target) {
        const double fe = neighbor_splitting_hz(reg, species);
        if (fe > 0) dur = std::max(dur, reg.timing.margin / fe);
    }
    return dur;
}

double default_transfer_duration(const Register& reg, const TransferOp& op,
                                 const atomdata::SpeciesModel& species) {
    TimingConstraint c;
    c.omega_t_hz = std::min(reg.timing.storage_trap_frequency_hz,
                            reg.timing.transport_trap_frequency_hz);
    c.omega_e_hz = op.site_selective ? neighbor_splitting_hz(reg, species) : 0.0;
    c.margin = reg.timing.margin;
    return required_transfer_time(c);
}

void append_timing_warnings(const Register& reg, const ProtocolOp& op,
                            double dur, const atomdata::SpeciesModel& species,
                            std::vector<std::string>& warnings) {
    if (const auto* tr = std::get_if<TransferOp>(&op)) {
        TimingConstraint c;
        c.omega_t_hz = std::min(reg.timing.storage_trap_frequency_hz,
                                reg.timing.transport_trap_frequency_hz);
        c.omega_e_hz =
            tr->site_selective ? neighbor_splitting_hz(reg, species) : 0.0;
        c.margin = reg.timing.margin;
        if (!validate_transfer_timing(c, dur)) {
            std::ostringstream os;
            os << "transfer time " << dur << " s violates tau >= "
               << required_transfer_time(c) << " s";
            warnings.push_back(os.str());
        }
    } else if (const auto* p = std::get_if<PulseOp>(&op)) {
        if (p->target && dur > 0) {
            const double fe = neighbor_splitting_hz(reg, species);
            if (fe > 0 && 1.0 / dur >= fe) {
                std::ostringstream os;
                os << "pulse spectral width " << 1.0 / dur
                   << " Hz does not resolve the neighbor splitting " << fe
                   << " Hz";
                warnings.push_back(os.str());
            }
        }
    }
}

void apply_pulse(Register& reg, const PulseOp& op,
                 const atomdata::SpeciesModel& species) {
    atomdata::validate_state(species, op.from);
    atomdata::validate_state(species, op.to);
    if (op.area_rad < 0) throw protocol_error("pulse: area must be >= 0");
    if (!(op.rabi_hz > 0)) throw protocol_error("pulse: rabi_hz must be > 0");
    if (op.target) {
        if (*op.target < 0 || *op.target >= reg.n_sites)
            throw protocol_error("pulse: target site out of range");
        if (reg.field.gradient_g_per_cm <= 0)
            throw protocol_error("pulse: site-selective pulse requires a field gradient");
    }
    const bool self_transition = same_state(op.from, op.to);
    const double c = std::cos(0.5 * op.area_rad);
    const double s = std::sin(0.5 * op.area_rad);

    for (auto& atom : reg.atoms) {
        if (atom.lost) continue;
        if (op.target && atom.site != *op.target) continue;
        const bool in_from = same_state(atom.internal, op.from);
        const bool in_to = same_state(atom.internal, op.to);
        if (!in_from && !in_to) continue;

        if (self_transition) {
            // AC-Stark phase imprint: area is the imprinted phase.
            atom.phase += op.area_rad;
            continue;
        }

        if (op.blockade &&
            occupant_in_3p2(reg, atom)) {
            // Blocked branch: two-level lossy-blockade evolution for the
            // pulse window; the atom keeps its state with the surviving
            // amplitude's phase and weight (the small |c_e|^2 leakage is
            // folded into the surviving weight).
            blockade::BlockadeParams bp;
            bp.omega = units::kTwoPi * op.rabi_hz;
            bp.delta_u = op.blockade->delta_u_rad_per_s;
            bp.gamma = op.blockade->gamma_rad_per_s;
            const double t = op.area_rad / bp.omega;
            blockade::TwoLevelAmplitudes psi0;
            if (in_to) psi0 = {{0.0, 0.0}, {1.0, 0.0}};
            const auto psi = blockade::evolve(bp, psi0, t);
            const auto amp = in_from ? psi.c_g : psi.c_e;
            atom.phase += std::arg(amp);
            atom.survival *= psi.norm2();
            continue;
        }

        // Exact resonant rotation; only basis-preserving areas are
        // representable in the single-configuration register.
        if (std::abs(s) < 1e-9) {
            if (c < 0) atom.phase += kPi;
        } else if (std::abs(c) < 1e-9) {
            atom.internal = in_from ? op.to : op.from;
            atom.phase += (s > 0 ? -0.5 : 0.5) * kPi;
        } else {
            std::ostringstream os;
            os << "pulse area " << op.area_rad
               << " rad creates a superposition, which the single-configuration "
                  "register cannot represent; use integer multiples of pi";
            throw protocol_error(os.str());
        }
    }
}

void apply_transfer(Register& reg, const TransferOp& op,
                    const atomdata::SpeciesModel& species) {
    (void)species;
    if (op.qubit != 0 && op.qubit != 1)
        throw protocol_error("transfer: qubit selector must be 0 or 1");
    if (op.site_selective) {
        if (reg.field.gradient_g_per_cm <= 0)
            throw protocol_error("transfer: site-selective transfer requires a field gradient");
        if (op.sites.empty())
            throw protocol_error("transfer: site-selective transfer needs a site list");
        for (int site : op.sites)
            if (site < 0 || site >= reg.n_sites)
                throw protocol_error("transfer: selected site out of range");
    }
    const bool to_transport =
        op.direction == TransferOp::Direction::storage_to_transport;
    const Lattice src = to_transport ? Lattice::storage : Lattice::transport;
    const Lattice dst = to_transport ? Lattice::transport : Lattice::storage;
    const atomdata::AtomicState src_form = to_transport
                                               ? reg.encoding.storage_form(op.qubit)
                                               : reg.encoding.transport_form(op.qubit);
    const atomdata::AtomicState dst_form = to_transport
                                               ? reg.encoding.transport_form(op.qubit)
                                               : reg.encoding.storage_form(op.qubit);

    std::vector<AtomRecord*> movers;
    for (auto& atom : reg.atoms) {
        if (atom.lost || atom.lattice != src) continue;
        if (!same_state(atom.internal, src_form)) continue;
        if (op.site_selective &&
            std::find(op.sites.begin(), op.sites.end(), atom.site) == op.sites.end())
            continue;
        movers.push_back(&atom);
    }
    for (auto* atom : movers) {
        if (occupant(reg.atoms, atom->site, dst, atom))
            throw protocol_error("transfer into an occupied " + to_string(dst) +
                                 " slot at site " + std::to_string(atom->site));
    }
    for (auto* atom : movers) {
        atom->lattice = dst;
        atom->internal = dst_form;
    }
}

void apply_shift(Register& reg, const ShiftOp& op) {
    for (const auto& atom : reg.atoms) {
        if (atom.lost || atom.lattice != Lattice::transport) continue;
        const int dest = atom.site + op.delta_sites;
        if (dest < 0 || dest >= reg.n_sites)
            throw protocol_error("shift pushes the atom at site " +
                                 std::to_string(atom.site) +
                                 " off the register bounds");
    }
    for (auto& atom : reg.atoms) {
        if (atom.lost || atom.lattice != Lattice::transport) continue;
        atom.site += op.delta_sites;
    }
}

void apply_hold(Register& reg, const HoldOp& op,
                const atomdata::SpeciesModel& species) {
    if (op.duration_s < 0) throw protocol_error("hold: duration must be >= 0");
    const double sign = op.reverse_gradient ? -1.0 : 1.0;
    for (auto& atom : reg.atoms) {
        if (atom.lost) continue;
        const double b_site =
            reg.field.b_gauss + sign * reg.field.gradient_g_per_cm *
                                    (atom.site * reg.spacing_nm * 1e-7);
        if (b_site == 0.0) continue;
        const double shift_hz = atomdata::zeeman_shift(species, atom.internal, b_site);
        atom.phase += units::kTwoPi * shift_hz * op.duration_s;
    }
    if (op.collision_u_hz != 0.0 || op.collision_loss_rate_hz > 0.0) {
        for (auto& atom : reg.atoms) {
            if (atom.lost || atom.lattice != Lattice::transport) continue;
            if (!occupant(reg.atoms, atom.site, Lattice::storage)) continue;
            atom.phase += units::kTwoPi * op.collision_u_hz * op.duration_s;
            if (op.collision_loss_rate_hz > 0.0)
                atom.survival *=
                    std::exp(-op.collision_loss_rate_hz * op.duration_s);
        }
    }
}

int apply_measure(Register& reg, const MeasureOp& op) {
    if (op.site < 0 || op.site >= reg.n_sites)
        throw protocol_error("measure: site out of range");
    for (const auto& atom : reg.atoms) {
        if (atom.lost || atom.site != op.site) continue;
        if (is_3p2_family(atom.internal.level)) return 1;
    }
    return 0;
}

}  // namespace

double op_duration(const Register& reg, const ProtocolOp& op,
                   const atomdata::SpeciesModel& species) {
    return std::visit(
        [&](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PulseOp>) {
                return o.duration_s ? *o.duration_s
                                    : default_pulse_duration(reg, o, species);
            } else if constexpr (std::is_same_v<T, TransferOp>) {
                return o.duration_s ? *o.duration_s
                                    : default_transfer_duration(reg, o, species);
            } else if constexpr (std::is_same_v<T, ShiftOp>) {
                return o.duration_s ? *o.duration_s
                                    : std::abs(o.delta_sites) *
                                          reg.timing.shift_time_per_site_s;
            } else if constexpr (std::is_same_v<T, HoldOp>) {
                return o.duration_s;
            } else {
                return 0.0;
            }
        },
        op);
}

Register apply_op(Register reg, const ProtocolOp& op,
                  const atomdata::SpeciesModel& species) {
    reg.validate();
    const double dur = op_duration(reg, op, species);

    LogEntry entry;
    entry.op = op_label(op);
    entry.t_start_s = reg.elapsed_s;
    entry.t_end_s = reg.elapsed_s + dur;
    append_timing_warnings(reg, op, dur, species, entry.warnings);

    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PulseOp>) {
                apply_pulse(reg, o, species);
            } else if constexpr (std::is_same_v<T, TransferOp>) {
                apply_transfer(reg, o, species);
            } else if constexpr (std::is_same_v<T, ShiftOp>) {
                apply_shift(reg, o);
            } else if constexpr (std::is_same_v<T, HoldOp>) {
                apply_hold(reg, o, species);
            } else {
                entry.measurement = apply_measure(reg, o);
            }
        },
        op);

    reg.elapsed_s += dur;
    reg.event_log.push_back(std::move(entry));
    reg.validate();
    return reg;
}

RunResult run_protocol(Register reg, const std::vector<ProtocolOp>& ops,
                       const atomdata::SpeciesModel& species) {
    RunResult result;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        try {
            // apply_op gets a copy so an abort keeps the pre-op register
            // (and its partial event log) intact.
            Register next = apply_op(reg, ops[i], species);
            reg = std::move(next);
        } catch (const std::exception& e) {
            result.ok = false;
            result.error = e.what();
            result.failed_index = i;
            break;
        }
    }
    result.reg = std::move(reg);
    return result;
}

std::vector<ProtocolOp> phase_gate_protocol(int site_i, int site_j,
                                            double collision_u_hz,
                                            double hold_t_s) {
    if (site_i == site_j)
        throw validation_error("phase gate: sites must differ");
    std::vector<ProtocolOp> ops;
    TransferOp out;
    out.direction = TransferOp::Direction::storage_to_transport;
    out.qubit = 0;
    ops.push_back(out);
    ops.push_back(ShiftOp{site_j - site_i, std::nullopt});
    // Echoed pair: the second half runs with the gradient reversed, so the
    // site-dependent Zeeman phases cancel exactly while the collision phase
    // accumulates to 2pi*U*T.
    ops.push_back(HoldOp{0.5 * hold_t_s, collision_u_hz, false});
    ops.push_back(HoldOp{0.5 * hold_t_s, collision_u_hz, true});
    ops.push_back(ShiftOp{site_i - site_j, std::nullopt});
    TransferOp back;
    back.direction = TransferOp::Direction::transport_to_storage;
    back.qubit = 0;
    ops.push_back(back);
    return ops;
}

std::vector<ProtocolOp> blockade_gate_protocol(
    int site_i, int site_j, const blockade::BlockadeParams& params,
    double readout_pulse_rabi_hz) {
    if (site_i == site_j)
        throw validation_error("blockade gate: sites must differ");
    params.validate();
    QubitEncoding enc;  // default encoding carries the level labels

    std::vector<ProtocolOp> ops;
    TransferOp out;
    out.direction = TransferOp::Direction::storage_to_transport;
    out.qubit = 0;
    ops.push_back(out);
    ops.push_back(ShiftOp{site_j - site_i, std::nullopt});

    PulseOp excite;  // (i): |0> (transport) -> |0x>
    excite.from = enc.transport_form(0);
    excite.to = enc.readout0;
    excite.area_rad = kPi;
    excite.rabi_hz = readout_pulse_rabi_hz;
    ops.push_back(excite);

    PulseOp probe;  // (ii): 2pi pulse |1> -> |1x>, blocked on shared sites
    probe.from = enc.storage_form(1);
    probe.to = enc.readout1;
    probe.area_rad = units::kTwoPi;
    probe.rabi_hz = params.omega / units::kTwoPi;
    probe.blockade = PulseOp::BlockadeSpec{params.delta_u, params.gamma};
    ops.push_back(probe);

    PulseOp deexcite;  // (iv): |0x> -> |0>
    deexcite.from = enc.readout0;
    deexcite.to = enc.transport_form(0);
    deexcite.area_rad = kPi;
    deexcite.rabi_hz = readout_pulse_rabi_hz;
    ops.push_back(deexcite);

    ops.push_back(ShiftOp{site_i - site_j, std::nullopt});
    TransferOp back;
    back.direction = TransferOp::Direction::transport_to_storage;
    back.qubit = 0;
    ops.push_back(back);
    return ops;
}

namespace {

Register two_qubit_register(int q_i, int q_j, int n_sites) {
    Register reg;
    reg.n_sites = n_sites;
    AtomRecord a;
    a.internal = reg.encoding.storage_form(q_i);
    a.site = 0;
    reg.atoms.push_back(a);
    AtomRecord b;
    b.internal = reg.encoding.storage_form(q_j);
    b.site = 1;
    reg.atoms.push_back(b);
    return reg;
}

bool final_matches_initial(const Register& fin, const Register& init) {
    if (fin.atoms.size() != init.atoms.size()) return false;
    for (std::size_t k = 0; k < fin.atoms.size(); ++k) {
        const auto& a = fin.atoms[k];
        const auto& b = init.atoms[k];
        if (!same_state(a.internal, b.internal) || a.lattice != b.lattice ||
            a.site != b.site || a.lost != b.lost)
            return false;
    }
    return true;
}

double total_phase(const Register& reg) {
    double sum = 0.0;
    for (const auto& a : reg.atoms) sum += a.phase;
    return phase_mod_2pi(sum);
}

}  // namespace

PhaseGateTable phase_gate_truth_table(double collision_u_hz, double hold_t_s,
                                      const atomdata::SpeciesModel& species) {
    if (collision_u_hz < 0 || hold_t_s < 0)
        throw validation_error("phase gate: U and T must be >= 0");
    const auto ops = phase_gate_protocol(0, 1, collision_u_hz, hold_t_s);
    PhaseGateTable table;
    for (int b = 0; b < 4; ++b) {
        const Register init = two_qubit_register(b >> 1, b & 1, 3);
        const RunResult run = run_protocol(init, ops, species);
        if (!run.ok)
            throw protocol_error("phase gate execution failed: " + run.error);
        if (!final_matches_initial(run.reg, init))
            throw protocol_error("phase gate did not restore the basis state");
        table.phases[static_cast<std::size_t>(b)] = total_phase(run.reg);
    }
    return table;
}

BlockadeGateTable blockade_gate_truth_table(
    const blockade::BlockadeParams& params,
    const atomdata::SpeciesModel& species) {
    const auto ops = blockade_gate_protocol(0, 1, params);
    BlockadeGateTable table;
    for (int b = 0; b < 4; ++b) {
        const Register init = two_qubit_register(b >> 1, b & 1, 3);
        const RunResult run = run_protocol(init, ops, species);
        if (!run.ok)
            throw protocol_error("blockade gate execution failed: " + run.error);
        const auto idx = static_cast<std::size_t>(b);
        table.basis_preserved[idx] = final_matches_initial(run.reg, init);
        table.phases[idx] = total_phase(run.reg);
        double surv = 1.0;
        for (const auto& a : run.reg.atoms) surv *= a.survival;
        table.losses[idx] = 1.0 - surv;
    }
    double r = table.phases[1] - kPi;
    while (r > kPi) r -= units::kTwoPi;
    while (r <= -kPi) r += units::kTwoPi;
    table.residual_phase_01 = r;
    return table;
}

std::vector<int> sample_loss_trajectories(const Register& reg,
                                          int n_trajectories,
                                          std::uint64_t seed) {
    if (n_trajectories < 0)
        throw validation_error("trajectories: count must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> survived(reg.atoms.size(), 0);
    for (int t = 0; t < n_trajectories; ++t) {
        for (std::size_t k = 0; k < reg.atoms.size(); ++k) {
            if (reg.atoms[k].lost) continue;
            if (u(rng) < reg.atoms[k].survival) ++survived[k];
        }
    }
    return survived;
}

// ---- documents ------------------------------------------------------------

namespace {

using nlohmann::json;

json state_to_json(const atomdata::AtomicState& s) {
    json j{{"level", s.level}, {"m", s.m}};
    if (s.f) j["f"] = *s.f;
    return j;
}

atomdata::AtomicState state_from_json(const json& j) {
    atomdata::AtomicState s;
    s.level = j.at("level").get<std::string>();
    if (j.contains("f") && !j.at("f").is_null())
        s.f = j.at("f").is_string()
                  ? atomdata::parse_half_integer(j.at("f").get<std::string>())
                  : j.at("f").get<double>();
    const auto& m = j.at("m");
    s.m = m.is_string() ? atomdata::parse_half_integer(m.get<std::string>())
                        : m.get<double>();
    return s;
}

json op_to_json(const ProtocolOp& op) {
    json j;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PulseOp>) {
                j["kind"] = "pulse";
                j["from"] = state_to_json(o.from);
                j["to"] = state_to_json(o.to);
                j["area_rad"] = o.area_rad;
                if (o.target) j["target"] = *o.target;
                if (o.detuning_hz != 0) j["detuning_hz"] = o.detuning_hz;
                j["rabi_hz"] = o.rabi_hz;
                if (o.blockade)
                    j["blockade"] = {
                        {"delta_u_rad_per_s", o.blockade->delta_u_rad_per_s},
                        {"gamma_rad_per_s", o.blockade->gamma_rad_per_s}};
                if (o.duration_s) j["duration_s"] = *o.duration_s;
            } else if constexpr (std::is_same_v<T, TransferOp>) {
                j["kind"] = "transfer";
                j["direction"] =
                    o.direction == TransferOp::Direction::storage_to_transport
                        ? "storage_to_transport"
                        : "transport_to_storage";
                j["qubit"] = o.qubit;
                if (o.site_selective) {
                    j["site_selective"] = true;
                    j["sites"] = o.sites;
                }
                if (o.duration_s) j["duration_s"] = *o.duration_s;
            } else if constexpr (std::is_same_v<T, ShiftOp>) {
                j["kind"] = "shift";
                j["delta_sites"] = o.delta_sites;
                if (o.duration_s) j["duration_s"] = *o.duration_s;
            } else if constexpr (std::is_same_v<T, HoldOp>) {
                j["kind"] = "hold";
                j["duration_s"] = o.duration_s;
                if (o.collision_u_hz != 0) j["collision_u_hz"] = o.collision_u_hz;
                if (o.reverse_gradient) j["reverse_gradient"] = true;
                if (o.collision_loss_rate_hz > 0)
                    j["collision_loss_rate_hz"] = o.collision_loss_rate_hz;
            } else {
                j["kind"] = "measure";
                j["site"] = o.site;
            }
        },
        op);
    return j;
}

ProtocolOp op_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pulse") {
        PulseOp o;
        o.from = state_from_json(j.at("from"));
        o.to = state_from_json(j.at("to"));
        o.area_rad = j.at("area_rad").get<double>();
        if (j.contains("target") && !j.at("target").is_null())
            o.target = j.at("target").get<int>();
        if (j.contains("detuning_hz")) o.detuning_hz = j.at("detuning_hz").get<double>();
        if (j.contains("rabi_hz")) o.rabi_hz = j.at("rabi_hz").get<double>();
        if (j.contains("blockade") && !j.at("blockade").is_null()) {
            PulseOp::BlockadeSpec b;
            b.delta_u_rad_per_s = j.at("blockade").at("delta_u_rad_per_s").get<double>();
            b.gamma_rad_per_s = j.at("blockade").at("gamma_rad_per_s").get<double>();
            o.blockade = b;
        }
        if (j.contains("duration_s")) o.duration_s = j.at("duration_s").get<double>();
        return o;
    }
    if (kind == "transfer") {
        TransferOp o;
        const std::string dir = j.at("direction").get<std::string>();
        if (dir == "storage_to_transport")
            o.direction = TransferOp::Direction::storage_to_transport;
        else if (dir == "transport_to_storage")
            o.direction = TransferOp::Direction::transport_to_storage;
        else
            throw parse_error("transfer: unknown direction '" + dir + "'");
        o.qubit = j.at("qubit").get<int>();
        if (j.contains("site_selective"))
            o.site_selective = j.at("site_selective").get<bool>();
        if (j.contains("sites")) o.sites = j.at("sites").get<std::vector<int>>();
        if (j.contains("duration_s")) o.duration_s = j.at("duration_s").get<double>();
        return o;
    }
    if (kind == "shift") {
        ShiftOp o;
        o.delta_sites = j.at("delta_sites").get<int>();
        if (j.contains("duration_s")) o.duration_s = j.at("duration_s").get<double>();
        return o;
    }
    if (kind == "hold") {
        HoldOp o;
        o.duration_s = j.at("duration_s").get<double>();
        if (j.contains("collision_u_hz"))
            o.collision_u_hz = j.at("collision_u_hz").get<double>();
        if (j.contains("reverse_gradient"))
            o.reverse_gradient = j.at("reverse_gradient").get<bool>();
        if (j.contains("collision_loss_rate_hz"))
            o.collision_loss_rate_hz = j.at("collision_loss_rate_hz").get<double>();
        return o;
    }
    if (kind == "measure") {
        MeasureOp o;
        o.site = j.at("site").get<int>();
        return o;
    }
    throw parse_error("unknown protocol op kind '" + kind + "'");
}

}  // namespace

Register register_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("register document: ") + e.what());
    }
    Register reg;
    try {
        reg.n_sites = doc.at("n_sites").get<int>();
        if (doc.contains("spacing_nm")) reg.spacing_nm = doc.at("spacing_nm").get<double>();
        if (doc.contains("field")) {
            const auto& f = doc.at("field");
            if (f.contains("b_gauss")) reg.field.b_gauss = f.at("b_gauss").get<double>();
            if (f.contains("gradient_g_per_cm"))
                reg.field.gradient_g_per_cm = f.at("gradient_g_per_cm").get<double>();
        }
        if (doc.contains("timing")) {
            const auto& t = doc.at("timing");
            auto get = [&](const char* key, double& slot) {
                if (t.contains(key)) slot = t.at(key).get<double>();
            };
            get("storage_trap_frequency_hz", reg.timing.storage_trap_frequency_hz);
            get("transport_trap_frequency_hz", reg.timing.transport_trap_frequency_hz);
            get("margin", reg.timing.margin);
            get("shift_time_per_site_s", reg.timing.shift_time_per_site_s);
            get("readout_depth_fraction_0x", reg.timing.readout_depth_fraction_0x);
            get("readout_depth_fraction_1x", reg.timing.readout_depth_fraction_1x);
        }
        if (doc.contains("encoding")) {
            const auto& e = doc.at("encoding");
            if (e.contains("storage_level"))
                reg.encoding.storage_level = e.at("storage_level").get<std::string>();
            if (e.contains("transport_level"))
                reg.encoding.transport_level = e.at("transport_level").get<std::string>();
            if (e.contains("m0"))
                reg.encoding.m0 = e.at("m0").is_string()
                                      ? atomdata::parse_half_integer(
                                            e.at("m0").get<std::string>())
                                      : e.at("m0").get<double>();
            if (e.contains("m1"))
                reg.encoding.m1 = e.at("m1").is_string()
                                      ? atomdata::parse_half_integer(
                                            e.at("m1").get<std::string>())
                                      : e.at("m1").get<double>();
            if (e.contains("readout0")) reg.encoding.readout0 = state_from_json(e.at("readout0"));
            if (e.contains("readout1")) reg.encoding.readout1 = state_from_json(e.at("readout1"));
        }
        for (const auto& ja : doc.value("atoms", json::array())) {
            AtomRecord a;
            a.site = ja.at("site").get<int>();
            a.internal = state_from_json(ja);
            const std::string lat = ja.value("lattice", std::string("storage"));
            if (lat == "storage") a.lattice = Lattice::storage;
            else if (lat == "transport") a.lattice = Lattice::transport;
            else throw parse_error("atom: unknown lattice '" + lat + "'");
            a.phase = ja.value("phase", 0.0);
            a.lost = ja.value("lost", false);
            a.survival = ja.value("survival", 1.0);
            reg.atoms.push_back(std::move(a));
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("register document: ") + e.what());
    }
    reg.validate();
    return reg;
}

std::string register_to_json(const Register& reg) {
    json atoms = json::array();
    for (const auto& a : reg.atoms) {
        json ja = state_to_json(a.internal);
        ja["site"] = a.site;
        ja["lattice"] = to_string(a.lattice);
        ja["phase"] = phase_mod_2pi(a.phase);
        ja["lost"] = a.lost;
        ja["survival"] = a.survival;
        atoms.push_back(std::move(ja));
    }
    const json doc{
        {"n_sites", reg.n_sites},
        {"spacing_nm", reg.spacing_nm},
        {"field",
         {{"b_gauss", reg.field.b_gauss},
          {"gradient_g_per_cm", reg.field.gradient_g_per_cm}}},
        {"timing",
         {{"storage_trap_frequency_hz", reg.timing.storage_trap_frequency_hz},
          {"transport_trap_frequency_hz", reg.timing.transport_trap_frequency_hz},
          {"margin", reg.timing.margin},
          {"shift_time_per_site_s", reg.timing.shift_time_per_site_s},
          {"readout_depth_fraction_0x", reg.timing.readout_depth_fraction_0x},
          {"readout_depth_fraction_1x", reg.timing.readout_depth_fraction_1x}}},
        {"encoding",
         {{"storage_level", reg.encoding.storage_level},
          {"transport_level", reg.encoding.transport_level},
          {"m0", reg.encoding.m0},
          {"m1", reg.encoding.m1},
          {"readout0", state_to_json(reg.encoding.readout0)},
          {"readout1", state_to_json(reg.encoding.readout1)}}},
        {"elapsed_s", reg.elapsed_s},
        {"atoms", std::move(atoms)}};
    return doc.dump(2) + "\n";
}

std::vector<ProtocolOp> protocol_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("protocol document: ") + e.what());
    }
    if (!doc.is_array())
        throw parse_error("protocol document: expected a JSON array of ops");
    std::vector<ProtocolOp> ops;
    try {
        for (const auto& j : doc) ops.push_back(op_from_json(j));
    } catch (const json::exception& e) {
        throw parse_error(std::string("protocol document: ") + e.what());
    }
    return ops;
}

std::string protocol_to_json(const std::vector<ProtocolOp>& ops) {
    json arr = json::array();
    for (const auto& op : ops) arr.push_back(op_to_json(op));
    return arr.dump(2) + "\n";
}

ProtocolOp protocol_op_from_json_text(const std::string& json_text) {
    try {
        return op_from_json(json::parse(json_text));
    } catch (const json::exception& e) {
        throw parse_error(std::string("protocol op: ") + e.what());
    }
}

std::string protocol_op_to_json_text(const ProtocolOp& op) {
    return op_to_json(op).dump();
}

std::string event_log_to_jsonl(const std::vector<LogEntry>& log) {
    std::string out;
    for (const auto& e : log) {
        json j{{"op", e.op},
               {"t_start_s", e.t_start_s},
               {"t_end_s", e.t_end_s},
               {"warnings", e.warnings}};
        if (e.measurement) j["measurement"] = *e.measurement;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace aeq::reg
