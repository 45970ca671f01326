#include "aeq/compiler.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "aeq/errors.hpp"

namespace aeq::compiler {

namespace {

constexpr double kPi = units::kTwoPi / 2.0;

GateKind gate_kind_from_string(const std::string& s) {
    if (s == "RZ") return GateKind::rz;
    if (s == "RX") return GateKind::rx;
    if (s == "CZ") return GateKind::cz;
    if (s == "CZ_layer") return GateKind::cz_layer;
    throw parse_error("unknown gate kind '" + s + "'");
}

}  // namespace

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::rz: return "RZ";
        case GateKind::rx: return "RX";
        case GateKind::cz: return "CZ";
        case GateKind::cz_layer: return "CZ_layer";
    }
    return "?";
}

void Circuit::validate() const {
    if (n_qubits <= 0) throw validation_error("circuit: n_qubits must be > 0");
    for (const auto& g : gates) {
        for (int t : g.targets)
            if (t < 0 || t >= n_qubits)
                throw validation_error("circuit: gate target out of range");
        switch (g.kind) {
            case GateKind::rz:
            case GateKind::rx:
                if (g.targets.size() != 1)
                    throw validation_error("circuit: single-qubit gate needs one target");
                if (!std::isfinite(g.angle_rad))
                    throw validation_error("circuit: gate angle must be finite");
                break;
            case GateKind::cz:
                if (g.targets.size() != 2 || g.targets[0] == g.targets[1])
                    throw validation_error("circuit: CZ needs two distinct targets");
                break;
            case GateKind::cz_layer: {
                if (g.targets.size() % 2 != 0)
                    throw validation_error("circuit: CZ_layer needs an even target list");
                std::set<int> seen;
                for (std::size_t k = 0; k + 1 < g.targets.size(); k += 2) {
                    if (g.targets[k + 1] != g.targets[k] + 1)
                        throw validation_error(
                            "circuit: CZ_layer pairs must be nearest neighbors (a, a+1)");
                    if (!seen.insert(g.targets[k]).second ||
                        !seen.insert(g.targets[k + 1]).second)
                        throw protocol_error(
                            "overlapping parallel targets in CZ_layer");
                }
                break;
            }
        }
    }
}

reg::Register DeviceConfig::make_register() const {
    reg::Register r;
    r.n_sites = n_sites;
    r.spacing_nm = spacing_nm;
    r.field.b_gauss = b_gauss;
    r.field.gradient_g_per_cm = gradient_g_per_cm;
    r.timing = timing;
    return r;
}

void Schedule::validate() const {
    double sum = 0.0;
    for (const auto& layer : layers) {
        sum += layer.duration_s;
        // Parallel safety: ops within one layer must touch disjoint sites.
        // Global ops (plain transfers, shifts, holds) touch every site.
        std::set<int> touched;
        bool global_seen = false;
        for (const auto& op : layer.ops) {
            std::vector<int> sites;
            bool global = false;
            if (const auto* p = std::get_if<reg::PulseOp>(&op)) {
                if (p->target) sites.push_back(*p->target);
                else global = true;
            } else if (const auto* t = std::get_if<reg::TransferOp>(&op)) {
                if (t->site_selective) sites = t->sites;
                else global = true;
            } else if (const auto* m = std::get_if<reg::MeasureOp>(&op)) {
                sites.push_back(m->site);
            } else {
                global = true;  // shift, hold
            }
            if (global) {
                if (global_seen || !touched.empty() || layer.ops.size() > 1)
                    throw protocol_error(
                        "overlapping parallel targets: global op shares a layer");
                global_seen = true;
                continue;
            }
            for (int s : sites)
                if (!touched.insert(s).second)
                    throw protocol_error("overlapping parallel targets at site " +
                                         std::to_string(s));
        }
    }
    if (std::abs(sum - total_duration_s) > 1e-9 * std::max(1.0, sum))
        throw validation_error("schedule: total_duration_s != sum of layers");
}

namespace {

struct Lowering {
    const DeviceConfig& device;
    const atomdata::SpeciesModel& species;
    reg::Register device_reg;  // geometry/timing context for durations
    Schedule out;

    Lowering(const DeviceConfig& dev, const atomdata::SpeciesModel& sp)
        : device(dev), species(sp), device_reg(dev.make_register()) {}

    double with_duration(reg::ProtocolOp& op) {
        const double dur = reg::op_duration(device_reg, op, species);
        std::visit(
            [&](auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (!std::is_same_v<T, reg::HoldOp> &&
                              !std::is_same_v<T, reg::MeasureOp>)
                    o.duration_s = dur;
            },
            op);
        return dur;
    }

    void push_layer(std::vector<reg::ProtocolOp> ops) {
        ScheduleLayer layer;
        double dur = 0.0;
        for (auto& op : ops) dur = std::max(dur, with_duration(op));
        layer.ops = std::move(ops);
        layer.duration_s = dur;
        out.layers.push_back(std::move(layer));
    }

    // Transport wrapper around a gate body: selective transfer out, shift,
    // body layers, shift back, transfer back.  `pair_sites` are the qubit
    // sites whose |0> branch travels.
    struct Window {
        double total = 0.0;       // wall-clock time of the whole gate
        double colocated = 0.0;   // time the pair shares a site
        double pulse_3p2 = 0.0;   // time the traveling atom spends in 3P2
    };

    Window lower_transport_gate(const std::vector<int>& from_sites, int delta,
                                std::vector<std::vector<reg::ProtocolOp>> body,
                                const std::vector<double>& body_durations) {
        Window w;
        reg::TransferOp out_t;
        out_t.direction = reg::TransferOp::Direction::storage_to_transport;
        out_t.qubit = 0;
        if (device.gradient_g_per_cm > 0) {
            out_t.site_selective = true;
            out_t.sites = from_sites;
        }
        reg::TransferOp back_t = out_t;
        back_t.direction = reg::TransferOp::Direction::transport_to_storage;

        reg::ProtocolOp op = out_t;
        double d = with_duration(op);
        w.total += d;
        out.layers.push_back({{op}, d});

        reg::ProtocolOp sh = reg::ShiftOp{delta, std::nullopt};
        d = with_duration(sh);
        w.total += d;
        out.layers.push_back({{sh}, d});

        for (std::size_t k = 0; k < body.size(); ++k) {
            out.layers.push_back({std::move(body[k]), body_durations[k]});
            w.total += body_durations[k];
            w.colocated += body_durations[k];
        }

        reg::ProtocolOp sh_back = reg::ShiftOp{-delta, std::nullopt};
        d = with_duration(sh_back);
        w.total += d;
        out.layers.push_back({{sh_back}, d});

        reg::ProtocolOp op_back = back_t;
        d = with_duration(op_back);
        w.total += d;
        out.layers.push_back({{op_back}, d});
        return w;
    }

    void check_transport_bounds(const std::vector<int>& from_sites, int delta) {
        for (int s : from_sites) {
            const int dest = s + delta;
            if (dest < 0 || dest >= device.n_sites)
                throw protocol_error(
                    "unschedulable: transported atom from site " +
                    std::to_string(s) + " would leave the register");
        }
    }

    void require_gradient_for(const std::string& what) {
        if (device.gradient_g_per_cm <= 0)
            throw protocol_error("unschedulable: " + what +
                                 " requires a field gradient for site selectivity");
    }

    // The pi / 2pi / pi blockade pulse sequence as schedule layers.  With a
    // gradient the 2pi probe is emitted as site-targeted pulses so that
    // spectator qubits are untouched; without a gradient the probe is
    // global, which is only correct for a register holding just the pair.
    // `imprint_sites` adds the two local-frame pulses (pi on |0x> and pi on
    // storage |1> at those sites) used by CZ_layer.
    struct BlockadeBody {
        std::vector<std::vector<reg::ProtocolOp>> layers;
        std::vector<double> durations;
        double pulse_3p2 = 0.0;
    };

    BlockadeBody blockade_body(const std::vector<int>& probe_sites,
                               const std::vector<int>& imprint_sites) {
        const auto& enc = device_reg.encoding;
        BlockadeBody body;

        reg::PulseOp excite;
        excite.from = enc.transport_form(0);
        excite.to = enc.readout0;
        excite.area_rad = kPi;
        excite.rabi_hz = device.pulse_rabi_hz;

        reg::PulseOp probe;
        probe.from = enc.storage_form(1);
        probe.to = enc.readout1;
        probe.area_rad = units::kTwoPi;
        probe.rabi_hz = device.blockade.omega / units::kTwoPi;
        probe.blockade = reg::PulseOp::BlockadeSpec{device.blockade.delta_u,
                                                    device.blockade.gamma};

        reg::PulseOp deexcite;
        deexcite.from = enc.readout0;
        deexcite.to = enc.transport_form(0);
        deexcite.area_rad = kPi;
        deexcite.rabi_hz = device.pulse_rabi_hz;

        auto push = [&](std::vector<reg::ProtocolOp> ops) {
            double dur = 0.0;
            for (auto& op : ops) dur = std::max(dur, with_duration(op));
            body.layers.push_back(std::move(ops));
            body.durations.push_back(dur);
            body.pulse_3p2 += dur;
        };
        auto targeted = [&](const reg::PulseOp& base, const std::vector<int>& sites) {
            std::vector<reg::ProtocolOp> ops;
            for (int s : sites) {
                reg::PulseOp p = base;
                p.target = s;
                ops.emplace_back(std::move(p));
            }
            return ops;
        };

        push({reg::ProtocolOp{excite}});
        if (device.gradient_g_per_cm > 0 && !probe_sites.empty())
            push(targeted(probe, probe_sites));
        else
            push({reg::ProtocolOp{probe}});
        if (!imprint_sites.empty()) {
            reg::PulseOp imprint_0x;  // pi phase on parked |0x> branches
            imprint_0x.from = enc.readout0;
            imprint_0x.to = enc.readout0;
            imprint_0x.area_rad = kPi;
            imprint_0x.rabi_hz = device.pulse_rabi_hz;
            reg::PulseOp imprint_1;  // pi phase on resident |1> branches
            imprint_1.from = enc.storage_form(1);
            imprint_1.to = enc.storage_form(1);
            imprint_1.area_rad = kPi;
            imprint_1.rabi_hz = device.pulse_rabi_hz;
            push(targeted(imprint_0x, imprint_sites));
            push(targeted(imprint_1, imprint_sites));
        }
        push({reg::ProtocolOp{deexcite}});
        return body;
    }

    void lower_cz(int qi, int qj) {
        const int delta = qj - qi;
        // Both |0> branches travel: i's to meet j, j's parks at 2j-i per the
        // free-landing-site variant, so the |0,0> branch collects no phase.
        std::vector<int> from_sites{qi, qj};
        check_transport_bounds(from_sites, delta);
        if (device.gradient_g_per_cm <= 0 && out_circuit_qubits > 2) {
            // Without a gradient the transfer and probe act on every qubit;
            // that is only correct when the register holds just this pair.
            require_gradient_for("CZ in a register with more than two qubits");
        }

        std::vector<std::vector<reg::ProtocolOp>> body;
        std::vector<double> body_durs;
        double pulse_3p2 = 0.0;
        if (device.gate_mechanism == GateMechanism::collisional) {
            // The collisional phase is state-blind, so the parked |0> branch
            // must land on a site with no resident qubit.
            const int park = qj + delta;
            if (park >= 0 && park < out_circuit_qubits)
                throw protocol_error(
                    "unschedulable: collisional CZ(" + std::to_string(qi) + "," +
                    std::to_string(qj) + ") parks a |0> branch on occupied site " +
                    std::to_string(park) + "; use the blockade mechanism");
            // Echoed hold pair; the reversed-gradient half cancels the
            // site-dependent Zeeman phases collected in the first half.
            body.push_back({reg::ProtocolOp{
                reg::HoldOp{0.5 * device.hold_t_s, device.hold_u_hz, false}}});
            body.push_back({reg::ProtocolOp{
                reg::HoldOp{0.5 * device.hold_t_s, device.hold_u_hz, true}}});
            body_durs.push_back(0.5 * device.hold_t_s);
            body_durs.push_back(0.5 * device.hold_t_s);
        } else {
            BlockadeBody bb = blockade_body({qi, qj}, {});
            body = std::move(bb.layers);
            body_durs = std::move(bb.durations);
            pulse_3p2 = bb.pulse_3p2;
            out.blockade_losses.push_back(
                blockade::blockade_gate_outcome(device.blockade).loss_01);
        }

        const Window w = lower_transport_gate(from_sites, delta, std::move(body),
                                              body_durs);

        budget::TimelineSegment seg;
        seg.label = "CZ(" + std::to_string(qi) + "," + std::to_string(qj) + ")";
        seg.duration_s = w.total;
        seg.two_atom_window_s = w.colocated;
        // Active (|0,1>) branch: the traveling atom rides the transport
        // lattice in 3P0 (minus its 3P2 excursion for blockade pulses); the
        // blocked partner stays in 1S0.
        if (device.gate_mechanism == GateMechanism::blockade) {
            seg.occupation.push_back({"3P2", pulse_3p2});
            seg.occupation.push_back(
                {device_reg.encoding.transport_level, w.total - pulse_3p2});
        } else {
            seg.occupation.push_back({device_reg.encoding.transport_level, w.total});
        }
        seg.occupation.push_back({device_reg.encoding.storage_level, w.total});
        out.timeline.segments.push_back(std::move(seg));
    }

    // Parallel nearest-neighbor phase gates sharing one shift(+1)/shift(-1)
    // pair.  Only the left member of each pair travels; the right members'
    // |1> branches are probed in place, and two local-frame imprint pulses
    // at the probe sites turn the raw phase pattern into (0, pi, 0, 0) per
    // pair.  The collisional mechanism cannot pair disjointly (its phase is
    // state-blind, so a traveling |0> meeting the partner's resident |0>
    // would also collect phase), hence blockade only.
    void lower_cz_layer(const std::vector<int>& targets) {
        std::vector<int> pairs = targets;
        if (pairs.empty()) {
            for (int q = 0; q + 1 < out_circuit_qubits; q += 2) {
                pairs.push_back(q);
                pairs.push_back(q + 1);
            }
        }
        if (pairs.empty())
            throw protocol_error("unschedulable: CZ_layer on fewer than two qubits");
        if (device.gate_mechanism != GateMechanism::blockade)
            throw protocol_error(
                "unschedulable: CZ_layer requires the blockade gate mechanism");
        require_gradient_for("CZ_layer");
        std::vector<int> from_sites;
        std::vector<int> probe_sites;
        for (std::size_t k = 0; k + 1 < pairs.size(); k += 2) {
            from_sites.push_back(pairs[k]);
            probe_sites.push_back(pairs[k + 1]);
        }
        check_transport_bounds(from_sites, 1);

        BlockadeBody bb = blockade_body(probe_sites, probe_sites);
        const double pulse_3p2 = bb.pulse_3p2;
        const double loss =
            blockade::blockade_gate_outcome(device.blockade).loss_01;
        for (std::size_t k = 0; k < from_sites.size(); ++k)
            out.blockade_losses.push_back(loss);

        const Window w = lower_transport_gate(from_sites, 1, std::move(bb.layers),
                                              bb.durations);

        for (std::size_t k = 0; k < pairs.size(); k += 2) {
            budget::TimelineSegment seg;
            seg.label = "CZ(" + std::to_string(pairs[k]) + "," +
                        std::to_string(pairs[k + 1]) + ")@layer";
            // Parallel pairs share the wall clock; only one pair's duration
            // counts toward the schedule, but each pair sees the exposure.
            seg.duration_s = k == 0 ? w.total : 0.0;
            seg.two_atom_window_s = w.colocated;
            if (device.gate_mechanism == GateMechanism::blockade) {
                seg.occupation.push_back({"3P2", pulse_3p2});
                seg.occupation.push_back(
                    {device_reg.encoding.transport_level, w.total - pulse_3p2});
            } else {
                seg.occupation.push_back(
                    {device_reg.encoding.transport_level, w.total});
            }
            seg.occupation.push_back({device_reg.encoding.storage_level, w.total});
            out.timeline.segments.push_back(std::move(seg));
        }
    }

    reg::PulseOp single_qubit_pulse(const Gate& g) {
        require_gradient_for("a site-targeted single-qubit gate");
        reg::PulseOp p;
        p.target = g.targets[0];
        p.rabi_hz = device.pulse_rabi_hz;
        const auto& enc = device_reg.encoding;
        if (g.kind == GateKind::rz) {
            // AC-Stark phase imprint on the |1> branch; area is the phase.
            p.from = enc.storage_form(1);
            p.to = enc.storage_form(1);
            p.area_rad = reg::phase_mod_2pi(g.angle_rad);
        } else {
            p.from = enc.storage_form(0);
            p.to = enc.storage_form(1);
            if (g.angle_rad < 0)
                throw protocol_error("unschedulable: RX angle must be >= 0");
            p.area_rad = g.angle_rad;
        }
        return p;
    }

    int out_circuit_qubits = 0;

    void run(const Circuit& circuit) {
        out_circuit_qubits = circuit.n_qubits;
        std::vector<reg::ProtocolOp> pending;  // parallel single-qubit batch
        std::set<int> pending_sites;
        double pending_dur = 0.0;

        auto flush = [&] {
            if (pending.empty()) return;
            ScheduleLayer layer;
            layer.ops = std::move(pending);
            layer.duration_s = pending_dur;
            out.layers.push_back(std::move(layer));
            budget::TimelineSegment seg;
            seg.label = "pulses";
            seg.duration_s = pending_dur;
            seg.occupation.assign(
                pending_sites.size(),
                {device_reg.encoding.storage_level, pending_dur});
            out.timeline.segments.push_back(std::move(seg));
            pending.clear();
            pending_sites.clear();
            pending_dur = 0.0;
        };

        for (const auto& g : circuit.gates) {
            if (g.kind == GateKind::rz || g.kind == GateKind::rx) {
                if (pending_sites.count(g.targets[0])) flush();
                reg::ProtocolOp op = single_qubit_pulse(g);
                pending_dur = std::max(pending_dur, with_duration(op));
                pending.push_back(std::move(op));
                pending_sites.insert(g.targets[0]);
            } else {
                flush();
                if (g.kind == GateKind::cz) lower_cz(g.targets[0], g.targets[1]);
                else lower_cz_layer(g.targets);
            }
        }
        flush();

        double total = 0.0;
        for (const auto& layer : out.layers) total += layer.duration_s;
        out.total_duration_s = total;
        out.timeline.trap_frequency_hz =
            std::min(device.timing.storage_trap_frequency_hz,
                     device.timing.transport_trap_frequency_hz);
        out.device = device;
    }
};

}  // namespace

Schedule compile_circuit(const Circuit& circuit, const DeviceConfig& device,
                         const atomdata::SpeciesModel& species) {
    circuit.validate();
    if (device.n_sites <= 0)
        throw validation_error("device: n_sites must be > 0");
    if (circuit.n_qubits > device.n_sites)
        throw protocol_error("unschedulable: more qubits than sites");
    Lowering lowering(device, species);
    lowering.run(circuit);
    lowering.out.validate();
    return lowering.out;
}

double schedule_duration(const Schedule& schedule) {
    double total = 0.0;
    for (const auto& layer : schedule.layers) total += layer.duration_s;
    return total;
}

reg::RunResult execute(const Schedule& schedule, reg::Register start,
                       const atomdata::SpeciesModel& species) {
    std::vector<reg::ProtocolOp> ops;
    for (const auto& layer : schedule.layers)
        for (const auto& op : layer.ops) ops.push_back(op);
    return reg::run_protocol(std::move(start), ops, species);
}

budget::FidelityBudget price(const Schedule& schedule,
                             const budget::NoiseModel& noise,
                             const atomdata::SpeciesModel& species) {
    double keep = 1.0;
    for (double loss : schedule.blockade_losses) keep *= 1.0 - loss;
    const reg::QubitEncoding enc = schedule.device.make_register().encoding;
    return budget::gate_fidelity_estimate(schedule.timeline, noise, 1.0 - keep,
                                          species, enc.storage_form(0),
                                          enc.storage_form(1));
}

// ---- documents ------------------------------------------------------------

namespace {

using nlohmann::json;

}  // namespace

Circuit circuit_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("circuit document: ") + e.what());
    }
    Circuit c;
    try {
        c.n_qubits = doc.at("n_qubits").get<int>();
        for (const auto& jg : doc.at("gates")) {
            Gate g;
            g.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
            if (jg.contains("targets"))
                g.targets = jg.at("targets").get<std::vector<int>>();
            if (jg.contains("angle")) g.angle_rad = jg.at("angle").get<double>();
            c.gates.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("circuit document: ") + e.what());
    }
    c.validate();
    return c;
}

DeviceConfig device_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("device document: ") + e.what());
    }
    DeviceConfig d;
    try {
        d.n_sites = doc.at("n_sites").get<int>();
        auto num = [&](const char* key, double& slot) {
            if (doc.contains(key)) slot = doc.at(key).get<double>();
        };
        num("spacing_nm", d.spacing_nm);
        num("b_gauss", d.b_gauss);
        num("gradient_g_per_cm", d.gradient_g_per_cm);
        num("storage_trap_frequency_hz", d.timing.storage_trap_frequency_hz);
        num("transport_trap_frequency_hz", d.timing.transport_trap_frequency_hz);
        num("margin", d.timing.margin);
        num("shift_time_per_site_s", d.timing.shift_time_per_site_s);
        num("readout_depth_fraction_0x", d.timing.readout_depth_fraction_0x);
        num("readout_depth_fraction_1x", d.timing.readout_depth_fraction_1x);
        num("pulse_rabi_hz", d.pulse_rabi_hz);
        num("hold_u_hz", d.hold_u_hz);
        num("hold_t_s", d.hold_t_s);
        if (doc.contains("gate_mechanism")) {
            const std::string m = doc.at("gate_mechanism").get<std::string>();
            if (m == "collisional") d.gate_mechanism = GateMechanism::collisional;
            else if (m == "blockade") d.gate_mechanism = GateMechanism::blockade;
            else throw parse_error("device: unknown gate_mechanism '" + m + "'");
        }
        if (doc.contains("blockade")) {
            const auto& b = doc.at("blockade");
            d.blockade.omega = b.at("omega_rad_per_s").get<double>();
            d.blockade.delta_u = b.value("delta_u_rad_per_s", 0.0);
            d.blockade.gamma = b.value("gamma_rad_per_s", 0.0);
        }
    } catch (const json::exception& e) {
        throw parse_error(std::string("device document: ") + e.what());
    }
    return d;
}

namespace {

json device_to_json(const DeviceConfig& d) {
    return json{
        {"n_sites", d.n_sites},
        {"spacing_nm", d.spacing_nm},
        {"b_gauss", d.b_gauss},
        {"gradient_g_per_cm", d.gradient_g_per_cm},
        {"storage_trap_frequency_hz", d.timing.storage_trap_frequency_hz},
        {"transport_trap_frequency_hz", d.timing.transport_trap_frequency_hz},
        {"margin", d.timing.margin},
        {"shift_time_per_site_s", d.timing.shift_time_per_site_s},
        {"readout_depth_fraction_0x", d.timing.readout_depth_fraction_0x},
        {"readout_depth_fraction_1x", d.timing.readout_depth_fraction_1x},
        {"pulse_rabi_hz", d.pulse_rabi_hz},
        {"hold_u_hz", d.hold_u_hz},
        {"hold_t_s", d.hold_t_s},
        {"gate_mechanism", d.gate_mechanism == GateMechanism::collisional
                               ? "collisional"
                               : "blockade"},
        {"blockade",
         {{"omega_rad_per_s", d.blockade.omega},
          {"delta_u_rad_per_s", d.blockade.delta_u},
          {"gamma_rad_per_s", d.blockade.gamma}}}};
}

}  // namespace

std::string schedule_to_json(const Schedule& schedule) {
    json layers = json::array();
    for (const auto& layer : schedule.layers) {
        json ops = json::array();
        for (const auto& op : layer.ops)
            ops.push_back(json::parse(reg::protocol_op_to_json_text(op)));
        layers.push_back({{"duration_s", layer.duration_s}, {"ops", std::move(ops)}});
    }
    json segments = json::array();
    for (const auto& seg : schedule.timeline.segments) {
        json occ = json::array();
        for (const auto& [level, dur] : seg.occupation)
            occ.push_back({{"level", level}, {"duration_s", dur}});
        segments.push_back({{"label", seg.label},
                            {"occupation", std::move(occ)},
                            {"two_atom_window_s", seg.two_atom_window_s},
                            {"duration_s", seg.duration_s}});
    }
    const json doc{
        {"device", device_to_json(schedule.device)},
        {"total_duration_s", schedule.total_duration_s},
        {"layers", std::move(layers)},
        {"timeline",
         {{"trap_frequency_hz", schedule.timeline.trap_frequency_hz},
          {"segments", std::move(segments)}}},
        {"blockade_losses", schedule.blockade_losses}};
    return doc.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("schedule document: ") + e.what());
    }
    Schedule s;
    try {
        s.device = device_from_json(doc.at("device").dump());
        s.total_duration_s = doc.at("total_duration_s").get<double>();
        for (const auto& jl : doc.at("layers")) {
            ScheduleLayer layer;
            layer.duration_s = jl.at("duration_s").get<double>();
            for (const auto& jop : jl.at("ops"))
                layer.ops.push_back(reg::protocol_op_from_json_text(jop.dump()));
            s.layers.push_back(std::move(layer));
        }
        if (doc.contains("timeline")) {
            const auto& jt = doc.at("timeline");
            s.timeline.trap_frequency_hz = jt.value("trap_frequency_hz", 25e3);
            for (const auto& js : jt.value("segments", json::array())) {
                budget::TimelineSegment seg;
                seg.label = js.value("label", std::string());
                seg.two_atom_window_s = js.value("two_atom_window_s", 0.0);
                seg.duration_s = js.value("duration_s", 0.0);
                for (const auto& jo : js.value("occupation", json::array()))
                    seg.occupation.push_back({jo.at("level").get<std::string>(),
                                              jo.at("duration_s").get<double>()});
                s.timeline.segments.push_back(std::move(seg));
            }
        }
        if (doc.contains("blockade_losses"))
            s.blockade_losses = doc.at("blockade_losses").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("schedule document: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace aeq::compiler
