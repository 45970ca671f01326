#include <doctest.h>

#include <cmath>
#include <random>

#include "aeq/compiler.hpp"
#include "aeq/errors.hpp"
#include "aeq/sr87.hpp"
#include "aeq/units.hpp"

using namespace aeq;
using compiler::Circuit;
using compiler::DeviceConfig;
using compiler::Gate;
using compiler::GateKind;

namespace {

constexpr double kTwoPi = units::kTwoPi;
constexpr double kPi = kTwoPi / 2.0;

const atomdata::SpeciesModel& sp() { return atomdata::sr87(); }

DeviceConfig test_device(int n_sites = 12) {
    DeviceConfig d;
    d.n_sites = n_sites;
    d.gradient_g_per_cm = 100.0;
    d.gate_mechanism = compiler::GateMechanism::collisional;
    d.hold_u_hz = 1000.0;
    d.hold_t_s = 0.5e-3;
    return d;
}

reg::Register basis_register(const DeviceConfig& dev, const std::vector<int>& qubits,
                             const std::vector<int>& values) {
    reg::Register r = dev.make_register();
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        reg::AtomRecord a;
        a.internal = r.encoding.storage_form(values[k]);
        a.site = qubits[k];
        r.atoms.push_back(a);
    }
    return r;
}

double total_phase(const reg::Register& r) {
    double sum = 0.0;
    for (const auto& a : r.atoms) sum += a.phase;
    return reg::phase_mod_2pi(sum);
}

bool positions_restored(const reg::Register& fin, const reg::Register& init) {
    if (fin.atoms.size() != init.atoms.size()) return false;
    for (std::size_t k = 0; k < fin.atoms.size(); ++k)
        if (fin.atoms[k].site != init.atoms[k].site ||
            fin.atoms[k].lattice != init.atoms[k].lattice)
            return false;
    return true;
}

}  // namespace

TEST_CASE("CZ(0,5) lowers to the transport sandwich and executes exactly") {
    const auto dev = test_device();
    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz, {0, 5}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());

    SUBCASE("contains shift(+5) and shift(-5)") {
        int plus = 0, minus = 0;
        for (const auto& layer : sched.layers)
            for (const auto& op : layer.ops)
                if (const auto* s = std::get_if<reg::ShiftOp>(&op)) {
                    if (s->delta_sites == 5) ++plus;
                    if (s->delta_sites == -5) ++minus;
                }
        CHECK(plus == 1);
        CHECK(minus == 1);
    }
    SUBCASE("executes to the (0, 2pi U T, 0, 0) truth table") {
        const double phi =
            reg::phase_mod_2pi(kTwoPi * dev.hold_u_hz * dev.hold_t_s);
        for (int b = 0; b < 4; ++b) {
            const auto init = basis_register(dev, {0, 5}, {b >> 1, b & 1});
            const auto res = compiler::execute(sched, init, sp());
            REQUIRE(res.ok);
            CHECK(positions_restored(res.reg, init));
            const double expected = b == 1 ? phi : 0.0;
            CHECK(std::abs(total_phase(res.reg) - expected) < 1e-12);
        }
    }
    SUBCASE("spectator qubits are untouched") {
        auto init = basis_register(dev, {0, 5}, {0, 1});
        reg::AtomRecord spec;
        spec.internal = init.encoding.storage_form(1);
        spec.site = 3;
        init.atoms.push_back(spec);
        const auto res = compiler::execute(sched, init, sp());
        REQUIRE(res.ok);
        CHECK(res.reg.atoms[2].phase == 0.0);
        CHECK(res.reg.atoms[2].site == 3);
        CHECK(res.reg.atoms[2].internal.level == "1S0");
    }
    SUBCASE("duration lands in the few-ms regime") {
        const double t = compiler::schedule_duration(sched);
        CHECK(t >= 1e-3);
        CHECK(t <= 10e-3);
        CHECK(t == doctest::Approx(sched.total_duration_s));
    }
    SUBCASE("doubling the margin doubles transfer durations") {
        DeviceConfig slow = dev;
        slow.timing.margin = 20.0;
        const auto sched2 = compiler::compile_circuit(c, slow, sp());
        const auto* t1 = std::get_if<reg::TransferOp>(&sched.layers[0].ops[0]);
        const auto* t2 = std::get_if<reg::TransferOp>(&sched2.layers[0].ops[0]);
        REQUIRE(t1);
        REQUIRE(t2);
        CHECK(*t2->duration_s == doctest::Approx(2.0 * *t1->duration_s));
    }
}

TEST_CASE("empty circuit compiles to an empty schedule") {
    Circuit c;
    c.n_qubits = 3;
    const auto sched = compiler::compile_circuit(c, test_device(), sp());
    CHECK(sched.layers.empty());
    CHECK(sched.total_duration_s == 0.0);
    CHECK(compiler::schedule_duration(sched) == 0.0);
}

TEST_CASE("single-qubit gates: lowering and execution equivalence") {
    const auto dev = test_device(4);
    SUBCASE("RZ(theta) imprints theta on the |1> branch") {
        Circuit c;
        c.n_qubits = 2;
        c.gates.push_back({GateKind::rz, {1}, 0.7});
        const auto sched = compiler::compile_circuit(c, dev, sp());
        for (int q1 : {0, 1}) {
            const auto init = basis_register(dev, {0, 1}, {1, q1});
            const auto res = compiler::execute(sched, init, sp());
            REQUIRE(res.ok);
            CHECK(total_phase(res.reg) ==
                  doctest::Approx(q1 ? 0.7 : 0.0).epsilon(1e-12));
        }
    }
    SUBCASE("RX(pi) exchanges the qubit levels with the -i convention") {
        Circuit c;
        c.n_qubits = 1;
        c.gates.push_back({GateKind::rx, {0}, kPi});
        const auto sched = compiler::compile_circuit(c, dev, sp());
        const auto init = basis_register(dev, {0}, {0});
        const auto res = compiler::execute(sched, init, sp());
        REQUIRE(res.ok);
        CHECK(res.reg.atoms[0].internal.m == init.encoding.storage_form(1).m);
        CHECK(reg::phase_mod_2pi(res.reg.atoms[0].phase) ==
              doctest::Approx(kTwoPi - kPi / 2.0));
    }
    SUBCASE("consecutive single-qubit gates on distinct qubits share a layer") {
        Circuit c;
        c.n_qubits = 3;
        c.gates.push_back({GateKind::rz, {0}, 0.3});
        c.gates.push_back({GateKind::rz, {2}, 0.4});
        const auto sched = compiler::compile_circuit(c, dev, sp());
        REQUIRE(sched.layers.size() == 1);
        CHECK(sched.layers[0].ops.size() == 2);
    }
    SUBCASE("a repeated target forces a new layer") {
        Circuit c;
        c.n_qubits = 3;
        c.gates.push_back({GateKind::rz, {0}, 0.3});
        c.gates.push_back({GateKind::rz, {0}, 0.4});
        const auto sched = compiler::compile_circuit(c, dev, sp());
        CHECK(sched.layers.size() == 2);
    }
    SUBCASE("single-qubit gates need a gradient") {
        DeviceConfig flat = dev;
        flat.gradient_g_per_cm = 0.0;
        Circuit c;
        c.n_qubits = 1;
        c.gates.push_back({GateKind::rz, {0}, 0.3});
        CHECK_THROWS_AS(compiler::compile_circuit(c, flat, sp()), protocol_error);
    }
}

TEST_CASE("CZ_layer: parallel nearest-neighbor gates") {
    DeviceConfig dev = test_device(8);
    dev.gate_mechanism = compiler::GateMechanism::blockade;
    dev.blockade = {kTwoPi * 1e3, kTwoPi * 1e6, 0.0};  // deep coherent blockade

    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz_layer, {}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());

    SUBCASE("one shift(+1)/shift(-1) pair is shared by all pairs") {
        int plus = 0, minus = 0;
        for (const auto& layer : sched.layers)
            for (const auto& op : layer.ops)
                if (const auto* s = std::get_if<reg::ShiftOp>(&op)) {
                    if (s->delta_sites == 1) ++plus;
                    if (s->delta_sites == -1) ++minus;
                }
        CHECK(plus == 1);
        CHECK(minus == 1);
    }
    SUBCASE("pairs (0,1),(2,3),(4,5) each see the (0, pi, 0, 0) table; cross pairs do not") {
        // all-|1> background, pair (2,3) scanned over its four basis states
        for (int b = 0; b < 4; ++b) {
            auto init = basis_register(dev, {0, 1, 2, 3, 4, 5},
                                       {1, 1, b >> 1, b & 1, 1, 1});
            const auto res = compiler::execute(sched, init, sp());
            REQUIRE(res.ok);
            CHECK(positions_restored(res.reg, init));
            // phases of the scanned pair alone, relative to the all-|1> frame
            double pair_phase =
                res.reg.atoms[2].phase + res.reg.atoms[3].phase;
            const double expected = b == 1 ? kPi : 0.0;
            CHECK(std::abs(reg::phase_mod_2pi(pair_phase) - expected) < 2e-3);
            // the background pairs always sit in their (1,1) = 0 entry
            CHECK(std::abs(reg::phase_mod_2pi(res.reg.atoms[0].phase +
                                              res.reg.atoms[1].phase)) < 1e-9);
            CHECK(std::abs(reg::phase_mod_2pi(res.reg.atoms[4].phase +
                                              res.reg.atoms[5].phase)) < 1e-9);
        }
    }
    SUBCASE("cross-pair entanglement is absent: (q1, q2) collects nothing") {
        // q1 = 0 with q2 = 1 across a pair boundary; both pairs idle otherwise
        auto init = basis_register(dev, {0, 1, 2, 3, 4, 5},
                                   {1, 0, 1, 1, 1, 1});
        const auto res = compiler::execute(sched, init, sp());
        REQUIRE(res.ok);
        // pair (0,1) is in its (1,0) entry: zero phase; q2's pair in (1,1): zero
        CHECK(std::abs(reg::phase_mod_2pi(total_phase(res.reg))) < 1e-9);
    }
    SUBCASE("overlapping explicit pairs are rejected") {
        Circuit bad;
        bad.n_qubits = 3;
        bad.gates.push_back({GateKind::cz_layer, {0, 1, 1, 2}, 0.0});
        CHECK_THROWS_AS(compiler::compile_circuit(bad, dev, sp()), protocol_error);
    }
    SUBCASE("the staggered layer covers (1,2),(3,4)") {
        Circuit c2;
        c2.n_qubits = 6;
        c2.gates.push_back({GateKind::cz_layer, {1, 2, 3, 4}, 0.0});
        const auto sched2 = compiler::compile_circuit(c2, dev, sp());
        for (int b = 0; b < 4; ++b) {
            auto init = basis_register(dev, {0, 1, 2, 3, 4, 5},
                                       {1, b >> 1, b & 1, 1, 1, 1});
            const auto res = compiler::execute(sched2, init, sp());
            REQUIRE(res.ok);
            const double expected = b == 1 ? kPi : 0.0;
            CHECK(std::abs(reg::phase_mod_2pi(total_phase(res.reg)) - expected) <
                  2e-3);
        }
    }
    SUBCASE("CZ_layer on a collisional device is unschedulable") {
        DeviceConfig coll = test_device(8);
        CHECK_THROWS_AS(compiler::compile_circuit(c, coll, sp()), protocol_error);
    }
}

TEST_CASE("blockade-mode CZ attaches its loss to the budget") {
    DeviceConfig dev = test_device();
    dev.gate_mechanism = compiler::GateMechanism::blockade;
    dev.blockade = {kTwoPi * 200.0, 0.0, kTwoPi * 20e3};  // Gamma/Omega = 100

    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz, {0, 5}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());
    REQUIRE(sched.blockade_losses.size() == 1);
    CHECK(sched.blockade_losses[0] ==
          doctest::Approx(1.0 - std::exp(-kTwoPi / 100.0)).epsilon(0.01));

    const auto noise = budget::NoiseModel::defaults(sp());
    const auto b = compiler::price(sched, noise, sp());
    CHECK(b.total_fidelity() < 1.0 - 0.9 * sched.blockade_losses[0]);

    SUBCASE("truth table survives execution with the documented residual") {
        for (int b2 = 0; b2 < 4; ++b2) {
            const auto init = basis_register(dev, {0, 5}, {b2 >> 1, b2 & 1});
            const auto res = compiler::execute(sched, init, sp());
            REQUIRE(res.ok);
            CHECK(positions_restored(res.reg, init));
            const double expected = b2 == 1 ? kPi : 0.0;
            CHECK(std::abs(reg::phase_mod_2pi(total_phase(res.reg)) - expected) <
                  1e-9);
        }
    }
}

TEST_CASE("a second spent in 3P2 prices a ~1-1/e scattering item") {
    DeviceConfig dev = test_device();
    dev.gate_mechanism = compiler::GateMechanism::blockade;
    // Omega = 2pi * 1 Hz makes the 2pi probe window one second long.
    dev.blockade = {kTwoPi * 1.0, 0.0, 0.0};
    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz, {0, 5}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());
    const auto b = compiler::price(sched, budget::NoiseModel::defaults(sp()), sp());
    double scattering = 0.0;
    for (const auto& item : b.items)
        if (item.source.rfind("scattering", 0) == 0) scattering = item.infidelity;
    CHECK(scattering == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("unschedulable circuits") {
    SUBCASE("more qubits than sites") {
        Circuit c;
        c.n_qubits = 20;
        CHECK_THROWS_AS(compiler::compile_circuit(c, test_device(12), sp()),
                        protocol_error);
    }
    SUBCASE("transport would leave the register") {
        Circuit c;
        c.n_qubits = 8;
        c.gates.push_back({GateKind::cz, {0, 7}, 0.0});  // parks at 14
        CHECK_THROWS_AS(compiler::compile_circuit(c, test_device(12), sp()),
                        protocol_error);
    }
    SUBCASE("collisional CZ may not park on an occupied site") {
        Circuit c;
        c.n_qubits = 4;
        c.gates.push_back({GateKind::cz, {0, 1}, 0.0});  // parks at 2 = qubit 2
        CHECK_THROWS_AS(compiler::compile_circuit(c, test_device(12), sp()),
                        protocol_error);
    }
    SUBCASE("invalid circuits are rejected") {
        Circuit c;
        c.n_qubits = 2;
        c.gates.push_back({GateKind::cz, {0, 0}, 0.0});
        CHECK_THROWS_AS(compiler::compile_circuit(c, test_device(), sp()),
                        validation_error);
    }
}

TEST_CASE("schedule durations respect the transfer timing rule") {
    const auto dev = test_device();
    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz, {0, 5}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());
    const double fe = atomdata::gradient_site_splitting(
        sp(), dev.make_register().encoding.readout0, dev.gradient_g_per_cm,
        dev.spacing_nm);
    for (const auto& layer : sched.layers)
        for (const auto& op : layer.ops)
            if (const auto* t = std::get_if<reg::TransferOp>(&op)) {
                reg::TimingConstraint constraint{
                    dev.timing.storage_trap_frequency_hz,
                    t->site_selective ? fe : 0.0, dev.timing.margin};
                CHECK(reg::validate_transfer_timing(constraint, *t->duration_s));
            }
}

TEST_CASE("position restoration on randomized circuits (property)") {
    std::mt19937_64 rng(987);
    std::uniform_int_distribution<int> nq(2, 6);
    std::uniform_int_distribution<int> ng(1, 4);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    int compiled = 0;
    for (int it = 0; it < 1000; ++it) {
        DeviceConfig dev = test_device(16);
        dev.gate_mechanism = compiler::GateMechanism::blockade;
        dev.blockade = {kTwoPi * 1e3, kTwoPi * 1e6, 0.0};
        Circuit c;
        c.n_qubits = nq(rng);
        std::uniform_int_distribution<int> qd(0, c.n_qubits - 1);
        const int gates = ng(rng);
        for (int g = 0; g < gates; ++g) {
            switch (rng() % 3) {
                case 0:
                    c.gates.push_back({GateKind::rz, {qd(rng)}, angle(rng)});
                    break;
                case 1:
                    c.gates.push_back({GateKind::rx, {qd(rng)}, kPi});
                    break;
                default: {
                    int a = qd(rng), b = qd(rng);
                    if (a == b) b = (a + 1) % c.n_qubits;
                    // keep the parked branch inside the register
                    if (2 * b - a >= 0 && 2 * b - a < dev.n_sites)
                        c.gates.push_back({GateKind::cz, {a, b}, 0.0});
                    break;
                }
            }
        }
        compiler::Schedule sched;
        try {
            sched = compiler::compile_circuit(c, dev, sp());
        } catch (const protocol_error&) {
            continue;  // unschedulable random draw
        }
        ++compiled;
        std::vector<int> qubits(c.n_qubits);
        std::vector<int> values(c.n_qubits);
        for (int q = 0; q < c.n_qubits; ++q) {
            qubits[q] = q;
            values[q] = static_cast<int>(rng() % 2);
        }
        const auto init = basis_register(dev, qubits, values);
        const auto res = compiler::execute(sched, init, sp());
        REQUIRE(res.ok);
        CHECK(positions_restored(res.reg, init));
    }
    CHECK(compiled > 500);
}

TEST_CASE("schedule and circuit documents round-trip") {
    const auto dev = test_device();
    Circuit c;
    c.n_qubits = 6;
    c.gates.push_back({GateKind::cz, {0, 5}, 0.0});
    const auto sched = compiler::compile_circuit(c, dev, sp());
    const auto text = compiler::schedule_to_json(sched);
    const auto back = compiler::schedule_from_json(text);
    CHECK(compiler::schedule_to_json(back) == text);
    CHECK(back.total_duration_s == doctest::Approx(sched.total_duration_s));
    REQUIRE(back.layers.size() == sched.layers.size());

    const auto circ = compiler::circuit_from_json(
        R"({"n_qubits":3,"gates":[{"kind":"RZ","targets":[1],"angle":0.5},
                                  {"kind":"CZ","targets":[0,2]}]})");
    CHECK(circ.gates.size() == 2);
    CHECK(circ.gates[0].kind == GateKind::rz);
    CHECK_THROWS_AS(compiler::circuit_from_json(
                        R"({"n_qubits":1,"gates":[{"kind":"XX","targets":[0]}]})"),
                    parse_error);
}
