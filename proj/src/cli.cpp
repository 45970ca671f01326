#include "aeq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "aeq/atomdata.hpp"
#include "aeq/blockade.hpp"
#include "aeq/budget.hpp"
#include "aeq/compiler.hpp"
#include "aeq/errors.hpp"
#include "aeq/polarizability.hpp"
#include "aeq/register.hpp"
#include "aeq/sr87.hpp"
#include "aeq/units.hpp"

namespace aeq::cli {

namespace {

// Shortest round-trip representation; locale-free and byte-stable across runs.
std::string fmt(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// temp + rename, so readers never observe a partial file
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw validation_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

void emit(const std::string& content, const std::string& out_path,
          std::ostream& out) {
    if (out_path.empty())
        out << content;
    else
        write_file_atomic(out_path, content);
}

atomdata::SpeciesModel load_species_arg(const std::string& species_path) {
    if (!species_path.empty())
        return atomdata::load_species(read_file(species_path));
    if (const char* env = std::getenv("AEQSIM_SPECIES_PATH"); env && *env)
        return atomdata::load_species(read_file(env));
    return atomdata::sr87();
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw validation_error("--range expects 'lo,hi'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw validation_error("--range expects 'lo,hi' numbers");
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw validation_error("cannot parse number '" + item + "'");
        }
    }
    if (out.empty()) throw validation_error("empty number list");
    return out;
}

struct Options {
    std::string species_path;
    std::string out_path;
    std::string format = "csv";
    std::string level;
    std::string range;
    double step_nm = 0.5;
    double window_nm = 0.01;
    std::string gamma_over_omega = "0";
    std::string delta_over_omega = "0";
    double omega_t = units::kTwoPi;
    double t_max = units::kTwoPi;
    int points = 200;
    bool gate_outcome = false;
    std::string register_path;
    std::string protocol_path;
    std::string log_path;
    int trajectories = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string circuit_path;
    std::string device_path;
    std::string schedule_path;
    std::string noise_path;
};

int cmd_polarizability_scan(const Options& opt, std::ostream& out) {
    const auto species = load_species_arg(opt.species_path);
    const auto [lo, hi] = parse_range(opt.range);
    polar::ScanOptions scan_opt{opt.window_nm};
    const auto samples = polar::scan(species, opt.level, lo, hi, opt.step_nm, scan_opt);
    std::string body;
    if (opt.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : samples)
            arr.push_back({{"wavelength_nm", s.wavelength_nm}, {"alpha_au", s.alpha_au}});
        body = arr.dump(2) + "\n";
    } else {
        body = "wavelength_nm,alpha_au\n";
        for (const auto& s : samples)
            body += fmt(s.wavelength_nm) + "," + fmt(s.alpha_au) + "\n";
    }
    emit(body, opt.out_path, out);
    return 0;
}

int cmd_polarizability_zeros(const Options& opt, std::ostream& out) {
    const auto species = load_species_arg(opt.species_path);
    const auto [lo, hi] = parse_range(opt.range);
    polar::ScanOptions scan_opt{opt.window_nm};
    const auto zeros =
        polar::find_zero_crossings(species, opt.level, lo, hi, opt.step_nm, scan_opt);
    emit(nlohmann::json(zeros).dump() + "\n", opt.out_path, out);
    return 0;
}

int cmd_blockade_evolve(const Options& opt, std::ostream& out) {
    blockade::BlockadeParams params;
    params.omega = 1.0;
    params.delta_u = parse_list(opt.delta_over_omega).front();
    params.gamma = parse_list(opt.gamma_over_omega).front();
    nlohmann::json doc;
    if (opt.gate_outcome) {
        const auto g = blockade::blockade_gate_outcome(params);
        doc = {{"phase_01", g.phase_01},
               {"loss_01", g.loss_01},
               {"residual_phase", g.residual_phase}};
    } else {
        const auto psi = blockade::evolve(params, {}, opt.omega_t);
        doc = {{"c_g", {psi.c_g.real(), psi.c_g.imag()}},
               {"c_e", {psi.c_e.real(), psi.c_e.imag()}},
               {"norm2", psi.norm2()},
               {"loss", 1.0 - psi.norm2()}};
    }
    emit(doc.dump(2) + "\n", opt.out_path, out);
    return 0;
}

int cmd_blockade_curves(const Options& opt, std::ostream& out) {
    const auto gammas = parse_list(opt.gamma_over_omega);
    const auto deltas = parse_list(opt.delta_over_omega);
    // single curve: plain omega_t,loss; families get a leading series label
    const bool labeled = gammas.size() * deltas.size() > 1;
    std::string body = labeled ? "series,omega_t,loss\n" : "omega_t,loss\n";
    for (double g : gammas) {
        for (double d : deltas) {
            blockade::BlockadeParams params{1.0, d, g};
            const auto curve = blockade::loss_curve(params, opt.t_max, opt.points);
            const std::string label = "gamma_over_omega=" + fmt(g) +
                                      " delta_over_omega=" + fmt(d) + ",";
            for (std::size_t k = 0; k < curve.omega_t.size(); ++k)
                body += (labeled ? label : "") + fmt(curve.omega_t[k]) + "," +
                        fmt(curve.loss[k]) + "\n";
        }
    }
    emit(body, opt.out_path, out);
    return 0;
}

// A protocol document is a JSON array of ops; a compiled schedule (object
// with a "layers" wrapper) is accepted too and executed in layer order.
std::vector<reg::ProtocolOp> load_protocol(const std::string& text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_object() && doc.contains("layers")) {
        std::vector<reg::ProtocolOp> ops;
        const auto schedule = compiler::schedule_from_json(text);
        for (const auto& layer : schedule.layers)
            for (const auto& op : layer.ops) ops.push_back(op);
        return ops;
    }
    return reg::protocol_from_json(text);
}

int cmd_register_run(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto species = load_species_arg(opt.species_path);
    auto reg0 = reg::register_from_json(read_file(opt.register_path));
    const auto ops = load_protocol(read_file(opt.protocol_path));
    const auto result = reg::run_protocol(std::move(reg0), ops, species);
    if (!opt.log_path.empty())
        write_file_atomic(opt.log_path,
                          reg::event_log_to_jsonl(result.reg.event_log));
    if (!result.ok) {
        err << "error: op " << result.failed_index << ": " << result.error << "\n";
        return 1;
    }
    std::string body = reg::register_to_json(result.reg);
    if (opt.trajectories > 0) {
        if (!opt.seed_set)
            throw validation_error("--trajectories requires --seed for reproducibility");
        const auto counts =
            reg::sample_loss_trajectories(result.reg, opt.trajectories, opt.seed);
        nlohmann::json doc = nlohmann::json::parse(body);
        doc["trajectories"] = {{"n", opt.trajectories},
                               {"seed", opt.seed},
                               {"survived_per_atom", counts}};
        body = doc.dump(2) + "\n";
    }
    emit(body, opt.out_path, out);
    return 0;
}

int cmd_compile(const Options& opt, std::ostream& out) {
    const auto species = load_species_arg(opt.species_path);
    const auto circuit = compiler::circuit_from_json(read_file(opt.circuit_path));
    const auto device = compiler::device_from_json(read_file(opt.device_path));
    const auto schedule = compiler::compile_circuit(circuit, device, species);
    emit(compiler::schedule_to_json(schedule), opt.out_path, out);
    return 0;
}

int cmd_budget(const Options& opt, std::ostream& out) {
    const auto species = load_species_arg(opt.species_path);
    const auto schedule = compiler::schedule_from_json(read_file(opt.schedule_path));
    budget::NoiseModel noise = opt.noise_path.empty()
                                   ? budget::NoiseModel::defaults(species)
                                   : budget::noise_from_json(read_file(opt.noise_path));
    if (noise.lifetimes_s.empty())
        noise.lifetimes_s = budget::NoiseModel::defaults(species).lifetimes_s;
    const auto budget_report = compiler::price(schedule, noise, species);
    emit(budget_report.to_json(), opt.out_path, out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"aeqsim: dual-lattice alkaline-earth qubit architecture toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool species = true) {
        sub->add_option("-o,--output", opt.out_path, "output path (default stdout)");
        if (species)
            sub->add_option("--species", opt.species_path,
                            "species document (default: $AEQSIM_SPECIES_PATH, else bundled 87Sr)");
    };

    auto* scan = app.add_subcommand("polarizability-scan",
                                    "sample alpha(lambda) as CSV/JSON");
    scan->add_option("--level", opt.level, "level name")->required();
    scan->add_option("--range", opt.range, "wavelength range lo,hi in nm")->required();
    scan->add_option("--step-nm", opt.step_nm, "grid step (default 0.5)");
    scan->add_option("--window-nm", opt.window_nm, "resonance exclusion window");
    scan->add_option("--format", opt.format, "csv|json (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    add_common(scan);

    auto* zeros = app.add_subcommand("polarizability-zeros",
                                     "tune-out wavelengths as a JSON array");
    zeros->add_option("--level", opt.level, "level name")->required();
    zeros->add_option("--range", opt.range, "wavelength range lo,hi in nm")->required();
    zeros->add_option("--step-nm", opt.step_nm, "scan step (default 0.5)");
    zeros->add_option("--window-nm", opt.window_nm, "resonance exclusion window");
    add_common(zeros);

    auto* evolve = app.add_subcommand(
        "blockade-evolve", "evolve |g> under the lossy-blockade Hamiltonian");
    evolve->add_option("--gamma-over-omega", opt.gamma_over_omega, "Gamma/Omega");
    evolve->add_option("--delta-over-omega", opt.delta_over_omega, "Delta_U/Omega");
    evolve->add_option("--omega-t", opt.omega_t, "dimensionless time Omega*t");
    evolve->add_flag("--gate-outcome", opt.gate_outcome,
                     "report the 2pi-pulse branch outcome instead");
    add_common(evolve, false);

    auto* curves = app.add_subcommand("blockade-curves",
                                      "loss curves over a parameter family (CSV)");
    curves->add_option("--gamma-over-omega", opt.gamma_over_omega,
                       "comma-separated Gamma/Omega list");
    curves->add_option("--delta-over-omega", opt.delta_over_omega,
                       "comma-separated Delta_U/Omega list");
    curves->add_option("--t-max", opt.t_max, "curve end, in Omega*t");
    curves->add_option("--points", opt.points, "samples per curve (default 200)");
    add_common(curves, false);

    auto* rrun = app.add_subcommand("register-run",
                                    "execute a protocol document on a register");
    rrun->add_option("--register", opt.register_path, "register document")->required();
    rrun->add_option("--protocol", opt.protocol_path, "protocol document")->required();
    rrun->add_option("--log", opt.log_path, "write the event log (JSON lines)");
    rrun->add_option("--trajectories", opt.trajectories,
                     "Monte Carlo loss trajectories to sample");
    rrun->add_option("--seed", opt.seed, "RNG seed (required with --trajectories)")
        ->each([&](const std::string&) { opt.seed_set = true; });
    add_common(rrun);

    auto* comp = app.add_subcommand("compile",
                                    "lower a circuit document onto a device");
    comp->add_option("--circuit", opt.circuit_path, "circuit document")->required();
    comp->add_option("--device", opt.device_path, "device document")->required();
    add_common(comp);

    auto* bud = app.add_subcommand("budget", "price a compiled schedule");
    bud->add_option("--schedule", opt.schedule_path, "schedule document")->required();
    bud->add_option("--noise", opt.noise_path, "noise model document");
    add_common(bud);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (scan->parsed()) return cmd_polarizability_scan(opt, out);
        if (zeros->parsed()) return cmd_polarizability_zeros(opt, out);
        if (evolve->parsed()) return cmd_blockade_evolve(opt, out);
        if (curves->parsed()) return cmd_blockade_curves(opt, out);
        if (rrun->parsed()) return cmd_register_run(opt, out, err);
        if (comp->parsed()) return cmd_compile(opt, out);
        if (bud->parsed()) return cmd_budget(opt, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace aeq::cli
