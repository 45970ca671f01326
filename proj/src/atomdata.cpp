#include "aeq/atomdata.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "aeq/errors.hpp"
#include "aeq/units.hpp"

namespace aeq::atomdata {

namespace {

bool is_half_integer(double x) {
    return std::isfinite(x) && std::abs(2.0 * x - std::round(2.0 * x)) < 1e-9;
}

// Half-integers appear in documents either as exact decimals (4.5) or as
// strings like "9/2" / "-13/2".
double parse_half_integer_json(const nlohmann::json& v, const std::string& what) {
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!is_half_integer(x))
            throw parse_error(what + ": value is not an integer or half-integer");
        return std::round(2.0 * x) / 2.0;
    }
    if (v.is_string()) {
        try {
            return parse_half_integer(v.get<std::string>());
        } catch (const std::exception& e) {
            throw parse_error(what + ": " + e.what());
        }
    }
    throw parse_error(what + ": expected number or fraction string");
}

}  // namespace

double parse_half_integer(const std::string& text) {
    double x = 0.0;
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            x = std::stod(text, &used);
            if (used != text.size()) throw parse_error("trailing characters");
        } else {
            const double num = std::stod(text.substr(0, slash));
            const double den = std::stod(text.substr(slash + 1));
            if (den == 0.0) throw parse_error("zero denominator");
            x = num / den;
        }
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("cannot parse half-integer '" + text + "'");
    }
    if (!is_half_integer(x))
        throw parse_error("'" + text + "' is not an integer or half-integer");
    return std::round(2.0 * x) / 2.0;
}

const LevelModel* SpeciesModel::find_level(const std::string& name) const {
    for (const auto& l : levels)
        if (l.name == name) return &l;
    return nullptr;
}

const LevelModel& SpeciesModel::level(const std::string& name) const {
    const LevelModel* l = find_level(name);
    if (!l) throw validation_error("unknown level '" + name + "'");
    return *l;
}

std::string to_string(const AtomicState& state) {
    std::ostringstream os;
    os << state.level;
    if (state.f) os << " F=" << *state.f;
    os << " m=" << state.m;
    return os.str();
}

SpeciesModel load_species(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("species document: ") + e.what());
    }

    SpeciesModel sp;
    try {
        sp.name = doc.at("name").get<std::string>();
        sp.nuclear_spin = parse_half_integer_json(doc.at("nuclear_spin"), "nuclear_spin");
        for (const auto& jl : doc.at("levels")) {
            LevelModel lv;
            lv.name = jl.at("name").get<std::string>();
            lv.j = parse_half_integer_json(jl.at("J"), "level " + lv.name + " J");
            if (jl.contains("zeeman_hz_per_gauss_per_m"))
                lv.zeeman_hz_per_gauss_per_m =
                    jl.at("zeeman_hz_per_gauss_per_m").get<double>();
            if (jl.contains("g_J")) lv.g_j = jl.at("g_J").get<double>();
            if (jl.contains("lifetime_s")) lv.lifetime_s = jl.at("lifetime_s").get<double>();
            sp.levels.push_back(std::move(lv));
        }
        for (const auto& jl : doc.at("lines")) {
            TransitionLine ln;
            ln.lower = jl.at("lower").get<std::string>();
            ln.upper = jl.at("upper").get<std::string>();
            ln.wavelength_nm = jl.at("wavelength_nm").get<double>();
            ln.oscillator_strength = jl.at("oscillator_strength").get<double>();
            sp.lines.push_back(std::move(ln));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("species document: ") + e.what());
    }

    // Invariants.
    if (sp.nuclear_spin < 0)
        throw validation_error("nuclear_spin must be >= 0");
    std::set<std::string> names;
    for (const auto& lv : sp.levels) {
        if (!names.insert(lv.name).second)
            throw validation_error("duplicate level name '" + lv.name + "'");
        if (lv.j < 0) throw validation_error("level " + lv.name + ": J must be >= 0");
        if (lv.zeeman_hz_per_gauss_per_m && !std::isfinite(*lv.zeeman_hz_per_gauss_per_m))
            throw validation_error("level " + lv.name + ": non-finite zeeman coefficient");
        if (lv.lifetime_s && *lv.lifetime_s <= 0)
            throw validation_error("level " + lv.name + ": lifetime_s must be > 0");
    }
    for (const auto& ln : sp.lines) {
        if (!names.count(ln.lower) || !names.count(ln.upper))
            throw validation_error("line " + ln.lower + " -> " + ln.upper +
                                   " references a level not in the level list");
        if (ln.wavelength_nm <= 0)
            throw validation_error("line " + ln.lower + " -> " + ln.upper +
                                   ": wavelength_nm must be > 0");
        if (ln.oscillator_strength <= 0)
            throw validation_error("line " + ln.lower + " -> " + ln.upper +
                                   ": oscillator_strength must be > 0");
    }
    return sp;
}

void validate_state(const SpeciesModel& species, const AtomicState& state) {
    const LevelModel& lv = species.level(state.level);
    if (!is_half_integer(state.m))
        throw validation_error(to_string(state) + ": m must be integer or half-integer");
    if (state.f) {
        const double f = *state.f;
        const double lo = std::abs(lv.j - species.nuclear_spin);
        const double hi = lv.j + species.nuclear_spin;
        if (!is_half_integer(f) || f < lo - 1e-9 || f > hi + 1e-9)
            throw validation_error(to_string(state) + ": F outside |J-I|..J+I");
        if (std::abs(state.m) > f + 1e-9)
            throw validation_error(to_string(state) + ": |m| exceeds F");
    } else {
        if (std::abs(state.m) > species.nuclear_spin + 1e-9)
            throw validation_error(to_string(state) + ": |m| exceeds I");
    }
}

double lande_g_f(double g_j, double f, double j, double i) {
    return g_j * (f * (f + 1.0) + j * (j + 1.0) - i * (i + 1.0)) /
           (2.0 * f * (f + 1.0));
}

double zeeman_shift(const SpeciesModel& species, const AtomicState& state,
                    double b_gauss) {
    validate_state(species, state);
    const LevelModel& lv = species.level(state.level);
    if (state.f) {
        if (!lv.g_j)
            throw validation_error("level " + lv.name +
                                   ": g_J required for hyperfine Zeeman shift");
        const double gf = lande_g_f(*lv.g_j, *state.f, lv.j, species.nuclear_spin);
        return state.m * gf * units::kBohrMagnetonHzPerGauss * b_gauss;
    }
    if (!lv.zeeman_hz_per_gauss_per_m)
        throw validation_error("level " + lv.name + ": no zeeman coefficient");
    return *lv.zeeman_hz_per_gauss_per_m * state.m * b_gauss;
}

double gradient_site_splitting(const SpeciesModel& species,
                               const AtomicState& state,
                               double gradient_g_per_cm, double spacing_nm) {
    if (gradient_g_per_cm < 0)
        throw validation_error("gradient must be >= 0");
    if (spacing_nm <= 0)
        throw validation_error("spacing must be > 0");
    const double per_gauss = std::abs(zeeman_shift(species, state, 1.0));
    return per_gauss * gradient_g_per_cm * spacing_nm * 1e-7;  // nm -> cm
}

}  // namespace aeq::atomdata
