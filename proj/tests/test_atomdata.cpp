#include <doctest.h>

#include <cmath>

#include "aeq/atomdata.hpp"
#include "aeq/errors.hpp"
#include "aeq/sr87.hpp"

using namespace aeq;
using atomdata::AtomicState;

namespace {

const AtomicState k0{"1S0", std::nullopt, -4.5};
const AtomicState k3p0_m92{"3P0", std::nullopt, -4.5};
const AtomicState kReadout0{"3P2", 6.5, -6.5};

}  // namespace

TEST_CASE("bundled 87Sr document loads with I = 9/2") {
    const auto& sp = atomdata::sr87();
    CHECK(sp.name == "87Sr");
    CHECK(sp.nuclear_spin == doctest::Approx(4.5));
    CHECK(sp.level("1S0").zeeman_hz_per_gauss_per_m == -185.0);
    CHECK(sp.level("3P0").zeeman_hz_per_gauss_per_m == -295.0);
    CHECK(sp.level("3P2").lifetime_s == 1.0);
}

TEST_CASE("species document edge cases") {
    SUBCASE("zero lines is a valid species") {
        const auto sp = atomdata::load_species(
            R"({"name":"x","nuclear_spin":"1/2","levels":[{"name":"g","J":0}],"lines":[]})");
        CHECK(sp.lines.empty());
    }
    SUBCASE("dangling level reference rejected") {
        CHECK_THROWS_AS(atomdata::load_species(
                            R"({"name":"x","nuclear_spin":0,"levels":[{"name":"g","J":0}],
                "lines":[{"lower":"g","upper":"3X1","wavelength_nm":500,"oscillator_strength":1}]})"),
                        validation_error);
    }
    SUBCASE("nonpositive wavelength rejected") {
        CHECK_THROWS_AS(atomdata::load_species(
                            R"({"name":"x","nuclear_spin":0,
                "levels":[{"name":"g","J":0},{"name":"e","J":1}],
                "lines":[{"lower":"g","upper":"e","wavelength_nm":-1,"oscillator_strength":1}]})"),
                        validation_error);
    }
    SUBCASE("malformed JSON is a parse error") {
        CHECK_THROWS_AS(atomdata::load_species("{"), parse_error);
    }
    SUBCASE("duplicate level names rejected") {
        CHECK_THROWS_AS(atomdata::load_species(
                            R"({"name":"x","nuclear_spin":0,
                "levels":[{"name":"g","J":0},{"name":"g","J":1}],"lines":[]})"),
                        validation_error);
    }
    SUBCASE("half-integers as strings and decimals agree") {
        CHECK(atomdata::parse_half_integer("9/2") == 4.5);
        CHECK(atomdata::parse_half_integer("-13/2") == -6.5);
        CHECK(atomdata::parse_half_integer("4.5") == 4.5);
        CHECK_THROWS_AS(atomdata::parse_half_integer("0.3"), parse_error);
    }
}

TEST_CASE("zeeman shift: linear nuclear model for J = 0") {
    const auto& sp = atomdata::sr87();
    // -185 Hz/G * (-9/2) * 1 G
    CHECK(atomdata::zeeman_shift(sp, k0, 1.0) == doctest::Approx(832.5));
    CHECK(atomdata::zeeman_shift(sp, k0, 0.0) == 0.0);

    SUBCASE("linear in B, odd in m") {
        const AtomicState plus{"1S0", std::nullopt, 3.5};
        const AtomicState minus{"1S0", std::nullopt, -3.5};
        for (double b : {0.1, 0.5, 2.0, -1.0}) {
            const double s = atomdata::zeeman_shift(sp, plus, b);
            CHECK(atomdata::zeeman_shift(sp, minus, b) == doctest::Approx(-s));
            CHECK(atomdata::zeeman_shift(sp, plus, -b) == doctest::Approx(-s));
            CHECK(atomdata::zeeman_shift(sp, plus, 2.0 * b) == doctest::Approx(2.0 * s));
        }
    }
}

TEST_CASE("zeeman shift: hyperfine Lande model for 3P2") {
    const auto& sp = atomdata::sr87();
    // g_F = 1.5 * [F(F+1)+J(J+1)-I(I+1)] / [2F(F+1)] = 0.4615...;
    // shift = -13/2 * g_F * mu_B = -4.198872 MHz at 1 G.
    const double gf = atomdata::lande_g_f(1.5, 6.5, 2.0, 4.5);
    CHECK(gf == doctest::Approx(0.461538461538));
    CHECK(atomdata::zeeman_shift(sp, kReadout0, 1.0) == doctest::Approx(-4.198872e6));
}

TEST_CASE("zeeman shift error paths") {
    const auto& sp = atomdata::sr87();
    SUBCASE("level without kappa") {
        // 1P1 has g_J but no kappa; without F there is no valid model
        CHECK_THROWS_AS(
            atomdata::zeeman_shift(sp, {"1P1", std::nullopt, 1.0}, 1.0),
            validation_error);
    }
    SUBCASE("invalid states rejected") {
        CHECK_THROWS_AS(atomdata::zeeman_shift(sp, {"1S0", std::nullopt, 5.5}, 1.0),
                        validation_error);  // |m| > I
        CHECK_THROWS_AS(atomdata::zeeman_shift(sp, {"3P2", 8.5, -1.5}, 1.0),
                        validation_error);  // F > J + I
        CHECK_THROWS_AS(atomdata::zeeman_shift(sp, {"3P2", 6.5, -7.5}, 1.0),
                        validation_error);  // |m| > F
        CHECK_THROWS_AS(atomdata::zeeman_shift(sp, {"nope", std::nullopt, 0.5}, 1.0),
                        validation_error);
    }
}

TEST_CASE("gradient site splitting reproduces the addressing numbers") {
    const auto& sp = atomdata::sr87();
    // |0x> at 100 G/cm: energy gradient 420 MHz/cm (paper: 410), and
    // ~14.5 kHz between neighbors at 344.6 nm spacing (paper: ~15 kHz).
    const double split =
        atomdata::gradient_site_splitting(sp, kReadout0, 100.0, 344.6);
    CHECK(split == doctest::Approx(15e3).epsilon(0.10));
    CHECK(split == doctest::Approx(14469.312912).epsilon(1e-9));

    // 3P0 m_I = -9/2: = 9/2 * ~1.0 Hz
    const double p0 =
        atomdata::gradient_site_splitting(sp, k3p0_m92, 100.0, 344.6);
    CHECK(p0 == doctest::Approx(4.5 * 1.0).epsilon(0.10));

    CHECK(atomdata::gradient_site_splitting(sp, kReadout0, 0.0, 344.6) == 0.0);

    SUBCASE("linear in gradient and spacing") {
        const double base =
            atomdata::gradient_site_splitting(sp, kReadout0, 50.0, 200.0);
        CHECK(atomdata::gradient_site_splitting(sp, kReadout0, 100.0, 200.0) ==
              doctest::Approx(2.0 * base));
        CHECK(atomdata::gradient_site_splitting(sp, kReadout0, 50.0, 400.0) ==
              doctest::Approx(2.0 * base));
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(atomdata::gradient_site_splitting(sp, kReadout0, -1.0, 100.0),
                        validation_error);
        CHECK_THROWS_AS(atomdata::gradient_site_splitting(sp, kReadout0, 1.0, 0.0),
                        validation_error);
    }
}

TEST_CASE("clock differential coefficient is 110 Hz/G, within 1 of the quoted 109") {
    const auto& sp = atomdata::sr87();
    const double diff = std::abs(*sp.level("3P0").zeeman_hz_per_gauss_per_m -
                                 *sp.level("1S0").zeeman_hz_per_gauss_per_m);
    CHECK(diff == 110.0);
    CHECK(std::abs(diff - 109.0) <= 1.0);
}
