// test_model.cpp: model and config unit tests.

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "topobatt/bath.hpp"
#include "topobatt/config_io.hpp"
#include "topobatt/errors.hpp"
#include "topobatt/model.hpp"

using namespace topobatt;

TEST_SUITE("model") {

TEST_CASE("validate derives the hopping and loss combinations")
{
    ModelConfig c;
    c.bath.delta = 0.5;
    const ModelConfig v = validate(c);
    CHECK(v.bath.j_plus() == doctest::Approx(1.5));
    CHECK(v.bath.j_minus() == doctest::Approx(0.5));

    c.bath.kappa_a = 0.4;
    c.bath.kappa_b = 0.2;
    CHECK(c.bath.kappa_plus() == doctest::Approx(0.15));
    CHECK(c.bath.kappa_minus() == doctest::Approx(0.05));
}

TEST_CASE("validate rejects out-of-range fields by name")
{
    ModelConfig c;
    c.bath.delta = 1.2;
    CHECK_THROWS_WITH_AS(validate(c), "delta out of [-1,1]", ConfigError);
    c.bath.delta = 0.0;
    c.bath.kappa_a = -0.1;
    CHECK_THROWS_WITH_AS(validate(c), "kappa_a negative", ConfigError);
    c.bath.kappa_a = 0.0;
    c.bath.kappa_b = -1.0;
    CHECK_THROWS_WITH_AS(validate(c), "kappa_b negative", ConfigError);
    c.bath.kappa_b = 0.0;
    c.bath.J = 0.0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.bath.J = 1.0;
    c.emitters.g = std::nan("");
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("validate is idempotent")
{
    ModelConfig c;
    c.bath.delta = -0.3;
    c.bath.kappa_a = 0.7;
    c.emitters.g = 1.1;
    c.emitters.x2 = 3;
    const ModelConfig once = validate(c);
    const ModelConfig twice = validate(once);
    CHECK(to_json(once) == to_json(twice));
}

TEST_CASE("effective direct coupling needs the same cavity")
{
    ModelConfig c;
    c.emitters.Omega = 1.0;
    CHECK(effective_direct_coupling(c) == 1.0);
    c.emitters.x2 = -1;
    CHECK(effective_direct_coupling(c) == 0.0);
    c.emitters.x2 = 0;
    c.emitters.beta = Sublattice::B;
    CHECK(effective_direct_coupling(c) == 0.0);
    for (int x2 = -3; x2 <= 3; ++x2) {
        c.emitters.x2 = x2;
        c.emitters.beta = Sublattice::A;
        if (c.emitters.cell_distance() != 0) {
            CHECK(effective_direct_coupling(c) == 0.0);
        }
    }
}

TEST_CASE("band edges")
{
    BathParams b;
    b.delta = 0.5;
    BandEdges e = band_edges(b);
    CHECK(e.lower.lo == -2.0);
    CHECK(e.lower.hi == -1.0);
    CHECK(e.upper.lo == 1.0);
    CHECK(e.upper.hi == 2.0);

    b.delta = 0.0;
    e = band_edges(b);
    CHECK(e.inner() == 0.0);
    CHECK(e.outer() == 2.0);

    SUBCASE("symmetric and even in delta")
    {
        for (double d : {0.1, 0.37, 0.9}) {
            b.delta = d;
            const BandEdges p = band_edges(b);
            b.delta = -d;
            const BandEdges m = band_edges(b);
            CHECK(p.lower.lo == -p.upper.hi);
            CHECK(p.lower.hi == -p.upper.lo);
            CHECK(p.upper.lo == m.upper.lo);
            CHECK(p.upper.hi == m.upper.hi);
        }
    }

    SUBCASE("|delta| = 1 matches a brute-force scan of |f_k|")
    {
        for (double d : {-1.0, 1.0}) {
            b.delta = d;
            double lo = 1e300, hi = 0.0;
            for (int i = 0; i <= 20000; ++i) {
                const double k = -std::numbers::pi + 2.0 * std::numbers::pi * i / 20000;
                const double f = std::abs(coupling_fk(k, b));
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
            e = band_edges(b);
            CHECK(e.upper.lo == doctest::Approx(lo).epsilon(1e-12));
            CHECK(e.upper.hi == doctest::Approx(hi).epsilon(1e-12));
            ModelConfig c;
            c.bath = b;
            CHECK(c.decoupled_limit());
        }
    }
}

TEST_CASE("JSON config round trip and key errors")
{
    const ModelConfig c = parse_config(
        R"({"J":1,"delta":-0.26,"kappa_a":0.5,"kappa_b":0,"Delta":0,"Omega":0,"g":0.1,)"
        R"("x1":0,"alpha":"B","x2":1,"beta":"A","omega_e":2})");
    CHECK(c.bath.delta == -0.26);
    CHECK(c.emitters.alpha == Sublattice::B);
    CHECK(c.emitters.cell_distance() == -1);
    CHECK(c.emitters.omega_e == 2.0);
    CHECK(to_json(parse_config(to_json(c).dump())) == to_json(c));

    CHECK_THROWS_AS(parse_config(R"({"delta": "x"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"alpha": "C"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta": 0.5,)"), ConfigError);
    try {
        parse_config(R"({"gg": 1})");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gg") != std::string::npos);
    }
}

} // TEST_SUITE
