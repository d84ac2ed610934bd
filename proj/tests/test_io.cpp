#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fbpm/diagnostics.hpp"
#include "fbpm/io.hpp"
#include "oracles.hpp"

using namespace fbpm;

TEST_CASE("splitmix64 reference outputs for seed 1")
{
    // Reference values computed separately in Python.
    Rng rng(1);
    CHECK(rng.next() == 0x910a2dec89025cc1ULL);
    CHECK(rng.next() == 0xbeeb8da1658eec67ULL);
    CHECK(rng.next() == 0xf893a2eefb32555eULL);
    CHECK(rng.next() == 0x71c18690ee42c90bULL);

    Rng a(99);
    std::uint64_t state = 99;
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == oracle::splitmix64(state));
    }
}

TEST_CASE("uniform and normal draws")
{
    Rng a(5);
    std::uint64_t state = 5;
    for (int i = 0; i < 10; ++i) {
        const double u = a.uniform();
        CHECK(u == std::ldexp(static_cast<double>(oracle::splitmix64(state)), -64));
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng b(5);
    std::uint64_t s2 = 5;
    const double u1 = std::ldexp(static_cast<double>(oracle::splitmix64(s2)), -64);
    const double u2 = std::ldexp(static_cast<double>(oracle::splitmix64(s2)), -64);
    CHECK(b.normal() == doctest::Approx(std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2)));

    Rng c(123);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = c.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("signals")
{
    const ScalarField s = gen_signal(SignalKind::sine, 5, 2.0, 0.0, 1);
    const double expected[] = {0.0, 2.0, 0.0, -2.0, 0.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(s[i] == doctest::Approx(expected[i]).scale(1.0));
    }
    const ScalarField st = gen_signal(SignalKind::step, 4, 1.0, 0.0, 1);
    CHECK(st == ScalarField{-0.5, -0.5, 0.5, 0.5});
    const ScalarField saw = gen_signal(SignalKind::sawtooth, 9, 1.0, 0.0, 1);
    CHECK(saw[0] == doctest::Approx(-1.0));
    CHECK(saw[1] == doctest::Approx(1.0));
    CHECK(saw[2] == doctest::Approx(-1.0));

    CHECK(gen_signal(SignalKind::sine, 64, 1.0, 0.1, 7) == gen_signal(SignalKind::sine, 64, 1.0, 0.1, 7));
    CHECK_FALSE(gen_signal(SignalKind::sine, 64, 1.0, 0.1, 7) == gen_signal(SignalKind::sine, 64, 1.0, 0.1, 8));
    CHECK(parse_signal_kind("sawtooth") == SignalKind::sawtooth);
    CHECK(to_string(SignalKind::step) == "step");
    CHECK_THROWS_AS(parse_signal_kind("square"), std::invalid_argument);
}

TEST_CASE("PGM reading and writing")
{
    const Image p2 = read_pgm("P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n");
    CHECK(p2.grid.nx() == 3);
    CHECK(p2.grid.ny() == 2);
    CHECK(p2.pixels[1] == doctest::Approx(0.50196).epsilon(1e-5));
    CHECK(p2.pixels[2] == 1.0);
    CHECK(p2.pixels[p2.grid.node(2, 1)] == doctest::Approx(30.0 / 255.0));

    const Image gray = read_pgm("P2 2 2 255 128 128 128 128");
    for (double v : gray.pixels) {
        CHECK(v == doctest::Approx(128.0 / 255.0));
    }

    const std::string p5 = write_pgm(p2.pixels, p2.grid);
    CHECK(p5.substr(0, 3) == "P5\n");
    const Image back = read_pgm(p5);
    CHECK(back.pixels == p2.pixels);
    CHECK(write_pgm(back.pixels, back.grid) == p5);

    const Grid g = Grid::rect(2, 2, 1.0);
    const std::string clamp = write_pgm(ScalarField{0.0, 0.0, -0.5, 2.0}, g);
    CHECK(static_cast<unsigned char>(clamp[clamp.size() - 2]) == 0);
    CHECK(static_cast<unsigned char>(clamp[clamp.size() - 1]) == 255);

    auto kind_of = [](std::string_view bytes) {
        try {
            read_pgm(bytes);
        } catch (const PgmError& e) {
            return static_cast<int>(e.kind());
        }
        return -1;
    };
    CHECK(kind_of("P3\n1 1\n255\n0\n") == static_cast<int>(PgmError::Kind::malformed_header));
    CHECK(kind_of("P2\n1 x\n255\n0\n") == static_cast<int>(PgmError::Kind::malformed_header));
    CHECK(kind_of("P2\n1 1\n65535\n0\n") == static_cast<int>(PgmError::Kind::unsupported_maxval));
    CHECK(kind_of("P2\n2 2\n255\n0 1 2\n") == static_cast<int>(PgmError::Kind::truncated_payload));
    CHECK(kind_of(std::string("P5\n2 2\n255\n\x01\x02", 13)) == static_cast<int>(PgmError::Kind::truncated_payload));
}

TEST_CASE("CSV output parses back, by the library and by a separate reader")
{
    CsvTable t;
    t.header = {"x", "u"};
    t.rows = {{0.0, 1.0 / 3.0}, {0.5, -2.5e-17}, {1.0, 12345.678}};
    const std::string text = write_csv(t);
    CHECK(text.substr(0, 4) == "x,u\n");
    CHECK(text.back() == '\n');
    const CsvTable back = parse_csv(text);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(oracle::csv_numbers(text) == t.rows);
    CHECK_THROWS(parse_csv("a,b\n1\n"));
    CHECK_THROWS(parse_csv("a\nfoo\n"));

    EnergyTrace empty;
    CHECK(write_csv(to_csv(empty)) == "step,t,energy,cum_l2,cum_h1,mean,margin\n");
}

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, -7.25e-300, 6.02e23, 0.0}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
}
