#include "levyts/error.hpp"
#include "levyts/noise.hpp"
#include "levyts/series.hpp"

#include <doctest.h>

#include <sstream>

using namespace levyts;

TEST_CASE("two epochs parse into two values") {
    std::istringstream in("55000.0 1.25\n55001.0 1.30\n");
    const auto ts = parse_series(in);
    REQUIRE(ts.size() == 2);
    CHECK(ts.values()[0] == 1.25);
    CHECK(ts.values()[1] == 1.30);
    CHECK(ts.gap_count() == 0);
}

TEST_CASE("a missing epoch is recorded as a gap") {
    std::istringstream in("# station XYZ\n55000 1\n55001 2\n55003 4 0.5\n");
    const auto ts = parse_series(in);
    CHECK(ts.size() == 3);
    CHECK(ts.grid_length() == 4);
    REQUIRE(ts.gap_epochs().size() == 1);
    CHECK(ts.gap_epochs()[0] == 55002.0);
    CHECK(ts.header().size() == 1);
}

TEST_CASE("sampling period header sets the grid step") {
    std::istringstream in("# sampling period 7\n55000 1\n55007 2\n55021 3\n");
    const auto ts = parse_series(in);
    CHECK(ts.dt() == 7.0);
    CHECK(ts.gap_count() == 1);
}

TEST_CASE("malformed lines report their line number") {
    std::istringstream bad("55000 1\n55001 x\n");
    try {
        parse_series(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream backwards("55001 1\n55000 2\n");
    CHECK_THROWS_AS(parse_series(backwards), ValidationError);
    std::istringstream off_grid("55000 1\n55000.5 2\n");
    CHECK_THROWS_AS(parse_series(off_grid), ValidationError);
}

TEST_CASE("write then parse round-trips a simulated series exactly") {
    const auto ts = gen_noise({NoiseKind::PowerLawWhite, 1.6, 1.0, 1.1}, 3650, 42);
    std::stringstream buf;
    write_series(buf, ts);
    const auto back = parse_series(buf);
    REQUIRE(back.size() == ts.size());
    CHECK(back.dt() == ts.dt());
    CHECK(back.first_epoch() == ts.first_epoch());
    for (std::size_t i = 0; i < ts.size(); ++i) REQUIRE(back.values()[i] == ts.values()[i]);
}

TEST_CASE("slice_window offsets") {
    std::vector<double> v(3650, 0.0);
    const auto ts = TimeSeries::uniform(51544, 1.0, v);
    SUBCASE("offset 0 drops the last year") { CHECK(slice_window(ts, 0.0).size() == 3650 - 365); }
    SUBCASE("offset 365 keeps everything") { CHECK(slice_window(ts, 365.0).size() == 3650); }
    SUBCASE("six nested windows") {
        std::size_t prev = 0;
        for (double s : {0.0, 0.3, 0.5, 0.7, 0.8, 1.0}) {
            const auto w = slice_window(ts, s * 365.0);
            CHECK(w.size() > prev);
            CHECK(w.first_epoch() == ts.first_epoch());
            prev = w.size();
        }
        CHECK(prev == 3650);
    }
    CHECK_THROWS_AS(slice_window(ts, 400.0), DomainError);
    const auto short_ts = TimeSeries::uniform(51544, 1.0, std::vector<double>(800, 0.0));
    CHECK_THROWS_AS(slice_window(short_ts, 0.0), ValidationError);
}

TEST_CASE("offset catalogue parsing and filtering") {
    std::istringstream in("# offsets\n51600 0.5\n51700\n");
    const auto cat = parse_offsets(in);
    REQUIRE(cat.size() == 2);
    CHECK(cat.magnitudes[0].value() == 0.5);
    CHECK_FALSE(cat.magnitudes[1].has_value());
    CHECK(cat.within(51544, 51650).size() == 1);
    CHECK(cat.within(51600, 51800).size() == 1);
}
