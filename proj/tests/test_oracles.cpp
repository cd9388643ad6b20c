#include "levyts/error.hpp"
#include "levyts/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

using namespace levyts;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent summation of the signal part, written out per kind.
Moments direct(const ResidualSignalSpec& s, std::size_t length) {
    std::vector<double> d(length);
    for (std::size_t i = 1; i <= length; ++i) {
        const double t = static_cast<double>(i) * s.dt;
        double v = 0.0;
        if (s.kind == ResidualKind::Trend) v = s.a_r / 365.25 * t + s.b_r;
        for (std::size_t j = 0; j < s.c_r.size(); ++j) {
            const double w = 2.0 * kPi * static_cast<double>(j + 1) / s.period_days;
            v += s.c_r[j] * std::cos(w * t) + s.e_r[j] * std::sin(w * t);
        }
        for (std::size_t k = 0; k < s.g.size(); ++k)
            if (static_cast<double>(i) >= s.t_k[k]) v += s.g[k];
        d[i - 1] = v;
    }
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(length);
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(length);
    return {mean + s.mu_c, var + s.sigma2_n};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_CASE("exact moments match direct summation at 1e-10") {
    for (auto kind : {ResidualKind::Trend, ResidualKind::Seasonal, ResidualKind::Offsets}) {
        for (std::size_t l : {10u, 100u, 1000u}) {
            auto spec = default_oracle_spec(kind, l);
            const auto ex = residual_moments(spec, l, OracleMode::Exact);
            const auto dir = direct(spec, l);
            CHECK(rel(ex.mean, dir.mean) < 1e-10);
            CHECK(rel(ex.variance, dir.variance) < 1e-10);
            // Signal part alone, without the noise floor.
            spec.sigma2_n = 0.0;
            spec.mu_c = 0.0;
            const auto ex0 = residual_moments(spec, l, OracleMode::Exact);
            const auto dir0 = direct(spec, l);
            CHECK(std::abs(ex0.mean - dir0.mean) <= 1e-10 * std::max(1.0, std::abs(dir0.mean)));
            CHECK(rel(ex0.variance, dir0.variance) < 1e-10);
            const auto bf = brute_force_moments(spec, l);
            CHECK(rel(bf.variance, dir0.variance) < 1e-12);
        }
    }
}

TEST_CASE("trend examples") {
    ResidualSignalSpec s;
    s.sigma2_n = 2.0;
    const auto pure = trend_moments(s, 500, OracleMode::Exact);
    CHECK(pure.mean == 0.0);
    CHECK(pure.variance == doctest::Approx(2.0));
    s.a_r = 1.0;
    s.sigma2_n = 0.0;
    const auto m = trend_moments(s, 3650, OracleMode::Exact);
    CHECK(m.mean == doctest::Approx(1.0 / 365.25 * 3651.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("printed trend variance differs from the exact form only by the intercept and noise-mean terms") {
    ResidualSignalSpec s;
    s.a_r = 2.0;
    s.b_r = 0.0;
    s.sigma2_n = 1.0;
    CHECK(trend_variance_printed(s, 1000) == doctest::Approx(trend_moments(s, 1000, OracleMode::Exact).variance).epsilon(1e-12));
    s.b_r = 0.7;
    CHECK(trend_variance_printed(s, 1000) - trend_moments(s, 1000, OracleMode::Exact).variance ==
          doctest::Approx(0.49).epsilon(1e-9));
}

TEST_CASE("approximate trend mean converges relatively") {
    auto spec = default_oracle_spec(ResidualKind::Trend, 0);
    spec.b_r = 0.0;
    const auto err = [&](std::size_t l) {
        return rel(trend_moments(spec, l, OracleMode::Approx).mean, brute_force_moments(spec, l).mean);
    };
    CHECK(err(10000) < err(100));
    CHECK(err(10000) < 0.01);
}

TEST_CASE("Monte Carlo agrees with the exact moments") {
    for (auto kind : {ResidualKind::Trend, ResidualKind::Seasonal, ResidualKind::Offsets}) {
        const std::size_t l = 100, draws = 10000;
        const auto spec = default_oracle_spec(kind, l);
        const auto ex = residual_moments(spec, l, OracleMode::Exact);
        const auto mc = monte_carlo_moments(spec, l, draws, 17);
        const double se_mean = std::sqrt(spec.sigma2_n / static_cast<double>(l) / static_cast<double>(draws));
        const double se_var =
            std::sqrt(2.0 * spec.sigma2_n * spec.sigma2_n / static_cast<double>(l) / static_cast<double>(draws));
        CHECK(std::abs(mc.mean - ex.mean) < 5.0 * se_mean);
        CHECK(std::abs(mc.variance - ex.variance) < 5.0 * se_var + 0.02 * ex.variance);
    }
}

TEST_CASE("seasonal examples") {
    ResidualSignalSpec s;
    s.kind = ResidualKind::Seasonal;
    s.sigma2_n = 0.3;
    const auto none = seasonal_moments(s, 400, OracleMode::Exact);
    CHECK(none.mean == 0.0);
    CHECK(none.variance == doctest::Approx(0.3));

    s.sigma2_n = 0.0;
    s.c_r = {0.1};
    s.e_r = {0.0};
    s.period_days = 100.0;
    const auto full = seasonal_moments(s, 1000, OracleMode::Exact);
    CHECK(std::abs(full.variance - 0.005) < 1e-12);
    CHECK(std::abs(full.mean) < 1e-12);

    // The approximation omits the time-average factor of one half.
    s.period_days = 365.25;
    s.c_r = {0.4, 0.1};
    s.e_r = {0.2, 0.05};
    const auto ap = seasonal_moments(s, 3650, OracleMode::Approx);
    const auto bf = brute_force_moments(s, 3650);
    const double power = 0.16 + 0.01 + 0.04 + 0.0025;
    CHECK(ap.variance - bf.variance == doctest::Approx(power / 2.0).epsilon(0.02));
}

TEST_CASE("offset examples") {
    ResidualSignalSpec s;
    s.kind = ResidualKind::Offsets;
    s.sigma2_n = 1.0;
    const auto none = offset_moments(s, 100, OracleMode::Exact);
    CHECK(none.mean == 0.0);
    CHECK(none.variance == doctest::Approx(1.0));

    s.g = {0.5};
    s.t_k = {50.5};
    const auto one = offset_moments(s, 100, OracleMode::Exact);
    CHECK(one.mean == doctest::Approx(0.5 * 50.0 / 100.0).epsilon(1e-14));

    s.g = {0.4, -0.3, 0.2};
    s.t_k = {200.0, 500.0, 800.0};
    s.mu_c = 0.05;
    const auto small = offset_moments(s, 1000, OracleMode::Exact);
    CHECK(std::abs(small.mean - s.mu_c) < 0.3);
}

TEST_CASE("trend variance grows quadratically, the others stay bounded") {
    const auto ratio = [](ResidualKind k, std::size_t l) {
        const auto a = residual_moments(default_oracle_spec(k, l), l, OracleMode::Exact).variance;
        const auto b = residual_moments(default_oracle_spec(k, 2 * l), 2 * l, OracleMode::Exact).variance;
        return b / a;
    };
    const double r = ratio(ResidualKind::Trend, 100000);
    CHECK(r >= 3.6);
    CHECK(r <= 4.4);
    CHECK(std::abs(ratio(ResidualKind::Trend, 1000000) - 4.0) < std::abs(ratio(ResidualKind::Trend, 1000) - 4.0));
    for (std::size_t l : {1000u, 10000u, 100000u}) {
        CHECK(ratio(ResidualKind::Seasonal, l) < 1.1);
        CHECK(ratio(ResidualKind::Offsets, l) < 1.1);
    }
}

TEST_CASE("oracle table and CSV") {
    const auto rows = oracle_table({10, 100, 1000});
    REQUIRE(rows.size() == 9);
    for (const auto& r : rows) {
        CHECK(rel(r.exact.mean, r.brute.mean) < 1e-10);
        CHECK(rel(r.exact.variance, r.brute.variance) < 1e-10);
        CHECK(std::isnan(r.printed_variance) == (r.kind != ResidualKind::Trend));
    }
    std::istringstream in(oracle_csv(rows));
    std::string line;
    std::size_t count = 0;
    std::getline(in, line);
    const auto columns = std::count(line.begin(), line.end(), ',') + 1;
    CHECK(columns == 14);
    while (std::getline(in, line)) {
        ++count;
        CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
    }
    CHECK(count == 9);
}

TEST_CASE("invalid oracle inputs") {
    ResidualSignalSpec s;
    CHECK_THROWS_AS(trend_moments(s, 0, OracleMode::Exact), DomainError);
    s.kind = ResidualKind::Seasonal;
    s.c_r = {1.0};
    CHECK_THROWS_AS(seasonal_moments(s, 10, OracleMode::Exact), DomainError);
    CHECK_THROWS_AS(monte_carlo_moments(s, 1, 10, 1), DomainError);
}
