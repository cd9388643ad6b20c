#include "levyts/error.hpp"
#include "levyts/noise.hpp"
#include "levyts/stable.hpp"
#include "levyts/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace levyts;

namespace {

// Periodogram slope in log-log over the lower half of the frequencies.
double spectral_slope(std::span<const double> x) {
    const auto pg = stats::periodogram(x);
    std::vector<double> lf, lp;
    const std::size_t n = x.size();
    for (std::size_t k = 1; k <= pg.size() / 2; ++k) {
        lf.push_back(std::log(static_cast<double>(k) / static_cast<double>(n)));
        lp.push_back(std::log(pg[k - 1]));
    }
    return stats::fit_line(lf, lp).slope;
}

std::vector<double> diffs(const TimeSeries& ts) {
    std::vector<double> d;
    for (std::size_t i = 1; i < ts.size(); ++i) d.push_back(ts.values()[i] - ts.values()[i - 1]);
    return d;
}

// Aggregated-variance Hurst estimate from increments.
double aggregated_variance_hurst(std::span<const double> x) {
    std::vector<double> lm, lv;
    for (std::size_t m = 4; m <= x.size() / 16; m *= 2) {
        std::vector<double> means;
        for (std::size_t b = 0; b + m <= x.size(); b += m) {
            double s = 0;
            for (std::size_t i = 0; i < m; ++i) s += x[b + i];
            means.push_back(s / static_cast<double>(m));
        }
        lm.push_back(std::log(static_cast<double>(m)));
        lv.push_back(std::log(stats::variance(means)));
    }
    return 1.0 + stats::fit_line(lm, lv).slope / 2.0;
}

} // namespace

TEST_CASE("pl_filter hand values") {
    CHECK(pl_filter(0.0, 5) == std::vector<double>{1, 0, 0, 0, 0});
    for (double h : pl_filter(2.0, 50)) CHECK(h == doctest::Approx(1.0).epsilon(1e-15));
    const auto h = pl_filter(1.0, 3);
    CHECK(h[0] == 1.0);
    CHECK(h[1] == 0.5);
    CHECK(h[2] == 0.375);
}

TEST_CASE("pl_filter matches the Gamma-ratio closed form") {
    // h_i = Gamma(i + beta/2) / (Gamma(i + 1) Gamma(beta/2))
    for (double beta : {0.5, 1.1, 1.5, 2.7}) {
        const auto h = pl_filter(beta, 200);
        for (std::size_t i = 0; i < h.size(); i += 17) {
            const double d = beta / 2.0;
            const double ref = std::exp(std::lgamma(static_cast<double>(i) + d) - std::lgamma(static_cast<double>(i) + 1.0) -
                                        std::lgamma(d));
            CHECK(h[i] == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("spectral index conversions") {
    const auto s = SpectralIndex::from_hurst(0.8);
    CHECK(s.beta() == doctest::Approx(0.6));
    CHECK(SpectralIndex::from_fractional_d(0.3).beta() == doctest::Approx(0.6));
    CHECK(s.fractional_d() == doctest::Approx(0.3));
    CHECK_THROWS_AS(SpectralIndex(3.5), DomainError);
}

TEST_CASE("covariance special cases") {
    std::vector<double> epochs{0, 1, 2, 3, 4, 5};
    SUBCASE("white only") {
        const auto c = pl_covariance({NoiseKind::PowerLawWhite, 1.6, 0.0, 1.3}, epochs, 1.0);
        CHECK(c.isApprox(2.56 * Eigen::MatrixXd::Identity(6, 6)));
    }
    SUBCASE("beta 0 coloured is white") {
        const auto c = pl_covariance({NoiseKind::PowerLawWhite, 0.0, 1.0, 0.0}, epochs, 1.0);
        CHECK(c.isApprox(Eigen::MatrixXd::Identity(6, 6)));
    }
    SUBCASE("beta 2 gives Brownian covariance") {
        const auto c = pl_covariance({NoiseKind::PowerLawWhite, 0.0, 1.0, 2.0}, epochs, 1.0);
        const double s = std::pow(colored_step_scale(2.0, 1.0), 2);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) CHECK(c(i, j) == doctest::Approx(s * (std::min(i, j) + 1)));
    }
    std::vector<double> uneven{0, 1, 2.5};
    CHECK_THROWS_AS(pl_covariance({NoiseKind::PowerLawWhite, 1.0, 1.0, 1.0}, uneven, 1.0), DomainError);
}

TEST_CASE("white-only draws have the requested spread and are reproducible") {
    const NoiseModelSpec spec{NoiseKind::PowerLawWhite, 1.6, 0.0, 1.0};
    const auto a = gen_noise(spec, 3650, 11);
    CHECK(stats::stddev(a.values()) == doctest::Approx(1.6).epsilon(0.05));
    const auto b = gen_noise(spec, 3650, 11);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a.values()[i] == b.values()[i]);
}

TEST_CASE("flicker component has a -1 periodogram slope") {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ts = gen_noise({NoiseKind::FlickerWhite, 0.0, 1.0, 1.0}, 1 << 14, seed);
        acc += spectral_slope(ts.values());
    }
    CHECK(acc / 5.0 == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("scenario bands") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto a = gen_scenario(Scenario::A, 1.1, 800, seed);
        CHECK(a.truth.stochastic.b_cl < 0.1);
        CHECK(a.truth.stochastic.a_wh == 1.6);
        CHECK(a.truth.functional.trend >= 1.0);
        CHECK(a.truth.functional.trend <= 3.0);
        const auto c = gen_scenario(Scenario::C, 1.1, 800, seed);
        CHECK(c.truth.stochastic.b_cl >= 1.0);
        CHECK(c.truth.stochastic.b_cl <= 3.0);
        const auto b = gen_scenario(Scenario::B, 1.5, 800, seed);
        CHECK(b.truth.stochastic.b_cl >= 0.1);
        CHECK(b.truth.stochastic.b_cl <= 1.0);
        CHECK(b.truth.stochastic.beta == 1.5);
    }
    CHECK(parse_scenario("C") == Scenario::C);
    CHECK_THROWS_AS(parse_scenario("D"), ValidationError);
}

TEST_CASE("fLsm with alpha 2 and H 0.5 has Gaussian increments") {
    // Jarque-Bera 1% critical value for 2 degrees of freedom.
    int pass = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto ts = gen_flsm(2.0, 0.5, 2000, seed);
        if (stats::jarque_bera(diffs(ts)) < 9.21) ++pass;
    }
    CHECK(pass >= 17);
}

TEST_CASE("fLsm with alpha 2 and H 0.8 is persistent") {
    const auto ts = gen_flsm(2.0, 0.8, 1 << 14, 3, 1 << 15);
    const auto d = diffs(ts);
    const double h = aggregated_variance_hurst(d);
    CHECK(h >= 0.7);
    CHECK(h <= 0.9);
}

TEST_CASE("fLsm with H = 1/alpha has stable increments") {
    const auto ts = gen_flsm(1.5, 1.0 / 1.5, 5000, 8);
    const auto fit = fit_stable_ml(diffs(ts));
    CHECK(fit.params.alpha >= 1.35);
    CHECK(fit.params.alpha <= 1.65);
}
