#include "levyts/error.hpp"
#include "levyts/mle.hpp"
#include "levyts/noise.hpp"
#include "levyts/stats.hpp"

#include <doctest.h>

#include <algorithm>

using namespace levyts;

TEST_CASE("flicker plus white keeps beta at one") {
    const auto s = gen_scenario(Scenario::B, 1.0, 1200, 3, NoiseKind::FlickerWhite);
    const auto r = fit_stochastic(s.series, NoiseKind::FlickerWhite, {});
    CHECK(r.stochastic.beta == 1.0);
    CHECK(r.stochastic.as_vector().size() == 2);
    CHECK(r.stochastic.converged);
}

TEST_CASE("scenario A white amplitude is recovered") {
    double acc = 0.0;
    const int runs = 6;
    for (int seed = 1; seed <= runs; ++seed) {
        const auto s = gen_scenario(Scenario::A, 1.1, 3650, static_cast<std::uint64_t>(seed));
        FitOptions opt;
        opt.compute_sigmas = false;
        acc += fit_stochastic(s.series, NoiseKind::PowerLawWhite, {}, opt).stochastic.a_wh;
    }
    const double mean = acc / runs;
    CHECK(mean >= 1.5);
    CHECK(mean <= 1.7);
}

TEST_CASE("pure white data collapses the coloured amplitude") {
    int collapsed = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto ts = gen_noise({NoiseKind::PowerLawWhite, 1.6, 0.0, 1.0}, 1500, seed);
        FitOptions opt;
        opt.compute_sigmas = false;
        const auto r = fit_stochastic(ts, NoiseKind::PowerLawWhite, {}, opt);
        if (r.stochastic.b_cl <= 0.05 * r.stochastic.a_wh) ++collapsed;
    }
    CHECK(collapsed >= 5);
}

TEST_CASE("trend estimate, residuals and covariance are consistent") {
    const auto s = gen_scenario(Scenario::B, 1.1, 1500, 21);
    const auto r = fit_stochastic(s.series, NoiseKind::PowerLawWhite, {});
    CHECK(r.residuals.size() == s.series.size());
    CHECK(r.functional_covariance.rows() == 6);
    const double sig = std::sqrt(r.functional_covariance(0, 0));
    CHECK(std::abs(r.functional.trend - s.truth.functional.trend) <= 4.0 * sig);
    // Residuals plus the fitted model give back the data.
    for (std::size_t i = 0; i < s.series.size(); i += 97) {
        const double model = r.functional.evaluate(s.series.epoch(i), s.series.first_epoch());
        CHECK(r.residuals.values()[i] + model == doctest::Approx(s.series.values()[i]).epsilon(1e-9));
    }
    if (r.stochastic.hessian_ok) {
        CHECK(r.stochastic.sigma_a_wh > 0.0);
        CHECK(r.stochastic.sigma_beta > 0.0);
    }
}

TEST_CASE("warm start reaches the same optimum") {
    const auto s = gen_scenario(Scenario::C, 1.1, 1500, 5);
    FitOptions opt;
    opt.compute_sigmas = false;
    const auto cold = fit_stochastic(s.series, NoiseKind::PowerLawWhite, {}, opt);
    opt.warm_start = cold.stochastic;
    const auto warm = fit_stochastic(s.series, NoiseKind::PowerLawWhite, {}, opt);
    CHECK(warm.stochastic.log_likelihood == doctest::Approx(cold.stochastic.log_likelihood).epsilon(1e-6));
}

TEST_CASE("short series are rejected") {
    const auto ts = gen_noise({NoiseKind::PowerLawWhite, 1.0, 0.0, 1.0}, 500, 1);
    CHECK_THROWS_AS(fit_stochastic(ts, NoiseKind::PowerLawWhite, {}), ValidationError);
}
