#include "levyts/error.hpp"
#include "levyts/functional.hpp"
#include "levyts/noise.hpp"
#include "levyts/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace levyts;

TEST_CASE("one harmonic, four epochs") {
    std::vector<double> e{51544, 51545, 51546, 51547};
    const auto d = build_design(e, e[0], 1, {});
    CHECK(d.matrix.rows() == 4);
    CHECK(d.matrix.cols() == 4);
    for (int i = 0; i < 4; ++i) CHECK(d.matrix(i, 1) == 1.0);
    CHECK(d.names == std::vector<std::string>{"trend", "intercept", "cos1", "sin1"});
}

TEST_CASE("harmonic columns match direct trigonometry") {
    std::vector<double> e;
    for (int i = 0; i < 400; i += 7) e.push_back(52000 + i);
    const auto d = build_design(e, 51544, 2, {});
    const double d1 = 2.0 * std::numbers::pi / 365.25;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double t = e[i] - 51544;
        const auto r = static_cast<Eigen::Index>(i);
        CHECK(d.matrix(r, 0) == doctest::Approx(t / 365.25));
        CHECK(d.matrix(r, 2) == doctest::Approx(std::cos(d1 * t)).epsilon(1e-12));
        CHECK(d.matrix(r, 3) == doctest::Approx(std::sin(d1 * t)).epsilon(1e-12));
        CHECK(d.matrix(r, 4) == doctest::Approx(std::cos(2 * d1 * t)).epsilon(1e-12));
        CHECK(d.matrix(r, 5) == doctest::Approx(std::sin(2 * d1 * t)).epsilon(1e-12));
    }
}

TEST_CASE("Heaviside offset column") {
    std::vector<double> e{100, 101, 102, 103, 104};
    OffsetCatalog cat;
    cat.epochs = {102.0};
    cat.magnitudes = {std::nullopt};
    const auto d = build_design(e, 100, 1, cat);
    const Eigen::VectorXd col = d.matrix.col(4);
    CHECK(col(0) == 0.0);
    CHECK(col(1) == 0.0);
    CHECK(col(2) == 1.0);
    CHECK(col(4) == 1.0);
    cat.epochs = {100.0};
    CHECK_THROWS_AS(build_design(e, 100, 1, cat), DomainError);
}

TEST_CASE("noiseless signal is recovered exactly with identity covariance") {
    FunctionalParams truth;
    truth.trend = 2.3;
    truth.intercept = -4.0;
    truth.cos_amp = {0.4, 0.1};
    truth.sin_amp = {0.2, -0.05};
    truth.offset_epochs = {52000.0};
    truth.offset_amp = {1.5};
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(truth.evaluate(51544 + i, 51544));
    const auto ts = TimeSeries::uniform(51544, 1.0, v);
    FunctionalConfig cfg;
    cfg.offsets.epochs = {52000.0};
    cfg.offsets.magnitudes = {std::nullopt};
    const auto fit = gls_fit(ts, Eigen::MatrixXd::Identity(1000, 1000), cfg);
    const auto a = truth.as_vector(), b = fit.params.as_vector();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
    for (double r : fit.residuals.values()) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("zero signal in white noise gives a trend within its formal sigma") {
    int inside = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto ts = gen_noise({NoiseKind::PowerLawWhite, 1.0, 0.0, 1.0}, 400, seed);
        const auto fit = gls_fit(ts, Eigen::MatrixXd::Identity(400, 400), {});
        if (std::abs(fit.params.trend) <= 3.0 * std::sqrt(fit.covariance(0, 0))) ++inside;
    }
    CHECK(inside >= 97);
}

TEST_CASE("unit trend in 1.6 mm white noise over ten years") {
    const auto noise = gen_noise({NoiseKind::PowerLawWhite, 1.6, 0.0, 1.0}, 3650, 5);
    std::vector<double> v(noise.values().begin(), noise.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += static_cast<double>(i) / 365.25;
    const auto ts = noise.with_values(v);
    const Eigen::MatrixXd c = 2.56 * Eigen::MatrixXd::Identity(3650, 3650);
    const auto fit = gls_fit(ts, c, {});
    CHECK(std::abs(fit.params.trend - 1.0) <= 3.0 * std::sqrt(fit.covariance(0, 0)));
}

TEST_CASE("collinear offsets are named") {
    std::vector<double> v(50, 1.0);
    const auto ts = TimeSeries::uniform(0, 1.0, v);
    FunctionalConfig cfg;
    cfg.n_harmonics = 1;
    cfg.offsets.epochs = {10.2, 10.5};
    cfg.offsets.magnitudes = {std::nullopt, std::nullopt};
    try {
        gls_fit(ts, Eigen::MatrixXd::Identity(50, 50), cfg);
        FAIL("expected rank deficiency");
    } catch (const RankDeficientError& e) {
        const auto& cols = e.columns();
        CHECK(std::find(cols.begin(), cols.end(), "offset1") != cols.end());
        CHECK(std::find(cols.begin(), cols.end(), "offset2") != cols.end());
    }
}

TEST_CASE("non positive definite covariance is rejected") {
    const auto ts = TimeSeries::uniform(0, 1.0, std::vector<double>(20, 0.0));
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(20, 20);
    c(3, 3) = -1.0;
    CHECK_THROWS_AS(gls_fit(ts, c, {}), NumericalError);
}
