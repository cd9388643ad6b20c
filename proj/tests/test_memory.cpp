#include "levyts/error.hpp"
#include "levyts/memory.hpp"
#include "levyts/noise.hpp"
#include "levyts/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace levyts;

namespace {

std::vector<double> arma_sample(double phi, double psi, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    double prev = 0.0, eprev = 0.0;
    for (std::size_t burn = 0; burn < 500; ++burn) {
        const double e = nd(rng);
        prev = phi * prev + e + psi * eprev;
        eprev = e;
    }
    for (auto& v : x) {
        const double e = nd(rng);
        v = phi * prev + e + psi * eprev;
        prev = v;
        eprev = e;
    }
    return x;
}

std::vector<double> white(std::size_t n, std::uint64_t seed) { return arma_sample(0.0, 0.0, n, seed); }

} // namespace

TEST_CASE("white noise autocovariance") {
    const auto g = arfima_autocov({}, {}, 0.0, 1.0, 5);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(std::abs(g[k]) < 1e-9);
}

TEST_CASE("AR(1) autocovariance closed form") {
    const std::vector<double> phi{0.5};
    const auto g = arfima_autocov(phi, {}, 0.0, 2.0, 12);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(g[k] == doctest::Approx(2.0 * std::pow(0.5, static_cast<double>(k)) / 0.75).epsilon(1e-8));
}

TEST_CASE("fractional noise autocorrelation matches the Gamma ratio") {
    const double d = 0.2;
    const auto g = arfima_autocov({}, {}, d, 1.0, 10);
    CHECK(g[0] == doctest::Approx(std::tgamma(1 - 2 * d) / std::pow(std::tgamma(1 - d), 2)).epsilon(1e-8));
    for (std::size_t k = 1; k <= 10; ++k) {
        const double kk = static_cast<double>(k);
        const double rho = std::exp(std::lgamma(kk + d) + std::lgamma(1 - d) - std::lgamma(kk - d + 1) - std::lgamma(d));
        CHECK(std::abs(g[k] / g[0] - rho) < 1e-6);
    }
}

TEST_CASE("autocovariance domain checks") {
    const std::vector<double> unit{1.0};
    CHECK_THROWS_AS(arfima_autocov(unit, {}, 0.0, 1.0, 3), DomainError);
    CHECK_THROWS_AS(arfima_autocov({}, {}, 0.5, 1.0, 3), DomainError);
    CHECK_THROWS_AS(arfima_autocov({}, {}, 0.1, 0.0, 3), DomainError);
}

TEST_CASE("Kalman likelihood equals the Durbin-Levinson likelihood") {
    const auto x = arma_sample(0.6, 0.3, 600, 5);
    const std::vector<double> phi{0.6}, psi{0.3};
    const auto g = arfima_autocov(phi, psi, 0.0, 1.0, x.size());
    const auto k = arma_likelihood(x, phi, psi, 1.0);
    const auto l = levinson_likelihood(x, g);
    CHECK(k.log_likelihood == doctest::Approx(l.log_likelihood).epsilon(1e-8));

    const std::vector<double> phi2{0.5, -0.3}, psi2{0.4, 0.2};
    const auto g2 = arfima_autocov(phi2, psi2, 0.0, 1.0, x.size());
    CHECK(arma_likelihood(x, phi2, psi2, 1.0).log_likelihood ==
          doctest::Approx(levinson_likelihood(x, g2).log_likelihood).epsilon(1e-8));
}

TEST_CASE("fractional difference basics") {
    const std::vector<double> x{1.0, 3.0, 2.0, 5.0};
    CHECK(frac_diff(x, 0.0) == x);
    const auto d1 = frac_diff(x, 1.0);
    CHECK(d1[0] == doctest::Approx(1.0));
    CHECK(d1[1] == doctest::Approx(2.0));
    CHECK(d1[3] == doctest::Approx(3.0));
    const auto y = white(300, 2);
    const auto back = frac_diff(frac_diff(y, 0.37), -0.37);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-10));
}

TEST_CASE("partial autocorrelation map gives stationary coefficients") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> z(static_cast<std::size_t>(1 + rep % 5));
        for (auto& v : z) v = nd(rng);
        const auto c = pacf_to_coeffs(z);
        CHECK(min_root_modulus(c) > 1.0);
        const auto p = coeffs_to_pacf(c);
        for (std::size_t i = 0; i < z.size(); ++i) CHECK(p[i] == doctest::Approx(z[i]).epsilon(1e-7));
    }
    CHECK(std::isinf(min_root_modulus({})));
    const std::vector<double> ar1{0.5};
    CHECK(min_root_modulus(ar1) == doctest::Approx(2.0));
}

TEST_CASE("AR(1) recovery") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = arma_sample(0.5, 0.0, 4096, seed);
        const auto f = fit_arma(x, 1, 0);
        REQUIRE(f.phi.size() == 1);
        CHECK(f.phi[0] >= 0.45);
        CHECK(f.phi[0] <= 0.55);
        CHECK(f.bic == doctest::Approx(-2.0 * f.log_likelihood + 2.0 * std::log(4096.0)));
    }
}

TEST_CASE("ARMA at d = 0 is the FARIMA model at d = 0") {
    const auto x = arma_sample(0.4, 0.2, 800, 9);
    const auto a = fit_arma(x, 1, 1);
    const auto f = fit_arma(x, 1, 1, 0.0);
    CHECK(std::abs(a.log_likelihood - f.log_likelihood) < 1e-8);
}

TEST_CASE("white noise innovation variance is the sample variance") {
    const auto x = white(2000, 4);
    const auto f = fit_arma(x, 0, 0);
    CHECK(f.sigma2 == doctest::Approx(stats::variance(x)).epsilon(0.02));
    CHECK(f.fit_error == doctest::Approx(stats::stddev(x)).epsilon(0.02));
}

TEST_CASE("BIC picks the white model for white noise") {
    int hits = 0;
    const int runs = 20;
    for (int seed = 1; seed <= runs; ++seed) {
        const auto x = white(1000, static_cast<std::uint64_t>(seed) + 100);
        const auto sel = select_bic(x, 0.2, 1, 2);
        if (sel.winner == "ARMA" && sel.arma.p == 0 && sel.arma.q == 0) ++hits;
    }
    CHECK(hits >= 18);
}

TEST_CASE("nested cells never lose likelihood") {
    const auto x = arma_sample(0.7, -0.3, 1500, 12);
    const auto sel = select_bic(x, 0.3, 1, 3);
    auto at = [&](const std::vector<ArmaFit>& g, int p, int q) { return g[static_cast<std::size_t>(p * 4 + q)]; };
    for (const auto* grid : {&sel.arma_grid, &sel.farima_grid})
        for (int p = 0; p <= 3; ++p)
            for (int q = 0; q <= 3; ++q) {
                if (p > 0) CHECK(at(*grid, p, q).log_likelihood >= at(*grid, p - 1, q).log_likelihood - 1e-7);
                if (q > 0) CHECK(at(*grid, p, q).log_likelihood >= at(*grid, p, q - 1).log_likelihood - 1e-7);
            }
}

TEST_CASE("identical branches tie towards ARMA") {
    const auto x = white(800, 6);
    const auto sel = select_bic(x, 0.0, 1, 1);
    CHECK(sel.winner == "ARMA");
}

TEST_CASE("long memory favours the FARIMA branch") {
    int wins = 0;
    const int runs = 8;
    for (int seed = 1; seed <= runs; ++seed) {
        const auto ts = gen_noise({NoiseKind::PowerLawWhite, 0.0, 1.0, 0.54}, 2000, static_cast<std::uint64_t>(seed));
        const auto v = ts.values();
        const auto sel = select_bic(std::vector<double>(v.begin(), v.end()), 0.27, 1, 2);
        if (sel.winner == "FARIMA") ++wins;
    }
    CHECK(wins > runs / 2);
}
