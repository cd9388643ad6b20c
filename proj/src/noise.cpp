#include "levyts/noise.hpp"

#include "levyts/error.hpp"
#include "levyts/fft.hpp"
#include "levyts/stable.hpp"
#include "levyts/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace levyts {

SpectralIndex::SpectralIndex(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta <= 3.0)) throw DomainError("spectral index beta must lie in [0, 3]");
}

std::string to_string(NoiseKind kind) {
    return kind == NoiseKind::FlickerWhite ? "fn+wn" : "pl+wn";
}

NoiseKind parse_noise_kind(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "pl+wn") return NoiseKind::PowerLawWhite;
    if (t == "fn+wn") return NoiseKind::FlickerWhite;
    throw ValidationError("unknown noise model '" + text + "' (expected pl+wn or fn+wn)");
}

void NoiseModelSpec::validate() const {
    if (!(a_wh >= 0.0) || !(b_cl >= 0.0)) throw DomainError("noise amplitudes must be non-negative");
    if (a_wh == 0.0 && b_cl == 0.0) throw DomainError("white and coloured amplitudes cannot both be zero");
    SpectralIndex{effective_beta()};
}

std::vector<double> pl_filter(double beta, std::size_t length) {
    std::vector<double> h(length);
    if (length == 0) return h;
    h[0] = 1.0;
    for (std::size_t i = 1; i < length; ++i)
        h[i] = h[i - 1] * (beta / 2.0 + static_cast<double>(i) - 1.0) / static_cast<double>(i);
    return h;
}

double colored_step_scale(double beta, double dt_days) {
    return std::pow(dt_days / kDaysPerYear, beta / 4.0);
}

namespace {

Eigen::MatrixXd grid_covariance(const NoiseModelSpec& spec, std::span<const std::size_t> index, double dt) {
    spec.validate();
    const double beta = spec.effective_beta();
    const std::size_t n = index.back() + 1;
    const auto h = pl_filter(beta, n);
    const double s = colored_step_scale(beta, dt);
    const double cw = spec.a_wh * spec.a_wh;
    const double cc = spec.b_cl * spec.b_cl * s * s;

    // J_ij = J_{i-1,j-1} + h_i h_j over the full grid, then pick observed rows/cols.
    Eigen::MatrixXd j(n, n);
    for (std::size_t c = 0; c < n; ++c) j(0, c) = h[0] * h[c];
    for (std::size_t r = 1; r < n; ++r) {
        j(r, 0) = h[r] * h[0];
        for (std::size_t c = 1; c < n; ++c) j(r, c) = j(r - 1, c - 1) + h[r] * h[c];
    }
    const std::size_t m = index.size();
    Eigen::MatrixXd out(m, m);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t r = 0; r < m; ++r) out(r, c) = cc * j(index[r], index[c]);
    out.diagonal().array() += cw;
    return out;
}

} // namespace

Eigen::MatrixXd pl_covariance(const NoiseModelSpec& spec, const TimeSeries& ts) {
    return grid_covariance(spec, ts.grid_index(), ts.dt());
}

Eigen::MatrixXd pl_covariance(const NoiseModelSpec& spec, std::span<const double> epochs, double dt) {
    if (epochs.empty()) throw DomainError("no epochs");
    if (!(dt > 0.0)) throw DomainError("sampling interval must be positive");
    std::vector<std::size_t> index(epochs.size());
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const double g = (epochs[i] - epochs[0]) / dt;
        const double r = std::round(g);
        if (std::abs(g - r) > 1e-4 || r < 0 || (i > 0 && r <= static_cast<double>(index[i - 1])))
            throw DomainError("epochs are not on a uniform grid");
        index[i] = static_cast<std::size_t>(r);
    }
    return grid_covariance(spec, index, dt);
}

TimeSeries gen_noise(const NoiseModelSpec& spec, std::size_t length, std::uint64_t seed, double dt,
                     double first_epoch) {
    spec.validate();
    if (length < 2) throw DomainError("series length must be at least 2");
    const double beta = spec.effective_beta();
    std::normal_distribution<double> normal;
    std::mt19937_64 white_rng(stats::derive_seed(seed, 0));
    std::mt19937_64 colour_rng(stats::derive_seed(seed, 1));
    std::vector<double> w(length), e(length);
    for (auto& v : w) v = normal(white_rng);
    for (auto& v : e) v = normal(colour_rng);
    const auto h = pl_filter(beta, length);
    const auto coloured = fft::causal_convolve(h, e);
    const double s = spec.b_cl * colored_step_scale(beta, dt);
    std::vector<double> x(length);
    for (std::size_t i = 0; i < length; ++i) x[i] = spec.a_wh * w[i] + s * coloured[i];
    return TimeSeries::uniform(first_epoch, dt, std::move(x));
}

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text) {
    if (text == "A" || text == "a") return Scenario::A;
    if (text == "B" || text == "b") return Scenario::B;
    if (text == "C" || text == "c") return Scenario::C;
    throw ValidationError("unknown scenario '" + text + "' (expected A, B or C)");
}

ScenarioSample gen_scenario(Scenario scenario, double beta, std::size_t length, std::uint64_t seed,
                            NoiseKind kind, int n_harmonics) {
    if (n_harmonics < 1 || n_harmonics > 7) throw DomainError("harmonic count must be in [1, 7]");
    double lo = 0.01, hi = 0.1;
    if (scenario == Scenario::B) lo = 0.1, hi = 1.0;
    if (scenario == Scenario::C) lo = 1.0, hi = 3.0;

    std::mt19937_64 rng(stats::derive_seed(seed, 100));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScenarioTruth truth;
    truth.scenario = scenario;
    truth.functional.trend = 1.0 + 2.0 * unit(rng);
    truth.functional.intercept = 0.0;
    truth.functional.cos_amp.assign(static_cast<std::size_t>(n_harmonics), 0.0);
    truth.functional.sin_amp.assign(static_cast<std::size_t>(n_harmonics), 0.0);
    truth.functional.cos_amp[0] = 0.4;
    truth.functional.sin_amp[0] = 0.2;
    truth.stochastic.kind = kind;
    truth.stochastic.a_wh = 1.6;
    truth.stochastic.b_cl = lo + (hi - lo) * unit(rng);
    truth.stochastic.beta = kind == NoiseKind::FlickerWhite ? 1.0 : beta;

    auto noise = gen_noise(truth.stochastic, length, stats::derive_seed(seed, 101));
    std::vector<double> x(noise.values().begin(), noise.values().end());
    const double origin = noise.first_epoch();
    for (std::size_t i = 0; i < length; ++i) x[i] += truth.functional.evaluate(noise.epoch(i), origin);
    return {noise.with_values(std::move(x)), truth};
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stability index alpha must lie in (0, 2]");
}

} // namespace

TimeSeries gen_stable_motion(double alpha, double skew, std::size_t length, std::uint64_t seed) {
    check_alpha(alpha);
    if (!(std::abs(skew) <= 1.0)) throw DomainError("skewness k must lie in [-1, 1]");
    if (length < 2) throw DomainError("series length must be at least 2");
    std::mt19937_64 rng(seed);
    std::vector<double> x(length);
    double acc = 0.0;
    for (auto& v : x) {
        acc += sample_stable(rng, alpha, skew);
        v = acc;
    }
    return TimeSeries::uniform(kDefaultStartMjd, 1.0, std::move(x));
}

TimeSeries gen_flsm(double alpha, double hurst, std::size_t length, std::uint64_t seed, std::size_t past) {
    check_alpha(alpha);
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst exponent must lie in (0, 1)");
    if (length < 2) throw DomainError("series length must be at least 2");
    const double gamma = hurst - 1.0 / alpha;
    if (gamma == 0.0) return gen_stable_motion(alpha, 0.0, length, seed);
    if (past == 0) past = 10 * length;

    // Increments for j = 0..L-1 are drawn first so the present-time stream matches
    // gen_stable_motion; the past j = -1..-M follows.
    std::mt19937_64 rng(seed);
    const std::size_t total = past + length + 1;
    std::vector<double> z(total, 0.0);
    for (std::size_t j = 0; j < length; ++j) z[past + j] = sample_stable(rng, alpha, 0.0);
    for (std::size_t j = 1; j <= past; ++j) z[past - j] = sample_stable(rng, alpha, 0.0);

    std::vector<double> kernel(total, 0.0);
    for (std::size_t m = 1; m < total; ++m) kernel[m] = std::pow(static_cast<double>(m) - 0.5, gamma);
    const auto y = fft::causal_convolve(kernel, z);

    double anchor = 0.0;
    for (std::size_t s = 0; s < past; ++s) anchor += kernel[past - s] * z[s];
    std::vector<double> x(length);
    for (std::size_t n = 1; n <= length; ++n) x[n - 1] = y[past + n] - anchor;
    return TimeSeries::uniform(kDefaultStartMjd, 1.0, std::move(x));
}

} // namespace levyts
