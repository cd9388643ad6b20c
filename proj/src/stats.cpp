#include "levyts/stats.hpp"

#include "levyts/error.hpp"
#include "levyts/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levyts::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("variance needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

namespace {
// Central moments m2, m3, m4 with 1/n normalization.
void central_moments(std::span<const double> x, double& m2, double& m3, double& m4) {
    const double m = mean(x);
    m2 = m3 = m4 = 0.0;
    for (double v : x) {
        const double d = v - m, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
}
} // namespace

double skewness(std::span<const double> x) {
    double m2, m3, m4;
    central_moments(x, m2, m3, m4);
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

double excess_kurtosis(std::span<const double> x) {
    double m2, m3, m4;
    central_moments(x, m2, m3, m4);
    return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
}

double quantile_sorted(std::span<const double> s, double prob) {
    if (s.empty()) throw DomainError("quantile of empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile probability outside [0,1]");
    const double h = (static_cast<double>(s.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double quantile(std::span<const double> x, double prob) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return quantile_sorted(s, prob);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double mad_sigma(std::span<const double> x) {
    const double med = median(x);
    std::vector<double> dev(x.size());
    std::transform(x.begin(), x.end(), dev.begin(), [med](double v) { return std::abs(v - med); });
    return 1.482602218505602 * median(dev);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson needs two equal-length samples");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line needs two equal-length samples");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double jarque_bera(std::span<const double> x) {
    const double s = skewness(x), k = excess_kurtosis(x);
    return static_cast<double>(x.size()) / 6.0 * (s * s + k * k / 4.0);
}

std::vector<double> periodogram(std::span<const double> x) {
    const std::size_t n = x.size();
    const double m = mean(x);
    std::vector<fft::cd> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i] - m;
    fft::transform(buf, true);
    std::vector<double> p(n / 2);
    for (std::size_t k = 1; k <= n / 2; ++k) p[k - 1] = std::norm(buf[k]) / static_cast<double>(n);
    return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

} // namespace levyts::stats
