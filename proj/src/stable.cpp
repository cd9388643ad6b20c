#include "levyts/stable.hpp"

#include "levyts/error.hpp"
#include "levyts/fft.hpp"
#include "levyts/optimize.hpp"
#include "levyts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace levyts {

namespace {

constexpr double kPi = std::numbers::pi;
// -ln(1e-12): |phi(u)| = exp(-u^alpha) drops below 1e-12 at u^alpha = this.
constexpr double kCutoffExponent = 27.631021115928547;

double skew_tan(double alpha) { return alpha == 2.0 ? 0.0 : std::tan(kPi * alpha / 2.0); }

} // namespace

void StableParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stability index alpha must lie in (0, 2]");
    if (!(std::abs(k) <= 1.0)) throw DomainError("skewness k must lie in [-1, 1]");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale must be positive");
    if (!std::isfinite(location)) throw DomainError("location must be finite");
}

std::complex<double> stable_charfn(double u, double alpha, double k) {
    if (u == 0.0) return 1.0;
    const double sg = u > 0 ? 1.0 : -1.0;
    const double au = std::abs(u);
    if (alpha == 1.0) return std::exp(std::complex<double>(-au, -au * k * (2.0 / kPi) * sg));
    const double m = std::pow(au, alpha);
    return std::exp(std::complex<double>(-m, m * k * skew_tan(alpha) * sg));
}

namespace {

// f(z0 + i dz), i < count, for the standard law by trapezoidal inversion over
// `freqs` points up to the cutoff frequency, evaluated with Bluestein's chirp-z.
std::vector<double> standard_density(double z0, double dz, std::size_t count, double alpha, double k,
                                     std::size_t freqs) {
    const double umax = std::pow(kCutoffExponent, 1.0 / alpha);
    const double du = umax / static_cast<double>(freqs - 1);
    const std::size_t size = fft::next_pow2(freqs + count - 1);
    const double theta = du * dz;

    auto chirp = [theta](std::size_t j) {
        const double jj = static_cast<double>(j);
        return std::polar(1.0, 0.5 * theta * jj * jj);
    };
    std::vector<fft::cd> a(size, 0.0), b(size, 0.0);
    for (std::size_t m = 0; m < freqs; ++m) {
        const double u = du * static_cast<double>(m);
        const double w = (m == 0 || m + 1 == freqs) ? 0.5 : 1.0;
        a[m] = w * stable_charfn(u, alpha, k) * std::polar(1.0, -u * z0) * std::conj(chirp(m));
    }
    for (std::size_t j = 0; j < count; ++j) b[j] = chirp(j);
    for (std::size_t j = 1; j < freqs; ++j) b[size - j] = chirp(j);
    fft::transform(a, true);
    fft::transform(b, true);
    for (std::size_t i = 0; i < size; ++i) a[i] *= b[i];
    fft::transform(a, false);

    std::vector<double> out(count);
    const double norm = du / kPi / static_cast<double>(size);
    for (std::size_t i = 0; i < count; ++i) out[i] = std::max(0.0, norm * (std::conj(chirp(i)) * a[i]).real());
    return out;
}

} // namespace

std::vector<double> stable_pdf(const UniformGrid& grid, const StableParams& params) {
    params.validate();
    if (params.alpha < 0.3) throw DomainError("density inversion is unreliable for alpha < 0.3");
    if (grid.count == 0) return {};
    if (!(grid.step > 0.0) && grid.count > 1) throw DomainError("grid step must be positive");
    const double z0 = (grid.start - params.location) / params.scale;
    const double dz = (grid.count > 1 ? grid.step : 1.0) / params.scale;
    auto f = standard_density(z0, dz, grid.count, params.alpha, params.k, std::size_t{1} << 14);
    for (auto& v : f) v /= params.scale;
    return f;
}

StableDensity::StableDensity(const StableParams& params, std::size_t grid_points, std::size_t frequencies)
    : params_(params) {
    params_.validate();
    if (params_.alpha < 0.3) throw DomainError("density inversion is unreliable for alpha < 0.3");
    if (grid_points < 16) throw DomainError("density grid too small");
    constexpr double half = 40.0;
    z0_ = -half;
    dz_ = 2.0 * half / static_cast<double>(grid_points - 1);
    // Alias period must stay well beyond the tabulated span.
    const double umax = std::pow(kCutoffExponent, 1.0 / params_.alpha);
    const double needed = umax * 10.0 * half / (2.0 * kPi);
    if (static_cast<double>(frequencies) < needed)
        frequencies = fft::next_pow2(static_cast<std::size_t>(needed) + 1);
    values_ = standard_density(z0_, dz_, grid_points, params_.alpha, params_.k, frequencies);
    const double a = params_.alpha;
    tail_coef_ = a < 2.0 ? a * std::tgamma(a) * std::sin(kPi * a / 2.0) / kPi : 0.0;
}

double StableDensity::standard(double z) const {
    const double pos = (z - z0_) / dz_;
    const auto n = static_cast<double>(values_.size());
    if (pos >= 1.0 && pos <= n - 2.0) {
        auto i = static_cast<std::size_t>(pos);
        if (i >= values_.size() - 2) i = values_.size() - 3;
        const double t = pos - static_cast<double>(i);
        const double p0 = values_[i - 1], p1 = values_[i], p2 = values_[i + 1], p3 = values_[i + 2];
        // Catmull-Rom cubic.
        const double v = p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
        return std::max(v, 0.0);
    }
    if (pos >= 0.0 && pos <= n - 1.0) {
        const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
        const double t = pos - static_cast<double>(i);
        return (1.0 - t) * values_[i] + t * values_[i + 1];
    }
    const double a = params_.alpha;
    if (a == 1.0) {
        const double s = z + 2.0 * params_.k / kPi;
        return 1.0 / (kPi * (1.0 + s * s));
    }
    const double side = z > 0 ? 1.0 + params_.k : 1.0 - params_.k;
    return tail_coef_ * side * std::pow(std::abs(z), -a - 1.0);
}

double StableDensity::operator()(double x) const {
    return standard((x - params_.location) / params_.scale) / params_.scale;
}

double StableDensity::log_pdf(double x) const { return std::log(std::max((*this)(x), 1e-300)); }

double sample_stable(std::mt19937_64& rng, double alpha, double k) {
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    std::exponential_distribution<double> expo(1.0);
    double v = angle(rng);
    while (v == -kPi / 2.0) v = angle(rng);
    if (alpha == 1.0) return std::tan(v) - 2.0 * k / kPi;
    const double w = expo(rng);
    const double t = k * skew_tan(alpha);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    const double ab = alpha * (v + b);
    return s * std::sin(ab) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - ab) / w, (1.0 - alpha) / alpha);
}

namespace {

struct QuantileTable {
    std::vector<double> alpha;
    std::vector<double> nu;  // (q95 - q05) / (q75 - q25)
    std::vector<double> iqr; // q75 - q25 of the standard symmetric law
};

// Symmetric standard CDF by F(z) = 1/2 + (1/pi) int_0^inf exp(-u^a) sin(uz)/u du.
double symmetric_cdf(double z, const std::vector<double>& u, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * std::sin(u[j] * z);
    return 0.5 + s / kPi;
}

const QuantileTable& quantile_table() {
    static const QuantileTable table = [] {
        QuantileTable t;
        for (int i = 0; i <= 12; ++i) {
            const double a = 0.8 + 0.1 * i;
            const double umax = std::pow(kCutoffExponent, 1.0 / a);
            constexpr std::size_t n = 8192;
            const double du = umax / n;
            std::vector<double> u(n), w(n);
            for (std::size_t j = 0; j < n; ++j) {
                u[j] = du * (static_cast<double>(j) + 0.5);
                w[j] = du * std::exp(-std::pow(u[j], a)) / u[j];
            }
            auto quant = [&](double p) {
                double lo = 0.0, hi = 1.0;
                while (symmetric_cdf(hi, u, w) < p) hi *= 2.0;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (symmetric_cdf(mid, u, w) < p ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            };
            const double q75 = quant(0.75), q95 = quant(0.95);
            t.alpha.push_back(a);
            t.nu.push_back(q95 / q75);
            t.iqr.push_back(2.0 * q75);
        }
        return t;
    }();
    return table;
}

} // namespace

StableParams mcculloch_estimate(std::span<const double> sample) {
    if (sample.size() < 20) throw DomainError("too few values for a quantile estimate");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double q05 = stats::quantile_sorted(x, 0.05), q25 = stats::quantile_sorted(x, 0.25);
    const double q50 = stats::quantile_sorted(x, 0.5), q75 = stats::quantile_sorted(x, 0.75);
    const double q95 = stats::quantile_sorted(x, 0.95);
    if (!(q75 > q25)) throw DomainError("sample has no spread");
    const double nu = (q95 - q05) / (q75 - q25);
    const double nu_skew = (q95 + q05 - 2.0 * q50) / (q95 - q05);

    const auto& t = quantile_table();
    // nu decreases with alpha; table runs from alpha 0.8 upwards.
    double alpha = 2.0, iqr = t.iqr.back();
    if (nu >= t.nu.front()) {
        alpha = t.alpha.front();
        iqr = t.iqr.front();
    } else {
        for (std::size_t i = 0; i + 1 < t.alpha.size(); ++i) {
            if (nu <= t.nu[i] && nu >= t.nu[i + 1]) {
                const double f = (t.nu[i] - nu) / (t.nu[i] - t.nu[i + 1]);
                alpha = t.alpha[i] + f * (t.alpha[i + 1] - t.alpha[i]);
                iqr = t.iqr[i] + f * (t.iqr[i + 1] - t.iqr[i]);
                break;
            }
        }
    }
    StableParams p;
    p.alpha = alpha;
    p.k = std::abs(nu_skew) < 0.02 ? 0.0 : std::clamp(4.0 * nu_skew, -0.8, 0.8);
    p.scale = (q75 - q25) / iqr;
    p.location = q50;
    return p;
}

StableFitResult fit_stable_ml(std::span<const double> sample) {
    if (sample.size() < 200) throw DomainError("stable fit needs at least 200 values");
    for (double v : sample)
        if (!std::isfinite(v)) throw DomainError("sample contains non-finite values");
    const double med = stats::median(sample);
    const double spread = stats::quantile(sample, 0.75) - stats::quantile(sample, 0.25);
    if (!(spread > 0.0)) throw DomainError("sample has no spread");

    // Work on a standardized copy; the fit is mapped back afterwards.
    const double unit = spread / 1.3489795003921634;
    std::vector<double> z(sample.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (sample[i] - med) / unit;

    const auto init = mcculloch_estimate(z);
    auto decode = [](const std::vector<double>& v) {
        StableParams p;
        p.alpha = 1.2 + 0.8 * std::sin(v[0]);
        p.k = std::sin(v[1]);
        p.scale = std::exp(v[2]);
        p.location = v[3];
        return p;
    };
    const double s0 = std::clamp((init.alpha - 1.2) / 0.8, -1.0, 1.0);
    std::vector<double> x0{std::asin(s0), std::asin(std::clamp(init.k, -0.99, 0.99)), std::log(init.scale),
                           init.location};
    if (s0 >= 1.0) x0[0] = kPi / 2.0 - 0.1;

    int evals = 0;
    auto nll = [&](const std::vector<double>& v) {
        ++evals;
        const auto p = decode(v);
        if (p.alpha < 0.4) return 1e300;
        const StableDensity f(p, 2048, 2048);
        double s = 0.0;
        for (double x : z) s -= f.log_pdf(x);
        return s;
    };
    MinimizeOptions opts;
    opts.initial_step = 0.3;
    opts.size_tol = 1e-4;
    opts.value_tol = 1e-8;
    auto best = minimize_nelder_mead(nll, x0, opts);
    opts.initial_step = 0.1;
    auto again = minimize_nelder_mead(nll, best.x, opts);
    if (again.value <= best.value) best = again;

    StableFitResult out;
    out.params = decode(best.x);
    out.params.scale *= unit;
    out.params.location = out.params.location * unit + med;
    out.log_likelihood = -best.value - static_cast<double>(z.size()) * std::log(unit);
    out.converged = best.converged;
    out.evaluations = evals;
    return out;
}

double NormalFit::pdf(double x) const {
    const double r = (x - mean) / std;
    return std::exp(-0.5 * r * r) / (std * std::sqrt(2.0 * kPi));
}

NormalFit fit_normal(std::span<const double> sample) {
    if (sample.size() < 2) throw DomainError("normal fit needs at least two values");
    NormalFit f;
    f.mean = stats::mean(sample);
    f.std = stats::stddev(sample);
    if (!(f.std > 0.0)) throw DomainError("sample has no spread");
    return f;
}

double dist_correlation(std::span<const double> sample, const std::function<double(double)>& pdf) {
    const std::size_t n = sample.size();
    if (n < 200) throw DomainError("distribution correlation needs at least 200 values");
    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    const double iqr = stats::quantile(sample, 0.75) - stats::quantile(sample, 0.25);
    if (!(iqr > 0.0)) throw DomainError("sample has no spread");
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    constexpr std::size_t kMaxBins = 1000;
    const double span = *mx - *mn;
    const auto bins = std::min(kMaxBins, static_cast<std::size_t>(std::ceil(span / width)));
    if (bins < 5) throw DomainError("fewer than 5 histogram bins");
    const double h = span / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double v : sample) {
        auto b = static_cast<std::size_t>((v - *mn) / h);
        counts[std::min(b, bins - 1)] += 1.0;
    }
    std::vector<double> model(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        counts[b] /= static_cast<double>(n) * h;
        model[b] = pdf(*mn + (static_cast<double>(b) + 0.5) * h);
    }
    return stats::pearson(counts, model);
}

} // namespace levyts
