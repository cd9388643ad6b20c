#include "levyts/oracles.hpp"

#include "levyts/error.hpp"
#include "levyts/series.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace levyts {

std::string to_string(ResidualKind kind) {
    switch (kind) {
    case ResidualKind::Trend: return "trend";
    case ResidualKind::Seasonal: return "seasonal";
    case ResidualKind::Offsets: return "offsets";
    }
    return "?";
}

namespace {

void check(const ResidualSignalSpec& spec, std::size_t length) {
    if (length < 1) throw DomainError("length must be at least 1");
    if (!(spec.dt > 0.0)) throw DomainError("sampling interval must be positive");
    if (spec.c_r.size() != spec.e_r.size()) throw DomainError("cosine and sine coefficient counts differ");
    if (spec.g.size() != spec.t_k.size()) throw DomainError("offset magnitude and epoch counts differ");
}

double slope_per_day(const ResidualSignalSpec& s) { return s.a_r / kDaysPerYear; }

// sum_{i=1}^{L} cos(w i dt) and sin(w i dt) in closed form.
void dirichlet(double w, std::size_t length, double& c, double& s) {
    const double l = static_cast<double>(length);
    const double half = 0.5 * w;
    const double den = std::sin(half);
    if (std::abs(den) < 1e-14) {
        // w is a multiple of 2 pi: every cosine term is one.
        c = l;
        s = 0.0;
        return;
    }
    const double num = std::sin(l * half) / den;
    c = num * std::cos((l + 1.0) * half);
    s = num * std::sin((l + 1.0) * half);
}

double omega(const ResidualSignalSpec& s, std::size_t j) {
    return 2.0 * std::numbers::pi * static_cast<double>(j + 1) / s.period_days * s.dt;
}

double offset_count(double t, std::size_t length) {
    // Epochs i in 1..L with i >= t.
    const double first = std::max(1.0, std::ceil(t));
    return std::max(0.0, static_cast<double>(length) - first + 1.0);
}

double deterministic(const ResidualSignalSpec& s, std::size_t i) {
    const double t = static_cast<double>(i) * s.dt;
    switch (s.kind) {
    case ResidualKind::Trend: return slope_per_day(s) * t + s.b_r;
    case ResidualKind::Seasonal: {
        double v = 0.0;
        for (std::size_t j = 0; j < s.c_r.size(); ++j) {
            const double arg = omega(s, j) * static_cast<double>(i);
            v += s.c_r[j] * std::cos(arg) + s.e_r[j] * std::sin(arg);
        }
        return v;
    }
    case ResidualKind::Offsets: {
        double v = 0.0;
        for (std::size_t k = 0; k < s.g.size(); ++k)
            if (static_cast<double>(i) >= s.t_k[k]) v += s.g[k];
        return v;
    }
    }
    return 0.0;
}

} // namespace

Moments trend_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode) {
    check(spec, length);
    const double l = static_cast<double>(length);
    const double a = slope_per_day(spec) * spec.dt;
    Moments m;
    if (mode == OracleMode::Exact) {
        m.mean = spec.b_r + a * (l + 1.0) / 2.0 + spec.mu_c;
        m.variance = a * a * (l * l - 1.0) / 12.0 + spec.sigma2_n;
    } else {
        m.mean = a * l / 2.0 + spec.mu_c;
        m.variance = a * a * l * l / 12.0 + spec.sigma2_n + spec.b_r * spec.b_r - spec.mu_c * a * l;
    }
    return m;
}

double trend_variance_printed(const ResidualSignalSpec& spec, std::size_t length) {
    check(spec, length);
    const double l = static_cast<double>(length);
    const double a = slope_per_day(spec) * spec.dt;
    return a * a * (l + 1.0) * (2.0 * l + 1.0) / 6.0 - a * a * (l + 1.0) * (l + 1.0) / 4.0 + spec.b_r * spec.b_r +
           spec.sigma2_n - spec.mu_c * (spec.mu_c + a * (l + 1.0));
}

Moments seasonal_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode) {
    check(spec, length);
    Moments m;
    if (mode == OracleMode::Approx) {
        double power = 0.0;
        for (std::size_t j = 0; j < spec.c_r.size(); ++j) power += spec.c_r[j] * spec.c_r[j] + spec.e_r[j] * spec.e_r[j];
        m.mean = spec.delta + spec.mu_c;
        m.variance = spec.sigma2_n + power - (spec.delta + spec.mu_c) * (spec.delta + spec.mu_c);
        return m;
    }
    const double l = static_cast<double>(length);
    const std::size_t nh = spec.c_r.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < nh; ++j) {
        double c, s;
        dirichlet(omega(spec, j), length, c, s);
        sum += spec.c_r[j] * c + spec.e_r[j] * s;
    }
    for (std::size_t j = 0; j < nh; ++j) {
        for (std::size_t k = 0; k < nh; ++k) {
            const double wj = omega(spec, j), wk = omega(spec, k);
            double cm, sm, cp, sp;
            dirichlet(wj - wk, length, cm, sm);
            dirichlet(wj + wk, length, cp, sp);
            const double cc = 0.5 * (cm + cp);  // sum cos_j cos_k
            const double ss = 0.5 * (cm - cp);  // sum sin_j sin_k
            const double cs = 0.5 * (sp + sm);  // sum sin_j cos_k
            sum_sq += spec.c_r[j] * spec.c_r[k] * cc + spec.e_r[j] * spec.e_r[k] * ss +
                      2.0 * spec.e_r[j] * spec.c_r[k] * cs;
        }
    }
    const double mean_d = sum / l;
    m.mean = mean_d + spec.mu_c;
    m.variance = sum_sq / l - mean_d * mean_d + spec.sigma2_n;
    return m;
}

Moments offset_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode) {
    check(spec, length);
    const double l = static_cast<double>(length);
    Moments m;
    if (mode == OracleMode::Approx) {
        double total = 0.0;
        for (std::size_t k = 0; k < spec.g.size(); ++k)
            if (l >= spec.t_k[k]) total += spec.g[k];
        m.mean = total / l + spec.mu_c;
        m.variance = spec.sigma2_n + total * total / l - m.mean * m.mean;
        return m;
    }
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < spec.g.size(); ++k) {
        sum += spec.g[k] * offset_count(spec.t_k[k], length);
        for (std::size_t q = 0; q < spec.g.size(); ++q)
            sum_sq += spec.g[k] * spec.g[q] * offset_count(std::max(spec.t_k[k], spec.t_k[q]), length);
    }
    const double mean_d = sum / l;
    m.mean = mean_d + spec.mu_c;
    m.variance = sum_sq / l - mean_d * mean_d + spec.sigma2_n;
    return m;
}

Moments residual_moments(const ResidualSignalSpec& spec, std::size_t length, OracleMode mode) {
    switch (spec.kind) {
    case ResidualKind::Trend: return trend_moments(spec, length, mode);
    case ResidualKind::Seasonal: return seasonal_moments(spec, length, mode);
    case ResidualKind::Offsets: return offset_moments(spec, length, mode);
    }
    return {};
}

Moments brute_force_moments(const ResidualSignalSpec& spec, std::size_t length) {
    check(spec, length);
    const double l = static_cast<double>(length);
    double sum = 0.0;
    for (std::size_t i = 1; i <= length; ++i) sum += deterministic(spec, i);
    const double mean_d = sum / l;
    double ss = 0.0;
    for (std::size_t i = 1; i <= length; ++i) {
        const double r = deterministic(spec, i) - mean_d;
        ss += r * r;
    }
    return {mean_d + spec.mu_c, ss / l + spec.sigma2_n};
}

Moments monte_carlo_moments(const ResidualSignalSpec& spec, std::size_t length, std::size_t draws,
                            std::uint64_t seed) {
    check(spec, length);
    if (length < 2 || draws < 1) throw DomainError("Monte Carlo needs L >= 2 and at least one draw");
    const double l = static_cast<double>(length);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(spec.mu_c, std::sqrt(spec.sigma2_n * l / (l - 1.0)));
    std::vector<double> d(length), x(length);
    for (std::size_t i = 0; i < length; ++i) d[i] = deterministic(spec, i + 1);
    Moments acc;
    for (std::size_t r = 0; r < draws; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < length; ++i) sum += x[i] = d[i] + noise(rng);
        const double mean = sum / l;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        acc.mean += mean;
        acc.variance += ss / l;
    }
    acc.mean /= static_cast<double>(draws);
    acc.variance /= static_cast<double>(draws);
    return acc;
}

ResidualSignalSpec default_oracle_spec(ResidualKind kind, std::size_t length) {
    ResidualSignalSpec s;
    s.kind = kind;
    s.mu_c = 0.1;
    s.sigma2_n = 1.6 * 1.6;
    switch (kind) {
    case ResidualKind::Trend:
        s.a_r = 1.0;
        s.b_r = 0.5;
        break;
    case ResidualKind::Seasonal:
        s.c_r = {0.4, 0.1};
        s.e_r = {0.2, 0.05};
        break;
    case ResidualKind::Offsets:
        s.g = {0.5, -0.3};
        s.t_k = {0.3 * static_cast<double>(length), 0.7 * static_cast<double>(length)};
        break;
    }
    return s;
}

std::vector<OracleRow> oracle_table(const std::vector<std::size_t>& lengths) {
    std::vector<OracleRow> rows;
    for (auto kind : {ResidualKind::Trend, ResidualKind::Seasonal, ResidualKind::Offsets}) {
        for (std::size_t l : lengths) {
            const auto spec = default_oracle_spec(kind, l);
            OracleRow r{kind, l, residual_moments(spec, l, OracleMode::Exact),
                        residual_moments(spec, l, OracleMode::Approx), brute_force_moments(spec, l),
                        std::numeric_limits<double>::quiet_NaN(), 0.0};
            if (kind == ResidualKind::Trend) r.printed_variance = trend_variance_printed(spec, l);
            const auto spec2 = default_oracle_spec(kind, 2 * l);
            r.growth_ratio_2l = residual_moments(spec2, 2 * l, OracleMode::Exact).variance / r.exact.variance;
            rows.push_back(r);
        }
    }
    return rows;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

} // namespace

std::string oracle_csv(const std::vector<OracleRow>& rows) {
    std::ostringstream os;
    os << "kind,L,exact_mean,approx_mean,brute_mean,exact_var,approx_var,printed_var,brute_var,"
          "rel_err_exact_mean,rel_err_exact_var,rel_err_approx_mean,rel_err_approx_var,growth_ratio_2L\n";
    for (const auto& r : rows) {
        os << to_string(r.kind) << ',' << r.length << ',' << num(r.exact.mean) << ',' << num(r.approx.mean) << ','
           << num(r.brute.mean) << ',' << num(r.exact.variance) << ',' << num(r.approx.variance) << ','
           << num(r.printed_variance) << ',' << num(r.brute.variance) << ',' << num(rel(r.exact.mean, r.brute.mean))
           << ',' << num(rel(r.exact.variance, r.brute.variance)) << ',' << num(rel(r.approx.mean, r.brute.mean))
           << ',' << num(rel(r.approx.variance, r.brute.variance)) << ',' << num(r.growth_ratio_2l) << '\n';
    }
    return os.str();
}

} // namespace levyts
