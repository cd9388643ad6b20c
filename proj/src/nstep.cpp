#include "levyts/nstep.hpp"

#include "levyts/error.hpp"
#include "levyts/parallel.hpp"
#include "levyts/stats.hpp"

#include <algorithm>
#include <cmath>

namespace levyts {

std::string to_string(LevyClass c) {
    switch (c) {
    case LevyClass::GaussianLevy: return "GaussianLevy";
    case LevyClass::FractionalLevy: return "FractionalLevy";
    case LevyClass::StableLevy: return "StableLevy";
    }
    return "?";
}

void Thresholds::validate() const {
    if (!(gaussian_pct >= 0.0) || !(stable_pct >= gaussian_pct))
        throw ValidationError("thresholds must satisfy 0 <= gaussian_pct <= stable_pct");
    if (!(heavy_alpha > 0.0 && heavy_alpha <= 2.0)) throw ValidationError("heavy_alpha must lie in (0, 2]");
    if (!(corr_margin >= 0.0 && corr_margin <= 1.0)) throw ValidationError("corr_margin must lie in [0, 1]");
}

double variation_pct(std::span<const double> first, std::span<const double> last) {
    if (first.size() != last.size()) throw ValidationError("parameter vectors differ in length");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (std::abs(first[i]) < 1e-12) continue;
        num += std::abs(last[i] - first[i]);
        den += std::abs(first[i]);
    }
    if (den == 0.0) throw ValidationError("initial parameter vector is all zero");
    return 100.0 * num / den;
}

bool heavy_tailed(double alpha, double corr_levy, double corr_normal, const Thresholds& t) {
    return alpha < t.heavy_alpha && corr_levy - corr_normal > t.corr_margin;
}

LevyClass classify(const ClassificationInputs& in, const Thresholds& t) {
    t.validate();
    std::string missing;
    if (!in.stochastic_pct) missing += " stochastic_pct";
    if (!in.functional_pct) missing += " functional_pct";
    if (!in.alpha) missing += " alpha";
    if (!in.corr_levy) missing += " corr_levy";
    if (!in.corr_normal) missing += " corr_normal";
    if (!missing.empty()) throw ValidationError("classification inputs missing:" + missing);
    const double v = std::max(*in.stochastic_pct, *in.functional_pct);
    const bool heavy = heavy_tailed(*in.alpha, *in.corr_levy, *in.corr_normal, t);
    if (v > t.stable_pct || heavy) return LevyClass::StableLevy;
    if (v <= t.gaussian_pct) return LevyClass::GaussianLevy;
    return LevyClass::FractionalLevy;
}

DistributionFit fit_distribution(std::span<const double> residuals) {
    DistributionFit d;
    d.normal = fit_normal(residuals);
    d.stable = fit_stable_ml(residuals);
    const StableDensity levy(d.stable.params);
    const NormalFit normal = d.normal;
    d.corr_normal = dist_correlation(residuals, [&](double x) { return normal.pdf(x); });
    d.corr_levy = dist_correlation(residuals, [&](double x) { return levy(x); });
    return d;
}

void NStepConfig::validate() const {
    if (steps_years.size() < 2) throw ValidationError("at least two steps are needed");
    for (std::size_t i = 0; i < steps_years.size(); ++i) {
        if (!(steps_years[i] >= 0.0 && steps_years[i] <= 1.0))
            throw ValidationError("step offsets must lie in [0, 1] year");
        if (i > 0 && !(steps_years[i] > steps_years[i - 1]))
            throw ValidationError("step offsets must increase strictly");
    }
    if (functional.n_harmonics < 1 || functional.n_harmonics > 7)
        throw ValidationError("harmonic count must lie in [1, 7]");
    if (max_order < 0 || max_order > 10) throw ValidationError("maximum ARMA order must lie in [0, 10]");
    thresholds.validate();
}

namespace {

std::vector<double> per_parameter(std::span<const double> first, std::span<const double> last) {
    std::vector<double> out(first.size(), 0.0);
    for (std::size_t i = 0; i < first.size(); ++i)
        out[i] = std::abs(first[i]) < 1e-12 ? 0.0 : 100.0 * std::abs(last[i] - first[i]) / std::abs(first[i]);
    return out;
}

void analyse_window(const TimeSeries& window, const NStepConfig& cfg, bool deep, const FitOptions& opts,
                    WindowFitRecord& rec) {
    rec.n_obs = window.size();
    rec.gaps = window.gap_count();
    rec.first_epoch = window.first_epoch();
    rec.last_epoch = window.last_epoch();
    try {
        auto fit = fit_stochastic(window, cfg.kind, cfg.functional, opts);
        rec.functional = fit.functional;
        rec.functional_sigma.resize(static_cast<std::size_t>(fit.functional_covariance.rows()));
        for (std::size_t i = 0; i < rec.functional_sigma.size(); ++i)
            rec.functional_sigma[i] = std::sqrt(fit.functional_covariance(static_cast<Eigen::Index>(i),
                                                                          static_cast<Eigen::Index>(i)));
        rec.stochastic = fit.stochastic;
        const auto r = fit.residuals.values();
        rec.residual = {r.size(), stats::stddev(r), stats::skewness(r), stats::excess_kurtosis(r)};
        rec.ok = fit.stochastic.converged;
        if (!fit.stochastic.converged) rec.flags.push_back("stochastic fit did not converge");
        if (!fit.stochastic.hessian_ok) rec.flags.push_back("formal sigmas unavailable (Hessian not definite)");
        if (deep) {
            rec.distribution = fit_distribution(r);
            rec.memory = select_bic(r, fit.stochastic.beta / 2.0, 1, cfg.max_order);
            if (!rec.distribution->stable.converged) rec.flags.push_back("stable fit did not converge");
        }
    } catch (const Error& e) {
        rec.ok = false;
        rec.flags.push_back(std::string("fit failed: ") + e.what());
    }
}

} // namespace

ClassificationReport run_nstep(const TimeSeries& ts, const NStepConfig& config) {
    config.validate();
    config.functional.offsets.validate_against(ts);
    const std::size_t nw = config.steps_years.size();
    std::vector<TimeSeries> windows;
    windows.reserve(nw);
    for (double s : config.steps_years) windows.push_back(slice_window(ts, s * 365.0));

    ClassificationReport rep;
    rep.n_obs = ts.size();
    rep.gaps = ts.gap_count();
    rep.dt = ts.dt();
    rep.first_epoch = ts.first_epoch();
    rep.last_epoch = ts.last_epoch();
    rep.header = ts.header();
    rep.kind = config.kind;
    rep.n_harmonics = config.functional.n_harmonics;
    rep.thresholds = config.thresholds;
    rep.steps.resize(nw);
    for (std::size_t i = 0; i < nw; ++i) rep.steps[i].end_offset_days = config.steps_years[i] * 365.0;

    const auto deep = [&](std::size_t i) { return config.analysis == AnalysisScope::AllWindows || i == 0; };
    analyse_window(windows[0], config, deep(0), {}, rep.steps[0]);
    FitOptions later;
    if (rep.steps[0].ok) later.warm_start = rep.steps[0].stochastic;
    parallel_for(nw - 1, config.jobs, [&](std::size_t j) {
        analyse_window(windows[j + 1], config, deep(j + 1), later, rep.steps[j + 1]);
    });

    for (std::size_t i = 0; i < nw; ++i)
        for (const auto& f : rep.steps[i].flags) rep.flags.push_back("step " + std::to_string(i) + ": " + f);
    if (ts.gap_count() > 0)
        rep.flags.push_back("series has " + std::to_string(ts.gap_count()) + " missing epochs; fits use observed epochs");

    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < nw; ++i)
        if (rep.steps[i].ok) good.push_back(i);
    rep.degraded = good.size() != nw;
    if (rep.degraded) rep.flags.push_back("degraded: classification uses converged windows only");
    if (good.size() < 2) {
        rep.flags.push_back("fewer than two converged windows; no classification");
        return rep;
    }

    const auto& first = rep.steps[good.front()];
    const auto f0 = first.functional.as_vector();
    const auto s0 = first.stochastic.as_vector();
    rep.functional_names = first.functional.names();
    rep.stochastic_names = first.stochastic.kind == NoiseKind::FlickerWhite
                               ? std::vector<std::string>{"a_wh", "b_cl"}
                               : std::vector<std::string>{"a_wh", "b_cl", "beta"};
    // Later windows may carry extra offsets; compare the common leading parameters.
    for (std::size_t i = 0; i < nw; ++i) {
        const auto& rec = rep.steps[i];
        if (!rec.ok) {
            rep.functional_curve.push_back(std::nan(""));
            rep.stochastic_curve.push_back(std::nan(""));
            rep.functional_param_curves.emplace_back(f0.size(), std::nan(""));
            rep.stochastic_param_curves.emplace_back(s0.size(), std::nan(""));
            continue;
        }
        auto fi = rec.functional.as_vector();
        fi.resize(f0.size());
        const auto si = rec.stochastic.as_vector();
        rep.functional_curve.push_back(variation_pct(f0, fi));
        rep.stochastic_curve.push_back(variation_pct(s0, si));
        rep.functional_param_curves.push_back(per_parameter(f0, fi));
        rep.stochastic_param_curves.push_back(per_parameter(s0, si));
    }
    rep.functional_pct = rep.functional_curve[good.back()];
    rep.stochastic_pct = rep.stochastic_curve[good.back()];

    if (!first.distribution || !first.memory) {
        rep.flags.push_back("first window lacks distribution fits; no classification");
        return rep;
    }
    const auto& dist = *first.distribution;
    rep.heavy_tail = heavy_tailed(dist.stable.params.alpha, dist.corr_levy, dist.corr_normal, config.thresholds);
    rep.distribution_verdict = rep.heavy_tail ? "Levy alpha-stable" : "Gaussian";
    rep.memory_verdict = first.memory->winner;
    rep.levy_class = classify({rep.stochastic_pct, rep.functional_pct, dist.stable.params.alpha, dist.corr_levy,
                               dist.corr_normal},
                              config.thresholds);
    return rep;
}

} // namespace levyts
