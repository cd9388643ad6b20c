#include "levyts/mle.hpp"

#include "levyts/error.hpp"
#include "levyts/optimize.hpp"
#include "levyts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace levyts {

std::vector<double> StochasticFit::as_vector() const {
    if (kind == NoiseKind::FlickerWhite) return {a_wh, b_cl};
    return {a_wh, b_cl, beta};
}

double log_likelihood(const TimeSeries& residuals, const NoiseModelSpec& spec, LikelihoodMethod method) {
    spec.validate();
    const double beta = spec.effective_beta();
    GridWhitener whitener(residuals, Eigen::MatrixXd(static_cast<Eigen::Index>(residuals.size()), 0), {});
    const double c = spec.b_cl * colored_step_scale(beta, residuals.dt());
    return whitener.evaluate(spec.a_wh, c, beta, method).log_likelihood();
}

namespace {

constexpr double kLogRatioMin = -15.0;
constexpr double kLogRatioMax = 5.0;
// Below this index the coloured term is numerically white and trades amplitude
// freely with the white term.
constexpr double kBetaMin = 0.2;
constexpr double kBetaMax = 3.0;

double beta_from(double y) { return kBetaMin + (kBetaMax - kBetaMin) / (1.0 + std::exp(-y)); }
double to_logit(double beta) {
    beta = std::clamp(beta, kBetaMin + 1e-3, kBetaMax - 1e-3);
    return std::log((beta - kBetaMin) / (kBetaMax - beta));
}

class Profile {
public:
    Profile(const GridWhitener& w, double dt, NoiseKind kind, LikelihoodMethod m)
        : w_(w), dt_(dt), kind_(kind), method_(m) {}

    bool flicker() const { return kind_ == NoiseKind::FlickerWhite; }
    double beta_of(const std::vector<double>& x) const { return flicker() ? 1.0 : beta_from(x[1]); }

    // Negative concentrated log-likelihood; scale sigma^2 = rss / n profiled out.
    double operator()(const std::vector<double>& x) const {
        const double lr = std::clamp(x[0], kLogRatioMin, kLogRatioMax);
        const double penalty = 1e3 * (x[0] - lr) * (x[0] - lr);
        const double beta = beta_of(x);
        const auto g = w_.evaluate(1.0, std::exp(lr) * colored_step_scale(beta, dt_), beta, method_);
        const double n = static_cast<double>(g.n_obs);
        const double ll = -0.5 * (n * std::log(2.0 * std::numbers::pi) + n * std::log(g.rss / n) + g.log_det + n);
        return -ll + penalty;
    }

    // Unconcentrated profile log-likelihood in (a, b, beta).
    double full(double a, double b, double beta) const {
        return w_.evaluate(std::abs(a), std::abs(b) * colored_step_scale(beta, dt_), beta, method_).log_likelihood();
    }

    GridLikelihood at(const std::vector<double>& x, double& sigma2) const {
        const double lr = std::clamp(x[0], kLogRatioMin, kLogRatioMax);
        const double beta = beta_of(x);
        auto g = w_.evaluate(1.0, std::exp(lr) * colored_step_scale(beta, dt_), beta, method_);
        sigma2 = g.rss / static_cast<double>(g.n_obs);
        return g;
    }

private:
    const GridWhitener& w_;
    double dt_;
    NoiseKind kind_;
    LikelihoodMethod method_;
};

// Hessian-based formal sigmas of (a, b[, beta]).
void formal_sigmas(const Profile& prof, StochasticFit& fit) {
    const bool fl = prof.flicker();
    const int d = fl ? 2 : 3;
    std::vector<double> x0{fit.a_wh, fit.b_cl, fit.beta};
    std::vector<double> h{1e-3 * fit.a_wh, 1e-3 * std::max(fit.b_cl, 1e-2 * fit.a_wh), 1e-3};
    auto f = [&](std::vector<double> x) { return prof.full(x[0], x[1], fl ? 1.0 : x[2]); };
    const double f0 = f(x0);
    Eigen::MatrixXd hess(d, d);
    for (int i = 0; i < d; ++i) {
        auto xp = x0, xm = x0;
        xp[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)];
        xm[static_cast<std::size_t>(i)] -= h[static_cast<std::size_t>(i)];
        hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)]);
        for (int j = 0; j < i; ++j) {
            const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
            auto pp = x0, pm = x0, mp = x0, mm = x0;
            pp[si] += h[si], pp[sj] += h[sj];
            pm[si] += h[si], pm[sj] -= h[sj];
            mp[si] -= h[si], mp[sj] += h[sj];
            mm[si] -= h[si], mm[sj] -= h[sj];
            hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[si] * h[sj]);
        }
    }
    const Eigen::MatrixXd info = -hess;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (llt.info() != Eigen::Success) {
        fit.hessian_ok = false;
        fit.sigma_a_wh = fit.sigma_b_cl = fit.sigma_beta = nan;
        return;
    }
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
    fit.hessian_ok = (cov.diagonal().array() > 0).all();
    fit.sigma_a_wh = std::sqrt(cov(0, 0));
    fit.sigma_b_cl = std::sqrt(cov(1, 1));
    fit.sigma_beta = fl ? 0.0 : std::sqrt(cov(2, 2));
}

} // namespace

StochasticResult fit_stochastic(const TimeSeries& ts, NoiseKind kind, const FunctionalConfig& config,
                                const FitOptions& options) {
    if (ts.size() < kMinFitLength)
        throw ValidationError("series has " + std::to_string(ts.size()) + " epochs; at least " +
                              std::to_string(kMinFitLength) + " are needed");
    const auto epochs = ts.epochs();
    const auto design = build_design(epochs, ts.first_epoch(), config.n_harmonics,
                                     config.offsets.within(ts.first_epoch(), ts.last_epoch()), config.period_days);
    // Rank check up front so the error names the design columns.
    solve_whitened(design.matrix, Eigen::VectorXd::Zero(design.matrix.rows()), design.names);

    GridWhitener whitener(ts, design.matrix, design.names);
    const Profile prof(whitener, ts.dt(), kind, options.method);
    const bool fl = kind == NoiseKind::FlickerWhite;

    std::vector<std::vector<double>> starts;
    MinimizeOptions nm;
    nm.size_tol = 1e-4;
    nm.value_tol = 1e-7;
    if (options.warm_start) {
        const auto& w = *options.warm_start;
        const double ratio = w.a_wh > 0 ? std::max(w.b_cl / w.a_wh, std::exp(kLogRatioMin)) : std::exp(kLogRatioMax);
        starts.push_back(fl ? std::vector<double>{std::log(ratio)}
                            : std::vector<double>{std::log(ratio), to_logit(w.beta)});
        nm.initial_step = 0.3;
    } else {
        const double l0 = std::log(0.5);
        if (fl) {
            starts = {{l0}, {l0 - 2.0}, {l0 + 1.5}};
        } else {
            starts = {{l0, to_logit(1.0)}, {l0 - 2.0, to_logit(0.6)}, {l0 + 1.5, to_logit(1.8)}};
        }
        nm.initial_step = 0.8;
    }

    MinimizeResult best;
    best.value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    for (const auto& s : starts) {
        auto r = minimize_nelder_mead(prof, s, nm);
        iterations += r.iterations;
        if (r.value < best.value) best = r;
    }
    // Restart from the incumbent until the likelihood stops moving.
    bool settled = false;
    nm.initial_step = 0.1;
    for (int outer = 0; outer < options.max_outer; ++outer) {
        auto r = minimize_nelder_mead(prof, best.x, nm);
        iterations += r.iterations;
        const double gain = best.value - r.value;
        if (r.value < best.value) best = r;
        if (gain < options.tolerance) {
            settled = true;
            break;
        }
    }

    double sigma2 = 0.0;
    const auto g = prof.at(best.x, sigma2);
    StochasticFit fit;
    fit.kind = kind;
    fit.a_wh = std::sqrt(sigma2);
    fit.b_cl = std::exp(std::clamp(best.x[0], kLogRatioMin, kLogRatioMax)) * fit.a_wh;
    fit.beta = prof.beta_of(best.x);
    fit.log_likelihood = -best.value;
    fit.n_obs = ts.size();
    fit.iterations = iterations;
    fit.converged = settled && std::isfinite(fit.log_likelihood);
    if (options.compute_sigmas) formal_sigmas(prof, fit);

    Eigen::Map<const Eigen::VectorXd> s(ts.values().data(), static_cast<Eigen::Index>(ts.size()));
    const Eigen::VectorXd r = s - design.matrix * g.theta;
    return StochasticResult{fit,
                            FunctionalParams::from_vector(g.theta, config.n_harmonics, design.offset_epochs),
                            sigma2 * g.normal_inverse,
                            ts.with_values(std::vector<double>(r.data(), r.data() + r.size()))};
}

} // namespace levyts
