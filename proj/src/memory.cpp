#include "levyts/memory.hpp"

#include "levyts/error.hpp"
#include "levyts/fft.hpp"
#include "levyts/noise.hpp"
#include "levyts/optimize.hpp"
#include "levyts/parallel.hpp"
#include "levyts/stats.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>

namespace levyts {

namespace {

constexpr double kPi = std::numbers::pi;

struct SpectralParams {
    std::span<const double> phi, psi;
    double d, sigma2;
    double lag = 0.0;
};

double spectral_density(double w, void* p) {
    const auto& s = *static_cast<const SpectralParams*>(p);
    const std::complex<double> z = std::polar(1.0, -w);
    std::complex<double> ar = 1.0, ma = 1.0, zk = 1.0;
    const std::size_t m = std::max(s.phi.size(), s.psi.size());
    for (std::size_t k = 1; k <= m; ++k) {
        zk *= z;
        if (k <= s.phi.size()) ar -= s.phi[k - 1] * zk;
        if (k <= s.psi.size()) ma += s.psi[k - 1] * zk;
    }
    double f = s.sigma2 / (2.0 * kPi) * std::norm(ma) / std::norm(ar);
    if (s.d != 0.0) f *= std::pow(2.0 * std::sin(w / 2.0), -2.0 * s.d);
    return f;
}

double cosine_weighted(double w, void* p) {
    return spectral_density(w, p) * std::cos(static_cast<const SpectralParams*>(p)->lag * w);
}

} // namespace

std::vector<double> arfima_autocov(std::span<const double> phi, std::span<const double> psi, double d,
                                   double sigma2, std::size_t maxlag) {
    if (!(std::abs(d) < 0.5)) throw DomainError("autocovariance needs |d| < 0.5");
    if (!(sigma2 > 0.0)) throw DomainError("innovation variance must be positive");
    if (min_root_modulus(phi) <= 1.0) throw DomainError("AR part is not stationary");
    std::vector<double> neg(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) neg[i] = -psi[i];
    if (min_root_modulus(neg) <= 1.0) throw DomainError("MA part is not invertible");

    gsl_error_handler_t* old = gsl_set_error_handler_off();
    struct Restore {
        gsl_error_handler_t* h;
        ~Restore() { gsl_set_error_handler(h); }
    } restore{old};

    constexpr std::size_t limit = 2000;
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(limit), gsl_integration_workspace_free);
    std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> table(
        gsl_integration_qawo_table_alloc(0.0, kPi, GSL_INTEG_COSINE, 64), gsl_integration_qawo_table_free);

    SpectralParams sp{phi, psi, d, sigma2};
    gsl_function fn{&spectral_density, &sp};
    std::vector<double> gamma(maxlag + 1);
    for (std::size_t k = 0; k <= maxlag; ++k) {
        double result = 0.0, err = 0.0;
        int status;
        // The density may be singular at zero frequency (d > 0): the first stretch,
        // shorter than one radian of oscillation, goes to QAGS, the rest to QAWO.
        const double kk = static_cast<double>(k);
        const double split = k == 0 ? kPi : std::min(kPi, 1.0 / kk);
        sp.lag = kk;
        gsl_function head{&cosine_weighted, &sp};
        status = gsl_integration_qags(&head, 0.0, split, 1e-12, 1e-10, limit, ws.get(), &result, &err);
        if (status == GSL_SUCCESS && split < kPi) {
            double tail = 0.0;
            gsl_integration_qawo_table_set(table.get(), kk, kPi - split, GSL_INTEG_COSINE);
            status = gsl_integration_qawo(&fn, split, 1e-12, 1e-10, limit, ws.get(), table.get(), &tail, &err);
            result += tail;
        }
        if (status != GSL_SUCCESS && status != GSL_EROUND)
            throw NumericalError("spectral quadrature failed at lag " + std::to_string(k) + ": " +
                                 gsl_strerror(status));
        gamma[k] = 2.0 * result;
    }
    if (!(gamma[0] > 0.0)) throw NumericalError("non-positive variance from quadrature");
    return gamma;
}

namespace {

// Kalman filter sums for sigma2 = 1; innovations in data units.
struct FilterSums {
    double sum_log_f = 0.0;
    double sum_v2_f = 0.0;
    std::vector<double> v;
};

FilterSums kalman(std::span<const double> x, std::span<const double> phi, std::span<const double> psi) {
    const std::size_t p = phi.size(), q = psi.size();
    const std::size_t r = std::max(p, q + 1);
    const std::size_t n = x.size();
    FilterSums out;
    out.v.resize(n);
    if (r == 1 && p == 0) {
        for (std::size_t t = 0; t < n; ++t) {
            out.v[t] = x[t];
            out.sum_v2_f += x[t] * x[t];
        }
        return out;
    }
    using Mat = Eigen::MatrixXd;
    using Vec = Eigen::VectorXd;
    const auto ri = static_cast<Eigen::Index>(r);
    Mat tm = Mat::Zero(ri, ri);
    for (std::size_t i = 0; i < p; ++i) tm(static_cast<Eigen::Index>(i), 0) = phi[i];
    for (Eigen::Index i = 0; i + 1 < ri; ++i) tm(i, i + 1) = 1.0;
    Vec rv = Vec::Zero(ri);
    rv[0] = 1.0;
    for (std::size_t j = 0; j < q; ++j) rv[static_cast<Eigen::Index>(j + 1)] = psi[j];
    const Mat rr = rv * rv.transpose();

    // Stationary state covariance by doubling: P = sum T^k RR' T'^k.
    Mat pm = rr, a = tm;
    for (int it = 0; it < 100; ++it) {
        pm += a * pm * a.transpose();
        a = a * a;
        if (a.cwiseAbs().maxCoeff() < 1e-18) break;
        if (!a.allFinite()) throw NumericalError("state covariance diverged");
    }

    // Filter with the companion structure spelled out: (T s)_i = phi_i s_0 + s_{i+1}.
    std::vector<double> ph(r, 0.0), rvec(r), st(r, 0.0), gain(r), pc(r * r), tp(r * r), nx(r * r);
    std::copy(phi.begin(), phi.end(), ph.begin());
    for (std::size_t i = 0; i < r; ++i) rvec[i] = rv[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) pc[i * r + j] = pm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    auto tmul = [&](const double* in, double* o) { // o = T in, both r-vectors
        for (std::size_t i = 0; i < r; ++i) o[i] = ph[i] * in[0] + (i + 1 < r ? in[i + 1] : 0.0);
    };
    double f = 1.0;
    bool steady = false;
    std::vector<double> tmp(r);
    for (std::size_t t = 0; t < n; ++t) {
        const double v = x[t] - st[0];
        out.v[t] = v;
        if (!steady) {
            f = pc[0];
            if (!(f > 0.0)) throw NumericalError("non-positive prediction variance");
            // gain = T P e0; P' = T P T' + R R' - gain gain' / f
            for (std::size_t i = 0; i < r; ++i) tmp[i] = pc[i * r];
            tmul(tmp.data(), gain.data());
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < r; ++j)
                    tp[i * r + j] = ph[i] * pc[j] + (i + 1 < r ? pc[(i + 1) * r + j] : 0.0);
            }
            double change = 0.0;
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < r; ++j) {
                    const double tpt = tp[i * r] * ph[j] + (j + 1 < r ? tp[i * r + j + 1] : 0.0);
                    nx[i * r + j] = tpt + rvec[i] * rvec[j] - gain[i] * gain[j] / f;
                    change = std::max(change, std::abs(nx[i * r + j] - pc[i * r + j]));
                }
            }
            if (change < 1e-14) steady = true;
            pc.swap(nx);
        }
        out.sum_log_f += std::log(f);
        out.sum_v2_f += v * v / f;
        tmul(st.data(), tmp.data());
        for (std::size_t i = 0; i < r; ++i) st[i] = tmp[i] + gain[i] * (v / f);
    }
    return out;
}

} // namespace

GaussianLikelihood arma_likelihood(std::span<const double> x, std::span<const double> phi,
                                   std::span<const double> psi, double sigma2) {
    if (x.empty()) throw DomainError("empty series");
    auto s = kalman(x, phi, psi);
    const double n = static_cast<double>(x.size());
    GaussianLikelihood out;
    if (sigma2 <= 0.0) {
        out.sigma2 = s.sum_v2_f / n;
        out.log_likelihood = -0.5 * (n * std::log(2.0 * kPi * out.sigma2) + s.sum_log_f + n);
    } else {
        out.sigma2 = sigma2;
        out.log_likelihood = -0.5 * (n * std::log(2.0 * kPi * sigma2) + s.sum_log_f + s.sum_v2_f / sigma2);
    }
    out.innovations = std::move(s.v);
    return out;
}

GaussianLikelihood levinson_likelihood(std::span<const double> x, std::span<const double> autocov) {
    const std::size_t n = x.size();
    if (autocov.size() < n) throw DomainError("autocovariance shorter than the series");
    if (!(autocov[0] > 0.0)) throw DomainError("autocovariance at lag 0 must be positive");
    std::vector<double> coef, prev;
    double v = autocov[0];
    double sum_log = 0.0, sum_sq = 0.0;
    GaussianLikelihood out;
    out.innovations.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) pred += coef[j] * x[t - 1 - j];
        const double e = x[t] - pred;
        out.innovations[t] = e;
        sum_log += std::log(v);
        sum_sq += e * e / v;
        if (t + 1 == n) break;
        // Extend the predictor to order t + 1.
        double acc = autocov[t + 1];
        for (std::size_t j = 0; j < coef.size(); ++j) acc -= coef[j] * autocov[t - j];
        const double kappa = acc / v;
        prev = coef;
        coef.resize(t + 1);
        for (std::size_t j = 0; j < t; ++j) coef[j] = prev[j] - kappa * prev[t - 1 - j];
        coef[t] = kappa;
        v *= 1.0 - kappa * kappa;
        if (!(v > 0.0)) throw NumericalError("autocovariance is not positive definite");
    }
    const double dn = static_cast<double>(n);
    out.sigma2 = v;
    out.log_likelihood = -0.5 * (dn * std::log(2.0 * kPi) + sum_log + sum_sq);
    return out;
}

std::vector<double> frac_diff(std::span<const double> x, double d) {
    if (d == 0.0) return {x.begin(), x.end()};
    const auto pi = pl_filter(-2.0 * d, x.size());
    return fft::causal_convolve(pi, x);
}

std::vector<double> pacf_to_coeffs(std::span<const double> z) {
    std::vector<double> c, prev;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double r = std::tanh(z[k]);
        prev = c;
        c.resize(k + 1);
        for (std::size_t j = 0; j < k; ++j) c[j] = prev[j] - r * prev[k - 1 - j];
        c[k] = r;
    }
    return c;
}

std::vector<double> coeffs_to_pacf(std::span<const double> coeffs) {
    std::vector<double> c(coeffs.begin(), coeffs.end());
    std::vector<double> z(c.size());
    for (std::size_t k = c.size(); k-- > 0;) {
        const double r = c[k];
        if (!(std::abs(r) < 1.0)) throw DomainError("coefficients are not stationary");
        z[k] = std::atanh(r);
        std::vector<double> lower(k);
        for (std::size_t j = 0; j < k; ++j) lower[j] = (c[j] + r * c[k - 1 - j]) / (1.0 - r * r);
        c = std::move(lower);
    }
    return z;
}

double min_root_modulus(std::span<const double> coeffs) {
    std::size_t m = coeffs.size();
    while (m > 0 && coeffs[m - 1] == 0.0) --m;
    if (m == 0) return std::numeric_limits<double>::infinity();
    // Roots of 1 - sum c_i B^i are reciprocals of the companion eigenvalues.
    const auto mi = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(mi, mi);
    for (Eigen::Index i = 0; i < mi; ++i) comp(0, i) = coeffs[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < mi; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    double biggest = 0.0;
    for (Eigen::Index i = 0; i < mi; ++i) biggest = std::max(biggest, std::abs(es.eigenvalues()[i]));
    return biggest > 0 ? 1.0 / biggest : std::numeric_limits<double>::infinity();
}

namespace {

// Hannan-Rissanen regression start for ARMA(p, q).
void hannan_rissanen(std::span<const double> u, int p, int q, std::vector<double>& phi, std::vector<double>& psi) {
    const std::size_t n = u.size();
    phi.assign(static_cast<std::size_t>(p), 0.0);
    psi.assign(static_cast<std::size_t>(q), 0.0);
    if (p + q == 0) return;
    std::vector<double> e(n, 0.0);
    std::size_t m = 0;
    if (q > 0) {
        m = std::min<std::size_t>(static_cast<std::size_t>(std::max(20.0, 10.0 * std::log10(double(n)))), n / 4);
        std::vector<double> acov(m + 1, 0.0);
        for (std::size_t k = 0; k <= m; ++k) {
            for (std::size_t t = k; t < n; ++t) acov[k] += u[t] * u[t - k];
            acov[k] /= static_cast<double>(n);
        }
        // Yule-Walker long AR by Levinson recursion.
        std::vector<double> a, prev;
        double v = acov[0];
        for (std::size_t k = 0; k < m && v > 0; ++k) {
            double acc = acov[k + 1];
            for (std::size_t j = 0; j < a.size(); ++j) acc -= a[j] * acov[k - j];
            const double kappa = acc / v;
            prev = a;
            a.resize(k + 1);
            for (std::size_t j = 0; j < k; ++j) a[j] = prev[j] - kappa * prev[k - 1 - j];
            a[k] = kappa;
            v *= 1.0 - kappa * kappa;
        }
        for (std::size_t t = a.size(); t < n; ++t) {
            double pred = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) pred += a[j] * u[t - 1 - j];
            e[t] = u[t] - pred;
        }
        m = a.size();
    }
    const std::size_t start = m + static_cast<std::size_t>(std::max(p, q));
    if (start + static_cast<std::size_t>(p + q) + 10 >= n) return;
    const auto rows = static_cast<Eigen::Index>(n - start);
    Eigen::MatrixXd a(rows, p + q);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = start + static_cast<std::size_t>(r);
        b[r] = u[t];
        for (int i = 0; i < p; ++i) a(r, i) = u[t - 1 - static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) a(r, p + j) = e[t - 1 - static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
    for (int i = 0; i < p; ++i) phi[static_cast<std::size_t>(i)] = sol[i];
    for (int j = 0; j < q; ++j) psi[static_cast<std::size_t>(j)] = sol[p + j];
}

// Unconstrained start for a polynomial, shrinking it into the stationary region.
std::vector<double> safe_pacf(std::vector<double> c, double sign) {
    for (auto& v : c) v *= sign;
    for (int attempt = 0; attempt < 60; ++attempt) {
        bool ok = min_root_modulus(c) > 1.0 + 1e-6;
        if (ok) {
            auto z = coeffs_to_pacf(c);
            for (auto& v : z) v = std::clamp(v, -3.0, 3.0);
            return z;
        }
        double f = 0.9;
        for (auto& v : c) {
            v *= f;
            f *= 0.9;
        }
    }
    return std::vector<double>(c.size(), 0.0);
}

struct Prepared {
    std::vector<double> u;
    double d;
};

Prepared prepare(std::span<const double> x, double d) {
    if (x.size() < 20) throw DomainError("series too short for ARMA fitting");
    const double mu = stats::mean(x);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - mu;
    return {frac_diff(y, d), d};
}

struct CellFit {
    ArmaFit fit;
    std::vector<double> z; // optimizer coordinates [ar pacf..., ma pacf...]
};

CellFit fit_cell(const Prepared& prep, int p, int q, const std::vector<std::vector<double>>& extra_starts) {
    const auto& u = prep.u;
    auto split = [p, q](const std::vector<double>& z, std::vector<double>& phi, std::vector<double>& psi) {
        phi = pacf_to_coeffs(std::span<const double>(z.data(), static_cast<std::size_t>(p)));
        psi = pacf_to_coeffs(std::span<const double>(z.data() + p, static_cast<std::size_t>(q)));
        for (auto& v : psi) v = -v;
    };
    // Per-observation scale keeps the gradient test meaningful for any length.
    const double scale = 1.0 / static_cast<double>(u.size());
    auto objective = [&](const std::vector<double>& z) {
        std::vector<double> phi, psi;
        split(z, phi, psi);
        try {
            return -scale * arma_likelihood(u, phi, psi).log_likelihood;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> hr_phi, hr_psi;
    hannan_rissanen(u, p, q, hr_phi, hr_psi);
    std::vector<double> z0 = safe_pacf(hr_phi, 1.0);
    const auto zm = safe_pacf(hr_psi, -1.0);
    z0.insert(z0.end(), zm.begin(), zm.end());
    double best0 = objective(z0);
    for (const auto& s : extra_starts) {
        const double v = objective(s);
        if (v < best0) {
            best0 = v;
            z0 = s;
        }
    }

    MinimizeOptions opts;
    opts.initial_step = 0.5;
    opts.value_tol = 1e-9;
    opts.max_iter = 200;
    auto res = minimize_bfgs(objective, z0, opts);
    if (!(res.value <= best0)) {
        res.x = z0;
        res.value = best0;
    }

    CellFit out;
    out.z = res.x;
    auto& f = out.fit;
    f.p = p;
    f.q = q;
    f.d = prep.d;
    f.d_integer = static_cast<int>(std::floor(prep.d + 0.5));
    f.d_fraction = prep.d - f.d_integer;
    split(res.x, f.phi, f.psi);
    const auto lik = arma_likelihood(u, f.phi, f.psi);
    f.sigma2 = lik.sigma2;
    f.log_likelihood = lik.log_likelihood;
    f.n = u.size();
    f.bic = -2.0 * f.log_likelihood + f.n_params() * std::log(static_cast<double>(f.n));
    f.fit_error = stats::stddev(lik.innovations);
    f.converged = res.converged && std::isfinite(f.log_likelihood);
    return out;
}

bool better(const ArmaFit& a, const ArmaFit& b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(b.bic));
    if (a.bic < b.bic - tol) return true;
    if (a.bic > b.bic + tol) return false;
    return a.n_params() < b.n_params();
}

std::vector<ArmaFit> grid_search(const Prepared& prep, int max_order, unsigned jobs) {
    const int side = max_order + 1;
    std::vector<CellFit> cells(static_cast<std::size_t>(side * side));
    auto at = [side](int p, int q) { return static_cast<std::size_t>(p * side + q); };
    // Sweep anti-diagonals so each cell can start from its nested neighbours.
    for (int level = 0; level <= 2 * max_order; ++level) {
        std::vector<std::pair<int, int>> todo;
        for (int p = 0; p <= max_order; ++p) {
            const int q = level - p;
            if (q >= 0 && q <= max_order) todo.emplace_back(p, q);
        }
        parallel_for(todo.size(), jobs, [&](std::size_t i) {
            const auto [p, q] = todo[i];
            std::vector<std::vector<double>> starts;
            if (p > 0) {
                const auto& z = cells[at(p - 1, q)].z;
                std::vector<double> s(z.begin(), z.begin() + (p - 1));
                s.push_back(0.0);
                s.insert(s.end(), z.begin() + (p - 1), z.end());
                starts.push_back(std::move(s));
            }
            if (q > 0) {
                auto s = cells[at(p, q - 1)].z;
                s.push_back(0.0);
                starts.push_back(std::move(s));
            }
            cells[at(p, q)] = fit_cell(prep, p, q, starts);
        });
    }
    std::vector<ArmaFit> out;
    out.reserve(cells.size());
    for (auto& c : cells) out.push_back(std::move(c.fit));
    return out;
}

const ArmaFit& best_of(const std::vector<ArmaFit>& grid) {
    const ArmaFit* best = &grid.front();
    for (const auto& f : grid)
        if (better(f, *best)) best = &f;
    return *best;
}

} // namespace

ArmaFit fit_arma(std::span<const double> x, int p, int q, double d) {
    if (p < 0 || q < 0 || p > 10 || q > 10) throw DomainError("lag orders must lie in [0, 10]");
    return fit_cell(prepare(x, d), p, q, {}).fit;
}

ModelSelection select_bic(std::span<const double> x, double d_candidate, unsigned jobs, int max_order) {
    if (max_order < 0 || max_order > 10) throw DomainError("maximum order must lie in [0, 10]");
    ModelSelection sel;
    sel.arma_grid = grid_search(prepare(x, 0.0), max_order, jobs);
    sel.farima_grid = grid_search(prepare(x, d_candidate), max_order, jobs);
    sel.arma = best_of(sel.arma_grid);
    sel.farima = best_of(sel.farima_grid);
    const bool farima_wins = better(sel.farima, sel.arma);
    sel.winner = farima_wins ? "FARIMA" : "ARMA";
    return sel;
}

} // namespace levyts
