#include "levyts/whitening.hpp"

#include "levyts/error.hpp"
#include "levyts/functional.hpp"
#include "levyts/noise.hpp"

#include <cmath>
#include <numbers>

namespace levyts {

double GridLikelihood::log_likelihood() const {
    return -0.5 * (static_cast<double>(n_obs) * std::log(2.0 * std::numbers::pi) + log_det + rss);
}

GridWhitener::GridWhitener(const TimeSeries& ts, Eigen::MatrixXd design, std::vector<std::string> names)
    : grid_length_(ts.grid_length()),
      index_(ts.grid_index().begin(), ts.grid_index().end()),
      y_(Eigen::Map<const Eigen::VectorXd>(ts.values().data(), static_cast<Eigen::Index>(ts.size()))),
      x_(std::move(design)),
      names_(std::move(names)) {
    if (x_.rows() != y_.size()) throw ValidationError("design rows do not match the series length");
    std::size_t next = 0;
    for (std::size_t g = 0; g < grid_length_; ++g) {
        if (next < index_.size() && index_[next] == g) {
            ++next;
            continue;
        }
        gaps_.push_back(g);
    }
}

LikelihoodMethod GridWhitener::preferred() const noexcept {
    const double n = static_cast<double>(grid_length_);
    const double m = static_cast<double>(index_.size());
    const double p = static_cast<double>(x_.cols());
    const double g = static_cast<double>(gaps_.size());
    const double fast_cost = n * n * (3.0 + 1.0 + p + g) + n * (p + g) * (p + g);
    const double dense_cost = m * m * m / 3.0 + m * m * (p + 1.0) + n * n;
    return fast_cost <= dense_cost ? LikelihoodMethod::Fast : LikelihoodMethod::Dense;
}

GridLikelihood GridWhitener::evaluate(double w, double c, double beta, LikelihoodMethod method) const {
    if (!(w >= 0.0) || !(c >= 0.0) || (w == 0.0 && c == 0.0))
        throw DomainError("covariance amplitudes must be non-negative and not both zero");
    if (method == LikelihoodMethod::Auto) method = preferred();
    return method == LikelihoodMethod::Fast ? fast(w, c, beta) : dense(w, c, beta);
}

namespace {

[[noreturn]] void not_pd(double w, double c, double beta) {
    throw NumericalError("covariance is not positive definite (white " + std::to_string(w) + ", coloured " +
                         std::to_string(c) + ", beta " + std::to_string(beta) + ")");
}

// Fills the likelihood from whitened data z, whitened design a and whitened gap
// indicators wg (zero columns when there are no gaps).
GridLikelihood finish(double log_det_grid, const Eigen::VectorXd& z, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& wg, const std::vector<std::string>& names, std::size_t n_obs) {
    GridLikelihood out;
    out.n_obs = n_obs;
    out.log_det = log_det_grid;
    const Eigen::Index p = a.cols();
    const Eigen::Index g = wg.cols();
    if (g > 0) {
        Eigen::LLT<Eigen::MatrixXd> gram(wg.transpose() * wg);
        if (gram.info() != Eigen::Success) throw NumericalError("gap projection is singular");
        const auto& l = gram.matrixLLT();
        for (Eigen::Index i = 0; i < g; ++i) out.log_det += 2.0 * std::log(l(i, i));
    }
    if (p + g == 0) {
        out.rss = z.squaredNorm();
        return out;
    }
    Eigen::MatrixXd full(z.size(), p + g);
    full.leftCols(p) = a;
    full.rightCols(g) = wg;
    std::vector<std::string> all = names;
    all.resize(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < g; ++i) all.push_back("gap" + std::to_string(i));
    const auto sol = solve_whitened(full, z, all);
    out.rss = sol.whitened_residual.squaredNorm();
    out.theta = sol.theta.head(p);
    out.normal_inverse = sol.normal_inverse.topLeftCorner(p, p);
    return out;
}

} // namespace

GridLikelihood GridWhitener::fast(double w, double c, double beta) const {
    const std::size_t n = grid_length_;
    const auto p = static_cast<std::size_t>(x_.cols());
    const std::size_t g = gaps_.size();
    const std::size_t r = 1 + p + g;

    // Right-hand sides on the full grid, column-major, zero at gaps. Eigen storage keeps
    // the base address aligned so the reductions in finish() round the same way every run.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n * r));
    for (std::size_t i = 0; i < index_.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        rhs[index_[i]] = y_[ii];
        for (std::size_t j = 0; j < p; ++j) rhs[(1 + j) * n + index_[i]] = x_(ii, static_cast<Eigen::Index>(j));
    }
    for (std::size_t k = 0; k < g; ++k) rhs[(1 + p + k) * n + gaps_[k]] = 1.0;

    // Displacement generators of C: [w e_0, c h]. At step k, logical row i >= k of
    // the first generator lives in u[i - k], so the down-shift costs nothing.
    std::vector<double> u(n, 0.0), v = pl_filter(beta, n);
    u[0] = w;
    for (auto& e : v) e *= c;

    // Steps are applied in blocks of K on skewed tiles of J positions so each tile
    // stays in L1: step s of a block runs at positions j + K - 1 - s, which only
    // needs step s - 1 at the same and the next position.
    constexpr std::size_t kBlock = 16, kTile = 256;
    double log_det = 0.0;
    std::vector<double> cs(kBlock), sn(kBlock), xs(kBlock * r);
    std::size_t k = 0;

    auto apply = [&](std::size_t s, std::size_t lo, std::size_t hi) {
        hi = std::min(hi, n - k - s);
        if (lo >= hi) return false;
        double* __restrict uu = u.data();
        double* __restrict vv = v.data() + k + s;
        const double c1 = cs[s], s1 = sn[s];
        for (std::size_t j = lo; j < hi; ++j) {
            const double a0 = uu[j], a1 = vv[j];
            uu[j] = c1 * a0 + s1 * a1;
            vv[j] = c1 * a1 - s1 * a0;
        }
        const std::size_t from = std::max<std::size_t>(lo, 1);
        for (std::size_t q = 0; q < r; ++q) {
            const double xq = xs[s * r + q];
            if (xq == 0.0) continue;
            double* __restrict bq = rhs.data() + q * n + k + s;
            for (std::size_t j = from; j < hi; ++j) bq[j] -= xq * uu[j];
        }
        return true;
    };

    while (k < n) {
        const std::size_t kb = std::min(kBlock, n - k);
        for (std::size_t s = 0; s < kb; ++s) {
            const double alpha = u[0], b0 = v[k + s];
            const double delta = std::hypot(alpha, b0);
            if (!(delta > 0.0) || !std::isfinite(delta)) not_pd(w, c, beta);
            cs[s] = alpha / delta;
            sn[s] = b0 / delta;
            log_det += 2.0 * std::log(delta);
            for (std::size_t q = 0; q < r; ++q) {
                double& top = rhs[q * n + k + s];
                top /= delta;
                xs[s * r + q] = top;
            }
            apply(s, 0, kb - s);
        }
        for (std::size_t j0 = 1;; j0 += kTile) {
            bool any = false;
            for (std::size_t s = 0; s < kb; ++s) any |= apply(s, j0 + kb - 1 - s, j0 + kb - 1 - s + kTile);
            if (!any) break;
        }
        k += kb;
    }

    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::Map<const Eigen::VectorXd> z(rhs.data(), nn);
    Eigen::Map<const Eigen::MatrixXd> a(rhs.data() + n, nn, static_cast<Eigen::Index>(p));
    Eigen::Map<const Eigen::MatrixXd> wg(rhs.data() + (1 + p) * n, nn, static_cast<Eigen::Index>(g));
    return finish(log_det, z, a, wg, names_, index_.size());
}

GridLikelihood GridWhitener::dense(double w, double c, double beta) const {
    const std::size_t n = grid_length_;
    const auto h = pl_filter(beta, n);
    const std::size_t m = index_.size();
    const auto mm = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd cov(mm, mm);
    // J(j + d, j) = sum_{l <= j} h_{d+l} h_l is a running sum along each diagonal.
    std::vector<std::ptrdiff_t> pos(n, -1);
    for (std::size_t i = 0; i < m; ++i) pos[index_[i]] = static_cast<std::ptrdiff_t>(i);
    for (std::size_t d = 0; d < n; ++d) {
        double s = 0.0;
        for (std::size_t j = 0; j + d < n; ++j) {
            s += h[d + j] * h[j];
            const auto pj = pos[j], pi = pos[j + d];
            if (pj >= 0 && pi >= 0) cov(pi, pj) = c * c * s;
        }
    }
    for (Eigen::Index i = 0; i < mm; ++i) cov(i, i) += w * w;

    Eigen::LLT<Eigen::MatrixXd> llt(cov.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) not_pd(w, c, beta);
    double log_det = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < mm; ++i) log_det += 2.0 * std::log(l(i, i));
    const Eigen::VectorXd z = llt.matrixL().solve(y_);
    const Eigen::MatrixXd a = llt.matrixL().solve(x_);
    return finish(log_det, z, a, Eigen::MatrixXd(mm, 0), names_, m);
}

} // namespace levyts
