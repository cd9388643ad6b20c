#include "levyts/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>

namespace levyts {

namespace {

constexpr double kHuge = 1e300;

struct Context {
    const Objective* f;
    std::vector<double> scratch;
    int evaluations = 0;
};

double call(Context& ctx, const gsl_vector* v) {
    for (std::size_t i = 0; i < ctx.scratch.size(); ++i) ctx.scratch[i] = gsl_vector_get(v, i);
    ++ctx.evaluations;
    const double y = (*ctx.f)(ctx.scratch);
    return std::isfinite(y) ? y : kHuge;
}

double f_trampoline(const gsl_vector* v, void* p) { return call(*static_cast<Context*>(p), v); }

void df_trampoline(const gsl_vector* v, void* p, gsl_vector* g) {
    auto& ctx = *static_cast<Context*>(p);
    const std::size_t n = v->size;
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> w(gsl_vector_alloc(n), gsl_vector_free);
    gsl_vector_memcpy(w.get(), v);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = gsl_vector_get(v, i);
        const double h = 1e-5 * std::max(1.0, std::abs(xi));
        gsl_vector_set(w.get(), i, xi + h);
        const double fp = call(ctx, w.get());
        gsl_vector_set(w.get(), i, xi - h);
        const double fm = call(ctx, w.get());
        gsl_vector_set(w.get(), i, xi);
        gsl_vector_set(g, i, (fp >= kHuge || fm >= kHuge) ? 0.0 : (fp - fm) / (2 * h));
    }
}

void fdf_trampoline(const gsl_vector* v, void* p, double* f, gsl_vector* g) {
    *f = f_trampoline(v, p);
    df_trampoline(v, p, g);
}

struct GslOff {
    gsl_error_handler_t* old;
    GslOff() : old(gsl_set_error_handler_off()) {}
    ~GslOff() { gsl_set_error_handler(old); }
};

} // namespace

MinimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, const MinimizeOptions& opts) {
    const std::size_t n = x0.size();
    Context ctx{&f, std::vector<double>(n)};
    MinimizeResult out;
    if (n == 0) {
        out.value = f(x0);
        out.evaluations = 1;
        out.converged = true;
        return out;
    }
    GslOff guard;
    gsl_multimin_function fn{&f_trampoline, n, &ctx};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(n), gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set_all(step.get(), opts.initial_step);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get());

    const int window = opts.stall_window > 0 ? opts.stall_window : static_cast<int>(10 * n);
    // fval is not set until the first iterate.
    double best_at_window_start = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_fminimizer_size(s.get()) < opts.size_tol) {
            out.converged = true;
            ++iter;
            break;
        }
        if ((iter + 1) % window == 0) {
            if (best_at_window_start - s->fval < opts.value_tol) {
                out.converged = true;
                ++iter;
                break;
            }
            best_at_window_start = s->fval;
        }
    }
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
    out.value = s->fval;
    out.iterations = iter;
    out.evaluations = ctx.evaluations;
    return out;
}

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const MinimizeOptions& opts) {
    const std::size_t n = x0.size();
    Context ctx{&f, std::vector<double>(n)};
    MinimizeResult out;
    if (n == 0) {
        out.value = f(x0);
        out.evaluations = 1;
        out.converged = true;
        return out;
    }
    GslOff guard;
    gsl_multimin_function_fdf fn{&f_trampoline, &df_trampoline, &fdf_trampoline, n, &ctx};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, x0[i]);
    std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> s(
        gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n),
        gsl_multimin_fdfminimizer_free);
    gsl_multimin_fdfminimizer_set(s.get(), &fn, x.get(), opts.initial_step * 0.1, 0.1);
    double prev = s->f;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const int status = gsl_multimin_fdfminimizer_iterate(s.get());
        if (status != GSL_SUCCESS) {
            // No progress possible along the search direction: treat as converged.
            out.converged = true;
            break;
        }
        if (gsl_multimin_test_gradient(s->gradient, 1e-5) == GSL_SUCCESS ||
            std::abs(prev - s->f) < opts.value_tol) {
            out.converged = true;
            ++iter;
            break;
        }
        prev = s->f;
    }
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
    out.value = s->f;
    out.iterations = iter;
    out.evaluations = ctx.evaluations;
    return out;
}

} // namespace levyts
