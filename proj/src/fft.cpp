#include "levyts/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace levyts::fft {

namespace {

// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Plan {
    std::size_t n;
    fftw_complex* buf;
    fftw_plan plan;

    Plan(std::size_t n_, bool forward) : n(n_) {
        std::lock_guard lock(planner_mutex());
        buf = fftw_alloc_complex(n);
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buf);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

Plan& cached_plan(std::size_t n, bool forward) {
    thread_local std::map<std::pair<std::size_t, bool>, std::unique_ptr<Plan>> cache;
    auto& slot = cache[{n, forward}];
    if (!slot) slot = std::make_unique<Plan>(n, forward);
    return *slot;
}

} // namespace

void transform(std::span<cd> data, bool forward) {
    if (data.size() < 2) return;
    Plan& p = cached_plan(data.size(), forward);
    static_assert(sizeof(cd) == sizeof(fftw_complex));
    std::memcpy(static_cast<void*>(p.buf), static_cast<const void*>(data.data()), data.size() * sizeof(cd));
    fftw_execute(p.plan);
    std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(p.buf), data.size() * sizeof(cd));
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> causal_convolve(std::span<const double> h, std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    const std::size_t nh = std::min(h.size(), n);
    if (n == 0 || nh == 0) return y;
    if (n * nh <= 1u << 16) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const std::size_t jmax = std::min(i + 1, nh);
            for (std::size_t j = 0; j < jmax; ++j) s += h[j] * x[i - j];
            y[i] = s;
        }
        return y;
    }
    const std::size_t m = next_pow2(n + nh);
    std::vector<cd> a(m), b(m);
    for (std::size_t i = 0; i < nh; ++i) a[i] = h[i];
    for (std::size_t i = 0; i < n; ++i) b[i] = x[i];
    transform(a, true);
    transform(b, true);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    transform(a, false);
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i].real() / static_cast<double>(m);
    return y;
}

} // namespace levyts::fft
