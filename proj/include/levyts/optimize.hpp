#pragma once

#include <functional>
#include <vector>

namespace levyts {

struct MinimizeOptions {
    double initial_step = 0.5;
    /// Stop when the simplex characteristic size drops below this.
    double size_tol = 1e-5;
    /// Stop when the best value improved by less than this over `stall_window` iterations.
    double value_tol = 1e-7;
    int stall_window = 0; // 0: 10 * dimension
    int max_iter = 2000;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Derivative-free Nelder-Mead minimization (GSL nmsimplex2). Non-finite objective
/// values are treated as +huge so the simplex retreats from them.
MinimizeResult minimize_nelder_mead(const Objective& f, std::vector<double> x0,
                                    const MinimizeOptions& opts = {});

/// Quasi-Newton (GSL BFGS2) with central-difference gradients.
MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                             const MinimizeOptions& opts = {});

} // namespace levyts
