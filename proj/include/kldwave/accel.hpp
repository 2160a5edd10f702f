#pragma once

// Steffensen-type (STEM) acceleration of a monotone fixed-point map, and the
// accelerated MM-KLD driver built on it.

#include "kldwave/linalg.hpp"
#include "kldwave/solvers.hpp"

#include <functional>
#include <optional>

namespace kldwave {

struct FixedPointProblem {
    std::function<ComplexMatrix(const ComplexMatrix&)> map;
    std::function<double(const ComplexMatrix&)> objective;
    std::function<ComplexMatrix(const ComplexMatrix&)> project;
};

struct StemState {
    ComplexMatrix theta1;
    ComplexMatrix theta2;
    ComplexMatrix delta;  // theta1 - x
    ComplexMatrix w_res;  // theta2 - 2 theta1 + x
    /// Step size of the accepted candidate; -1 when the MM fallback was taken.
    double gamma = -1.0;
    /// Candidates rejected by the monotonicity check.
    int backtracks = 0;
    bool accepted_candidate = false;
    bool degenerate_curvature = false;
};

struct StemResult {
    ComplexMatrix x;
    double objective = 0.0;
    StemState state;
};

inline constexpr int kDefaultMaxBacktracks = 50;

/// One safeguarded STEM step from x. At most `max_backtracks` candidates
/// x - gamma * delta (projected) are tried, halving gamma toward -1 after each
/// rejection; a candidate is accepted when its objective is >= objective(x).
/// If none is accepted the step returns theta2 = M(M(x)), two plain map steps.
/// `f_x` may carry a cached objective(x).
StemResult stem_step(const FixedPointProblem& problem, const ComplexMatrix& x, int max_backtracks,
                     std::optional<double> f_x = std::nullopt);

/// Runs stem_step to convergence; each trace entry is one outer step and
/// mu_per_iter holds the accepted gamma.
SolveResult stem_solve(const FixedPointProblem& problem, const ComplexMatrix& x_init, const SolverOptions& opts,
                       int max_backtracks);

/// A-MM-KLD: STEM over mm_map with boundary normalization as the projection.
SolveResult a_mm_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts,
                     int max_backtracks = kDefaultMaxBacktracks);

/// sqrt(p) X / ||X||_F (X unchanged if zero).
ComplexMatrix project_to_sphere(const ComplexMatrix& x, double p);

}  // namespace kldwave
