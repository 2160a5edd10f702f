#pragma once

// Single-user waveform optimizers: FP-KLD (exact Sylvester X-update) and
// MM-KLD (nonhomogeneous closed-form update).

#include "kldwave/linalg.hpp"
#include "kldwave/objective.hpp"
#include "kldwave/scenario.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <string_view>
#include <vector>

namespace kldwave {

struct SolverOptions {
    double epsilon = 1e-6;
    int max_iters = 5000;
    /// Absolute spectral margin; non-positive selects max(delta_rel * lambda_p, 1e-12).
    double delta = 0.0;
    double delta_rel = 1e-6;
    double mu_tol = 1e-10;
    int power_iter_k = 100;
    double power_iter_tol = 1e-10;
    std::uint64_t seed = 0;
    /// Solve the X-subproblem with the dense vectorized system instead of the
    /// factor eigendecompositions (oracle/testing path, O((N_t T)^3)).
    bool dense_sylvester = false;
};

enum class SolverStatus { Converged, MaxIters };
std::string_view to_string(SolverStatus s);

struct SolverTrace {
    /// Objective at X^(0), X^(1), ...; size iterations + 1.
    std::vector<double> objective_per_iter;
    /// Monotonic-clock seconds since the solve started, stamped after each entry.
    std::vector<double> elapsed_seconds_per_iter;
    /// Per-iteration multiplier mu (FP) or STEM step gamma (accelerated); NaN where undefined.
    std::vector<double> mu_per_iter;
    int iterations = 0;
    SolverStatus status = SolverStatus::MaxIters;
    double final_power = 0.0;
    std::uint64_t seed = 0;
};

struct SolveResult {
    Waveform w;
    SolverTrace trace;
};

/// Eigendecomposition M = U diag(values) U^H with ascending values.
struct HermitianEigen {
    RealVector values;
    ComplexMatrix vectors;

    static HermitianEigen of(const HermitianMatrix& m);
};

struct SylvesterSolution {
    Waveform w;
    double mu = 0.0;
};

/// Solves A X R_H1 + mu X = B with mu >= 0 chosen by complementary slackness
/// against Tr(X X^H) <= p_t.
SylvesterSolution solve_x_sylvester(const HermitianMatrix& a, const HermitianMatrix& r_h1, const ComplexMatrix& b,
                                    double p_t, double mu_tol, bool dense = false);
SylvesterSolution solve_x_sylvester(const HermitianMatrix& a, const HermitianEigen& r_h1, const ComplexMatrix& b,
                                    double p_t, double mu_tol);

struct SpectralBound {
    double lambda_p = 0.0;
    double lambda_bar = 0.0;
    /// True when power iteration failed and the trace-product bound was used.
    bool used_fallback = false;
};

/// lambda_p = lambda_max(A) lambda_max(R_H1) = lambda_max(R_H1^T kron A); lambda_bar = lambda_p + delta.
SpectralBound lambda_bar(const HermitianMatrix& a, const HermitianMatrix& r_h1, const SolverOptions& opts);
/// Variant with lambda_max(R_H1) precomputed.
SpectralBound lambda_bar(const HermitianMatrix& a, double r_h1_max, double r_h1_trace, const SolverOptions& opts);

/// Bound used by the solvers: lambda_max(A) from the compressed factor form
/// A = Psi Gamma Psi^H (exact, O(T N_t^2 + N_t^3)) times the cached lambda_max(R_H1).
SpectralBound lambda_bar(const AuxiliaryVariables& aux, double r_h1_max, const SolverOptions& opts);

double resolve_delta(double lambda_p, const SolverOptions& opts);
/// Largest eigenvalue by power iteration, falling back to the trace (an upper bound for PSD input).
double max_eig_or_trace(const HermitianMatrix& m, const SolverOptions& opts, bool* used_fallback = nullptr);

struct RelaxationState {
    ComplexMatrix z;
    double lambda_bar = 0.0;
    double lambda_p = 0.0;
};

/// Cached per-scenario data shared by the single-user iterations.
class KldProblem {
public:
    KldProblem(SensingScenario scenario, SolverOptions opts);
    KldProblem(SensingScenario scenario, DifferenceFactor factor, SolverOptions opts);

    const SensingScenario& scenario() const { return scenario_; }
    const DifferenceFactor& factor() const { return factor_; }
    const HermitianMatrix& r_h1() const { return r_h1_; }
    const SolverOptions& options() const { return opts_; }

    double objective(const Waveform& w) const { return f_obj(scenario_, w); }
    Evaluation evaluate(const Waveform& w) const { return kldwave::evaluate(scenario_, factor_, w); }

    struct FpStep {
        Waveform w;
        double mu = 0.0;
        HermitianMatrix a;
        ComplexMatrix b;
    };
    FpStep fp_step(const Waveform& w) const;
    /// The exact update depends on X only through the auxiliaries at X.
    FpStep fp_step(const AuxiliaryVariables& aux) const;

    struct MmStep {
        Waveform w;
        RelaxationState relaxation;
        /// ||b + (lambda_bar I - A_bar) z|| fell below 1e-14; the input was returned.
        bool degenerate = false;
    };
    MmStep mm_step(const Waveform& w) const;
    MmStep mm_step(const Waveform& w, const AuxiliaryVariables& aux) const;

private:
    SensingScenario scenario_;
    SolverOptions opts_;
    DifferenceFactor factor_;
    HermitianMatrix r_h1_;
    HermitianEigen r_h1_eig_;
    double r_h1_max_ = 0.0;
};

/// Remembers the last evaluated point of one solve so that the step at X
/// reuses the factorizations made when the objective at X was logged.
/// Not shared across threads.
class EvaluationCache {
public:
    explicit EvaluationCache(const KldProblem& problem) : problem_(problem) {}

    double objective(const Waveform& w);
    const AuxiliaryVariables& aux(const Waveform& w);

private:
    const KldProblem& problem_;
    ComplexMatrix x_;
    Evaluation last_;
    bool valid_ = false;
};

/// One FP-KLD iteration.
Waveform fp_iterate(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                    const SolverOptions& opts);
/// One MM-KLD iteration (output on the power sphere).
Waveform mm_map(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                const SolverOptions& opts);

SolveResult fp_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts);
SolveResult mm_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts);

/// Generic monotone loop: x <- step(x) until |f_new - f_old| / max(1, |f_old|) < epsilon
/// or max_iters steps. `step` returns the next iterate and the value logged in mu_per_iter.
SolveResult run_fixed_point(const std::function<double(const Waveform&)>& objective,
                            const std::function<std::pair<Waveform, double>(const Waveform&)>& step,
                            const Waveform& x_init, const SolverOptions& opts);

/// |f_new - f_old| / max(1, |f_old|).
double relative_change(double f_old, double f_new);

}  // namespace kldwave
