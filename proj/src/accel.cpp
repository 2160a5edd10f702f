#include "kldwave/accel.hpp"

#include "kldwave/errors.hpp"

#include <chrono>
#include <cmath>

namespace kldwave {

namespace {

constexpr double kCurvatureFloor = 1e-14;

}  // namespace

ComplexMatrix project_to_sphere(const ComplexMatrix& x, double p) { return scale_to_power(x, p); }

StemResult stem_step(const FixedPointProblem& problem, const ComplexMatrix& x, int max_backtracks,
                     std::optional<double> f_x) {
    if (max_backtracks < 0) throw InputError("max_backtracks must be >= 0");
    const double f0 = f_x ? *f_x : problem.objective(x);
    if (!std::isfinite(f0)) throw NumericalError("STEM: objective at the current point is not finite");

    StemResult out;
    StemState& st = out.state;
    st.theta1 = problem.map(x);
    st.delta = st.theta1 - x;
    const double dd = st.delta.squaredNorm();
    if (dd == 0.0) {
        st.theta2 = st.theta1;
        st.w_res = ComplexMatrix::Zero(x.rows(), x.cols());
        out.x = x;
        out.objective = f0;
        return out;
    }
    st.theta2 = problem.map(st.theta1);
    st.w_res = st.theta2 - 2.0 * st.theta1 + x;

    const double dw = real_inner(st.delta, st.w_res);
    if (std::abs(dw) < kCurvatureFloor * dd) {
        st.degenerate_curvature = true;
    } else {
        double gamma = dd / dw;
        for (int attempt = 0; attempt < max_backtracks; ++attempt) {
            const ComplexMatrix cand = problem.project(x - gamma * st.delta);
            const double f_cand = problem.objective(cand);
            if (f_cand >= f0) {
                st.gamma = gamma;
                st.accepted_candidate = true;
                out.x = cand;
                out.objective = f_cand;
                return out;
            }
            ++st.backtracks;
            gamma = (gamma - 1.0) / 2.0;
        }
    }
    st.gamma = -1.0;
    out.x = st.theta2;
    out.objective = problem.objective(st.theta2);
    return out;
}

SolveResult stem_solve(const FixedPointProblem& problem, const ComplexMatrix& x_init, const SolverOptions& opts,
                       int max_backtracks) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto stamp = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    SolveResult out;
    out.trace.seed = opts.seed;
    ComplexMatrix x = x_init;
    double f = problem.objective(x);
    out.trace.objective_per_iter.push_back(f);
    out.trace.elapsed_seconds_per_iter.push_back(stamp());
    out.trace.mu_per_iter.push_back(std::nan(""));
    for (int t = 0; t < opts.max_iters; ++t) {
        StemResult step = stem_step(problem, x, max_backtracks, f);
        out.trace.objective_per_iter.push_back(step.objective);
        out.trace.elapsed_seconds_per_iter.push_back(stamp());
        out.trace.mu_per_iter.push_back(step.state.gamma);
        ++out.trace.iterations;
        const double change = relative_change(f, step.objective);
        x = std::move(step.x);
        f = step.objective;
        if (change < opts.epsilon) {
            out.trace.status = SolverStatus::Converged;
            break;
        }
    }
    out.trace.final_power = x.squaredNorm();
    out.w = Waveform{std::move(x)};
    return out;
}

SolveResult a_mm_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts,
                     int max_backtracks) {
    const KldProblem kp(scenario, opts);
    const double p_t = scenario.power_budget;
    FixedPointProblem fpp;
    EvaluationCache cache(kp);
    fpp.map = [&](const ComplexMatrix& x) {
        const Waveform w{x};
        return kp.mm_step(w, cache.aux(w)).w.x;
    };
    fpp.objective = [&](const ComplexMatrix& x) { return cache.objective(Waveform{x}); };
    fpp.project = [p_t](const ComplexMatrix& x) { return project_to_sphere(x, p_t); };
    return stem_solve(fpp, x_init.x, opts, max_backtracks);
}

}  // namespace kldwave
