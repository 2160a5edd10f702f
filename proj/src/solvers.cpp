#include "kldwave/solvers.hpp"

#include "kldwave/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace kldwave {

std::string_view to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Converged:
            return "Converged";
        case SolverStatus::MaxIters:
            return "MaxIters";
    }
    return "Unknown";
}

HermitianEigen HermitianEigen::of(const HermitianMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

constexpr double kPseudoDivisionFloor = 1e-12;

void check_sylvester_shapes(Eigen::Index a_dim, Eigen::Index r_dim, const ComplexMatrix& b, double p_t) {
    if (b.rows() != a_dim || b.cols() != r_dim) {
        throw ShapeMismatch("Sylvester: B must be " + std::to_string(a_dim) + "x" + std::to_string(r_dim));
    }
    if (!(p_t > 0.0)) throw InputError("Sylvester: power budget must be positive");
}

// Finds mu >= 0 with power(mu) <= p_t and complementary slackness, given a
// strictly decreasing power(mu) on (0, inf) and the mu = 0 power p0.
template <class PowerFn>
double search_mu(PowerFn&& power, double p0, double b_norm, double p_t, double mu_tol) {
    if (p0 <= p_t) return 0.0;
    double hi = b_norm / std::sqrt(p_t);
    int doublings = 0;
    while (power(hi) > p_t) {
        hi *= 2.0;
        if (++doublings > 200 || !std::isfinite(hi)) throw InfeasibleMu("Sylvester: power residual not bracketable");
    }
    double lo = 0.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double pm = power(mid);
        if (std::abs(pm - p_t) <= mu_tol * p_t) return mid;
        if (pm > p_t) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

SylvesterSolution solve_structured(const HermitianMatrix& a, const HermitianEigen& r, const ComplexMatrix& b, double p_t,
                                   double mu_tol) {
    const Eigen::Index t = a.dim();
    const Eigen::Index n = r.values.size();
    check_sylvester_shapes(t, n, b, p_t);
    const double b_norm = b.norm();
    if (b_norm == 0.0) return {Waveform{ComplexMatrix::Zero(t, n)}, 0.0};

    const HermitianEigen ae = HermitianEigen::of(a);
    const RealVector la = ae.values.cwiseMax(0.0);
    const ComplexMatrix bt = ae.vectors.adjoint() * b * r.vectors;
    const Eigen::MatrixXd d = la * r.values.transpose();
    const Eigen::MatrixXd b2 = bt.cwiseAbs2();
    const double floor = kPseudoDivisionFloor * std::max(d.maxCoeff(), std::numeric_limits<double>::min());

    const auto power = [&](double mu) { return (b2.array() / (d.array() + mu).square()).sum(); };
    double p0 = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < t; ++i) {
            if (d(i, j) >= floor) p0 += b2(i, j) / (d(i, j) * d(i, j));
        }
    }
    const double mu = search_mu(power, p0, b_norm, p_t, mu_tol);

    ComplexMatrix xt(t, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < t; ++i) {
            const double den = d(i, j) + mu;
            xt(i, j) = (mu == 0.0 && d(i, j) < floor) ? Complex(0.0) : bt(i, j) / den;
        }
    }
    return {Waveform{ae.vectors * xt * r.vectors.adjoint()}, mu};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

SylvesterSolution solve_dense(const HermitianMatrix& a, const HermitianMatrix& r, const ComplexMatrix& b, double p_t,
                              double mu_tol) {
    const Eigen::Index t = a.dim();
    const Eigen::Index n = r.dim();
    check_sylvester_shapes(t, n, b, p_t);
    const double b_norm = b.norm();
    if (b_norm == 0.0) return {Waveform{ComplexMatrix::Zero(t, n)}, 0.0};

    const ComplexMatrix abar = kron(r.matrix().transpose(), a.matrix());
    const ComplexVector bvec = Eigen::Map<const ComplexVector>(b.data(), b.size());
    const ComplexMatrix ident = ComplexMatrix::Identity(abar.rows(), abar.cols());
    const auto solve_at = [&](double mu) -> ComplexVector {
        if (mu == 0.0) {
            Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(abar);
            cod.setThreshold(kPseudoDivisionFloor);
            return cod.solve(bvec);
        }
        return (abar + mu * ident).partialPivLu().solve(bvec);
    };
    const auto power = [&](double mu) { return solve_at(mu).squaredNorm(); };
    const double mu = search_mu(power, power(0.0), b_norm, p_t, mu_tol);
    const ComplexVector x = solve_at(mu);
    return {Waveform{Eigen::Map<const ComplexMatrix>(x.data(), t, n)}, mu};
}

}  // namespace

SylvesterSolution solve_x_sylvester(const HermitianMatrix& a, const HermitianEigen& r_h1, const ComplexMatrix& b,
                                    double p_t, double mu_tol) {
    return solve_structured(a, r_h1, b, p_t, mu_tol);
}

SylvesterSolution solve_x_sylvester(const HermitianMatrix& a, const HermitianMatrix& r_h1, const ComplexMatrix& b,
                                    double p_t, double mu_tol, bool dense) {
    if (dense) return solve_dense(a, r_h1, b, p_t, mu_tol);
    return solve_structured(a, HermitianEigen::of(r_h1), b, p_t, mu_tol);
}

double resolve_delta(double lambda_p, const SolverOptions& opts) {
    if (opts.delta > 0.0) return opts.delta;
    return std::max(opts.delta_rel * lambda_p, 1e-12);
}

double max_eig_or_trace(const HermitianMatrix& m, const SolverOptions& opts, bool* used_fallback) {
    PowerIterationOptions pio;
    pio.max_iters = opts.power_iter_k;
    pio.tol = opts.power_iter_tol;
    pio.seed = opts.seed;
    try {
        return power_iteration_max_eig(m, pio);
    } catch (const DidNotConverge&) {
        if (used_fallback) *used_fallback = true;
        return m.trace();
    }
}

SpectralBound lambda_bar(const HermitianMatrix& a, double r_h1_max, double r_h1_trace, const SolverOptions& opts) {
    SpectralBound out;
    const double a_max = max_eig_or_trace(a, opts, &out.used_fallback);
    // r_h1_max is non-positive when its own power iteration failed upstream.
    const double r_max = r_h1_max > 0.0 ? r_h1_max : r_h1_trace;
    out.lambda_p = a_max * r_max;
    out.lambda_bar = out.lambda_p + resolve_delta(out.lambda_p, opts);
    return out;
}

SpectralBound lambda_bar(const AuxiliaryVariables& aux, double r_h1_max, const SolverOptions& opts) {
    SpectralBound out;
    out.lambda_p = max_eig_factored(aux.psi, aux.gamma) * r_h1_max;
    out.lambda_bar = out.lambda_p + resolve_delta(out.lambda_p, opts);
    return out;
}

SpectralBound lambda_bar(const HermitianMatrix& a, const HermitianMatrix& r_h1, const SolverOptions& opts) {
    bool fallback = false;
    const double r_max = max_eig_or_trace(r_h1, opts, &fallback);
    SpectralBound out = lambda_bar(a, r_max, r_h1.trace(), opts);
    out.used_fallback = out.used_fallback || fallback;
    return out;
}

KldProblem::KldProblem(SensingScenario scenario, SolverOptions opts)
    : KldProblem(scenario, validate(scenario), opts) {}

KldProblem::KldProblem(SensingScenario scenario, DifferenceFactor factor, SolverOptions opts)
    : scenario_(std::move(scenario)), opts_(opts), factor_(std::move(factor)) {
    if (!(opts_.epsilon > 0.0)) throw InputError("epsilon must be > 0");
    if (opts_.max_iters < 1) throw InputError("max_iters must be >= 1");
    r_h1_ = scenario_.r_h1();
    r_h1_eig_ = HermitianEigen::of(r_h1_);
    r_h1_max_ = r_h1_eig_.values.maxCoeff();
}

KldProblem::FpStep KldProblem::fp_step(const Waveform& w) const { return fp_step(evaluate(w).aux); }

KldProblem::FpStep KldProblem::fp_step(const AuxiliaryVariables& aux) const {
    FpStep step;
    step.a = curvature_matrix(aux);
    step.b = linear_term(aux, factor_);
    SylvesterSolution sol =
        opts_.dense_sylvester
            ? solve_x_sylvester(step.a, r_h1_, step.b, scenario_.power_budget, opts_.mu_tol, true)
            : solve_x_sylvester(step.a, r_h1_eig_, step.b, scenario_.power_budget, opts_.mu_tol);
    step.w = std::move(sol.w);
    step.mu = sol.mu;
    return step;
}

KldProblem::MmStep KldProblem::mm_step(const Waveform& w) const { return mm_step(w, evaluate(w).aux); }

KldProblem::MmStep KldProblem::mm_step(const Waveform& w, const AuxiliaryVariables& aux) const {
    const HermitianMatrix a = curvature_matrix(aux);
    const ComplexMatrix b = linear_term(aux, factor_);
    const SpectralBound bound = lambda_bar(aux, r_h1_max_, opts_);

    MmStep step;
    step.relaxation = {w.x, bound.lambda_bar, bound.lambda_p};
    const ComplexMatrix v = b + bound.lambda_bar * w.x - kron_apply(a, r_h1_, w.x);
    const double norm = v.norm();
    if (norm < 1e-14) {
        step.w = w;
        step.degenerate = true;
        return step;
    }
    step.w = Waveform{v * (std::sqrt(scenario_.power_budget) / norm)};
    return step;
}

Waveform fp_iterate(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                    const SolverOptions& opts) {
    return KldProblem(scenario, l, opts).fp_step(w).w;
}

Waveform mm_map(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                const SolverOptions& opts) {
    return KldProblem(scenario, l, opts).mm_step(w).w;
}

double relative_change(double f_old, double f_new) {
    return std::abs(f_new - f_old) / std::max(1.0, std::abs(f_old));
}

SolveResult run_fixed_point(const std::function<double(const Waveform&)>& objective,
                            const std::function<std::pair<Waveform, double>(const Waveform&)>& step,
                            const Waveform& x_init, const SolverOptions& opts) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto stamp = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    SolveResult out;
    out.trace.seed = opts.seed;
    Waveform x = x_init;
    double f = objective(x);
    out.trace.objective_per_iter.push_back(f);
    out.trace.elapsed_seconds_per_iter.push_back(stamp());
    out.trace.mu_per_iter.push_back(std::numeric_limits<double>::quiet_NaN());
    for (int t = 0; t < opts.max_iters; ++t) {
        auto [next, logged] = step(x);
        const double f_next = objective(next);
        out.trace.objective_per_iter.push_back(f_next);
        out.trace.elapsed_seconds_per_iter.push_back(stamp());
        out.trace.mu_per_iter.push_back(logged);
        ++out.trace.iterations;
        const double change = relative_change(f, f_next);
        x = std::move(next);
        f = f_next;
        if (change < opts.epsilon) {
            out.trace.status = SolverStatus::Converged;
            break;
        }
    }
    out.trace.final_power = x.power();
    out.w = std::move(x);
    return out;
}

SolveResult fp_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts) {
    const KldProblem problem(scenario, opts);
    EvaluationCache cache(problem);
    return run_fixed_point(
        [&](const Waveform& x) { return cache.objective(x); },
        [&](const Waveform& x) {
            auto s = problem.fp_step(cache.aux(x));
            return std::pair<Waveform, double>{std::move(s.w), s.mu};
        },
        x_init, opts);
}

SolveResult mm_kld(const SensingScenario& scenario, const Waveform& x_init, const SolverOptions& opts) {
    const KldProblem problem(scenario, opts);
    EvaluationCache cache(problem);
    return run_fixed_point(
        [&](const Waveform& x) { return cache.objective(x); },
        [&](const Waveform& x) {
            auto s = problem.mm_step(x, cache.aux(x));
            return std::pair<Waveform, double>{std::move(s.w), std::numeric_limits<double>::quiet_NaN()};
        },
        x_init, opts);
}

const AuxiliaryVariables& EvaluationCache::aux(const Waveform& w) {
    if (!valid_ || x_.rows() != w.x.rows() || x_.cols() != w.x.cols() || x_ != w.x) objective(w);
    return last_.aux;
}

double EvaluationCache::objective(const Waveform& w) {
    last_ = problem_.evaluate(w);
    x_ = w.x;
    valid_ = true;
    return last_.f;
}

}  // namespace kldwave
