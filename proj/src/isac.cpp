#include "kldwave/isac.hpp"

#include "kldwave/accel.hpp"
#include "kldwave/errors.hpp"
#include "kldwave/rng.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace kldwave {

DifferenceFactor validate(const IsacScenario& sc) {
    DifferenceFactor l = validate(sc.sensing);
    if (!(sc.rho >= 0.0 && sc.rho <= 1.0)) throw InputError("rho must lie in [0, 1]");
    if (sc.h_c.cols() != sc.sensing.snapshots) throw ShapeMismatch("H_c must have one column per snapshot");
    if (sc.r_nc.dim() != sc.h_c.rows()) throw ShapeMismatch("R_nc must be N_c x N_c");
    if (!is_positive_definite(sc.r_nc)) throw InputError("R_nc is not positive definite");
    return l;
}

IsacValue isac_objective(const IsacScenario& sc, const Waveform& w) {
    const auto [k0, k1] = covariances(sc.sensing, w);
    IsacValue v;
    v.kld = kld_from_cov(k0, k1, sc.sensing.n_rx, sc.sensing.snapshots);
    v.mi = mi_eval(sc.h_c, sc.r_nc, w);
    v.weighted = (1.0 - sc.rho) * v.kld + sc.rho * v.mi;
    return v;
}

ComplexMatrix CompositeQuadratic::apply(const HermitianMatrix& r_h1, const ComplexMatrix& x) const {
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    if (w_sensing != 0.0) out += w_sensing * kron_apply(a, r_h1, x);
    if (w_comm != 0.0) out += w_comm * (c.matrix() * x);
    return out;
}

IsacProblem::IsacProblem(IsacScenario sc, SolverOptions opts) : sc_(std::move(sc)), opts_(opts) {
    factor_ = validate(sc_);
    r_h1_ = sc_.sensing.r_h1();
    r_h1_eig_ = HermitianEigen::of(r_h1_);
    r_h1_max_ = r_h1_eig_.values.maxCoeff();
}

CompositeQuadratic IsacProblem::model(const Waveform& w) const {
    CompositeQuadratic q;
    q.w_sensing = (1.0 - sc_.rho) * sc_.sensing.n_rx;
    q.w_comm = sc_.rho;
    q.aux = optimal_auxiliaries(sc_.sensing, factor_, w);
    q.a = curvature_matrix(q.aux);
    q.b = linear_term(q.aux, factor_);
    const CommAuxiliaries comm = comm_aux_star(sc_.h_c, sc_.r_nc, w);
    q.c_weight = HermitianMatrix::identity(comm.gamma_c.dim()) + comm.gamma_c;
    q.c_factor = sc_.h_c.adjoint() * comm.psi_c;
    q.d = q.c_factor * q.c_weight.matrix();
    q.c = HermitianMatrix::symmetrize(q.d * q.c_factor.adjoint());
    return q;
}

double IsacProblem::surrogate(const Waveform& x, const AuxiliaryVariables& aux, const CommAuxiliaries& comm) const {
    const auto& s = sc_.sensing;
    // f_q is tight to f - T, so N_r f_q is tight to the KLD.
    const double sensing = s.n_rx * f_q_eval(s, factor_, x, aux);
    return (1.0 - sc_.rho) * sensing + sc_.rho * f_cq_eval(sc_.h_c, sc_.r_nc, x, comm);
}

namespace {

// Conjugate gradients for a Hermitian positive (semi)definite matrix operator.
template <class Op>
ComplexMatrix conjugate_gradient(Op&& op, const ComplexMatrix& rhs, ComplexMatrix x, double rel_tol, int max_iters,
                                 bool* converged) {
    const double target = rel_tol * rhs.norm();
    ComplexMatrix r = rhs - op(x);
    ComplexMatrix p = r;
    double rs = r.squaredNorm();
    *converged = std::sqrt(rs) <= target;
    for (int k = 0; k < max_iters && !*converged; ++k) {
        const ComplexMatrix ap = op(p);
        const double curvature = real_inner(p, ap);
        if (!(curvature > 0.0)) break;
        const double alpha = rs / curvature;
        x += alpha * p;
        r -= alpha * ap;
        const double rs_next = r.squaredNorm();
        if (std::sqrt(rs_next) <= target) {
            *converged = true;
            break;
        }
        p = r + (rs_next / rs) * p;
        rs = rs_next;
    }
    return x;
}

constexpr double kCgTolerance = 1e-10;

}  // namespace

Waveform IsacProblem::fp_step(const Waveform& w) const {
    const CompositeQuadratic q = model(w);
    const double p_t = sc_.sensing.power_budget;
    if (q.w_comm == 0.0) {
        return solve_x_sylvester(q.a, r_h1_eig_, q.b, p_t, opts_.mu_tol).w;
    }
    if (q.w_sensing == 0.0) {
        const HermitianEigen ident = HermitianEigen::of(HermitianMatrix::identity(sc_.sensing.n_tx));
        return solve_x_sylvester(q.c, ident, q.d, p_t, opts_.mu_tol).w;
    }

    const ComplexMatrix rhs = q.rhs();
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Waveform{ComplexMatrix::Zero(w.x.rows(), w.x.cols())};
    const int max_cg = 20 * static_cast<int>(w.x.size()) + 100;
    ComplexMatrix warm = w.x;
    const auto solve_at = [&](double mu, bool* ok) {
        const auto op = [&](const ComplexMatrix& x) -> ComplexMatrix { return q.apply(r_h1_, x) + mu * x; };
        ComplexMatrix x = conjugate_gradient(op, rhs, warm, kCgTolerance, max_cg, ok);
        warm = x;
        return x;
    };

    // mu = 0 starts from zero so that a consistent singular system yields the minimum-norm solution.
    bool ok = false;
    warm.setZero();
    ComplexMatrix x0 = solve_at(0.0, &ok);
    warm = w.x;
    if (ok && x0.squaredNorm() <= p_t) return Waveform{std::move(x0)};

    double hi = rhs_norm / std::sqrt(p_t);
    double lo = 0.0;
    ComplexMatrix best = solve_at(hi, &ok);
    while (best.squaredNorm() > p_t) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw InfeasibleMu("ISAC: power residual not bracketable");
        best = solve_at(hi, &ok);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ComplexMatrix x = solve_at(mid, &ok);
        const double pm = x.squaredNorm();
        if (pm > p_t) {
            lo = mid;
        } else {
            hi = mid;
            best = std::move(x);
        }
        if (std::abs(pm - p_t) <= opts_.mu_tol * p_t) {
            if (pm > p_t) best = scale_to_power(x, p_t);
            break;
        }
    }
    return Waveform{std::move(best)};
}

SpectralBound IsacProblem::mm_bound(const CompositeQuadratic& q) const {
    SpectralBound out;
    double lp = 0.0;
    if (q.w_sensing != 0.0) lp += q.w_sensing * max_eig_factored(q.aux.psi, q.aux.gamma) * r_h1_max_;
    if (q.w_comm != 0.0) lp += q.w_comm * max_eig_factored(q.c_factor, q.c_weight);
    out.lambda_p = lp;
    out.lambda_bar = lp + resolve_delta(lp, opts_);
    return out;
}

Waveform IsacProblem::mm_step(const Waveform& w) const {
    const CompositeQuadratic q = model(w);
    const SpectralBound bound = mm_bound(q);
    const ComplexMatrix v = q.rhs() + bound.lambda_bar * w.x - q.apply(r_h1_, w.x);
    const double norm = v.norm();
    if (norm < 1e-14) return w;
    return Waveform{v * (std::sqrt(sc_.sensing.power_budget) / norm)};
}

Waveform isac_iterate(const IsacScenario& sc, const DifferenceFactor&, const Waveform& w, const SolverOptions& opts,
                      IsacVariant variant) {
    const IsacProblem problem(sc, opts);
    return variant == IsacVariant::Fp ? problem.fp_step(w) : problem.mm_step(w);
}

SolveResult isac_solve(const IsacScenario& sc, const Waveform& x_init, const SolverOptions& opts, IsacVariant variant,
                       bool accelerate) {
    const IsacProblem problem(sc, opts);
    const auto objective = [&](const Waveform& x) { return problem.weighted(x); };
    if (accelerate) {
        if (variant != IsacVariant::Mm) throw InputError("acceleration applies to the mm variant only");
        const double p_t = sc.sensing.power_budget;
        FixedPointProblem fpp;
        fpp.map = [&](const ComplexMatrix& x) { return problem.mm_step(Waveform{x}).x; };
        fpp.objective = [&](const ComplexMatrix& x) { return problem.weighted(Waveform{x}); };
        fpp.project = [p_t](const ComplexMatrix& x) { return project_to_sphere(x, p_t); };
        return stem_solve(fpp, x_init.x, opts, kDefaultMaxBacktracks);
    }
    const auto step = [&](const Waveform& x) {
        Waveform next = variant == IsacVariant::Fp ? problem.fp_step(x) : problem.mm_step(x);
        return std::pair<Waveform, double>{std::move(next), std::numeric_limits<double>::quiet_NaN()};
    };
    return run_fixed_point(objective, step, x_init, opts);
}

std::vector<ParetoPoint> pareto_sweep(const IsacScenario& base, std::span<const double> rho_grid,
                                      const Waveform& x_init, const SolverOptions& opts, IsacVariant variant,
                                      bool accelerate, bool warm_start) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        if (!(rho_grid[i] >= 0.0 && rho_grid[i] <= 1.0)) throw InputError("rho grid values must lie in [0, 1]");
        if (i > 0 && rho_grid[i] < rho_grid[i - 1]) throw InputError("rho grid must be sorted ascending");
    }
    std::vector<ParetoPoint> out;
    out.reserve(rho_grid.size());
    Waveform start = x_init;
    for (const double rho : rho_grid) {
        IsacScenario sc = base;
        sc.rho = rho;
        SolveResult res = isac_solve(sc, warm_start ? start : x_init, opts, variant, accelerate);
        const IsacValue v = isac_objective(sc, res.w);
        out.push_back({rho, v.kld, v.mi, res.trace.iterations, res.w});
        start = res.w;
    }
    return out;
}

IsacScenario make_isac_scenario(const SensingScenario& sensing, int n_c, double comm_snr_db, double rho,
                                std::uint64_t seed) {
    if (n_c < 1) throw InputError("n_c must be >= 1");
    SeededRng rng(seed, 2);
    IsacScenario sc;
    sc.sensing = sensing;
    sc.h_c = ComplexMatrix(n_c, sensing.snapshots);
    for (Eigen::Index j = 0; j < sc.h_c.cols(); ++j) {
        for (Eigen::Index i = 0; i < sc.h_c.rows(); ++i) sc.h_c(i, j) = rng.complex_normal();
    }
    sc.r_nc = HermitianMatrix::identity(n_c).scaled(noise_variance(sensing.power_budget, sensing.n_tx, comm_snr_db));
    sc.rho = rho;
    validate(sc);
    return sc;
}

}  // namespace kldwave
