#include "kldwave/checks.hpp"

#include "kldwave/accel.hpp"
#include "kldwave/detection.hpp"
#include "kldwave/errors.hpp"
#include "kldwave/isac.hpp"
#include "kldwave/objective.hpp"
#include "kldwave/oracles.hpp"
#include "kldwave/random_access.hpp"
#include "kldwave/rng.hpp"
#include "kldwave/scenario.hpp"
#include "kldwave/solvers.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace kldwave::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double scale(double f) { return std::max(1.0, std::abs(f)); }

ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
    }
    return m;
}

HermitianMatrix random_pd(int n, SeededRng& rng) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    ComplexMatrix m = g * g.adjoint() / static_cast<double>(n);
    m.diagonal().array() += 0.1;
    return HermitianMatrix::symmetrize(m);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

GeneratorConfig small_config(int n_tx, int n_rx, int t) {
    GeneratorConfig g;
    g.n_tx = n_tx;
    g.n_rx = n_rx;
    g.snapshots = t;
    return g;
}

// Largest ascent violation of a trace, relative to max(1, |f|).
double worst_drop(const std::vector<double>& f) {
    double worst = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k) worst = std::max(worst, (f[k - 1] - f[k]) / scale(f[k - 1]));
    return worst;
}

CheckResult monotone_ascent(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    SolverOptions opts;
    double worst = 0.0;
    int traces = 0;
    for (int s = 0; s < 20; ++s) {
        const std::uint64_t seed = ctx.seed + s;
        const SensingScenario sc = generate_scenario(small_config(4, 4, 8), seed);
        const Waveform x0 = init_waveform(sc, seed);
        for (const SolveResult& r : {fp_kld(sc, x0, opts), mm_kld(sc, x0, opts), a_mm_kld(sc, x0, opts)}) {
            worst = std::max(worst, worst_drop(r.trace.objective_per_iter));
            ++traces;
        }
    }
    const double secs = seconds_since(t0);
    return {"monotone_ascent", worst <= 1e-9 && secs < 30.0,
            fmt("%d traces, worst relative drop %.2e, %.1f s", traces, worst, secs), secs};
}

CheckResult surrogate_tightness(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    double tight_q = 0.0, tight_h = 0.0, order_viol = 0.0;
    SolverOptions opts;
    for (int k = 0; k < 100; ++k) {
        SeededRng rng(ctx.seed, 1000 + k);
        const int n_tx = 2 + k % 3;
        const int t = n_tx + k % (n_tx + 1);
        const SensingScenario sc = generate_scenario(small_config(n_tx, 1 + k % 4, t), ctx.seed + k);
        const DifferenceFactor l = validate(sc);
        Waveform w{random_matrix(t, n_tx, rng) * std::exp(rng.normal())};
        // f_q drops the X-independent constant T of f.
        const double f = oracle::f_direct(sc, w.x) - t;
        const double r_max = eigenvalues(sc.r_h1()).maxCoeff();

        const AuxiliaryVariables opt = optimal_auxiliaries(sc, l, w);
        const double fq = f_q_eval(sc, l, w, opt);
        const double lam = lambda_bar(opt, r_max, opts).lambda_bar;
        const double fh = f_h_eval(sc, l, w, opt, w.x, lam);
        tight_q = std::max(tight_q, std::abs(fq - f) / scale(f));
        tight_h = std::max(tight_h, std::abs(fh - fq) / scale(f));

        const ComplexMatrix g = random_matrix(n_tx, n_tx, rng);
        const AuxiliaryVariables off{HermitianMatrix::symmetrize(g * g.adjoint()), random_matrix(t, n_tx, rng)};
        const ComplexMatrix z = random_matrix(t, n_tx, rng);
        const double fq_off = f_q_eval(sc, l, w, off);
        const double fh_off = f_h_eval(sc, l, w, off, z, lambda_bar(off, r_max, opts).lambda_bar);
        order_viol = std::max({order_viol, (fh_off - fq_off) / scale(f), (fq_off - f) / scale(f)});
    }
    const double secs = seconds_since(t0);
    const bool ok = tight_q <= 1e-8 && tight_h <= 1e-8 && order_viol <= 1e-8 && secs < 10.0;
    return {"surrogate_tightness", ok,
            fmt("|fq-f| %.1e, |fh-fq| %.1e, worst order violation %.1e, %.2f s", tight_q, tight_h, order_viol, secs),
            secs};
}

CheckResult gradient(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        SeededRng rng(ctx.seed, 2000 + k);
        const int n_tx = 2 + k % 3;
        const int t = 2 * n_tx;
        const SensingScenario sc = generate_scenario(small_config(n_tx, 2, t), ctx.seed + 100 + k);
        const DifferenceFactor l = validate(sc);
        const ComplexMatrix x = random_matrix(t, n_tx, rng);
        const AuxiliaryVariables aux = optimal_auxiliaries(sc, l, Waveform{x});
        const ComplexMatrix g =
            surrogate_gradient(curvature_matrix(aux), linear_term(aux, l), sc.r_h1(), x);
        ComplexMatrix fd(t, n_tx);
        for (int j = 0; j < n_tx; ++j) {
            for (int i = 0; i < t; ++i) {
                double parts[2];
                for (int c = 0; c < 2; ++c) {
                    const Complex e = c == 0 ? Complex(h, 0.0) : Complex(0.0, h);
                    ComplexMatrix xp = x, xm = x;
                    xp(i, j) += e;
                    xm(i, j) -= e;
                    parts[c] = (oracle::f_direct(sc, xp) - oracle::f_direct(sc, xm)) / (2.0 * h);
                }
                fd(i, j) = Complex(parts[0], parts[1]);
            }
        }
        worst = std::max(worst, (fd - g).norm() / g.norm());
    }
    const double secs = seconds_since(t0);
    return {"gradient", worst <= 1e-4 && secs < 10.0, fmt("worst relative error %.2e over 10 points, %.2f s", worst, secs),
            secs};
}

CheckResult sylvester_kkt(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    // (n_tx, T) with n_tx * T <= 16.
    const int dims[][2] = {{2, 2}, {2, 4}, {2, 8}, {3, 4}, {4, 4}};
    double resid = 0.0, slack = 0.0, dense = 0.0, feas = 0.0;
    int boundary = 0;
    for (int k = 0; k < 20; ++k) {
        SeededRng rng(ctx.seed, 3000 + k);
        const auto [n_tx, t] = std::tuple{dims[k % 5][0], dims[k % 5][1]};
        GeneratorConfig g = small_config(n_tx, 2, t);
        SensingScenario sc = generate_scenario(g, ctx.seed + 200 + k);
        const Waveform w{scale_to_power(random_matrix(t, n_tx, rng), sc.power_budget)};
        // Odd instances get a budget well above the unconstrained step so that the multiplier vanishes.
        if (k % 2) sc.power_budget *= 50.0;
        const KldProblem problem(sc, SolverOptions{});
        const KldProblem::FpStep step = problem.fp_step(w);
        const ComplexMatrix& x = step.w.x;
        const ComplexMatrix r = step.a.matrix() * x * sc.r_h1().matrix() + step.mu * x - step.b;
        resid = std::max(resid, r.norm() / step.b.norm());
        const double p = x.squaredNorm();
        slack = std::max(slack, step.mu * std::abs(sc.power_budget - p) / scale(step.mu * sc.power_budget));
        feas = std::max(feas, (p - sc.power_budget) / sc.power_budget);
        if (step.mu > 0.0) ++boundary;
        const ComplexMatrix ref = oracle::sylvester_dense(step.a.matrix(), sc.r_h1().matrix(), step.b, step.mu);
        dense = std::max(dense, (ref - x).cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(t0);
    const bool ok = resid <= 1e-8 && slack <= 1e-10 && feas <= 1e-10 && dense <= 1e-8;
    return {"sylvester_kkt", ok,
            fmt("residual %.1e, slackness %.1e, feasibility %.1e, dense gap %.1e (%d/20 on boundary), %.2f s", resid,
                slack, feas, dense, boundary, secs),
            secs};
}

CheckResult kronecker_spectrum(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    const int dims[][2] = {{2, 2}, {2, 4}, {2, 8}, {3, 4}, {4, 4}};
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        SeededRng rng(ctx.seed, 4000 + k);
        const auto [n_tx, t] = std::tuple{dims[k % 5][0], dims[k % 5][1]};
        const SensingScenario sc = generate_scenario(small_config(n_tx, 2, t), ctx.seed + 300 + k);
        const DifferenceFactor l = validate(sc);
        const Waveform w{scale_to_power(random_matrix(t, n_tx, rng), sc.power_budget)};
        const AuxiliaryVariables aux = optimal_auxiliaries(sc, l, w);
        const double r_max = eigenvalues(sc.r_h1()).maxCoeff();
        const double got = lambda_bar(aux, r_max, SolverOptions{}).lambda_p;
        const double ref = oracle::top_eigenvalue(oracle::kron(curvature_matrix(aux).matrix(), sc.r_h1().matrix()));
        worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    }
    const double secs = seconds_since(t0);
    return {"kronecker_spectrum", worst <= 1e-8, fmt("worst relative error %.2e over 20 instances, %.2f s", worst, secs),
            secs};
}

CheckResult kld_monte_carlo(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    constexpr int n = 1000000;
    constexpr int n_rx = 2;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        SeededRng rng(ctx.seed, 5000 + k);
        const HermitianMatrix k0 = random_pd(2, rng);
        const HermitianMatrix k1 = random_pd(2, rng);
        const PdFactor f0(k0), f1(k1);
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const ComplexMatrix y = sample_obs(f0, n_rx, rng);
            const double v = gaussian_loglik(y, f1) - gaussian_loglik(y, f0);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
        const double kld = kld_from_cov(k0, k1, n_rx, 2);
        worst = std::max(worst, std::abs(-mean - kld) / se);
    }
    const double secs = seconds_since(t0);
    return {"kld_monte_carlo", worst <= 3.0 && secs < 60.0,
            fmt("worst deviation %.2f standard errors over 5 pairs, %.1f s", worst, secs), secs};
}

CheckResult cross_solver(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    SolverOptions opts;
    double worst = 0.0;
    std::string where;
    for (int s = 0; s < 10; ++s) {
        const std::uint64_t seed = ctx.seed + s;
        const SensingScenario sc = generate_scenario(small_config(4, 4, 8), seed);
        const Waveform x0 = init_waveform(sc, seed);
        const double a = fp_kld(sc, x0, opts).trace.objective_per_iter.back();
        const double b = mm_kld(sc, x0, opts).trace.objective_per_iter.back();
        const double c = a_mm_kld(sc, x0, opts).trace.objective_per_iter.back();
        const double hi = std::max({a, b, c});
        const double gap = (hi - std::min({a, b, c})) / scale(hi);
        if (gap > 1e-3) where += fmt(" seed %llu: fp %.6f mm %.6f amm %.6f;", (unsigned long long)seed, a, b, c);
        worst = std::max(worst, gap);
    }
    const double secs = seconds_since(t0);
    return {"cross_solver", worst <= 1e-3, fmt("worst relative spread %.2e, %.1f s.", worst, secs) + where, secs};
}

CheckResult iteration_ordering(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    SolverOptions opts;
    int good = 0;
    std::string counts;
    for (int s = 0; s < 10; ++s) {
        const std::uint64_t seed = ctx.seed + s;
        const SensingScenario sc = generate_scenario(small_config(8, 8, 16), seed);
        const Waveform x0 = init_waveform(sc, seed);
        const int fp = fp_kld(sc, x0, opts).trace.iterations;
        const int mm = mm_kld(sc, x0, opts).trace.iterations;
        const int amm = a_mm_kld(sc, x0, opts).trace.iterations;
        if (fp <= mm && amm <= mm) ++good;
        counts += fmt(" %d/%d/%d", fp, mm, amm);
    }
    const double secs = seconds_since(t0);
    return {"iteration_ordering", good >= 7,
            fmt("%d/10 instances ordered, %.1f s; fp/mm/amm iterations:", good, secs) + counts, secs};
}

CheckResult runtime_ordering(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    SolverOptions opts;
    const SensingScenario sc = generate_scenario(small_config(16, 16, 32), ctx.seed);
    const Waveform x0 = init_waveform(sc, ctx.seed);
    // Per-iteration time skips the first iteration, which carries one-off warm-up costs.
    const auto per_iter = [](const SolverTrace& t) {
        const auto& e = t.elapsed_seconds_per_iter;
        return t.iterations > 1 ? (e.back() - e[1]) / (t.iterations - 1) : e.back();
    };
    std::vector<double> fp_it, mm_it, fp_tot, amm_tot;
    for (int rep = 0; rep < 3; ++rep) {
        const SolveResult fp = fp_kld(sc, x0, opts);
        const SolveResult mm = mm_kld(sc, x0, opts);
        const SolveResult amm = a_mm_kld(sc, x0, opts);
        fp_it.push_back(per_iter(fp.trace));
        mm_it.push_back(per_iter(mm.trace));
        fp_tot.push_back(fp.trace.elapsed_seconds_per_iter.back());
        amm_tot.push_back(amm.trace.elapsed_seconds_per_iter.back());
    }
    const double secs = seconds_since(t0);
    const double a = median(mm_it), b = median(fp_it), c = median(amm_tot), d = median(fp_tot);
    return {"runtime_ordering", a < b && c < d && secs < 300.0,
            fmt("per-iteration mm %.3f ms vs fp %.3f ms; total amm %.1f ms vs fp %.1f ms; %.1f s", a * 1e3, b * 1e3,
                c * 1e3, d * 1e3, secs),
            secs};
}

CheckResult stem_exactness(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    double affine = 0.0;
    const double contractions[] = {0.5, 0.9, -0.3, 0.99, 1.5};
    for (int k = 0; k < 5; ++k) {
        SeededRng rng(ctx.seed, 6000 + k);
        const double c = contractions[k];
        const ComplexMatrix b = random_matrix(4, 3, rng);
        const ComplexMatrix fixed = b / (1.0 - c);
        FixedPointProblem p;
        p.map = [c, b](const ComplexMatrix& x) -> ComplexMatrix { return c * x + b; };
        p.objective = [fixed](const ComplexMatrix& x) { return -(x - fixed).squaredNorm(); };
        p.project = [](const ComplexMatrix& x) { return x; };
        ComplexMatrix x = random_matrix(4, 3, rng);
        for (int step = 0; step < 2; ++step) x = stem_step(p, x, kDefaultMaxBacktracks).x;
        affine = std::max(affine, (x - fixed).norm() / std::max(1.0, fixed.norm()));
    }
    // With no candidates allowed every outer step is two plain MM steps.
    double fallback = 0.0;
    for (int s = 0; s < 3; ++s) {
        const SensingScenario sc = generate_scenario(small_config(4, 4, 8), ctx.seed + s);
        const Waveform x0 = init_waveform(sc, ctx.seed + s);
        for (int k = 1; k <= 5; ++k) {
            SolverOptions opts;
            opts.epsilon = 1e-300;
            opts.max_iters = k;
            const SolveResult a = a_mm_kld(sc, x0, opts, 0);
            opts.max_iters = 2 * k;
            const SolveResult m = mm_kld(sc, x0, opts);
            fallback = std::max(fallback, (a.w.x - m.w.x).cwiseAbs().maxCoeff());
        }
    }
    const double secs = seconds_since(t0);
    return {"stem_exactness", affine <= 1e-10 && fallback <= 1e-12,
            fmt("affine fixed-point error after 2 steps %.1e; fallback vs MM iterate gap %.1e, %.2f s", affine,
                fallback, secs),
            secs};
}

CheckResult isac_endpoints(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    const SensingScenario sensing = generate_scenario(small_config(4, 4, 4), ctx.seed);
    const IsacScenario base = make_isac_scenario(sensing, 4, 10.0, 0.0, ctx.seed);
    const double grid[] = {0.0, 0.5, 1.0};
    SolverOptions opts;
    opts.epsilon = 1e-9;
    opts.max_iters = 20000;
    const auto pts = pareto_sweep(base, grid, init_waveform(sensing, ctx.seed), opts);
    const double wf = oracle::water_filling_mi(base.h_c, base.r_nc.matrix(), sensing.power_budget, sensing.n_tx);
    const double mi_gap = std::abs(pts[2].mi - wf) / scale(wf);
    const bool ok = pts[0].kld >= pts[2].kld - 1e-6 && pts[2].mi >= pts[0].mi - 1e-6 && mi_gap <= 1e-3;
    const double secs = seconds_since(t0);
    return {"isac_endpoints", ok,
            fmt("KLD %.4f/%.4f/%.4f, MI %.4f/%.4f/%.4f at rho 0/0.5/1; water-filling MI %.6f (gap %.1e), %.2f s",
                pts[0].kld, pts[1].kld, pts[2].kld, pts[0].mi, pts[1].mi, pts[2].mi, wf, mi_gap, secs),
            secs};
}

CheckResult calibration(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    DetectionOptions d;
    d.alpha = 1e-3;
    d.n_cal = 200000;
    d.n_mc = 100000;
    d.threads = ctx.threads;
    const boost::math::binomial_distribution<double> held_out(d.n_mc, d.alpha);
    const auto lo = static_cast<long>(boost::math::quantile(held_out, 0.025));
    const auto hi = static_cast<long>(boost::math::quantile(boost::math::complement(held_out, 0.025)));
    bool ok = true;
    std::string counts;
    for (int k = 0; k < 5; ++k) {
        const SensingScenario sc = generate_scenario(GeneratorConfig{}, ctx.seed + 400 + k);
        d.seed = ctx.seed + k;
        const UserDetection u = sensing_detection(sc, init_waveform(sc, ctx.seed + k), d);
        ok = ok && u.p_fa.successes >= lo && u.p_fa.successes <= hi;
        counts += fmt(" %ld", u.p_fa.successes);
    }
    const double secs = seconds_since(t0);
    return {"calibration", ok && secs < 120.0,
            fmt("false alarms in %d held-out trials:%s (acceptance [%ld, %ld]), %.1f s", d.n_mc, counts.c_str(), lo, hi,
                secs),
            secs};
}

struct RaPoint {
    DetectionResult optimized;
    DetectionResult baseline;
};

// Random-access outcomes are shared by the dominance and length-sweep checks.
const RaPoint& ra_point(const CheckContext& ctx, int t) {
    static std::mutex mu;
    static std::map<std::tuple<std::uint64_t, int, int>, RaPoint> cache;
    const std::lock_guard lock(mu);
    const auto key = std::tuple{ctx.seed, ctx.threads, t};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    RaGeneratorConfig g;
    g.snapshots = t;
    const RandomAccessScenario sc = generate_random_access(g, ctx.seed);
    const WaveformSet opt = ra_solve(sc, init_waveform_set(sc, ctx.seed), SolverOptions{}, true).xs;
    DetectionOptions d;
    d.seed = ctx.seed;
    d.threads = ctx.threads;
    RaPoint p{detection_experiment(sc, opt, d), detection_experiment(sc, orthogonal_baseline(sc), d)};
    return cache.emplace(key, std::move(p)).first->second;
}

double halfwidth(const DetectionResult& r) { return 0.5 * (r.ci_high - r.ci_low); }

CheckResult ra_dominance(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    const RaPoint& p = ra_point(ctx, 8);
    const double margin = p.optimized.geometric_mean - p.baseline.geometric_mean;
    const double need = halfwidth(p.optimized) + halfwidth(p.baseline);
    const double secs = seconds_since(t0);
    return {"ra_dominance", margin > need && secs < 600.0,
            fmt("optimized %.4f [%.4f, %.4f] vs orthogonal %.4f [%.4f, %.4f], %.1f s", p.optimized.geometric_mean,
                p.optimized.ci_low, p.optimized.ci_high, p.baseline.geometric_mean, p.baseline.ci_low,
                p.baseline.ci_high, secs),
            secs};
}

CheckResult ra_length_sweep(const CheckContext& ctx) {
    const auto t0 = Clock::now();
    const int lengths[] = {4, 8, 12};
    std::vector<const RaPoint*> pts;
    for (int t : lengths) pts.push_back(&ra_point(ctx, t));
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const DetectionResult& o = pts[k]->optimized;
        const DetectionResult& b = pts[k]->baseline;
        ok = ok && o.geometric_mean >= b.geometric_mean;
        if (k > 0) {
            for (const auto& [cur, prev] : {std::pair{&o, &pts[k - 1]->optimized}, std::pair{&b, &pts[k - 1]->baseline}}) {
                ok = ok && (cur->geometric_mean >= prev->geometric_mean || cur->ci_high >= prev->ci_low);
            }
        }
        detail += fmt(" T=%d: %.4f vs %.4f;", lengths[k], o.geometric_mean, b.geometric_mean);
    }
    const double secs = seconds_since(t0);
    return {"ra_length_sweep", ok, fmt("optimized vs orthogonal geometric-mean P_d:%s %.1f s", detail.c_str(), secs),
            secs};
}

}  // namespace

const std::vector<Check>& all_checks() {
    static const std::vector<Check> checks = {
        {"monotone_ascent", "nondecreasing traces for fp, mm and accelerated mm", monotone_ascent},
        {"surrogate_tightness", "surrogates are tight at the optimal auxiliaries and ordered elsewhere",
         surrogate_tightness},
        {"gradient", "surrogate gradient matches finite differences of f", gradient},
        {"sylvester_kkt", "exact X-update satisfies its optimality conditions", sylvester_kkt},
        {"kronecker_spectrum", "curvature bound equals the Kronecker top eigenvalue", kronecker_spectrum},
        {"kld_monte_carlo", "closed-form KLD matches the sampled log-likelihood ratio", kld_monte_carlo},
        {"cross_solver", "solvers reach the same objective from the same start", cross_solver},
        {"iteration_ordering", "fp and accelerated mm need no more iterations than mm", iteration_ordering},
        {"runtime_ordering", "mm is cheaper per iteration and accelerated mm is faster overall", runtime_ordering},
        {"stem_exactness", "acceleration solves affine maps and falls back to mm exactly", stem_exactness},
        {"isac_endpoints", "trade-off endpoints are ordered and match water-filling", isac_endpoints},
        {"calibration", "held-out false-alarm rate is consistent with alpha", calibration},
        {"ra_dominance", "optimized random-access waveforms beat orthogonal ones", ra_dominance},
        {"ra_length_sweep", "detection improves with sequence length", ra_length_sweep},
    };
    return checks;
}

std::vector<CheckResult> run_checks(const CheckContext& ctx, const std::vector<std::string>& only) {
    for (const std::string& name : only) {
        const auto& all = all_checks();
        if (std::none_of(all.begin(), all.end(), [&](const Check& c) { return c.name == name; })) {
            throw ConfigError("unknown check '" + name + "'");
        }
    }
    std::vector<CheckResult> out;
    for (const Check& c : all_checks()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
        try {
            out.push_back(c.run(ctx));
        } catch (const std::exception& e) {
            out.push_back({c.name, false, std::string("threw: ") + e.what(), 0.0});
        }
    }
    return out;
}

std::string format(const CheckResult& r) {
    return fmt("%s %s (%.2f s): ", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds) + r.detail;
}

}  // namespace kldwave::checks
