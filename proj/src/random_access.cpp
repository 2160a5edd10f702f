#include "kldwave/random_access.hpp"

#include "kldwave/accel.hpp"
#include "kldwave/errors.hpp"
#include "kldwave/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kldwave {

bool pattern_active(const ActivityPattern& s, int focal, int device) {
    if (device == focal) return false;
    const int k = device < focal ? device : device - 1;
    return ((s.bits >> k) & 1u) != 0;
}

std::vector<ActivityPattern> pattern_weights(const std::vector<double>& priors, int i) {
    const int k_dev = static_cast<int>(priors.size());
    if (k_dev > kMaxDevices) throw TooManyDevices("at most " + std::to_string(kMaxDevices) + " devices supported");
    if (i < 0 || i >= k_dev) throw InputError("focal device index out of range");
    const int n_other = k_dev - 1;
    std::vector<ActivityPattern> out(std::size_t{1} << n_other);
    for (std::uint32_t bits = 0; bits < out.size(); ++bits) {
        double w = 1.0;
        for (int k = 0; k < n_other; ++k) {
            const double p = priors[pattern_device(i, k)];
            w *= ((bits >> k) & 1u) ? p : 1.0 - p;
        }
        out[bits] = {bits, w};
    }
    return out;
}

std::vector<ComplexMatrix> validate(const RandomAccessScenario& sc) {
    if (sc.n_devices < 1) throw InputError("n_devices must be >= 1");
    if (sc.n_devices > kMaxDevices) throw TooManyDevices("at most " + std::to_string(kMaxDevices) + " devices supported");
    if (sc.n_tx < 1 || sc.n_rx < 1 || sc.snapshots < 1) throw InputError("dimensions must be >= 1");
    const auto k = static_cast<std::size_t>(sc.n_devices);
    if (sc.r_device.size() != k || sc.priors.size() != k || sc.power_budgets.size() != k) {
        throw ShapeMismatch("r_device, priors and power budgets need one entry per device");
    }
    if (sc.r_noise.dim() != sc.snapshots) throw ShapeMismatch("R_N must be T x T");
    if (!is_positive_definite(sc.r_noise)) throw SingularNoise("R_N is not positive definite");
    std::vector<ComplexMatrix> l;
    l.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(sc.priors[i] > 0.0 && sc.priors[i] < 1.0)) throw InputError("priors must lie in (0, 1)");
        if (!(sc.power_budgets[i] > 0.0) || !std::isfinite(sc.power_budgets[i])) {
            throw InputError("power budgets must be positive");
        }
        if (sc.r_device[i].dim() != sc.n_tx) throw ShapeMismatch("each R_i must be N_t x N_t");
        if (!is_positive_definite(sc.r_device[i])) {
            throw IllPosedDetection("R_" + std::to_string(i + 1) + " is not positive definite");
        }
        l.push_back(cholesky_pd(sc.r_device[i]));
    }
    return l;
}

namespace {

void check_set(const RandomAccessScenario& sc, const WaveformSet& xs) {
    if (xs.x.size() != static_cast<std::size_t>(sc.n_devices)) throw ShapeMismatch("one waveform per device required");
    for (const Waveform& w : xs.x) {
        if (w.x.rows() != sc.snapshots || w.x.cols() != sc.n_tx) throw ShapeMismatch("waveforms must be T x N_t");
    }
}

// X_j R_j X_j^H for every device.
std::vector<ComplexMatrix> device_terms(const RandomAccessScenario& sc, const WaveformSet& xs) {
    std::vector<ComplexMatrix> q;
    q.reserve(xs.x.size());
    for (std::size_t j = 0; j < xs.x.size(); ++j) {
        q.push_back(xs.x[j].x * sc.r_device[j].matrix() * xs.x[j].x.adjoint());
    }
    return q;
}

ComplexMatrix interference_cov(const RandomAccessScenario& sc, const std::vector<ComplexMatrix>& q, int i,
                               const ActivityPattern& s) {
    ComplexMatrix k0 = sc.r_noise.matrix();
    for (int j = 0; j < sc.n_devices; ++j) {
        if (pattern_active(s, i, j)) k0 += q[j];
    }
    return k0;
}

// Per-antenna KLD term log|K1| - log|K0| + Tr(K1^{-1} K0) - T.
double kld_term(const HermitianMatrix& k0, const HermitianMatrix& k1) {
    const PdFactor f0(k0);
    const PdFactor f1(k1);
    const ComplexMatrix w = f1.solve_lower(f0.lower());
    return f1.logdet() - f0.logdet() + w.squaredNorm() - static_cast<double>(k0.dim());
}

}  // namespace

CovariancePair conditional_covs(const RandomAccessScenario& sc, const WaveformSet& xs, int i,
                                const ActivityPattern& s) {
    check_set(sc, xs);
    const auto q = device_terms(sc, xs);
    const ComplexMatrix k0 = interference_cov(sc, q, i, s);
    return {HermitianMatrix::symmetrize(k0), HermitianMatrix::symmetrize(k0 + q[i])};
}

double sum_kld(const RandomAccessScenario& sc, const WaveformSet& xs) {
    check_set(sc, xs);
    const auto q = device_terms(sc, xs);
    double total = 0.0;
    for (int i = 0; i < sc.n_devices; ++i) {
        for (const ActivityPattern& s : pattern_weights(sc.priors, i)) {
            const ComplexMatrix k0 = interference_cov(sc, q, i, s);
            total += s.weight * kld_term(HermitianMatrix::symmetrize(k0), HermitianMatrix::symmetrize(k0 + q[i]));
        }
    }
    return sc.n_rx * total;
}

RandomAccessProblem::RandomAccessProblem(RandomAccessScenario sc, SolverOptions opts)
    : sc_(std::move(sc)), opts_(opts) {
    l_ = validate(sc_);
    for (int i = 0; i < sc_.n_devices; ++i) {
        r_max_.push_back(eigenvalues(sc_.r_device[i]).maxCoeff());
        patterns_.push_back(pattern_weights(sc_.priors, i));
    }
}

BlockModel RandomAccessProblem::block_model(const WaveformSet& xs, int j) const {
    check_set(sc_, xs);
    if (j < 0 || j >= sc_.n_devices) throw InputError("block index out of range");
    const auto q = device_terms(sc_, xs);
    const Eigen::Index t = sc_.snapshots;
    ComplexMatrix m = ComplexMatrix::Zero(t, t);
    ComplexMatrix b = ComplexMatrix::Zero(t, sc_.n_tx);
    for (int i = 0; i < sc_.n_devices; ++i) {
        const ComplexMatrix xl = xs.x[i].x * l_[i];
        for (const ActivityPattern& s : patterns_[i]) {
            if (i != j && !pattern_active(s, i, j)) continue;
            const ComplexMatrix k0 = interference_cov(sc_, q, i, s);
            const PdFactor f0(HermitianMatrix::symmetrize(k0));
            const PdFactor f1(HermitianMatrix::symmetrize(k0 + q[i]));
            const ComplexMatrix white = f0.solve_lower(xl);
            const ComplexMatrix gamma = white.adjoint() * white;
            const ComplexMatrix psi = f1.solve(xl);
            const ComplexMatrix psi_gamma = psi * gamma;
            m += s.weight * psi_gamma * psi.adjoint();
            if (i == j) b += s.weight * psi_gamma * l_[j].adjoint();
        }
    }
    const double n_r = sc_.n_rx;
    return {HermitianMatrix::symmetrize(n_r * m), n_r * b};
}

Waveform RandomAccessProblem::block_update(const WaveformSet& xs, int j) const {
    const BlockModel model = block_model(xs, j);
    const HermitianMatrix& r_j = sc_.r_device[j];
    // M_j sums many rank-N_t terms, so its top eigenvalue comes from a dense T x T solve.
    const double lambda_p = eigenvalues(model.m).maxCoeff() * r_max_[j];
    const double lambda = lambda_p + resolve_delta(lambda_p, opts_);
    const ComplexMatrix& x = xs.x[j].x;
    const ComplexMatrix v = model.b + lambda * x - kron_apply(model.m, r_j, x);
    const double norm = v.norm();
    if (norm < 1e-14) return xs.x[j];
    return Waveform{v * (std::sqrt(sc_.power_budgets[j]) / norm)};
}

WaveformSet RandomAccessProblem::sweep(const WaveformSet& xs) const {
    WaveformSet out = xs;
    for (int j = 0; j < sc_.n_devices; ++j) out.x[j] = block_update(out, j);
    return out;
}

Waveform ra_block_update(const RandomAccessScenario& sc, const WaveformSet& xs, int j, const SolverOptions& opts) {
    return RandomAccessProblem(sc, opts).block_update(xs, j);
}

namespace {

ComplexMatrix stack(const WaveformSet& xs) {
    const Eigen::Index t = xs.x.front().x.rows();
    ComplexMatrix out(t * static_cast<Eigen::Index>(xs.x.size()), xs.x.front().x.cols());
    for (std::size_t i = 0; i < xs.x.size(); ++i) out.middleRows(static_cast<Eigen::Index>(i) * t, t) = xs.x[i].x;
    return out;
}

WaveformSet unstack(const ComplexMatrix& m, int k) {
    const Eigen::Index t = m.rows() / k;
    WaveformSet out;
    for (int i = 0; i < k; ++i) out.x.push_back(Waveform{m.middleRows(i * t, t)});
    return out;
}

}  // namespace

RaSolveResult ra_solve(const RandomAccessScenario& sc, const WaveformSet& xs_init, const SolverOptions& opts,
                       bool accelerate) {
    const RandomAccessProblem problem(sc, opts);
    check_set(sc, xs_init);
    const int k = sc.n_devices;
    FixedPointProblem fpp;
    fpp.map = [&](const ComplexMatrix& x) { return stack(problem.sweep(unstack(x, k))); };
    fpp.objective = [&](const ComplexMatrix& x) { return problem.objective(unstack(x, k)); };
    fpp.project = [&](const ComplexMatrix& x) {
        WaveformSet xs = unstack(x, k);
        for (int i = 0; i < k; ++i) xs.x[i].x = project_to_sphere(xs.x[i].x, sc.power_budgets[i]);
        return stack(xs);
    };

    SolveResult res;
    if (accelerate) {
        res = stem_solve(fpp, stack(xs_init), opts, kDefaultMaxBacktracks);
    } else {
        const auto objective = [&](const Waveform& w) { return fpp.objective(w.x); };
        const auto step = [&](const Waveform& w) {
            return std::pair<Waveform, double>{Waveform{fpp.map(w.x)}, std::nan("")};
        };
        res = run_fixed_point(objective, step, Waveform{stack(xs_init)}, opts);
    }
    RaSolveResult out;
    out.xs = unstack(res.w.x, k);
    out.trace = std::move(res.trace);
    double worst = 0.0;
    for (const Waveform& w : out.xs.x) worst = std::max(worst, w.power());
    out.trace.final_power = worst;
    return out;
}

namespace {

HermitianMatrix complex_exponential_correlation(int n, double r, double theta) {
    const Complex c = std::polar(r, theta);
    ComplexMatrix m(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) m(a, b) = a >= b ? std::pow(c, a - b) : std::conj(std::pow(c, b - a));
    }
    return HermitianMatrix::symmetrize(m);
}

}  // namespace

RandomAccessScenario generate_random_access(const RaGeneratorConfig& gen, std::uint64_t seed) {
    if (gen.n_devices < 1 || gen.n_tx < 1 || gen.n_rx < 1 || gen.snapshots < 1) {
        throw InvalidGenerator("dimensions must be >= 1");
    }
    if (gen.n_devices > kMaxDevices) throw TooManyDevices("at most " + std::to_string(kMaxDevices) + " devices supported");
    if (!(gen.prior > 0.0 && gen.prior < 1.0)) throw InvalidGenerator("prior must lie in (0, 1)");
    if (!(gen.rho_max >= 0.0 && gen.rho_max < 1.0)) throw InvalidGenerator("rho_max must be in [0, 1)");
    if (!std::isfinite(gen.snr_db)) throw InvalidGenerator("snr_db must be finite");

    SeededRng rng(seed, 0);
    RandomAccessScenario sc;
    sc.n_devices = gen.n_devices;
    sc.n_tx = gen.n_tx;
    sc.n_rx = gen.n_rx;
    sc.snapshots = gen.snapshots;
    const double p_t = gen.power_budget > 0.0 ? gen.power_budget : static_cast<double>(gen.n_tx);
    sc.power_budgets.assign(gen.n_devices, p_t);
    sc.priors.assign(gen.n_devices, gen.prior);
    for (int i = 0; i < gen.n_devices; ++i) {
        const double r = gen.rho_max * rng.uniform();
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        sc.r_device.push_back(complex_exponential_correlation(gen.n_tx, r, theta));
    }
    sc.r_noise = HermitianMatrix::identity(gen.snapshots).scaled(noise_variance(p_t, gen.n_tx, gen.snr_db));
    try {
        validate(sc);
    } catch (const InputError& e) {
        throw InvalidGenerator(std::string("generator produced an invalid scenario: ") + e.what());
    }
    return sc;
}

WaveformSet init_waveform_set(const RandomAccessScenario& sc, std::uint64_t seed) {
    SeededRng rng(seed, 1);
    WaveformSet xs;
    for (int i = 0; i < sc.n_devices; ++i) {
        ComplexMatrix x(sc.snapshots, sc.n_tx);
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.complex_normal();
        }
        xs.x.push_back(Waveform{scale_to_power(x, sc.power_budgets[i])});
    }
    return xs;
}

}  // namespace kldwave
