#include "kldwave/scenario.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/rng.hpp"

#include <cmath>
#include <string>

namespace kldwave {

namespace {

void require_dim(const HermitianMatrix& m, int n, const char* name) {
    if (m.dim() != n) {
        throw ShapeMismatch(std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n) +
                            ", got dimension " + std::to_string(m.dim()));
    }
}

}  // namespace

bool is_positive_definite(const HermitianMatrix& m) {
    if (m.dim() == 0) return false;
    const RealVector ev = eigenvalues(m);
    const double largest = ev(ev.size() - 1);
    return largest > 0.0 && ev(0) > kPdRelativeThreshold * largest;
}

DifferenceFactor validate(const SensingScenario& s) {
    if (s.n_tx < 1 || s.n_rx < 1 || s.snapshots < 1) throw InputError("scenario dimensions must be >= 1");
    if (!(s.power_budget > 0.0) || !std::isfinite(s.power_budget)) throw InputError("power_budget must be > 0");
    require_dim(s.r_target, s.n_tx, "r_target");
    require_dim(s.r_clutter0, s.n_tx, "r_clutter0");
    require_dim(s.r_clutter1, s.n_tx, "r_clutter1");
    require_dim(s.r_noise, s.snapshots, "r_noise");
    if (!is_positive_definite(s.r_noise)) throw SingularNoise("r_noise is not positive definite");
    const HermitianMatrix diff = s.r_h1() - s.r_clutter0;
    if (!is_positive_definite(diff)) {
        throw IllPosedDetection("R_H1 - R_0 is not positive definite: the two hypotheses are not distinguishable");
    }
    return DifferenceFactor{cholesky_pd(diff)};
}

CovariancePair covariances(const SensingScenario& s, const Waveform& w) {
    if (w.x.rows() != s.snapshots || w.x.cols() != s.n_tx) {
        throw ShapeMismatch("waveform must be " + std::to_string(s.snapshots) + "x" + std::to_string(s.n_tx));
    }
    const ComplexMatrix& x = w.x;
    const ComplexMatrix k0 = x * s.r_clutter0.matrix() * x.adjoint() + s.r_noise.matrix();
    const ComplexMatrix k1 = x * s.r_h1().matrix() * x.adjoint() + s.r_noise.matrix();
    return {HermitianMatrix::symmetrize(k0), HermitianMatrix::symmetrize(k1)};
}

HermitianMatrix exponential_correlation(int n, double rho) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
    }
    return HermitianMatrix::symmetrize(m);
}

double noise_variance(double power_budget, int n_tx, double snr_db) {
    return power_budget / (n_tx * std::pow(10.0, snr_db / 10.0));
}

SensingScenario generate_scenario(const GeneratorConfig& gen, std::uint64_t seed) {
    if (gen.n_tx < 1 || gen.n_rx < 1 || gen.snapshots < 1) throw InvalidGenerator("dimensions must be >= 1");
    if (!(gen.rho_target >= 0.0 && gen.rho_target < 1.0)) throw InvalidGenerator("rho_target must be in [0, 1)");
    if (!(gen.clutter_rho_max >= 0.0 && gen.clutter_rho_max < 1.0)) {
        throw InvalidGenerator("clutter_rho_max must be in [0, 1)");
    }
    if (gen.clutter_ratio0 < 0.0 || gen.clutter_ratio1 < 0.0) throw InvalidGenerator("clutter ratios must be >= 0");
    if (!std::isfinite(gen.snr_db)) throw InvalidGenerator("snr_db must be finite");

    SeededRng rng(seed, 0);
    const double rho0 = gen.clutter_rho_max * rng.uniform();
    const double rho1 = gen.clutter_rho_max * rng.uniform();

    SensingScenario s;
    s.n_tx = gen.n_tx;
    s.n_rx = gen.n_rx;
    s.snapshots = gen.snapshots;
    s.power_budget = gen.power_budget > 0.0 ? gen.power_budget : static_cast<double>(gen.n_tx);
    s.r_target = exponential_correlation(gen.n_tx, gen.rho_target);
    s.r_clutter0 = exponential_correlation(gen.n_tx, rho0).scaled(gen.clutter_ratio0);
    s.r_clutter1 = gen.same_clutter ? s.r_clutter0
                                    : exponential_correlation(gen.n_tx, rho1).scaled(gen.clutter_ratio1);
    s.r_noise = HermitianMatrix::identity(gen.snapshots).scaled(noise_variance(s.power_budget, gen.n_tx, gen.snr_db));
    try {
        validate(s);
    } catch (const InputError& e) {
        throw InvalidGenerator(std::string("generator produced an invalid scenario: ") + e.what());
    }
    return s;
}

ComplexMatrix scale_to_power(const ComplexMatrix& x, double p) {
    const double norm2 = x.squaredNorm();
    if (norm2 == 0.0) return x;
    return x * std::sqrt(p / norm2);
}

Waveform init_waveform(const SensingScenario& s, std::uint64_t seed, InitKind kind) {
    ComplexMatrix x = ComplexMatrix::Zero(s.snapshots, s.n_tx);
    if (kind == InitKind::ScaledIdentityBlock) {
        const int k = std::min(s.snapshots, s.n_tx);
        for (int i = 0; i < k; ++i) x(i, i) = 1.0;
    } else {
        SeededRng rng(seed, 1);
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.complex_normal();
        }
    }
    return Waveform{scale_to_power(x, s.power_budget)};
}

}  // namespace kldwave
