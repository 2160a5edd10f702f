#pragma once

// Sensing problem data: hypothesis statistics, dimensions, power budget.

#include "kldwave/linalg.hpp"

#include <cstdint>

namespace kldwave {

struct SensingScenario {
    int n_tx = 1;
    int n_rx = 1;
    int snapshots = 1;
    double power_budget = 1.0;
    HermitianMatrix r_target;    // N_t x N_t
    HermitianMatrix r_clutter0;  // N_t x N_t, clutter under H0
    HermitianMatrix r_clutter1;  // N_t x N_t, clutter under H1
    HermitianMatrix r_noise;     // T x T

    /// Target-plus-clutter covariance under H1.
    HermitianMatrix r_h1() const { return r_target + r_clutter1; }
};

/// T x N_t transmit matrix.
struct Waveform {
    ComplexMatrix x;

    double power() const { return x.squaredNorm(); }
};

/// Lower-triangular L with L L^H = R_H1 - R_0.
struct DifferenceFactor {
    ComplexMatrix l;
};

/// Relative eigenvalue floor used for every positive-definiteness test on scenario data.
inline constexpr double kPdRelativeThreshold = 1e-10;

/// True when min eig > kPdRelativeThreshold * max eig and max eig > 0.
bool is_positive_definite(const HermitianMatrix& m);

/// Checks shapes and the positivity assumptions; returns the factor of R_H1 - R_0.
/// Throws IllPosedDetection or SingularNoise.
DifferenceFactor validate(const SensingScenario& scenario);

struct CovariancePair {
    HermitianMatrix k0;
    HermitianMatrix k1;
};

/// K0 = X R0 X^H + R_N, K1 = X R_H1 X^H + R_N.
CovariancePair covariances(const SensingScenario& scenario, const Waveform& w);

struct GeneratorConfig {
    int n_tx = 4;
    int n_rx = 4;
    int snapshots = 8;
    /// Non-positive means "use n_tx".
    double power_budget = 0.0;
    double snr_db = 7.0;
    /// Exponential correlation coefficient of the target covariance, in [0, 1).
    double rho_target = 0.5;
    /// Clutter power relative to the target (Tr R_i = ratio * N_t).
    double clutter_ratio0 = 0.1;
    double clutter_ratio1 = 0.1;
    /// Clutter correlation coefficients are drawn uniformly from [0, clutter_rho_max].
    double clutter_rho_max = 0.5;
    /// Use the same clutter covariance under both hypotheses.
    bool same_clutter = false;
};

/// R[m][n] = rho^|m - n|; trace is n.
HermitianMatrix exponential_correlation(int n, double rho);

/// sigma^2 such that SNR_dB = 10 log10(P_t / (N_t sigma^2)).
double noise_variance(double power_budget, int n_tx, double snr_db);

/// Seeded synthetic scenario; throws InvalidGenerator for bad parameters.
SensingScenario generate_scenario(const GeneratorConfig& gen, std::uint64_t seed);

enum class InitKind { RandomGaussian, ScaledIdentityBlock };

/// Starting waveform with Tr(X X^H) = P_t.
Waveform init_waveform(const SensingScenario& scenario, std::uint64_t seed, InitKind kind = InitKind::RandomGaussian);

/// Scales x onto the power sphere Tr(X X^H) = p.
ComplexMatrix scale_to_power(const ComplexMatrix& x, double p);

}  // namespace kldwave
