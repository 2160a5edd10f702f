#pragma once

// Multi-device activity detection: pattern enumeration over interferer
// activity, the weighted-sum KLD, and the block-coordinate waveform solver.

#include "kldwave/linalg.hpp"
#include "kldwave/scenario.hpp"
#include "kldwave/solvers.hpp"

#include <cstdint>
#include <vector>

namespace kldwave {

inline constexpr int kMaxDevices = 12;

struct RandomAccessScenario {
    int n_devices = 1;
    int n_tx = 1;
    int n_rx = 1;
    int snapshots = 1;
    /// Per-device budget Tr(X_i X_i^H) <= power_budgets[i].
    std::vector<double> power_budgets;
    std::vector<HermitianMatrix> r_device;  // K matrices, N_t x N_t
    std::vector<double> priors;             // activity probabilities p_i
    HermitianMatrix r_noise;                // T x T
};

/// Activity of the K - 1 interferers of a focal device: bit k belongs to the
/// k-th other device in ascending index order.
struct ActivityPattern {
    std::uint32_t bits = 0;
    double weight = 0.0;
};

/// Index of the device carried by bit k when `focal` is excluded.
inline int pattern_device(int focal, int k) { return k < focal ? k : k + 1; }
bool pattern_active(const ActivityPattern& s, int focal, int device);

/// All 2^(K-1) patterns for focal device i (0-based), binary counting order.
/// Throws TooManyDevices for K > kMaxDevices.
std::vector<ActivityPattern> pattern_weights(const std::vector<double>& priors, int i);

/// Per-device Cholesky factors L_i (L_i L_i^H = R_i). Throws on invalid input.
std::vector<ComplexMatrix> validate(const RandomAccessScenario& sc);

struct WaveformSet {
    std::vector<Waveform> x;
};

/// K_{i,0}(s) = R_N + sum_{j != i} s_j X_j R_j X_j^H and K_{i,1} = K_{i,0} + X_i R_i X_i^H.
CovariancePair conditional_covs(const RandomAccessScenario& sc, const WaveformSet& xs, int i,
                                const ActivityPattern& s);

/// D_sum = N_r sum_i sum_s w(s) (log|K_{i,1} K_{i,0}^{-1}| + Tr(K_{i,1}^{-1} K_{i,0}) - T).
double sum_kld(const RandomAccessScenario& sc, const WaveformSet& xs);

/// Quadratic model of the joint surrogate in block j: maximize 2 Re<X_j, B_j> - Tr(X_j R_j X_j^H M_j).
struct BlockModel {
    HermitianMatrix m;
    ComplexMatrix b;
};

/// Cached scenario data shared by block updates and sweeps.
class RandomAccessProblem {
public:
    RandomAccessProblem(RandomAccessScenario sc, SolverOptions opts);

    const RandomAccessScenario& scenario() const { return sc_; }
    double objective(const WaveformSet& xs) const { return sum_kld(sc_, xs); }

    BlockModel block_model(const WaveformSet& xs, int j) const;
    /// Nonhomogeneous closed-form update of block j (output on its power sphere).
    Waveform block_update(const WaveformSet& xs, int j) const;
    /// Cyclic pass j = 0..K-1; each block sees the blocks already updated.
    WaveformSet sweep(const WaveformSet& xs) const;

private:
    RandomAccessScenario sc_;
    SolverOptions opts_;
    std::vector<ComplexMatrix> l_;
    std::vector<double> r_max_;
    std::vector<std::vector<ActivityPattern>> patterns_;
};

Waveform ra_block_update(const RandomAccessScenario& sc, const WaveformSet& xs, int j, const SolverOptions& opts);

struct RaSolveResult {
    WaveformSet xs;
    /// objective_per_iter holds D_sum per sweep (or per accelerated outer step).
    SolverTrace trace;
};

/// Cyclic sweeps until the relative D_sum change per sweep drops below epsilon.
/// `accelerate` wraps the sweep map in the STEM step with per-block normalization.
RaSolveResult ra_solve(const RandomAccessScenario& sc, const WaveformSet& xs_init, const SolverOptions& opts,
                       bool accelerate = false);

struct RaGeneratorConfig {
    int n_devices = 4;
    int n_tx = 4;
    int n_rx = 4;
    int snapshots = 8;
    /// Non-positive means "use n_tx".
    double power_budget = 0.0;
    double snr_db = 8.0;
    double prior = 0.5;
    /// |correlation| of each device covariance is drawn uniformly from [0, rho_max].
    double rho_max = 0.9;
};

/// R_i[m][n] = (r e^{j theta})^(m - n) for m >= n (Hermitian completion), with
/// (r, theta) drawn per device; R_N = sigma^2 I.
RandomAccessScenario generate_random_access(const RaGeneratorConfig& gen, std::uint64_t seed);

/// Seeded random waveforms, each scaled to its device budget.
WaveformSet init_waveform_set(const RandomAccessScenario& sc, std::uint64_t seed);

}  // namespace kldwave
