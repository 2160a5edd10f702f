#pragma once

// Monte Carlo detection harness: Gaussian sampling, (mixture) log-likelihood
// ratios, Neyman-Pearson threshold calibration, detection-rate estimates.

#include "kldwave/linalg.hpp"
#include "kldwave/random_access.hpp"
#include "kldwave/rng.hpp"
#include "kldwave/scenario.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace kldwave {

/// T x N_r matrix whose columns are i.i.d. CN(0, k), drawn as L_k g.
ComplexMatrix sample_obs(const HermitianMatrix& k, int n_rx, SeededRng& rng);
ComplexMatrix sample_obs(const PdFactor& k, int n_rx, SeededRng& rng);

/// log p(Y | K1) - log p(Y | K0) for Y with i.i.d. CN(0, K) columns.
double llr(const ComplexMatrix& y, const HermitianMatrix& k0, const HermitianMatrix& k1);

/// log p(Y | K) including the -N_r T log(pi) constant.
double gaussian_loglik(const ComplexMatrix& y, const PdFactor& k);

struct MixtureComponent {
    double weight = 0.0;
    HermitianMatrix cov;
};

/// Zero-mean Gaussian mixture with factored components.
class GaussianMixture {
public:
    explicit GaussianMixture(const std::vector<MixtureComponent>& components);

    double loglik(const ComplexMatrix& y) const;
    std::size_t size() const { return factors_.size(); }

private:
    std::vector<double> log_weights_;
    std::vector<PdFactor> factors_;
};

/// log sum_s w_s p_1(Y|s) - log sum_s w_s p_0(Y|s), with max-shifted log-sum-exp.
double mixture_llr(const ComplexMatrix& y, const std::vector<MixtureComponent>& mixtures0,
                   const std::vector<MixtureComponent>& mixtures1);

/// Statistic of trial `index` under the null; must depend only on (index, its own rng).
using TrialStatistic = std::function<double(SeededRng& rng, std::uint64_t index)>;

struct ThresholdTest {
    double eta = 0.0;
    /// Detection probability applied to statistics exactly equal to eta.
    double tie_probability = 0.0;
};

/// eta = order statistic ceil((1 - alpha) n_cal) (1-based) of n_cal null draws;
/// trial t uses SeededRng(seed, stream_base + t). Throws InsufficientCalibration
/// when n_cal * alpha < 50.
double calibrate_threshold(const TrialStatistic& null_model, double alpha, int n_cal, std::uint64_t seed,
                           std::uint64_t stream_base = 0, int threads = 1);
/// As calibrate_threshold, plus the tie randomization that makes the test exact at ties.
ThresholdTest calibrate_test(const TrialStatistic& null_model, double alpha, int n_cal, std::uint64_t seed,
                             std::uint64_t stream_base = 0, int threads = 1);

struct Proportion {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long successes = 0;
    long trials = 0;
};

/// Wilson score interval at confidence 1 - level_alpha.
Proportion wilson_interval(long successes, long trials, double level_alpha = 0.05);

/// Fraction of n trials (streams stream_base + t) whose statistic passes the test.
/// Ties draw one extra uniform from the trial's rng after the statistic.
Proportion rejection_rate(const TrialStatistic& stat, const ThresholdTest& test, int n, std::uint64_t seed,
                          std::uint64_t stream_base, int threads = 1);

struct DetectionOptions {
    double alpha = 1e-3;
    int n_cal = 200000;
    int n_mc = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Use the pattern-conditional LRT with the true interferer pattern instead of the mixture LRT.
    bool genie = false;
};

struct UserDetection {
    ThresholdTest test;
    Proportion p_fa;
    Proportion p_d;
};

struct DetectionResult {
    std::vector<UserDetection> users;
    double geometric_mean = 0.0;
    /// Geometric means of the per-user Wilson bounds.
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_cal = 0;
    int n_mc = 0;
};

DetectionResult detection_experiment(const RandomAccessScenario& sc, const WaveformSet& xs,
                                     const DetectionOptions& opts);

/// Single-user sensing detection of the target (K0 vs K1 of the scenario).
UserDetection sensing_detection(const SensingScenario& sc, const Waveform& w, const DetectionOptions& opts);

/// Device i gets DFT columns i N_t .. i N_t + N_t - 1 (indices wrap modulo T),
/// scaled to its power budget.
WaveformSet orthogonal_baseline(const RandomAccessScenario& sc);

}  // namespace kldwave
