#include "kldwave/detection.hpp"

#include "kldwave/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace kldwave {

ComplexMatrix sample_obs(const PdFactor& k, int n_rx, SeededRng& rng) {
    ComplexMatrix g(k.dim(), n_rx);
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.complex_normal();
    }
    return k.lower() * g;
}

ComplexMatrix sample_obs(const HermitianMatrix& k, int n_rx, SeededRng& rng) {
    return sample_obs(PdFactor(k), n_rx, rng);
}

double gaussian_loglik(const ComplexMatrix& y, const PdFactor& k) {
    const double n_r = static_cast<double>(y.cols());
    const double t = static_cast<double>(y.rows());
    return -n_r * t * std::log(std::numbers::pi) - n_r * k.logdet() - k.solve_lower(y).squaredNorm();
}

double llr(const ComplexMatrix& y, const HermitianMatrix& k0, const HermitianMatrix& k1) {
    if (k0.dim() != y.rows() || k1.dim() != y.rows()) throw ShapeMismatch("covariances must be T x T");
    return gaussian_loglik(y, PdFactor(k1)) - gaussian_loglik(y, PdFactor(k0));
}

GaussianMixture::GaussianMixture(const std::vector<MixtureComponent>& components) {
    if (components.empty()) throw InputError("mixture needs at least one component");
    double total = 0.0;
    for (const MixtureComponent& c : components) {
        if (!(c.weight >= 0.0)) throw InputError("mixture weights must be nonnegative");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
    for (const MixtureComponent& c : components) {
        if (c.weight == 0.0) continue;
        log_weights_.push_back(std::log(c.weight));
        factors_.emplace_back(c.cov);
    }
}

double GaussianMixture::loglik(const ComplexMatrix& y) const {
    thread_local std::vector<double> terms;
    terms.resize(factors_.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < factors_.size(); ++s) {
        terms[s] = log_weights_[s] + gaussian_loglik(y, factors_[s]);
        peak = std::max(peak, terms[s]);
    }
    double acc = 0.0;
    for (const double v : terms) acc += std::exp(v - peak);
    return peak + std::log(acc);
}

double mixture_llr(const ComplexMatrix& y, const std::vector<MixtureComponent>& mixtures0,
                   const std::vector<MixtureComponent>& mixtures1) {
    return GaussianMixture(mixtures1).loglik(y) - GaussianMixture(mixtures0).loglik(y);
}

namespace {

// Runs body(t) for t in [0, n) over `threads` workers with static contiguous chunks.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
    const int workers = std::max(1, std::min(threads, n));
    if (workers == 1) {
        for (int t = 0; t < n; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
                const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
                for (int t = lo; t < hi; ++t) body(t);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<double> draw_statistics(const TrialStatistic& stat, int n, std::uint64_t seed, std::uint64_t stream_base,
                                    int threads) {
    std::vector<double> out(n);
    parallel_for(n, threads, [&](int t) {
        SeededRng rng(seed, stream_base + static_cast<std::uint64_t>(t));
        out[t] = stat(rng, static_cast<std::uint64_t>(t));
    });
    return out;
}

void check_calibration(double alpha, int n_cal) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (n_cal * alpha < 50.0) throw InsufficientCalibration("n_cal * alpha must be >= 50");
}

}  // namespace

ThresholdTest calibrate_test(const TrialStatistic& null_model, double alpha, int n_cal, std::uint64_t seed,
                             std::uint64_t stream_base, int threads) {
    check_calibration(alpha, n_cal);
    std::vector<double> stats = draw_statistics(null_model, n_cal, seed, stream_base, threads);
    for (const double v : stats) {
        if (std::isnan(v)) throw NumericalError("null statistic is NaN");
    }
    const auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n_cal));
    const std::size_t idx = std::clamp<std::size_t>(rank, 1, stats.size()) - 1;
    std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(idx), stats.end());
    ThresholdTest test;
    test.eta = stats[idx];
    const auto greater = std::count_if(stats.begin(), stats.end(), [&](double v) { return v > test.eta; });
    const auto equal = std::count(stats.begin(), stats.end(), test.eta);
    const double excess = alpha - static_cast<double>(greater) / n_cal;
    test.tie_probability = equal > 0 ? std::clamp(excess * n_cal / static_cast<double>(equal), 0.0, 1.0) : 0.0;
    return test;
}

double calibrate_threshold(const TrialStatistic& null_model, double alpha, int n_cal, std::uint64_t seed,
                           std::uint64_t stream_base, int threads) {
    return calibrate_test(null_model, alpha, n_cal, seed, stream_base, threads).eta;
}

Proportion wilson_interval(long successes, long trials, double level_alpha) {
    if (trials <= 0) throw InputError("Wilson interval needs at least one trial");
    const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - level_alpha / 2.0);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {p, std::max(0.0, centre - half), std::min(1.0, centre + half), successes, trials};
}

Proportion rejection_rate(const TrialStatistic& stat, const ThresholdTest& test, int n, std::uint64_t seed,
                          std::uint64_t stream_base, int threads) {
    std::vector<char> hit(n, 0);
    parallel_for(n, threads, [&](int t) {
        SeededRng rng(seed, stream_base + static_cast<std::uint64_t>(t));
        const double v = stat(rng, static_cast<std::uint64_t>(t));
        if (v > test.eta) {
            hit[t] = 1;
        } else if (v == test.eta && test.tie_probability > 0.0) {
            hit[t] = rng.uniform() < test.tie_probability ? 1 : 0;
        }
    });
    long count = 0;
    for (const char h : hit) count += h;
    return wilson_interval(count, n);
}

namespace {

// Stream layout: user in the top bits, phase next, trial index in the low 40 bits.
std::uint64_t stream_of(int user, int phase) {
    return (static_cast<std::uint64_t>(user) << 48) | (static_cast<std::uint64_t>(phase) << 40);
}

enum Phase { kCalibration = 1, kMissTrials = 2, kFalseAlarmTrials = 3 };

struct UserModel {
    std::vector<ActivityPattern> patterns;
    std::vector<PdFactor> k0;
    std::vector<PdFactor> k1;
    GaussianMixture mix0;
    GaussianMixture mix1;
};

std::vector<MixtureComponent> components(const std::vector<ActivityPattern>& patterns,
                                         const std::vector<HermitianMatrix>& covs) {
    std::vector<MixtureComponent> out;
    for (std::size_t s = 0; s < patterns.size(); ++s) out.push_back({patterns[s].weight, covs[s]});
    return out;
}

UserModel build_user(const RandomAccessScenario& sc, const WaveformSet& xs, int i) {
    std::vector<ActivityPattern> patterns = pattern_weights(sc.priors, i);
    std::vector<HermitianMatrix> c0;
    std::vector<HermitianMatrix> c1;
    for (const ActivityPattern& s : patterns) {
        CovariancePair k = conditional_covs(sc, xs, i, s);
        c0.push_back(std::move(k.k0));
        c1.push_back(std::move(k.k1));
    }
    std::vector<PdFactor> f0;
    std::vector<PdFactor> f1;
    for (std::size_t s = 0; s < patterns.size(); ++s) {
        f0.emplace_back(c0[s]);
        f1.emplace_back(c1[s]);
    }
    return UserModel{patterns, std::move(f0), std::move(f1), GaussianMixture(components(patterns, c0)),
                     GaussianMixture(components(patterns, c1))};
}

// Interferer activity drawn from the priors, one uniform per other device in ascending order.
std::size_t draw_pattern(const RandomAccessScenario& sc, int focal, SeededRng& rng) {
    std::uint32_t bits = 0;
    for (int k = 0; k + 1 < sc.n_devices; ++k) {
        if (rng.bernoulli(sc.priors[pattern_device(focal, k)])) bits |= 1u << k;
    }
    return bits;
}

double geometric_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (const double x : v) {
        if (x <= 0.0) return 0.0;
        acc += std::log(x);
    }
    return std::exp(acc / static_cast<double>(v.size()));
}

}  // namespace

DetectionResult detection_experiment(const RandomAccessScenario& sc, const WaveformSet& xs,
                                     const DetectionOptions& opts) {
    validate(sc);
    DetectionResult out;
    out.n_cal = opts.n_cal;
    out.n_mc = opts.n_mc;
    std::vector<double> pd;
    std::vector<double> lo;
    std::vector<double> hi;
    for (int i = 0; i < sc.n_devices; ++i) {
        const UserModel um = build_user(sc, xs, i);
        const auto statistic = [&](bool active) -> TrialStatistic {
            return [&um, &sc, i, active, genie = opts.genie](SeededRng& rng, std::uint64_t) {
                const std::size_t s = draw_pattern(sc, i, rng);
                const ComplexMatrix y = sample_obs(active ? um.k1[s] : um.k0[s], sc.n_rx, rng);
                if (genie) return gaussian_loglik(y, um.k1[s]) - gaussian_loglik(y, um.k0[s]);
                return um.mix1.loglik(y) - um.mix0.loglik(y);
            };
        };
        UserDetection ud;
        ud.test = calibrate_test(statistic(false), opts.alpha, opts.n_cal, opts.seed, stream_of(i, kCalibration),
                                 opts.threads);
        ud.p_d = rejection_rate(statistic(true), ud.test, opts.n_mc, opts.seed, stream_of(i, kMissTrials),
                                opts.threads);
        ud.p_fa = rejection_rate(statistic(false), ud.test, opts.n_mc, opts.seed, stream_of(i, kFalseAlarmTrials),
                                 opts.threads);
        pd.push_back(ud.p_d.estimate);
        lo.push_back(ud.p_d.ci_low);
        hi.push_back(ud.p_d.ci_high);
        out.users.push_back(ud);
    }
    out.geometric_mean = geometric_mean(pd);
    out.ci_low = geometric_mean(lo);
    out.ci_high = geometric_mean(hi);
    return out;
}

UserDetection sensing_detection(const SensingScenario& sc, const Waveform& w, const DetectionOptions& opts) {
    validate(sc);
    const CovariancePair k = covariances(sc, w);
    const PdFactor f0(k.k0);
    const PdFactor f1(k.k1);
    const auto statistic = [&](bool target) -> TrialStatistic {
        return [&, target](SeededRng& rng, std::uint64_t) {
            const ComplexMatrix y = sample_obs(target ? f1 : f0, sc.n_rx, rng);
            return gaussian_loglik(y, f1) - gaussian_loglik(y, f0);
        };
    };
    UserDetection ud;
    ud.test = calibrate_test(statistic(false), opts.alpha, opts.n_cal, opts.seed, stream_of(0, kCalibration),
                             opts.threads);
    ud.p_d = rejection_rate(statistic(true), ud.test, opts.n_mc, opts.seed, stream_of(0, kMissTrials), opts.threads);
    ud.p_fa = rejection_rate(statistic(false), ud.test, opts.n_mc, opts.seed, stream_of(0, kFalseAlarmTrials),
                             opts.threads);
    return ud;
}

WaveformSet orthogonal_baseline(const RandomAccessScenario& sc) {
    const int t = sc.snapshots;
    const double scale = 1.0 / std::sqrt(static_cast<double>(t));
    WaveformSet out;
    for (int i = 0; i < sc.n_devices; ++i) {
        ComplexMatrix x(t, sc.n_tx);
        for (int c = 0; c < sc.n_tx; ++c) {
            const int col = (i * sc.n_tx + c) % t;
            for (int r = 0; r < t; ++r) {
                const double phase = -2.0 * std::numbers::pi * static_cast<double>((r * col) % t) / t;
                x(r, c) = std::polar(scale, phase);
            }
        }
        out.x.push_back(Waveform{scale_to_power(x, sc.power_budgets[i])});
    }
    return out;
}

}  // namespace kldwave
