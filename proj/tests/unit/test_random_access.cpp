#include "support.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/objective.hpp"
#include "kldwave/oracles.hpp"
#include "kldwave/random_access.hpp"

#include <cmath>

using namespace kldwave;
using namespace kldwave::test;

namespace {

RandomAccessScenario ra(int k, int t, std::uint64_t seed) {
    RaGeneratorConfig g;
    g.n_devices = k;
    g.n_tx = 2;
    g.n_rx = 2;
    g.snapshots = t;
    return generate_random_access(g, seed);
}

}  // namespace

TEST_CASE("pattern enumeration") {
    CHECK(pattern_device(2, 0) == 0);
    CHECK(pattern_device(2, 1) == 1);
    CHECK(pattern_device(2, 2) == 3);
    const std::vector<double> priors{0.2, 0.5, 0.7, 0.9};
    const auto pats = pattern_weights(priors, 1);
    REQUIRE(pats.size() == 8);
    double total = 0.0;
    for (const ActivityPattern& s : pats) {
        double w = 1.0;
        for (int k = 0; k < 3; ++k) {
            const int dev = pattern_device(1, k);
            const bool on = (s.bits >> k) & 1u;
            CHECK(pattern_active(s, 1, dev) == on);
            w *= on ? priors[dev] : 1.0 - priors[dev];
        }
        CHECK(s.weight == doctest::Approx(w));
        total += s.weight;
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK_THROWS_AS(pattern_weights(std::vector<double>(13, 0.5), 0), TooManyDevices);
    CHECK(pattern_weights({0.3}, 0).size() == 1);
}

TEST_CASE("sum KLD matches full enumeration") {
    for (int k : {1, 2, 3}) {
        const RandomAccessScenario sc = ra(k, 4, 10 + k);
        SeededRng rng(k);
        WaveformSet xs;
        for (int i = 0; i < k; ++i) xs.x.push_back(Waveform{random_matrix(4, 2, rng)});
        CHECK(rel(sum_kld(sc, xs), oracle::sum_kld_direct(sc, xs)) < 1e-10);
    }
}

TEST_CASE("a single device is the clutter-free sensing problem") {
    const RandomAccessScenario sc = ra(1, 4, 3);
    SensingScenario s;
    s.n_tx = 2;
    s.n_rx = 2;
    s.snapshots = 4;
    s.power_budget = sc.power_budgets[0];
    s.r_target = sc.r_device[0];
    s.r_clutter0 = HermitianMatrix::zero(2);
    s.r_clutter1 = HermitianMatrix::zero(2);
    s.r_noise = sc.r_noise;
    SeededRng rng(3);
    const Waveform w{random_matrix(4, 2, rng)};
    CHECK(rel(sum_kld(sc, WaveformSet{{w}}), 2.0 * (f_obj(s, w) - 4.0)) < 1e-12);
}

TEST_CASE("block model is tangent to the sum KLD") {
    const RandomAccessScenario sc = ra(3, 4, 5);
    const RandomAccessProblem p(sc, SolverOptions{});
    SeededRng rng(5);
    WaveformSet xs;
    for (int i = 0; i < 3; ++i) xs.x.push_back(Waveform{random_matrix(4, 2, rng)});
    const double h = 1e-5;
    for (int j = 0; j < 3; ++j) {
        const BlockModel m = p.block_model(xs, j);
        const ComplexMatrix& x = xs.x[j].x;
        const ComplexMatrix g = 2.0 * (m.b - m.m.matrix() * x * sc.r_device[j].matrix());
        ComplexMatrix fd(4, 2);
        for (int c = 0; c < 2; ++c) {
            for (int r = 0; r < 4; ++r) {
                double parts[2];
                for (int im = 0; im < 2; ++im) {
                    WaveformSet a = xs, b = xs;
                    const Complex e = im ? Complex(0, h) : Complex(h, 0);
                    a.x[j].x(r, c) += e;
                    b.x[j].x(r, c) -= e;
                    parts[im] = (oracle::sum_kld_direct(sc, a) - oracle::sum_kld_direct(sc, b)) / (2 * h);
                }
                fd(r, c) = Complex(parts[0], parts[1]);
            }
        }
        CHECK((fd - g).norm() <= 1e-4 * g.norm());
    }
}

TEST_CASE("block updates and sweeps ascend") {
    const RandomAccessScenario sc = ra(3, 4, 6);
    const RandomAccessProblem p(sc, SolverOptions{});
    WaveformSet xs = init_waveform_set(sc, 6);
    for (int i = 0; i < 3; ++i) CHECK(xs.x[i].power() == doctest::Approx(sc.power_budgets[i]));
    for (int sweep = 0; sweep < 5; ++sweep) {
        for (int j = 0; j < 3; ++j) {
            const double before = p.objective(xs);
            xs.x[j] = p.block_update(xs, j);
            CHECK(p.objective(xs) >= before - 1e-9 * std::max(1.0, before));
            CHECK(xs.x[j].power() == doctest::Approx(sc.power_budgets[j]));
        }
    }
}

TEST_CASE("ra_solve converges monotonically, with and without acceleration") {
    const RandomAccessScenario sc = ra(3, 4, 7);
    const WaveformSet x0 = init_waveform_set(sc, 7);
    for (bool acc : {false, true}) {
        const RaSolveResult r = ra_solve(sc, x0, SolverOptions{}, acc);
        const auto& f = r.trace.objective_per_iter;
        for (std::size_t k = 1; k < f.size(); ++k) CHECK(f[k] >= f[k - 1] - 1e-9 * std::max(1.0, f[k - 1]));
        CHECK(r.trace.status == SolverStatus::Converged);
        CHECK(f.back() == doctest::Approx(sum_kld(sc, r.xs)));
        CHECK(f.back() > f.front());
    }
}

TEST_CASE("random-access generator") {
    const RandomAccessScenario a = ra(4, 8, 1), b = ra(4, 8, 1);
    CHECK(validate(a).size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK((a.r_device[i].matrix() - b.r_device[i].matrix()).norm() == 0.0);
        CHECK(a.r_device[i].trace() == doctest::Approx(2.0));
        CHECK(std::abs(a.r_device[i](1, 0)) <= 0.9);
        CHECK(a.priors[i] == 0.5);
    }
    RaGeneratorConfig g;
    g.prior = 1.0;
    CHECK_THROWS_AS(generate_random_access(g, 0), InvalidGenerator);
    g = RaGeneratorConfig{};
    g.n_devices = 13;
    CHECK_THROWS_AS(generate_random_access(g, 0), TooManyDevices);
    RandomAccessScenario bad = a;
    bad.priors.pop_back();
    CHECK_THROWS_AS(validate(bad), ShapeMismatch);
}
