#include "support.hpp"

#include "kldwave/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace kldwave;
using namespace kldwave::test;

TEST_CASE("SeededRng is reproducible per (seed, stream)") {
    SeededRng a(7, 3), b(7, 3), c(7, 4);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
}

TEST_CASE("SeededRng draws have the stated moments") {
    SeededRng rng(11);
    constexpr int n = 200000;
    double su = 0.0, sn = 0.0, sn2 = 0.0, sc2 = 0.0;
    double lo = 1.0, hi = 0.0;
    Complex sc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        const Complex w = rng.complex_normal();
        sc += w * w;  // E[w^2] = 0 for circular symmetry
        sc2 += std::norm(w);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    // Sample means within 5 standard errors of the population values.
    CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sn / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(sn2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sc2 / n - 1.0) < 5.0 / std::sqrt(n));
    CHECK(std::abs(sc / static_cast<double>(n)) < 5.0 / std::sqrt(n));
}

TEST_CASE("exponential correlation and noise variance") {
    const HermitianMatrix r = exponential_correlation(4, 0.5);
    CHECK(r.trace() == doctest::Approx(4.0));
    CHECK(r(0, 3).real() == doctest::Approx(0.125));
    CHECK(r(3, 1).real() == doctest::Approx(0.25));
    const double s2 = noise_variance(8.0, 4, 7.0);
    CHECK(10.0 * std::log10(8.0 / (4.0 * s2)) == doctest::Approx(7.0));
}

TEST_CASE("validate enforces the detection and noise assumptions") {
    SensingScenario s = small_scenario(2, 2, 3, 1);
    CHECK(validate(s).l.rows() == 2);
    const ComplexMatrix diff = (s.r_h1() - s.r_clutter0).matrix();
    const DifferenceFactor l = validate(s);
    CHECK((l.l * l.l.adjoint() - diff).norm() < 1e-12);

    SensingScenario same = s;
    same.r_target = HermitianMatrix::zero(2);
    same.r_clutter1 = same.r_clutter0;
    CHECK_THROWS_AS(validate(same), IllPosedDetection);

    SensingScenario noisy = s;
    noisy.r_noise = HermitianMatrix::zero(3);
    CHECK_THROWS_AS(validate(noisy), SingularNoise);

    SensingScenario shape = s;
    shape.r_noise = HermitianMatrix::identity(4);
    CHECK_THROWS_AS(validate(shape), ShapeMismatch);
}

TEST_CASE("covariances follow their definitions") {
    const SensingScenario s = small_scenario(3, 2, 5, 2);
    SeededRng rng(3);
    const Waveform w{random_matrix(5, 3, rng)};
    const CovariancePair k = covariances(s, w);
    CHECK((k.k0.matrix() - (w.x * s.r_clutter0.matrix() * w.x.adjoint() + s.r_noise.matrix())).norm() < 1e-12);
    CHECK((k.k1.matrix() - (w.x * s.r_h1().matrix() * w.x.adjoint() + s.r_noise.matrix())).norm() < 1e-12);
    // Zero waveform: both hypotheses reduce to the noise.
    const CovariancePair z = covariances(s, Waveform{ComplexMatrix::Zero(5, 3)});
    CHECK((z.k0.matrix() - s.r_noise.matrix()).norm() == 0.0);
}

TEST_CASE("generator is deterministic and honors the configuration") {
    GeneratorConfig g;
    const SensingScenario a = generate_scenario(g, 5), b = generate_scenario(g, 5), c = generate_scenario(g, 6);
    CHECK((a.r_clutter0.matrix() - b.r_clutter0.matrix()).norm() == 0.0);
    CHECK((a.r_clutter0.matrix() - c.r_clutter0.matrix()).norm() > 0.0);
    CHECK(a.power_budget == doctest::Approx(g.n_tx));
    CHECK(a.r_target.trace() == doctest::Approx(g.n_tx));
    CHECK(a.r_clutter0.trace() == doctest::Approx(g.clutter_ratio0 * g.n_tx));
    CHECK(10.0 * std::log10(a.power_budget / (g.n_tx * a.r_noise(0, 0).real())) == doctest::Approx(g.snr_db));
    g.same_clutter = true;
    const SensingScenario d = generate_scenario(g, 5);
    CHECK((d.r_clutter0.matrix() - d.r_clutter1.matrix()).norm() == 0.0);
    g.n_tx = 0;
    CHECK_THROWS_AS(generate_scenario(g, 0), InvalidGenerator);
    g = GeneratorConfig{};
    g.rho_target = 1.0;
    CHECK_THROWS_AS(generate_scenario(g, 0), InvalidGenerator);
}

TEST_CASE("initial waveforms sit on the power sphere") {
    const SensingScenario s = small_scenario(4, 4, 8, 1);
    for (InitKind k : {InitKind::RandomGaussian, InitKind::ScaledIdentityBlock}) {
        const Waveform w = init_waveform(s, 3, k);
        CHECK(w.x.rows() == 8);
        CHECK(w.x.cols() == 4);
        CHECK(w.power() == doctest::Approx(s.power_budget));
    }
    CHECK(scale_to_power(ComplexMatrix::Ones(2, 2), 8.0).squaredNorm() == doctest::Approx(8.0));
    CHECK(is_positive_definite(HermitianMatrix::identity(3)));
    const double d[] = {1.0, 1e-12};
    CHECK_FALSE(is_positive_definite(HermitianMatrix::diagonal(d)));
}
