#include "support.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/objective.hpp"
#include "kldwave/oracles.hpp"
#include "kldwave/solvers.hpp"

#include <Eigen/LU>

#include <cmath>

using namespace kldwave;
using namespace kldwave::test;

TEST_CASE("kld_from_cov closed forms") {
    const double one[] = {1.0}, two[] = {2.0};
    CHECK(kld_from_cov(HermitianMatrix::diagonal(one), HermitianMatrix::diagonal(two), 1, 1) ==
          doctest::Approx(std::log(2.0) + 0.5 - 1.0).epsilon(1e-14));
    CHECK(kld_from_cov(HermitianMatrix::identity(3), HermitianMatrix::identity(3), 4, 3) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // Independent columns: KLD scales with n_rx.
    SeededRng rng(1);
    const HermitianMatrix a = random_pd(3, rng), b = random_pd(3, rng);
    CHECK(kld_from_cov(a, b, 5, 3) == doctest::Approx(5.0 * kld_from_cov(a, b, 1, 3)));
    CHECK(kld_from_cov(a, b, 1, 3) > 0.0);
}

TEST_CASE("f_obj against explicit inverses") {
    const SensingScenario s = small_scenario(3, 2, 5, 4);
    CHECK(f_obj(s, Waveform{ComplexMatrix::Zero(5, 3)}) == doctest::Approx(5.0));
    SeededRng rng(2);
    for (int k = 0; k < 5; ++k) {
        const Waveform w{random_matrix(5, 3, rng)};
        const double f = f_obj(s, w);
        CHECK(rel(f, oracle::f_direct(s, w.x)) < 1e-12);
        const CovariancePair c = covariances(s, w);
        CHECK(rel(kld_from_cov(c.k0, c.k1, s.n_rx, 5), s.n_rx * (f - 5.0)) < 1e-12);
        CHECK(rel(evaluate(s, validate(s), w).f, f) < 1e-12);
    }
}

TEST_CASE("optimal auxiliaries match their definitions") {
    const SensingScenario s = small_scenario(3, 2, 6, 5);
    const DifferenceFactor l = validate(s);
    SeededRng rng(3);
    const Waveform w{random_matrix(6, 3, rng)};
    const CovariancePair c = covariances(s, w);
    const ComplexMatrix xl = w.x * l.l;
    const ComplexMatrix g_ref = xl.adjoint() * c.k0.matrix().inverse() * xl;
    CHECK((gamma_star(w, l, c.k0).matrix() - g_ref).norm() <= 1e-10 * g_ref.norm());
    const ComplexMatrix psi = psi_star(w, l, c.k1);
    CHECK((c.k1.matrix() * psi - xl).norm() <= 1e-10 * xl.norm());
    const AuxiliaryVariables aux = optimal_auxiliaries(s, l, w);
    CHECK((aux.psi - psi).norm() <= 1e-12 * psi.norm());
    CHECK(psi_star(Waveform{ComplexMatrix::Zero(6, 3)}, l, s.r_noise).norm() == 0.0);
}

TEST_CASE("surrogate chain: tight at the optimizers, below f elsewhere") {
    SeededRng rng(4);
    for (int k = 0; k < 10; ++k) {
        const SensingScenario s = small_scenario(2 + k % 3, 2, 6, 10 + k);
        const DifferenceFactor l = validate(s);
        const int nt = s.n_tx;
        const Waveform w{random_matrix(6, nt, rng)};
        // f_q drops the constant T = 6 of f.
        const double target = f_obj(s, w) - 6.0;
        const AuxiliaryVariables opt = optimal_auxiliaries(s, l, w);
        CHECK(rel(f_q_eval(s, l, w, opt), target) < 1e-8);
        CHECK(rel(f_q_eval(s, w, opt), target) < 1e-8);

        const double r_max = eigenvalues(s.r_h1()).maxCoeff();
        const double lam = lambda_bar(opt, r_max, SolverOptions{}).lambda_bar;
        CHECK(rel(f_h_eval(s, l, w, opt, w.x, lam), target) < 1e-8);

        const ComplexMatrix g = random_matrix(nt, nt, rng);
        const AuxiliaryVariables off{HermitianMatrix::symmetrize(g * g.adjoint()), random_matrix(6, nt, rng)};
        const double fq = f_q_eval(s, l, w, off);
        CHECK(fq <= target + 1e-8);
        const double lam_off = lambda_bar(off, r_max, SolverOptions{}).lambda_bar;
        CHECK(f_h_eval(s, l, w, off, random_matrix(6, nt, rng), lam_off) <= fq + 1e-8);
    }
}

TEST_CASE("f_q with Gamma = 0 vanishes") {
    const SensingScenario s = small_scenario(2, 2, 4, 1);
    SeededRng rng(5);
    const AuxiliaryVariables zero{HermitianMatrix::zero(2), random_matrix(4, 2, rng)};
    CHECK(f_q_eval(s, Waveform{random_matrix(4, 2, rng)}, zero) == doctest::Approx(0.0));
    const AuxiliaryVariables wrong{HermitianMatrix::zero(3), random_matrix(4, 2, rng)};
    CHECK_THROWS_AS(f_q_eval(s, Waveform{random_matrix(4, 2, rng)}, wrong), ShapeMismatch);
}

TEST_CASE("surrogate gradient is tangent to f") {
    const SensingScenario s = small_scenario(2, 2, 4, 6);
    const DifferenceFactor l = validate(s);
    SeededRng rng(6);
    const ComplexMatrix x = random_matrix(4, 2, rng);
    const AuxiliaryVariables aux = optimal_auxiliaries(s, l, Waveform{x});
    const ComplexMatrix g = surrogate_gradient(curvature_matrix(aux), linear_term(aux, l), s.r_h1(), x);
    const double h = 1e-5;
    ComplexMatrix fd(4, 2);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 4; ++i) {
            ComplexMatrix p = x, m = x, pi = x, mi = x;
            p(i, j) += h;
            m(i, j) -= h;
            pi(i, j) += Complex(0, h);
            mi(i, j) -= Complex(0, h);
            fd(i, j) = Complex((oracle::f_direct(s, p) - oracle::f_direct(s, m)) / (2 * h),
                               (oracle::f_direct(s, pi) - oracle::f_direct(s, mi)) / (2 * h));
        }
    }
    CHECK((fd - g).norm() <= 1e-4 * g.norm());
    CHECK((curvature_matrix(aux).matrix() - aux.psi * aux.gamma.matrix() * aux.psi.adjoint()).norm() < 1e-14);
}

TEST_CASE("mutual information and its surrogate") {
    SeededRng rng(7);
    const ComplexMatrix h = random_matrix(3, 5, rng);
    const HermitianMatrix r = random_pd(3, rng);
    const Waveform w{random_matrix(5, 2, rng)};
    const ComplexMatrix hx = h * w.x;
    const ComplexMatrix m = ComplexMatrix::Identity(2, 2) + hx.adjoint() * r.matrix().inverse() * hx;
    const double mi = std::log(std::abs(m.fullPivLu().determinant()));
    CHECK(rel(mi_eval(h, r, w), mi) < 1e-12);
    const CommAuxiliaries aux = comm_aux_star(h, r, w);
    CHECK(rel(f_cq_eval(h, r, w, aux), mi) < 1e-8);
    const ComplexMatrix g = random_matrix(2, 2, rng);
    const CommAuxiliaries off{HermitianMatrix::symmetrize(g * g.adjoint()), random_matrix(3, 2, rng)};
    CHECK(f_cq_eval(h, r, w, off) <= mi + 1e-8);
    CHECK(mi_eval(h, r, Waveform{ComplexMatrix::Zero(5, 2)}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(mi_eval(random_matrix(3, 4, rng), r, w), ShapeMismatch);
}
