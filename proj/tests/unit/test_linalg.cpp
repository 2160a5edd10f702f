#include "support.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/oracles.hpp"

#include <Eigen/LU>

using namespace kldwave;
using namespace kldwave::test;

TEST_CASE("HermitianMatrix rejects bad input") {
    CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix::Ones(2, 3)), ShapeMismatch);
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 1) = Complex(0.5, 0.0);
    CHECK_THROWS_AS(HermitianMatrix{m}, InputError);
    m(1, 0) = Complex(0.5, 0.0);
    CHECK_NOTHROW(HermitianMatrix{m});
}

TEST_CASE("HermitianMatrix arithmetic") {
    SeededRng rng(1);
    const HermitianMatrix a = random_pd(3, rng), b = random_pd(3, rng);
    CHECK(((a + b).matrix() - (a.matrix() + b.matrix())).norm() < 1e-14);
    CHECK(((a - b).matrix() - (a.matrix() - b.matrix())).norm() < 1e-14);
    CHECK(a.scaled(2.0).trace() == doctest::Approx(2.0 * a.trace()));
    const double d[] = {1.0, 5.0, 2.0};
    CHECK(HermitianMatrix::diagonal(d).max_diagonal() == 5.0);
    CHECK(HermitianMatrix::identity(4).trace() == 4.0);
}

TEST_CASE("Cholesky solves and log-determinant agree with LU") {
    SeededRng rng(2);
    for (int n : {1, 3, 6}) {
        const HermitianMatrix m = random_pd(n, rng);
        const ComplexMatrix b = random_matrix(n, 2, rng);
        const Eigen::FullPivLU<ComplexMatrix> lu(m.matrix());
        CHECK((solve_pd(m, b) - lu.solve(b)).norm() <= 1e-10 * b.norm());
        CHECK(logdet_pd(m) == doctest::Approx(std::log(std::abs(lu.determinant()))).epsilon(1e-12));
        const PdFactor f(m);
        const ComplexMatrix w = f.solve_lower(b);
        CHECK((w.adjoint() * w - b.adjoint() * lu.solve(b)).norm() <= 1e-10 * b.squaredNorm());
        CHECK((f.lower() * f.lower().adjoint() - m.matrix()).norm() <= 1e-12 * m.matrix().norm());
    }
}

TEST_CASE("PdFactor rejects indefinite matrices") {
    const double d[] = {1.0, -1.0};
    CHECK_THROWS_AS(PdFactor(HermitianMatrix::diagonal(d)), NotPositiveDefinite);
}

TEST_CASE("power iteration matches the dense spectrum") {
    SeededRng rng(3);
    const double d[] = {5.0, 1.0, 0.5, 0.1};
    CHECK(power_iteration_max_eig(HermitianMatrix::diagonal(d)) == doctest::Approx(5.0).epsilon(1e-9));
    for (int k = 0; k < 5; ++k) {
        const HermitianMatrix m = random_pd(5, rng);
        PowerIterationOptions o;
        o.max_iters = 5000;
        CHECK(power_iteration_max_eig(m, o) == doctest::Approx(top_eig(m.matrix())).epsilon(1e-8));
    }
}

TEST_CASE("power iteration reports non-convergence") {
    // Two nearly equal top eigenvalues cannot be separated in three steps.
    const double d[] = {1.0, 0.999999, 0.1};
    PowerIterationOptions o;
    o.max_iters = 3;
    CHECK_THROWS_AS(power_iteration_max_eig(HermitianMatrix::diagonal(d), o), DidNotConverge);
    o.accept_unconverged = true;
    const double v = power_iteration_max_eig(HermitianMatrix::diagonal(d), o);
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v > 0.1);
}

TEST_CASE("kron_apply equals the explicit Kronecker product") {
    SeededRng rng(4);
    const HermitianMatrix a = random_pd(4, rng), r = random_pd(3, rng);
    const ComplexMatrix x = random_matrix(4, 3, rng);
    const ComplexVector want = oracle::kron(a.matrix(), r.matrix()) * oracle::vec(x);
    CHECK((oracle::vec(kron_apply(a, r, x)) - want).norm() <= 1e-12 * want.norm());
}

TEST_CASE("max_eig_factored equals the top eigenvalue of F G F^H") {
    SeededRng rng(5);
    for (int k = 0; k < 5; ++k) {
        const ComplexMatrix f = random_matrix(7, 3, rng);
        const HermitianMatrix g = random_pd(3, rng, 0.0);
        const double want = top_eig(f * g.matrix() * f.adjoint());
        CHECK(max_eig_factored(f, g) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(max_eig_factored(ComplexMatrix::Zero(4, 2), HermitianMatrix::identity(2)) == 0.0);
}

TEST_CASE("eigenvalues ascend and real_inner is the real trace inner product") {
    const double d[] = {3.0, 1.0, 2.0};
    const RealVector e = eigenvalues(HermitianMatrix::diagonal(d));
    CHECK(e(0) == doctest::Approx(1.0));
    CHECK(e(2) == doctest::Approx(3.0));
    SeededRng rng(6);
    const ComplexMatrix a = random_matrix(3, 2, rng), b = random_matrix(3, 2, rng);
    CHECK(real_inner(a, b) == doctest::Approx((a.adjoint() * b).trace().real()));
}
