#include "support.hpp"

#include "kldwave/accel.hpp"

using namespace kldwave;
using namespace kldwave::test;

namespace {

FixedPointProblem affine(double c, const ComplexMatrix& b) {
    const ComplexMatrix fixed = b / (1.0 - c);
    FixedPointProblem p;
    p.map = [c, b](const ComplexMatrix& x) -> ComplexMatrix { return c * x + b; };
    p.objective = [fixed](const ComplexMatrix& x) { return -(x - fixed).squaredNorm(); };
    p.project = [](const ComplexMatrix& x) { return x; };
    return p;
}

}  // namespace

TEST_CASE("projection onto the power sphere") {
    SeededRng rng(1);
    const ComplexMatrix x = random_matrix(3, 2, rng);
    CHECK(project_to_sphere(x, 5.0).squaredNorm() == doctest::Approx(5.0));
    CHECK(project_to_sphere(ComplexMatrix::Zero(3, 2), 5.0).norm() == 0.0);
}

TEST_CASE("STEM solves affine maps in one step") {
    SeededRng rng(2);
    for (double c : {0.5, 0.9, -0.4}) {
        const ComplexMatrix b = random_matrix(3, 3, rng);
        const FixedPointProblem p = affine(c, b);
        const StemResult r = stem_step(p, random_matrix(3, 3, rng), kDefaultMaxBacktracks);
        CHECK((r.x - b / (1.0 - c)).norm() <= 1e-10 * std::max(1.0, b.norm()));
        CHECK(r.state.accepted_candidate);
        // gamma = <d, d> / Re<d, w> = 1 / (c - 1) for this map.
        CHECK(r.state.gamma == doctest::Approx(1.0 / (c - 1.0)));
    }
}

TEST_CASE("STEM without candidates takes two map steps") {
    SeededRng rng(3);
    const ComplexMatrix b = random_matrix(2, 2, rng);
    const FixedPointProblem p = affine(0.5, b);
    const ComplexMatrix x = random_matrix(2, 2, rng);
    const StemResult r = stem_step(p, x, 0);
    CHECK_FALSE(r.state.accepted_candidate);
    CHECK(r.state.gamma == -1.0);
    CHECK((r.x - p.map(p.map(x))).norm() == 0.0);
}

TEST_CASE("STEM rejects candidates that lose objective") {
    // Objective rewards staying near x0, so the extrapolated candidate always loses.
    SeededRng rng(4);
    const ComplexMatrix b = random_matrix(2, 2, rng);
    const ComplexMatrix x0 = random_matrix(2, 2, rng);
    FixedPointProblem p = affine(0.5, b);
    p.objective = [x0](const ComplexMatrix& x) { return -(x - x0).squaredNorm(); };
    const StemResult r = stem_step(p, x0, 5);
    CHECK(r.state.backtracks == 5);
    CHECK_FALSE(r.state.accepted_candidate);
}

TEST_CASE("accelerated MM: monotone and equal to MM in fallback mode") {
    const SensingScenario s = small_scenario(4, 4, 8, 1);
    const Waveform x0 = init_waveform(s, 1);
    const SolveResult a = a_mm_kld(s, x0, SolverOptions{});
    const auto& f = a.trace.objective_per_iter;
    for (std::size_t k = 1; k < f.size(); ++k) CHECK(f[k] >= f[k - 1] - 1e-9 * std::max(1.0, f[k - 1]));
    CHECK(a.w.power() == doctest::Approx(s.power_budget));

    SolverOptions o;
    o.epsilon = 1e-300;
    for (int k = 1; k <= 4; ++k) {
        o.max_iters = k;
        const SolveResult fallback = a_mm_kld(s, x0, o, 0);
        o.max_iters = 2 * k;
        const SolveResult mm = mm_kld(s, x0, o);
        CHECK((fallback.w.x - mm.w.x).cwiseAbs().maxCoeff() <= 1e-12);
        o.max_iters = k;
    }
}

TEST_CASE("stem_solve trace records the accepted step sizes") {
    SeededRng rng(5);
    const ComplexMatrix b = random_matrix(2, 2, rng);
    const FixedPointProblem p = affine(0.8, b);
    SolverOptions o;
    const SolveResult r = stem_solve(p, random_matrix(2, 2, rng), o, kDefaultMaxBacktracks);
    CHECK(r.trace.status == SolverStatus::Converged);
    CHECK(r.trace.iterations <= 2);
    CHECK(r.trace.mu_per_iter.size() == r.trace.objective_per_iter.size());
    CHECK(r.trace.mu_per_iter[1] == doctest::Approx(1.0 / (0.8 - 1.0)));
}

TEST_CASE("scalar affine map lands on its fixed point") {
    FixedPointProblem p;
    p.map = [](const ComplexMatrix& x) -> ComplexMatrix { return (0.5 * x.array() + 1.0).matrix(); };
    p.objective = [](const ComplexMatrix& x) { return -std::norm(x(0, 0) - 2.0); };
    p.project = [](const ComplexMatrix& x) { return x; };
    const StemResult r = stem_step(p, ComplexMatrix::Zero(1, 1), kDefaultMaxBacktracks);
    CHECK(std::abs(r.x(0, 0) - 2.0) <= 1e-12);
    // Already at the fixed point: nothing moves.
    const StemResult still = stem_step(p, ComplexMatrix::Constant(1, 1, 2.0), kDefaultMaxBacktracks);
    CHECK(still.x(0, 0) == Complex(2.0, 0.0));
    CHECK(still.state.backtracks == 0);
}
