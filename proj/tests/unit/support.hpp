#pragma once

// Random instances shared by the unit tests.

#include "kldwave/linalg.hpp"
#include "kldwave/rng.hpp"
#include "kldwave/scenario.hpp"

#include <doctest.h>

namespace kldwave::test {

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
    }
    return m;
}

inline HermitianMatrix random_pd(int n, SeededRng& rng, double floor = 0.1) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    ComplexMatrix m = g * g.adjoint() / static_cast<double>(n);
    m.diagonal().array() += floor;
    return HermitianMatrix::symmetrize(m);
}

inline SensingScenario small_scenario(int n_tx, int n_rx, int t, std::uint64_t seed) {
    GeneratorConfig g;
    g.n_tx = n_tx;
    g.n_rx = n_rx;
    g.snapshots = t;
    return generate_scenario(g, seed);
}

inline double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Top eigenvalue from the dense Hermitian solver.
inline double top_eig(const ComplexMatrix& m) { return eigenvalues(HermitianMatrix::symmetrize(m)).maxCoeff(); }

}  // namespace kldwave::test
