#pragma once

// Brute-force reference computations used to validate the solvers. Each one
// forms the full matrices the production code avoids (explicit inverses,
// explicit Kronecker products, dense eigendecompositions) and is only meant
// for small problem sizes.

#include "kldwave/linalg.hpp"
#include "kldwave/random_access.hpp"
#include "kldwave/scenario.hpp"

namespace kldwave::oracle {

/// R^T kron A as an explicit (N T) x (N T) matrix.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& r);

/// Column-stacking vec and its inverse.
ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

/// Solves (R^T kron A + mu I) vec(X) = vec(B) densely; minimum-norm solution when singular.
ComplexMatrix sylvester_dense(const ComplexMatrix& a, const ComplexMatrix& r, const ComplexMatrix& b, double mu);

/// Largest eigenvalue of an explicitly formed Hermitian matrix.
double top_eigenvalue(const ComplexMatrix& m);

/// f(X) through explicit inverses and determinants.
double f_direct(const SensingScenario& s, const ComplexMatrix& x);

/// One MM-KLD step with the (N_t T)-dimensional quadratic form written out:
/// Gamma, Psi by explicit inversion, A_bar = R_H1^T kron A, lambda_bar from its
/// dense spectrum plus delta = max(delta_rel * lambda_p, 1e-12).
ComplexMatrix mm_map_dense(const SensingScenario& s, const ComplexMatrix& x, double delta_rel = 1e-6);

/// Maximum of log|I + X^H H^H R^{-1} H X| over T x n_tx matrices X with
/// Tr(X X^H) <= p, by water-filling over the n_tx strongest eigenmodes of H^H R^{-1} H.
double water_filling_mi(const ComplexMatrix& h, const ComplexMatrix& r_noise, double p, int n_tx);

/// D_sum by explicit enumeration of the full activity vector of all K devices
/// (focal bit excluded per term), explicit inverses and determinants.
double sum_kld_direct(const RandomAccessScenario& sc, const WaveformSet& xs);

}  // namespace kldwave::oracle
