#pragma once

// Dense complex Hermitian kernels shared by every solver. Inverses are only
// ever applied through a Cholesky factor; no explicit inverse is formed.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>

namespace kldwave {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Square complex matrix stored as its Hermitian part (M + M^H) / 2.
class HermitianMatrix {
public:
    /// Asymmetry accepted by the checking constructor, relative to max(1, max |m_ij|).
    static constexpr double kAsymmetryTolerance = 1e-12;

    HermitianMatrix() = default;

    /// Checks that `m` is square and Hermitian within tolerance, then stores
    /// the symmetrized value. Throws ShapeMismatch / InputError otherwise.
    explicit HermitianMatrix(const ComplexMatrix& m);

    /// Symmetrizes without the tolerance check; used for products such as
    /// X R X^H that are Hermitian up to round-off by construction.
    static HermitianMatrix symmetrize(const ComplexMatrix& m);

    static HermitianMatrix identity(Eigen::Index n);
    static HermitianMatrix zero(Eigen::Index n);
    static HermitianMatrix diagonal(std::span<const double> d);

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    double trace() const { return m_.diagonal().real().sum(); }
    double max_diagonal() const;

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix scaled(double c) const;

private:
    ComplexMatrix m_;
};

/// Cholesky factor of a positive definite Hermitian matrix, reusable for
/// several solves and the log-determinant.
class PdFactor {
public:
    /// Throws NotPositiveDefinite when a pivot is <= rel_tol * (largest diagonal entry).
    explicit PdFactor(const HermitianMatrix& m, double rel_tol = 0.0);

    Eigen::Index dim() const { return llt_.rows(); }
    ComplexMatrix lower() const { return llt_.matrixL(); }
    ComplexMatrix solve(const ComplexMatrix& b) const;
    /// L^{-1} b, so that b^H M^{-1} b = |L^{-1} b|^2 columnwise.
    ComplexMatrix solve_lower(const ComplexMatrix& b) const;
    double logdet() const;

private:
    Eigen::LLT<ComplexMatrix, Eigen::Lower> llt_;
};

ComplexMatrix cholesky_pd(const HermitianMatrix& m, double rel_tol = 0.0);
ComplexMatrix solve_pd(const HermitianMatrix& m, const ComplexMatrix& b);
double logdet_pd(const HermitianMatrix& m);

struct PowerIterationOptions {
    int max_iters = 100;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    /// Return the last Rayleigh quotient instead of raising DidNotConverge.
    bool accept_unconverged = false;
};

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration from a
/// seeded random unit vector. Stops once the Rayleigh quotient changes by at
/// most tol * |quotient| between iterations.
double power_iteration_max_eig(const HermitianMatrix& m, const PowerIterationOptions& opts = {});

/// A * X * R, i.e. the reshaped (R^T kron A) vec(X), without forming the Kronecker product.
ComplexMatrix kron_apply(const HermitianMatrix& a, const HermitianMatrix& r, const ComplexMatrix& x);

/// Ascending eigenvalues (dense Hermitian solver).
RealVector eigenvalues(const HermitianMatrix& m);

/// Largest eigenvalue of F G F^H for PSD G (r x r), from the r x r matrix
/// G^{1/2} F^H F G^{1/2}; costs O(n r^2 + r^3) for F of shape n x r.
double max_eig_factored(const ComplexMatrix& f, const HermitianMatrix& g);

/// Re <vec(a), vec(b)>.
double real_inner(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace kldwave
