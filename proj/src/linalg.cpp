#include "kldwave/linalg.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace kldwave {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeMismatch("Hermitian matrix must be square, got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
    const double scale = std::max(1.0, m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff());
    const double asym = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kAsymmetryTolerance * scale) {
        throw InputError("matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrize(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw ShapeMismatch("Hermitian matrix must be square");
    HermitianMatrix h;
    h.m_ = 0.5 * (m + m.adjoint());
    return h;
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
    HermitianMatrix h;
    h.m_ = ComplexMatrix::Identity(n, n);
    return h;
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) {
    HermitianMatrix h;
    h.m_ = ComplexMatrix::Zero(n, n);
    return h;
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
    HermitianMatrix h;
    const auto n = static_cast<Eigen::Index>(d.size());
    h.m_ = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) h.m_(i, i) = d[static_cast<std::size_t>(i)];
    return h;
}

double HermitianMatrix::max_diagonal() const {
    return m_.size() == 0 ? 0.0 : m_.diagonal().real().maxCoeff();
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw ShapeMismatch("Hermitian sum: dimension mismatch");
    HermitianMatrix h;
    h.m_ = m_ + o.m_;
    return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw ShapeMismatch("Hermitian difference: dimension mismatch");
    HermitianMatrix h;
    h.m_ = m_ - o.m_;
    return h;
}

HermitianMatrix HermitianMatrix::scaled(double c) const {
    HermitianMatrix h;
    h.m_ = c * m_;
    return h;
}

PdFactor::PdFactor(const HermitianMatrix& m, double rel_tol) {
    if (m.dim() == 0) throw ShapeMismatch("cannot factor an empty matrix");
    llt_.compute(m.matrix());
    if (llt_.info() != Eigen::Success) {
        throw NotPositiveDefinite("Cholesky factorization failed: matrix is not positive definite");
    }
    const double threshold = rel_tol * m.max_diagonal();
    const ComplexMatrix& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double pivot = std::norm(l(i, i));
        if (!(pivot > threshold) || !std::isfinite(pivot)) {
            throw NotPositiveDefinite("Cholesky pivot " + std::to_string(i) + " = " + std::to_string(pivot) +
                                      " is not above " + std::to_string(threshold));
        }
    }
}

ComplexMatrix PdFactor::solve(const ComplexMatrix& b) const {
    if (b.rows() != dim()) throw ShapeMismatch("solve: right-hand side has wrong row count");
    return llt_.solve(b);
}

ComplexMatrix PdFactor::solve_lower(const ComplexMatrix& b) const {
    if (b.rows() != dim()) throw ShapeMismatch("solve: right-hand side has wrong row count");
    return llt_.matrixL().solve(b);
}

double PdFactor::logdet() const {
    return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
}

ComplexMatrix cholesky_pd(const HermitianMatrix& m, double rel_tol) { return PdFactor(m, rel_tol).lower(); }

ComplexMatrix solve_pd(const HermitianMatrix& m, const ComplexMatrix& b) { return PdFactor(m).solve(b); }

double logdet_pd(const HermitianMatrix& m) { return PdFactor(m).logdet(); }

double power_iteration_max_eig(const HermitianMatrix& m, const PowerIterationOptions& opts) {
    if (opts.max_iters < 1) throw InputError("power iteration needs max_iters >= 1");
    const Eigen::Index n = m.dim();
    if (n == 0) throw ShapeMismatch("power iteration on an empty matrix");
    const ComplexMatrix& a = m.matrix();

    SeededRng rng(opts.seed);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
    v.normalize();

    ComplexVector w = a * v;
    double lambda = v.dot(w).real();
    for (int it = 0; it < opts.max_iters; ++it) {
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        w.noalias() = a * v;
        const double next = v.dot(w).real();
        const double change = std::abs(next - lambda);
        lambda = next;
        if (change <= opts.tol * std::abs(lambda)) return lambda;
    }
    if (opts.accept_unconverged) return lambda;
    throw DidNotConverge("power iteration did not converge in " + std::to_string(opts.max_iters) + " iterations");
}

ComplexMatrix kron_apply(const HermitianMatrix& a, const HermitianMatrix& r, const ComplexMatrix& x) {
    if (x.rows() != a.dim() || x.cols() != r.dim()) {
        throw ShapeMismatch("kron_apply: X is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                            ", expected " + std::to_string(a.dim()) + "x" + std::to_string(r.dim()));
    }
    ComplexMatrix ax = a.matrix() * x;
    return ax * r.matrix();
}

RealVector eigenvalues(const HermitianMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double max_eig_factored(const ComplexMatrix& f, const HermitianMatrix& g) {
    if (f.cols() != g.dim()) throw ShapeMismatch("max_eig_factored: F and G do not conform");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g.matrix());
    const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const ComplexMatrix half = es.eigenvectors() * root.asDiagonal();
    const ComplexMatrix fh = f * half;
    const ComplexMatrix small = fh.adjoint() * fh;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> top(small, Eigen::EigenvaluesOnly);
    return std::max(0.0, top.eigenvalues().maxCoeff());
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeMismatch("inner product: shape mismatch");
    return (a.array().conjugate() * b.array()).sum().real();
}

}  // namespace kldwave
