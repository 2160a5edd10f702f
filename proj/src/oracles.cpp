#include "kldwave/oracles.hpp"

#include "kldwave/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace kldwave::oracle {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& r) {
    const Eigen::Index t = a.rows();
    const Eigen::Index n = r.rows();
    ComplexMatrix out(t * n, t * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out.block(i * t, j * t, t, t) = r(j, i) * a;
    }
    return out;
}

ComplexVector vec(const ComplexMatrix& m) { return Eigen::Map<const ComplexVector>(m.data(), m.size()); }

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix sylvester_dense(const ComplexMatrix& a, const ComplexMatrix& r, const ComplexMatrix& b, double mu) {
    ComplexMatrix op = kron(a, r);
    op.diagonal().array() += mu;
    Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(op);
    cod.setThreshold(1e-12);
    return unvec(cod.solve(vec(b)), b.rows(), b.cols());
}

double top_eigenvalue(const ComplexMatrix& m) {
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

namespace {

double logdet_lu(const ComplexMatrix& m) { return std::log(std::abs(m.fullPivLu().determinant())); }

}  // namespace

double f_direct(const SensingScenario& s, const ComplexMatrix& x) {
    const ComplexMatrix k0 = x * s.r_clutter0.matrix() * x.adjoint() + s.r_noise.matrix();
    const ComplexMatrix k1 = x * s.r_h1().matrix() * x.adjoint() + s.r_noise.matrix();
    return logdet_lu(k1) - logdet_lu(k0) + (k1.inverse() * k0).trace().real();
}

ComplexMatrix mm_map_dense(const SensingScenario& s, const ComplexMatrix& x, double delta_rel) {
    const ComplexMatrix diff = (s.r_h1() - s.r_clutter0).matrix();
    const ComplexMatrix l = diff.llt().matrixL();
    const ComplexMatrix k0 = x * s.r_clutter0.matrix() * x.adjoint() + s.r_noise.matrix();
    const ComplexMatrix k1 = x * s.r_h1().matrix() * x.adjoint() + s.r_noise.matrix();
    const ComplexMatrix xl = x * l;
    const ComplexMatrix gamma = xl.adjoint() * k0.inverse() * xl;
    const ComplexMatrix psi = k1.inverse() * xl;
    const ComplexMatrix a = psi * gamma * psi.adjoint();
    const ComplexMatrix b = psi * gamma * l.adjoint();
    const ComplexMatrix a_bar = kron(a, s.r_h1().matrix());
    const double lambda_p = top_eigenvalue(a_bar);
    const double lambda = lambda_p + std::max(delta_rel * lambda_p, 1e-12);
    const ComplexVector xv = vec(x);
    const ComplexVector v = vec(b) + lambda * xv - a_bar * xv;
    return unvec(v * (std::sqrt(s.power_budget) / v.norm()), x.rows(), x.cols());
}

double water_filling_mi(const ComplexMatrix& h, const ComplexMatrix& r_noise, double p, int n_tx) {
    const ComplexMatrix g = h.adjoint() * r_noise.inverse() * h;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
    std::vector<double> gains(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(gains.begin(), gains.end(), std::greater<>());
    gains.resize(std::min<std::size_t>(gains.size(), static_cast<std::size_t>(n_tx)));
    while (!gains.empty() && gains.back() <= 0.0) gains.pop_back();
    // Largest active set whose water level clears every active floor 1/g_k.
    for (std::size_t k = gains.size(); k >= 1; --k) {
        double inv = 0.0;
        for (std::size_t i = 0; i < k; ++i) inv += 1.0 / gains[i];
        const double level = (p + inv) / static_cast<double>(k);
        if (level > 1.0 / gains[k - 1]) {
            double mi = 0.0;
            for (std::size_t i = 0; i < k; ++i) mi += std::log(level * gains[i]);
            return mi;
        }
    }
    return 0.0;
}

double sum_kld_direct(const RandomAccessScenario& sc, const WaveformSet& xs) {
    const int k = sc.n_devices;
    const int t = sc.snapshots;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        // Full activity vectors with the focal device's own bit forced to zero.
        for (std::uint32_t full = 0; full < (1u << k); ++full) {
            if ((full >> i) & 1u) continue;
            double w = 1.0;
            ComplexMatrix k0 = sc.r_noise.matrix();
            for (int j = 0; j < k; ++j) {
                if (j == i) continue;
                const bool on = (full >> j) & 1u;
                w *= on ? sc.priors[j] : 1.0 - sc.priors[j];
                if (on) k0 += xs.x[j].x * sc.r_device[j].matrix() * xs.x[j].x.adjoint();
            }
            const ComplexMatrix k1 = k0 + xs.x[i].x * sc.r_device[i].matrix() * xs.x[i].x.adjoint();
            total += w * (logdet_lu(k1) - logdet_lu(k0) + (k1.inverse() * k0).trace().real() - t);
        }
    }
    return sc.n_rx * total;
}

}  // namespace kldwave::oracle
