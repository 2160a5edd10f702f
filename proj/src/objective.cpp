#include "kldwave/objective.hpp"

#include "kldwave/errors.hpp"

namespace kldwave {

double f_from_cov(const HermitianMatrix& k0, const HermitianMatrix& k1) {
    if (k0.dim() != k1.dim()) throw ShapeMismatch("K0 and K1 must have equal dimension");
    const PdFactor f0(k0);
    const PdFactor f1(k1);
    const double trace = f1.solve(k0.matrix()).trace().real();
    return f1.logdet() - f0.logdet() + trace;
}

double kld_from_cov(const HermitianMatrix& k0, const HermitianMatrix& k1, int n_rx, int snapshots) {
    if (k0.dim() != snapshots) throw ShapeMismatch("covariance dimension must equal the snapshot count");
    return n_rx * f_from_cov(k0, k1) - static_cast<double>(n_rx) * snapshots;
}

double f_obj(const SensingScenario& scenario, const Waveform& w) {
    const auto [k0, k1] = covariances(scenario, w);
    return f_from_cov(k0, k1);
}

HermitianMatrix gamma_star(const Waveform& w, const DifferenceFactor& l, const HermitianMatrix& k0) {
    const ComplexMatrix xl = w.x * l.l;
    const ComplexMatrix solved = solve_pd(k0, xl);
    return HermitianMatrix::symmetrize(xl.adjoint() * solved);
}

ComplexMatrix psi_star(const Waveform& w, const DifferenceFactor& l, const HermitianMatrix& k1) {
    return solve_pd(k1, w.x * l.l);
}

Evaluation evaluate(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w) {
    const auto [k0, k1] = covariances(scenario, w);
    const PdFactor f0(k0);
    const PdFactor f1(k1);
    const ComplexMatrix xl = w.x * l.l;
    const ComplexMatrix white = f0.solve_lower(xl);
    Evaluation e;
    e.aux.gamma = HermitianMatrix::symmetrize(white.adjoint() * white);
    e.aux.psi = f1.solve(xl);
    // Tr(K1^{-1} K0) = T - Tr((XL)^H K1^{-1} XL)
    e.f = f1.logdet() - f0.logdet() + scenario.snapshots - (xl.adjoint() * e.aux.psi).trace().real();
    return e;
}

AuxiliaryVariables optimal_auxiliaries(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w) {
    return evaluate(scenario, l, w).aux;
}

HermitianMatrix curvature_matrix(const AuxiliaryVariables& aux) {
    return HermitianMatrix::symmetrize(aux.psi * aux.gamma.matrix() * aux.psi.adjoint());
}

ComplexMatrix linear_term(const AuxiliaryVariables& aux, const DifferenceFactor& l) {
    return aux.psi * aux.gamma.matrix() * l.l.adjoint();
}

ComplexMatrix surrogate_gradient(const HermitianMatrix& a, const ComplexMatrix& b, const HermitianMatrix& r_h1,
                                 const ComplexMatrix& x) {
    return 2.0 * (b - kron_apply(a, r_h1, x));
}

namespace {

// log|I + Gamma| - Tr(Gamma) - Tr(Psi^H R_N Psi Gamma)
double fq_constant(const SensingScenario& s, const AuxiliaryVariables& aux) {
    const Eigen::Index n = aux.gamma.dim();
    const double logdet = logdet_pd(HermitianMatrix::identity(n) + aux.gamma);
    const double noise = (aux.psi.adjoint() * s.r_noise.matrix() * aux.psi * aux.gamma.matrix()).trace().real();
    return logdet - aux.gamma.trace() - noise;
}

}  // namespace

double f_q_eval(const SensingScenario& s, const DifferenceFactor& l, const Waveform& w, const AuxiliaryVariables& aux) {
    if (aux.psi.rows() != s.snapshots || aux.psi.cols() != s.n_tx || aux.gamma.dim() != s.n_tx) {
        throw ShapeMismatch("auxiliary variables do not match the scenario");
    }
    const ComplexMatrix& x = w.x;
    const ComplexMatrix& g = aux.gamma.matrix();
    const double linear = 2.0 * (g * aux.psi.adjoint() * x * l.l).trace().real();
    const double quadratic =
        (x * s.r_h1().matrix() * x.adjoint() * aux.psi * g * aux.psi.adjoint()).trace().real();
    return fq_constant(s, aux) + linear - quadratic;
}

double f_q_eval(const SensingScenario& s, const Waveform& w, const AuxiliaryVariables& aux) {
    return f_q_eval(s, validate(s), w, aux);
}

double f_h_eval(const SensingScenario& s, const DifferenceFactor& l, const Waveform& w, const AuxiliaryVariables& aux,
                const ComplexMatrix& z, double lambda_bar) {
    const ComplexMatrix& x = w.x;
    if (z.rows() != x.rows() || z.cols() != x.cols()) throw ShapeMismatch("f_h: z must match X");
    const HermitianMatrix a = curvature_matrix(aux);
    const HermitianMatrix r = s.r_h1();
    const ComplexMatrix b = linear_term(aux, l);
    const ComplexMatrix az = kron_apply(a, r, z);
    return fq_constant(s, aux) + 2.0 * real_inner(x, b) + 2.0 * real_inner(x, lambda_bar * z - az) +
           real_inner(z, az) - lambda_bar * z.squaredNorm() - lambda_bar * x.squaredNorm();
}

namespace {

void check_channel(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w) {
    if (h_c.cols() != w.x.rows()) throw ShapeMismatch("H_c must have one column per snapshot");
    if (r_nc.dim() != h_c.rows()) throw ShapeMismatch("R_nc must match the row count of H_c");
}

}  // namespace

double mi_eval(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w) {
    check_channel(h_c, r_nc, w);
    const PdFactor noise(r_nc);
    const ComplexMatrix whitened = noise.solve_lower(h_c * w.x);
    const ComplexMatrix m = ComplexMatrix::Identity(w.x.cols(), w.x.cols()) + whitened.adjoint() * whitened;
    return logdet_pd(HermitianMatrix::symmetrize(m));
}

CommAuxiliaries comm_aux_star(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w) {
    check_channel(h_c, r_nc, w);
    const ComplexMatrix hx = h_c * w.x;
    const ComplexMatrix gamma = hx.adjoint() * solve_pd(r_nc, hx);
    const HermitianMatrix total = HermitianMatrix::symmetrize(hx * hx.adjoint() + r_nc.matrix());
    return {HermitianMatrix::symmetrize(gamma), solve_pd(total, hx)};
}

double f_cq_eval(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w, const CommAuxiliaries& aux) {
    check_channel(h_c, r_nc, w);
    const Eigen::Index n = aux.gamma_c.dim();
    const ComplexMatrix hx = h_c * w.x;
    const ComplexMatrix weight = ComplexMatrix::Identity(n, n) + aux.gamma_c.matrix();
    const ComplexMatrix cross = hx.adjoint() * aux.psi_c;
    const ComplexMatrix total = hx * hx.adjoint() + r_nc.matrix();
    const ComplexMatrix inner = cross + cross.adjoint() - aux.psi_c.adjoint() * total * aux.psi_c;
    const double logdet = logdet_pd(HermitianMatrix::identity(n) + aux.gamma_c);
    return logdet - aux.gamma_c.trace() + (weight * inner).trace().real();
}

}  // namespace kldwave
