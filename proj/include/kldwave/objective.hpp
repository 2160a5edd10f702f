#pragma once

// Exact KLD / mutual-information objectives, the fractional-programming
// surrogate chain, and the closed-form auxiliary-variable optimizers.

#include "kldwave/linalg.hpp"
#include "kldwave/scenario.hpp"

namespace kldwave {

/// Gamma (N_t x N_t, PSD) and Psi (T x N_t) of the dual and quadratic transforms.
struct AuxiliaryVariables {
    HermitianMatrix gamma;
    ComplexMatrix psi;
};

/// Gamma_c and Psi_c of the communication surrogate.
struct CommAuxiliaries {
    HermitianMatrix gamma_c;
    ComplexMatrix psi_c;
};

/// N_r (log|K1| - log|K0| + Tr(K1^{-1} K0)) - N_r T.
double kld_from_cov(const HermitianMatrix& k0, const HermitianMatrix& k1, int n_rx, int snapshots);

/// f(X) = log|K0^{-1} K1| + Tr(K1^{-1} K0); the KLD is N_r f - N_r T.
double f_obj(const SensingScenario& scenario, const Waveform& w);
double f_from_cov(const HermitianMatrix& k0, const HermitianMatrix& k1);

HermitianMatrix gamma_star(const Waveform& w, const DifferenceFactor& l, const HermitianMatrix& k0);
ComplexMatrix psi_star(const Waveform& w, const DifferenceFactor& l, const HermitianMatrix& k1);
/// Both optimizers at X (covariances computed internally).
AuxiliaryVariables optimal_auxiliaries(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w);

/// f(X) and the optimal auxiliaries at X from one pair of covariance factorizations.
struct Evaluation {
    double f = 0.0;
    AuxiliaryVariables aux;
};
Evaluation evaluate(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w);

/// Quadratic-transform surrogate f_q(X, Gamma, Psi). It bounds f(X) - T from below
/// (the constant T is dropped) and is tight at the optimal auxiliaries.
double f_q_eval(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                const AuxiliaryVariables& aux);
double f_q_eval(const SensingScenario& scenario, const Waveform& w, const AuxiliaryVariables& aux);

/// Nonhomogeneous surrogate f_h at (x = vec X, z = vec Z) with isotropic curvature lambda_bar.
double f_h_eval(const SensingScenario& scenario, const DifferenceFactor& l, const Waveform& w,
                const AuxiliaryVariables& aux, const ComplexMatrix& z, double lambda_bar);

/// A = Psi Gamma Psi^H (T x T).
HermitianMatrix curvature_matrix(const AuxiliaryVariables& aux);
/// B = Psi Gamma L^H (T x N_t).
ComplexMatrix linear_term(const AuxiliaryVariables& aux, const DifferenceFactor& l);
/// 2 (B - A X R_H1): real part is d f_q / d Re X, imaginary part d f_q / d Im X.
ComplexMatrix surrogate_gradient(const HermitianMatrix& a, const ComplexMatrix& b, const HermitianMatrix& r_h1,
                                 const ComplexMatrix& x);

/// log|I_{N_t} + (H_c X)^H R_nc^{-1} (H_c X)|, with H_c of shape N_c x T.
double mi_eval(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w);

/// Equality points of the communication surrogate:
/// Gamma_c = (H_c X)^H R_nc^{-1} (H_c X), Psi_c = (H_c X X^H H_c^H + R_nc)^{-1} H_c X.
CommAuxiliaries comm_aux_star(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w);

/// f_{c,q}(X, Gamma_c, Psi_c); equals mi_eval at comm_aux_star(X).
double f_cq_eval(const ComplexMatrix& h_c, const HermitianMatrix& r_nc, const Waveform& w,
                 const CommAuxiliaries& aux);

}  // namespace kldwave
