#pragma once

// Joint sensing/communication design: maximize (1 - rho) KLD + rho MI over the power ball.

#include "kldwave/objective.hpp"
#include "kldwave/scenario.hpp"
#include "kldwave/solvers.hpp"

#include <span>
#include <vector>

namespace kldwave {

struct IsacScenario {
    SensingScenario sensing;
    /// N_c x T communication channel (acts on X from the left).
    ComplexMatrix h_c;
    /// N_c x N_c receiver noise covariance.
    HermitianMatrix r_nc;
    double rho = 0.5;
};

/// Checks the sensing scenario, channel shapes, R_nc positivity and rho range.
DifferenceFactor validate(const IsacScenario& sc);

struct IsacValue {
    double kld = 0.0;
    double mi = 0.0;
    double weighted = 0.0;
};

IsacValue isac_objective(const IsacScenario& sc, const Waveform& w);

enum class IsacVariant { Fp, Mm };

/// Quadratic model of the composite surrogate in X:
/// maximize 2 Re<X, rhs> - <X, w_s A X R_H1 + w_c C X>.
struct CompositeQuadratic {
    double w_sensing = 0.0;  // (1 - rho) N_r
    double w_comm = 0.0;     // rho
    HermitianMatrix a;       // Psi Gamma Psi^H
    ComplexMatrix b;         // Psi Gamma L^H
    HermitianMatrix c;       // H_c^H Psi_c (I + Gamma_c) Psi_c^H H_c
    ComplexMatrix d;         // H_c^H Psi_c (I + Gamma_c)
    AuxiliaryVariables aux;  // factors of A
    ComplexMatrix c_factor;  // H_c^H Psi_c, so that C = F (I + Gamma_c) F^H
    HermitianMatrix c_weight;

    ComplexMatrix apply(const HermitianMatrix& r_h1, const ComplexMatrix& x) const;
    ComplexMatrix rhs() const { return w_sensing * b + w_comm * d; }
};

class IsacProblem {
public:
    IsacProblem(IsacScenario sc, SolverOptions opts);

    const IsacScenario& scenario() const { return sc_; }
    const DifferenceFactor& factor() const { return factor_; }
    double weighted(const Waveform& w) const { return isac_objective(sc_, w).weighted; }

    /// Quadratic model at X with all four auxiliaries at their equality points.
    CompositeQuadratic model(const Waveform& w) const;
    /// Composite surrogate value (1 - rho) N_r f_q + rho f_cq; tight to `weighted`.
    double surrogate(const Waveform& x, const AuxiliaryVariables& aux, const CommAuxiliaries& comm) const;

    Waveform fp_step(const Waveform& w) const;
    Waveform mm_step(const Waveform& w) const;
    /// Curvature bound of the composite operator used by mm_step.
    SpectralBound mm_bound(const CompositeQuadratic& q) const;

private:
    IsacScenario sc_;
    SolverOptions opts_;
    DifferenceFactor factor_;
    HermitianMatrix r_h1_;
    HermitianEigen r_h1_eig_;
    double r_h1_max_ = 0.0;
};

Waveform isac_iterate(const IsacScenario& sc, const DifferenceFactor& l, const Waveform& w, const SolverOptions& opts,
                      IsacVariant variant);

SolveResult isac_solve(const IsacScenario& sc, const Waveform& x_init, const SolverOptions& opts, IsacVariant variant,
                       bool accelerate);

struct ParetoPoint {
    double rho = 0.0;
    double kld = 0.0;
    double mi = 0.0;
    int iterations = 0;
    Waveform w;
};

/// Solves along an ascending rho grid, warm-starting each point from the previous solution
/// unless `warm_start` is false.
std::vector<ParetoPoint> pareto_sweep(const IsacScenario& base, std::span<const double> rho_grid,
                                      const Waveform& x_init, const SolverOptions& opts,
                                      IsacVariant variant = IsacVariant::Mm, bool accelerate = true,
                                      bool warm_start = true);

/// Seeded i.i.d. CN(0, 1) channel H_c (n_c x T) and R_nc = sigma_c^2 I.
IsacScenario make_isac_scenario(const SensingScenario& sensing, int n_c, double comm_snr_db, double rho,
                                std::uint64_t seed);

}  // namespace kldwave
