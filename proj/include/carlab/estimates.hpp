#pragma once

#include <array>

#include "carlab/mollify.hpp"
#include "carlab/report.hpp"
#include "carlab/weights.hpp"

// Pointwise matrix and scalar estimates: the curvature matrix D_G, the
// half-space matrices B / Btilde, the six-term multiplier decomposition with
// its direct counterpart M2, the lemma margin sweeps, the psi property
// checks, and calibration of the free constant d.

namespace carlab {

/// D_G^{ij} = a^{ik} d_kl(log G) a^{lj}
///          + (d_l log G / 2)(a^{ki} d_k a^{lj} + a^{kj} d_k a^{li} - a^{kl} d_k a^{ij})
///          + (1/2) d_t a^{ij}
Mat dg_matrix(const WeightEval& we);

/// Explicit stand-in for the generic C/t entry of Btilde, assembled from the
/// same chain of bounds that produces it:
///   C_B = 8 b Lambda^2 (kappa+1)^2 + 16 sqrt(n) n^2 b Lambda (kappa+1)^2 E + M n + 1.
double btilde_c(const EllipticityBounds& bounds, const WeightParams& params);

/// Btilde = 4 d_nn Phi1 (A e_n)(A e_n)^T
///          - (8 n^2 Lambda E d_n Phi1/|x| + C_B/t) I + H A
Mat btilde_matrix(const WeightEval& we, const EllipticityBounds& bounds,
                  const WeightParams& params);

/// Exact B = 2 D_G + A (theta - F); satisfies B >= Btilde + (1/t) I on Q.
Mat b_exact_matrix(const WeightEval& we);

/// The six multiplier terms; requires a WeightEval with the mollified layer.
std::array<double, 6> j_terms(const WeightEval& we, const EllipticityBounds& bounds,
                              const WeightParams& params);

/// M2 = <Btilde grad Phi, grad Phi> + div(Btilde grad Phi)
///      + (1/2) d_t F + (1/2) F (theta - F) + (1/2) tildeDelta F0,
/// with the divergence taken by central differences of the closed-form
/// Btilde grad Phi field (step fd_step).
double m2_direct(const Vec& x, double t, const CoefficientField& field, const MollifiedField& moll,
                 const WeightParams& params, double fd_step = 1e-4);

/// Margin reports for the whole-space multiplier estimates, in order:
///   dg_lower_bound        lambda_min(2 D_G + A(theta-F) - (1/t+1) I) / (1/t+1)
///   multiplier_growth     [d_t F + F(theta-F) - d b (|x|^2+1)/(4 t^3)] t^3/(|x|^2+1)
///   f0_laplacian_constant empirical sup of max(0, -tildeDelta F0) t^3/(|x|^2+1)
///   gap_gradient_constant empirical sup of |grad(F-F0)| t^2/(|x|+1)
std::vector<MarginReport> check_lemma33(const CoefficientField& field, const MollifiedField& moll,
                                        const WeightParams& params,
                                        const std::vector<SamplePoint>& samples, double tol);

/// Margin reports for the half-space multiplier estimates, in order:
///   btilde_lower_bound  lambda_min(Btilde - 8 n^2 Lambda E (d_n Phi1/|x| + 1/t) I), normalized
///   m2_lower_bound      (M2 - rhs)/(1+|M2|+|rhs|), rhs = 2[(alpha-1)lambda^2
///                       - (16 n^2 kappa + 8 n^2 + 4 n) Lambda E] (d_n Phi1)^3/|x|
///                       + b d |x|^2/(16 t^3) + 1/t^3
///   gap_gradient_bound  E = 0: exact |grad(F-F0)| = 0; else empirical constant of
///                       the residual above the 32 n E (d_n Phi1)^2/|x| term
std::vector<MarginReport> check_lemma34(const CoefficientField& field, const MollifiedField& moll,
                                        const WeightParams& params,
                                        const std::vector<SamplePoint>& samples, double tol);

/// psi property margins for a given kappa (field supplies a^{ni} with that
/// spectrum ratio), in order:
///   psi_quadratic_lower   (psi - |x|^2/2)/(1+|x|^2),              tol 1e-12
///   psi_gradient_bound    (4(kappa+1)^2|x| - |grad psi|)/(1+|x|), tol 1e-9
///   psi_conormal_bound    ((4k^2+2k+2) Lambda x_n - (A grad psi)_n)/(1+x_n)
///   psi_hessian_constant  empirical sup lambda_max(D^2 psi)/kappa
///   psi_decay_2/3/4       empirical sup |grad^k psi|_F |x|^{k-2}
std::vector<MarginReport> check_psi_props(double kappa, const std::vector<Vec>& samples,
                                          const CoefficientField& field, double tol);

struct CalibrationResult {
    double d = 0;
    WeightParams params;
    std::vector<MarginReport> reports;
};

/// Smallest d in the grid whose explicit-constant margins pass on the cloud;
/// K is recomputed from d at every trial. Throws calibration_error when the
/// grid is exhausted.
CalibrationResult calibrate_d(const CoefficientField& field, const MollifiedField& moll,
                              WeightVariant variant, const std::vector<SamplePoint>& samples,
                              const std::vector<double>& d_grid, double gamma, double tol);

/// Q-cloud for the half-space checks: x_n in [1, x_max], t log-spaced.
std::vector<SamplePoint> sample_cloud_q(int n, long count, double x_max, double t_min, double t_max,
                                        std::uint64_t seed);

}  // namespace carlab
