#pragma once

#include "carlab/calculus.hpp"
#include "carlab/fields.hpp"
#include "carlab/report.hpp"

// Planar cone-to-half-plane change of variables: the conjugated coefficient
// matrix, its shifted version on the half plane, gradient decay checks, the
// operator-equivalence residual, and the uniqueness-threshold classifier.

namespace carlab {
namespace cone {

struct ConeParams {
    double theta0 = M_PI / 2;  // opening angle in (0, pi)
    double l() const { return M_PI / theta0; }

    static ConeParams from_l(double l) {
        if (!(l >= 1)) throw std::invalid_argument("ConeParams: need l >= 1");
        return ConeParams{M_PI / l};
    }
    void validate() const {
        if (!(theta0 > 0) || !(theta0 < M_PI))
            throw std::invalid_argument("ConeParams: opening angle must lie in (0, pi)");
    }
};

/// A(y) = I + (l^2-1) v v^T / r^2 with v = (y2, -y1); eigenvalues {1, l^2}.
Mat cone_matrix(const Vec& y, const ConeParams& p);

/// Spatial gradient of cone_matrix, gradA(k,i,j) = d_k a^{ij}(y).
Ten3 cone_matrix_grad(const Vec& y, const ConeParams& p);

/// Shifted field B(y) = A(y1, y2+1) on the half plane y2 > 0.
/// Declared bounds: lambda = 1, Lambda = l^2, M = E = l^2 - 1, with the decay
/// radius measured from the shifted vertex (|.| of (y1, y2+1)).
CoefficientField shifted_field(const ConeParams& p);

/// Decay margins for the shifted field over a sample cloud:
///   grad_global:    (l^2-1)        - |grad b^{ij}|_2
///   grad_decay:     (l^2-1)/rtilde - |grad b^{ij}|_2,  rtilde = |(y1, y2+1)|
///   grad_decay_y:   (l^2-1)/|y|    - |grad b^{ij}|_2
std::vector<MarginReport> gradient_bound_check(const ConeParams& p,
                                               const std::vector<SamplePoint>& samples, double tol,
                                               double claimed_E1 = -1.0);

struct EquivalenceResidual {
    double max_residual = 0.0;
    Vec argmax_y;
    long sample_count = 0;
};

/// At each sample y in the upper half plane: pull phi back through the polar
/// map (theta_bar = l theta), evaluate the Laplacian in the cone coordinates
/// by central differences, and compare with div(A grad phi)(y) in closed form.
/// phi is evaluated at the temporal center of its support (the check is
/// purely spatial). Samples with r < r_min are rejected.
EquivalenceResidual operator_equivalence_residual(const TestFunction& phi, const ConeParams& p,
                                                  const std::vector<Vec>& samples,
                                                  double fd_step = 1e-3, double r_min = 0.1);

enum class BuRegime { bu_holds, bu_fails, indeterminate };

/// (pi / (2 arccos(1/sqrt 3)))^2 - 1, the decay constant below which
/// backward uniqueness holds for the shifted cone field.
double bu_lower_threshold();

/// The borderline opening angle 2 arccos(1/sqrt 3), in degrees.
double bu_critical_angle_deg();

BuRegime threshold_classify(double E1);

}  // namespace cone
}  // namespace carlab
