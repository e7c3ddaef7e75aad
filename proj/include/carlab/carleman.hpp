#pragma once

#include "carlab/calculus.hpp"
#include "carlab/weights.hpp"

// Direct quadrature checks of the two weighted inequalities: the weighted
// mass of (|u|^2 + |grad u|^2) against the weighted mass of |Pu|^2, per
// gamma. Both sides share one log-space shift, so verdicts are exact under
// rescaling of u.

namespace carlab {

struct GammaVerdict {
    double gamma = 0;
    double lhs = 0, rhs = 0;  // on the e^{shift} scale
    double shift = 0;
    double ratio = 0;  // lhs/rhs (0 when both vanish)
    bool pass = false;
};

/// One verdict per gamma. params must carry a calibrated d (or
/// allow_uncalibrated). Pass criterion: lhs <= rhs (1 + tol_rel) + tol_abs
/// on the shifted scale.
std::vector<GammaVerdict> check_inequality(const TestFunction& u, const CoefficientField& field,
                                           const WeightParams& params, const QuadratureGrid& grid,
                                           const std::vector<double>& gammas, double tol_rel = 1e-2,
                                           double tol_abs = 1e-12,
                                           bool allow_uncalibrated = false);

}  // namespace carlab
