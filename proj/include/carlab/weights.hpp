#pragma once

#include "carlab/fields.hpp"
#include "carlab/mollify.hpp"

// Weight machinery: the anisotropic quadratic psi with partials to order 4,
// the two exponential weights (whole-space Gaussian-in-x variant and the
// half-space x_n^alpha variant), their multiplier fields F / F0, and the
// default constants derived from the structure bounds.

namespace carlab {

enum class WeightVariant { prop13, prop14 };

struct WeightParams {
    WeightVariant variant = WeightVariant::prop13;
    double gamma = 1.0;
    double b = 0.0;
    double K = 0.0;
    double alpha = 0.0;  // half-space variant only, in (1,2)
    double d = 0.0;
    double kappa = 1.0;  // Lambda/lambda of the field the params were built for
    bool d_calibrated = false;

    void validate() const;
};

struct DerivedConstants {
    WeightParams params;
    double E0 = 0.0;  // admissible decay threshold
    double T1 = 0.0;  // uniqueness time window
    double tau = 0.0; // scaling factor sqrt(2 T1)
};

/// Fills b, K, alpha per variant from the structure bounds:
///   whole-space: b = 1/(8 Lambda), K = 12 d
///   half-space:  b = 1/(64 Lambda (kappa+1)^4), K = 13 kappa d,
///                alpha = 1 + E/E0 with E0 = lambda/(16 n^2 kappa (kappa+1));
///                requires E < E0. At E = 0 alpha is floored to 1 + 1e-6 to
///                stay inside (1,2).
/// T1 = min{b/(32N), 1/(12 N^2), 1/2}, tau = sqrt(2 T1).
DerivedConstants default_constants(const EllipticityBounds& bounds, WeightVariant variant, double d,
                                   double N);

struct PsiEval {
    double value = 0;
    Vec grad;
    Mat hess;
    Ten3 third;
    Ten4 fourth;
};

/// psi(x) = |x|^2 - 2 kappa |x| x_n + 2 kappa^2 x_n^2, with all partials to
/// order 4 in closed form. Throws std::domain_error at x = 0.
PsiEval psi_eval(const Vec& x, double kappa);

struct WeightEval {
    WeightVariant variant = WeightVariant::prop13;
    int n = 0;
    Vec x;
    double t = 0;
    FieldEval fe;  // raw coefficients at (x,t)

    double logG = 0;
    Vec grad_logG;
    Mat hess_logG;
    double theta = 0;  // (d_t G - tildeDelta G)/G

    double F = 0, dtF = 0;
    Vec gradF;

    // f(t) = t^{-K} - 1 and the x_n^alpha factor chain (half-space variant;
    // the whole-space variant only fills f, df, ddf)
    double f = 0, df = 0, ddf = 0;
    double phi1 = 0, dn_phi1 = 0, dnn_phi1 = 0, dn3_phi1 = 0, dn4_phi1 = 0;
    double dt_phi1 = 0, dnt_phi1 = 0, dnnt_phi1 = 0, dtt_phi1 = 0;

    double phi = 0, dt_phi = 0, dtt_phi = 0;
    Vec grad_phi, dt_grad_phi;
    Mat hess_phi, dt_hess_phi;
    Ten3 third_phi;
    Ten4 fourth_phi;

    double H = 0, dtH = 0;
    Vec gradH;
    Mat hessH;

    PsiEval psi;

    // mollified layer (attach_mollified)
    bool has_f0 = false;
    double F0 = 0;
    Vec gradF0, grad_FmF0;
    double lapF0_tilde = 0;  // tildeDelta F0
};

/// Whole-space weight: log G = 2 gamma (t^{-K}-1) - (b|x|^2+K)/t, with the
/// multiplier F carrying the -d(1/t+1) shift. t must lie in (0,2).
WeightEval weight13_eval(const Vec& x, double t, const CoefficientField& field,
                         const WeightParams& params);

/// Half-space weight: Phi = gamma f(t) x_n^alpha - (b psi + K)/(2t),
/// G = e^{2 Phi}, F = 2 d_t Phi - 2 a^{ij} d_ij Phi - 4 <A grad Phi, grad Phi> - H,
/// H = 16 n^2 kappa E d_n Phi_1 / |x| + d/t.
/// Requires t in (0,1) and x_n >= 1 (up to a small finite-difference whisker).
WeightEval weight14_eval(const Vec& x, double t, const CoefficientField& field,
                         const WeightParams& params);

/// Populates F0, grad F0, grad(F - F0) and tildeDelta F0 from mollified
/// coefficients. For constant fields this reduces to F0 = F exactly.
void attach_mollified(WeightEval& we, const MollifiedEval& me, const WeightParams& params);

}  // namespace carlab
