#pragma once

#include "carlab/linalg.hpp"
#include "carlab/report.hpp"

// Cut-off machinery for the half-space localization: two smooth transition
// profiles, the product cutoff eta(y,s) = eta1(y_n) eta2(f(s) y_n^alpha /
// (2 Cstar) - 1), the emptiness margin of the transition region, and the
// derivative-to-y_n^alpha ratio sweep.

namespace carlab {
namespace cutoffs {

/// C^inf step from 0 (s<=0) to 1 (s>=1): B(s) = sig(s)/(sig(s)+sig(1-s)),
/// sig(s) = exp(-1/s). Returns value and first two derivatives.
struct Transition {
    double v = 0, d1 = 0, d2 = 0;
};
Transition smooth_step(double s);

struct CutoffSpec {
    double tau = 1.0;
    double K = 1.0;
    double alpha = 1.5;
    double Cstar = 0.0;  // 1 + f(1/2) (1/tau + 2)^alpha

    double eta1_lo() const { return 1.0 / tau + 1.0; }
    double eta1_hi() const { return 1.0 / tau + 2.0; }
};

CutoffSpec make_cutoff_spec(double tau, double K, double alpha);

/// f(s) = s^{-K} - 1 (clamped to +inf when it overflows the double range).
double cutoff_f(double s, double K);

struct EtaEval {
    double value = 0;
    double ds = 0;
    Vec grad;
    Mat hess;
};

/// Product cutoff and its derivatives (nonzero only in the last coordinate).
EtaEval eta_eval(const Vec& y, double s, const CutoffSpec& spec);

/// Reports, in order:
///   empty_region_margin    min over (s,y_n) in (1/2,1) x (eta1_lo, eta1_hi)
///                          of Cstar - f(s) y_n^alpha (>= 1 by construction)
///   region_description     +1 when the sampled set {0 < eta < 1, s > 1/2}
///                          matches {y_n > eta1_lo, 1/2 < f y_n^alpha/Cstar < 1},
///                          -(mismatches) otherwise
std::vector<MarginReport> verify_omega_identity(const CutoffSpec& spec, long nsamples,
                                                std::uint64_t seed, double cstar_override = -1.0);

/// Empirical constant sup (|ds eta| + |grad eta| + |hess eta|_F) / y_n^alpha
/// over the transition band; callers assert refinement stability.
MarginReport verify_cutoff_derivative_bound(const CutoffSpec& spec, long nsamples,
                                            std::uint64_t seed);

}  // namespace cutoffs
}  // namespace carlab
