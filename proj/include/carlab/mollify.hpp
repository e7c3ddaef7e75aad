#pragma once

#include "carlab/calculus.hpp"
#include "carlab/fields.hpp"
#include "carlab/report.hpp"

// Mollified coefficients a_eps = a * phi_eps with the normalized
// exp(-1/(1-|s|^2)) kernel. Convolutions are tensor Gauss quadrature over the
// kernel ball; first derivatives differentiate the kernel, second derivatives
// put one derivative on the field and one on the kernel.

namespace carlab {

struct Mollifier {
    int n = 2;
    double epsilon = 0.5;
    int quad_order = 32;   // Gauss nodes per axis over the kernel box
    double norm_const = 0; // integral of the unnormalized profile over the unit ball
    double grad_l1 = 0;    // L1 norm of the normalized profile gradient
};

/// Builds the mollifier and computes its normalization and |grad phi|_L1
/// once (fine reference grid, independent of quad_order).
Mollifier make_mollifier(int n, double epsilon = 0.5, int quad_order = 32);

/// Normalized profile value at s (zero outside the unit ball).
double mollifier_profile(const Mollifier& m, const Vec& s);
/// Gradient of the normalized profile.
Vec mollifier_profile_grad(const Mollifier& m, const Vec& s);

struct MollifiedEval {
    Mat a;       // a_eps^{ij}
    Ten3 grad;   // grad(k,i,j)   = d_k a_eps^{ij}
    Ten4 second; // second(k,l,i,j) = d_k d_l a_eps^{ij}
};

class MollifiedField {
public:
    MollifiedField(const CoefficientField& base, Mollifier moll);

    /// Quadrature convolution (exact shortcut for constant fields).
    /// Throws std::domain_error when the eps-ball reaches the base field's
    /// closed-form singularity.
    MollifiedEval eval(const Vec& x, double t) const;

    const Mollifier& mollifier() const { return moll_; }
    const CoefficientField& base() const { return *base_; }
    bool exact() const { return exact_; }

private:
    const CoefficientField* base_;
    Mollifier moll_;
    bool exact_;
    QuadratureGrid kernel_grid_;  // over [-1,1]^n in kernel coordinates
};

MollifiedField mollify_field(const CoefficientField& base, const Mollifier& moll);

/// Margins for the four mollified-coefficient clauses, in order:
///   eps_eig          min(lambda_min(a_eps) - lambda, Lambda - lambda_max(a_eps))
///   eps_grad_bound   M - max_ij |grad a_eps^{ij}|_2
///   eps_grad_decay   2E/|x| - max_ij |grad a_eps^{ij}|_2
///   eps_dist_bound   2 Lambda - max_ij |a_eps - a|
///   eps_dist_decay   E/|x| - max_ij |a_eps - a|
///   eps_second_bound c(n) M - max |d_kl a_eps^{ij}|,  c(n) = 4 |grad phi|_L1
///   eps_second_decay c(n) E/|x| - max |d_kl a_eps^{ij}|
/// All samples must have decay radius >= 1 (argument error otherwise).
std::vector<MarginReport> verify_mollify_props(const MollifiedField& mf,
                                               const std::vector<SamplePoint>& samples, double tol,
                                               const EllipticityBounds* declared = nullptr);

}  // namespace carlab
