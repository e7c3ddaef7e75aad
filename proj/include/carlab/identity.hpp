#pragma once

#include <functional>

#include "carlab/calculus.hpp"
#include "carlab/estimates.hpp"
#include "carlab/weights.hpp"

// Quadrature verification of the weighted integral identities: the
// mollifier-corrected form and its general source, for a compactly supported
// test function, a coefficient field and a weight. All weighted integrals are
// evaluated in log space with a per-run shift (max log-integrand over the
// grid), so the reported lhs/rhs live on a common e^{shift} scale.

namespace carlab {

struct ResidualReport {
    double lhs = 0, rhs = 0;  // on the e^{shift} scale
    double shift = 0;
    double residual = 0;  // |lhs-rhs|/(1+|lhs|+|rhs|)
};

/// Both sides of the mollifier-corrected identity:
///   (1/2) int u^2 M0 G + int [2 <D_G grad u, grad u> + <A grad u, grad u>(theta-F)] G
///   - int u <A grad u, grad(F-F0)> G  =  2 int Lu (Pu - Lu) G,
/// with Lu = d_t u - <A grad u, grad log G> + F u/2 and
/// M0 = d_t F + F(theta-F) + tildeDelta F0 - <A grad(F-F0), grad log G>.
ResidualReport corollary32_residual(const TestFunction& u, const CoefficientField& field,
                                    const MollifiedField& moll, const WeightParams& params,
                                    const QuadratureGrid& grid);

struct SigmaEval {
    double v = 0, d1 = 0, d2 = 0;
};
using SigmaFn = std::function<SigmaEval(double)>;

/// Both sides of the general identity with the sigma^{1-alpha}/sigma'
/// prefactor and the extra -alpha sigma'/(2 sigma) u term in Lu. The weight
/// and multiplier F come from the whole-space variant params. sigma and
/// sigma' must be positive on the support's time range.
ResidualReport lemma31_residual(const TestFunction& u, const CoefficientField& field,
                                const SigmaFn& sigma, double alpha_exp, const WeightParams& params,
                                const QuadratureGrid& grid);

}  // namespace carlab
