#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carlab/linalg.hpp"
#include "carlab/report.hpp"

// Coefficient fields: symmetric matrices a^{ij}(x,t) with closed-form spatial
// gradient and time derivative, carrying their declared structure bounds
// (ellipticity lambda/Lambda, Lipschitz bound M, decay constant E).

namespace carlab {

enum class DomainTag { whole_space_0_2, half_space_0_1, shifted_half_space };

struct EllipticityBounds {
    int n = 2;
    double lambda = 1.0;
    double Lambda = 1.0;
    double M = 0.0;
    double E = 0.0;

    void validate() const;
    double kappa() const { return Lambda / lambda; }
};

struct FieldEval {
    Mat A;      // a^{ij}
    Ten3 gradA; // gradA(k,i,j) = d_k a^{ij}
    Mat dtA;    // d_t a^{ij}
};

class CoefficientField {
public:
    EllipticityBounds bounds;
    DomainTag domain = DomainTag::whole_space_0_2;
    std::string family = "custom";

    CoefficientField() = default;
    CoefficientField(EllipticityBounds b, DomainTag tag, std::string fam,
                     std::function<FieldEval(const Vec&, double)> fn)
        : bounds(b), domain(tag), family(std::move(fam)), fn_(std::move(fn)) {}

    bool in_domain(const Vec& x, double t) const;

    /// Closed-form evaluation; throws std::domain_error outside the domain.
    FieldEval eval(const Vec& x, double t) const;

    /// Smooth continuation beyond the nominal domain (all built-in families
    /// have closed forms valid there); used by mollification.
    FieldEval eval_extended(const Vec& x, double t) const;

    /// Radius entering the decay bound E/|x|; the shifted half-space family
    /// measures it from its singular point, all others from the origin.
    double decay_radius(const Vec& x) const {
        return decay_radius_ ? decay_radius_(x) : x.norm();
    }
    void set_decay_radius(std::function<double(const Vec&)> f) { decay_radius_ = std::move(f); }

    /// Distance from x to the closed-form singularity (+inf when smooth everywhere).
    double singular_distance(const Vec& x) const {
        return singular_distance_ ? singular_distance_(x) : std::numeric_limits<double>::infinity();
    }
    void set_singular_distance(std::function<double(const Vec&)> f) {
        singular_distance_ = std::move(f);
    }

    bool is_constant() const { return family == "constant"; }

private:
    std::function<FieldEval(const Vec&, double)> fn_;
    std::function<double(const Vec&)> decay_radius_;
    std::function<double(const Vec&)> singular_distance_;
};

/// Constant SPD field; declared bounds are its exact spectrum, M = E = 0.
CoefficientField make_constant_field(const Mat& A0, DomainTag tag = DomainTag::whole_space_0_2);

CoefficientField make_identity_field(int n, DomainTag tag = DomainTag::whole_space_0_2);

/// Radial rank-one perturbation a^{ij} = delta^{ij} + c(t) x_i x_j / (1+|x|^2)
/// with c(t) = c (1 + mod sin(omega t)). Smooth on all of R^n.
///
/// Declared bounds (valid for c_max = c (1+|mod|), derived from the closed
/// form; the gradient-norm suprema below are the exact asymptotics):
///   lambda = 1, Lambda = 1 + c_max,
///   M = c_max            (entrywise |grad a^{ij}|_2 <= c_max, sup ~ 0.65 c_max;
///                         |d_t a^{ij}| <= c |mod| omega, also folded in),
///   E = c_max            (sup_r r |grad a^{ij}|_2 -> c_max from below).
CoefficientField make_radial_field(int n, double c, double mod = 0.0, double omega = 0.0,
                                   DomainTag tag = DomainTag::whole_space_0_2);

struct SamplePoint {
    Vec x;
    double t = 0;
};

/// Random cloud in the field's domain; |x| <= x_max (componentwise box),
/// t log-spaced in [t_min, t_max]. For half-space domains x_n in (0, x_max].
std::vector<SamplePoint> sample_cloud(const CoefficientField& field, long count, double x_max,
                                      double t_min, double t_max, std::uint64_t seed);

/// Checks the declared structure bounds on a sample cloud. Reports, in order:
///   eig_lower:  lambda_min(A) - lambda
///   eig_upper:  Lambda - lambda_max(A)
///   lipschitz:  M - max(|grad a^{ij}|_2, |d_t a^{ij}|)
///   decay:      E/|x| - max |grad a^{ij}|_2 over samples with decay radius >= 1
std::vector<MarginReport> verify_structure_bounds(const CoefficientField& field,
                                                  const std::vector<SamplePoint>& samples,
                                                  double tol);

/// Largest per-entry gradient norm max_{ij} |grad a^{ij}|_2.
double max_entry_grad_norm(const Ten3& gradA);

}  // namespace carlab
