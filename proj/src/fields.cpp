#include "carlab/fields.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace carlab {

void EllipticityBounds::validate() const {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("EllipticityBounds: n out of range");
    if (!(lambda > 0) || !(Lambda >= lambda))
        throw std::invalid_argument("EllipticityBounds: need 0 < lambda <= Lambda");
    if (M < 0 || E < 0) throw std::invalid_argument("EllipticityBounds: M, E must be >= 0");
}

bool CoefficientField::in_domain(const Vec& x, double t) const {
    switch (domain) {
        case DomainTag::whole_space_0_2:
            return t > 0 && t < 2;
        case DomainTag::half_space_0_1:
        case DomainTag::shifted_half_space:
            return x[x.n - 1] > 0 && t > 0 && t < 1;
    }
    return false;
}

FieldEval CoefficientField::eval(const Vec& x, double t) const {
    if (!in_domain(x, t)) throw std::domain_error("CoefficientField::eval: point outside domain");
    return fn_(x, t);
}

FieldEval CoefficientField::eval_extended(const Vec& x, double t) const { return fn_(x, t); }

CoefficientField make_constant_field(const Mat& A0, DomainTag tag) {
    if (A0.sym_defect() > 0) throw std::invalid_argument("make_constant_field: matrix not symmetric");
    const Vec ev = sym_eigenvalues(A0);
    EllipticityBounds b;
    b.n = A0.n;
    b.lambda = ev[0];
    b.Lambda = ev[A0.n - 1];
    b.M = 0.0;
    b.E = 0.0;
    b.validate();
    const int n = A0.n;
    return CoefficientField(b, tag, "constant", [A0, n](const Vec&, double) {
        FieldEval fe;
        fe.A = A0;
        fe.gradA = Ten3(n);
        fe.dtA = Mat(n);
        return fe;
    });
}

CoefficientField make_identity_field(int n, DomainTag tag) {
    return make_constant_field(Mat::identity(n), tag);
}

CoefficientField make_radial_field(int n, double c, double mod, double omega, DomainTag tag) {
    if (c < 0 || std::abs(mod) >= 1) throw std::invalid_argument("make_radial_field: need c >= 0, |mod| < 1");
    const double c_max = c * (1.0 + std::abs(mod));
    EllipticityBounds b;
    b.n = n;
    b.lambda = 1.0;
    b.Lambda = 1.0 + c_max;
    b.M = std::max(c_max, c * std::abs(mod) * omega);
    b.E = c_max;
    b.validate();

    auto fn = [n, c, mod, omega](const Vec& x, double t) {
        const double ct = c * (1.0 + mod * std::sin(omega * t));
        const double dct = c * mod * omega * std::cos(omega * t);
        const double r2 = x.norm2();
        const double w = 1.0 / (1.0 + r2);
        FieldEval fe;
        fe.A = Mat::identity(n);
        fe.gradA = Ten3(n);
        fe.dtA = Mat(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                fe.A(i, j) += ct * x[i] * x[j] * w;
                fe.dtA(i, j) = dct * x[i] * x[j] * w;
            }
        // d_k [x_i x_j w] = (delta_ki x_j + delta_kj x_i) w - 2 x_i x_j x_k w^2
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double g = -2.0 * x[i] * x[j] * x[k] * w * w;
                    if (k == i) g += x[j] * w;
                    if (k == j) g += x[i] * w;
                    fe.gradA(k, i, j) = ct * g;
                }
        return fe;
    };
    return CoefficientField(b, tag, "radial", fn);
}

std::vector<SamplePoint> sample_cloud(const CoefficientField& field, long count, double x_max,
                                      double t_min, double t_max, std::uint64_t seed) {
    if (count <= 0) throw std::invalid_argument("sample_cloud: count must be positive");
    const int n = field.bounds.n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const bool half = field.domain != DomainTag::whole_space_0_2;
    std::vector<SamplePoint> cloud;
    cloud.reserve(static_cast<std::size_t>(count));
    for (long s = 0; s < count; ++s) {
        SamplePoint p;
        p.x = Vec(n);
        for (int i = 0; i < n; ++i) p.x[i] = (2.0 * unif(rng) - 1.0) * x_max;
        if (half) p.x[n - 1] = unif(rng) * x_max + 1e-6;
        p.t = std::exp(std::log(t_min) + (std::log(t_max) - std::log(t_min)) * unif(rng));
        cloud.push_back(p);
    }
    return cloud;
}

double max_entry_grad_norm(const Ten3& gradA) {
    const int n = gradA.n;
    double m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += gradA(k, i, j) * gradA(k, i, j);
            m = std::max(m, std::sqrt(s));
        }
    return m;
}

std::vector<MarginReport> verify_structure_bounds(const CoefficientField& field,
                                                  const std::vector<SamplePoint>& samples,
                                                  double tol) {
    if (samples.empty()) throw std::invalid_argument("verify_structure_bounds: empty sample cloud");
    if (!(tol > 0)) throw std::invalid_argument("verify_structure_bounds: tol must be positive");
    const auto& b = field.bounds;

    MarginReport eig_lo, eig_hi, lips, decay;
    eig_lo.check_name = "eig_lower";
    eig_hi.check_name = "eig_upper";
    lips.check_name = "lipschitz";
    decay.check_name = "decay";

    for (const auto& p : samples) {
        const FieldEval fe = field.eval(p.x, p.t);
        const Vec ev = sym_eigenvalues(fe.A);
        eig_lo.observe(ev[0] - b.lambda, p.x, p.t);
        eig_hi.observe(b.Lambda - ev[ev.n - 1], p.x, p.t);
        const double gnorm = max_entry_grad_norm(fe.gradA);
        lips.observe(b.M - std::max(gnorm, fe.dtA.max_abs()), p.x, p.t);
        const double r = field.decay_radius(p.x);
        if (r >= 1.0) decay.observe(b.E / r - gnorm, p.x, p.t);
    }
    for (auto* r : {&eig_lo, &eig_hi, &lips, &decay}) r->finalize(tol);
    if (decay.sample_count == 0) {
        decay.pass = true;  // vacuous: no sample reached the decay regime
        decay.note = "no samples with decay radius >= 1";
        decay.min_margin = 0.0;
    }
    return {eig_lo, eig_hi, lips, decay};
}

}  // namespace carlab
