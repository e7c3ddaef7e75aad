#include "carlab/cone.hpp"

#include <cmath>

namespace carlab {
namespace cone {

Mat cone_matrix(const Vec& y, const ConeParams& p) {
    p.validate();
    const double r2 = y.norm2();
    if (!(r2 > 0)) throw std::domain_error("cone_matrix: singular at the origin");
    const double l = p.l();
    const double c = (l * l - 1.0) / r2;
    Mat A = Mat::identity(2);
    A(0, 0) += c * y[1] * y[1];
    A(0, 1) -= c * y[0] * y[1];
    A(1, 0) -= c * y[0] * y[1];
    A(1, 1) += c * y[0] * y[0];
    return A;
}

Ten3 cone_matrix_grad(const Vec& y, const ConeParams& p) {
    p.validate();
    const double r2 = y.norm2();
    if (!(r2 > 0)) throw std::domain_error("cone_matrix_grad: singular at the origin");
    const double l = p.l();
    const double c = l * l - 1.0;
    const double r4 = r2 * r2;
    const double y1 = y[0], y2 = y[1];
    Ten3 g(2);
    // P = v v^T / r^2, v = (y2, -y1)
    g(0, 0, 0) = c * (-2.0 * y2 * y2 * y1 / r4);
    g(1, 0, 0) = c * (2.0 * y2 * y1 * y1 / r4);
    g(0, 0, 1) = g(0, 1, 0) = c * (y2 * (y1 * y1 - y2 * y2) / r4);
    g(1, 0, 1) = g(1, 1, 0) = c * (y1 * (y2 * y2 - y1 * y1) / r4);
    g(0, 1, 1) = c * (2.0 * y1 * y2 * y2 / r4);
    g(1, 1, 1) = c * (-2.0 * y1 * y1 * y2 / r4);
    return g;
}

CoefficientField shifted_field(const ConeParams& p) {
    p.validate();
    const double l = p.l();
    EllipticityBounds b;
    b.n = 2;
    b.lambda = 1.0;
    b.Lambda = l * l;
    b.M = l * l - 1.0;
    b.E = l * l - 1.0;
    b.validate();

    auto fn = [p](const Vec& y, double) {
        Vec ys(2);
        ys[0] = y[0];
        ys[1] = y[1] + 1.0;
        FieldEval fe;
        fe.A = cone_matrix(ys, p);
        fe.gradA = cone_matrix_grad(ys, p);
        fe.dtA = Mat(2);
        return fe;
    };
    CoefficientField f(b, DomainTag::shifted_half_space, "cone", fn);
    f.set_decay_radius([](const Vec& y) {
        Vec ys(2);
        ys[0] = y[0];
        ys[1] = y[1] + 1.0;
        return ys.norm();
    });
    f.set_singular_distance([](const Vec& y) {
        Vec ys(2);
        ys[0] = y[0];
        ys[1] = y[1] + 1.0;
        return ys.norm();
    });
    return f;
}

std::vector<MarginReport> gradient_bound_check(const ConeParams& p,
                                               const std::vector<SamplePoint>& samples, double tol,
                                               double claimed_E1) {
    const CoefficientField f = shifted_field(p);
    const double E1 = claimed_E1 >= 0 ? claimed_E1 : (p.l() * p.l() - 1.0);

    MarginReport global, decay, decay_y;
    global.check_name = "grad_global";
    decay.check_name = "grad_decay";
    decay_y.check_name = "grad_decay_y";

    for (const auto& s : samples) {
        if (!(s.x[1] > 0)) throw std::domain_error("gradient_bound_check: sample not in half plane");
        const FieldEval fe = f.eval_extended(s.x, s.t);
        const double g = max_entry_grad_norm(fe.gradA);
        const double rt = f.decay_radius(s.x);
        global.observe(E1 - g, s.x, s.t);
        decay.observe(E1 / rt - g, s.x, s.t);
        const double ry = s.x.norm();
        if (ry > 1e-12) decay_y.observe(E1 / ry - g, s.x, s.t);
    }
    for (auto* r : {&global, &decay, &decay_y}) r->finalize(tol);
    return {global, decay, decay_y};
}

EquivalenceResidual operator_equivalence_residual(const TestFunction& phi, const ConeParams& p,
                                                  const std::vector<Vec>& samples, double fd_step,
                                                  double r_min) {
    p.validate();
    const double l = p.l();
    const double t_mid = 0.5 * (phi.t_lo() + phi.t_hi());

    // u(x) = phi(y(x)), y in polar form (r, l*theta)
    auto u = [&](double x1, double x2) {
        const double r = std::hypot(x1, x2);
        const double th = std::atan2(x2, x1);
        Vec y(2);
        y[0] = r * std::cos(l * th);
        y[1] = r * std::sin(l * th);
        return phi.eval(y, t_mid).value;
    };

    EquivalenceResidual out;
    out.argmax_y = Vec(2);
    for (const auto& y : samples) {
        const double r = y.norm();
        if (r < r_min) throw std::domain_error("operator_equivalence_residual: sample too close to the vertex");
        const double thb = std::atan2(y[1], y[0]);
        if (!(thb > 0) || !(thb < M_PI))
            throw std::domain_error("operator_equivalence_residual: sample not strictly inside the half plane");
        const double th = thb / l;
        const double x1 = r * std::cos(th), x2 = r * std::sin(th);

        const double h = std::min(fd_step, r / 100.0);
        const double lap_fd = (u(x1 + h, x2) + u(x1 - h, x2) + u(x1, x2 + h) + u(x1, x2 - h) -
                               4.0 * u(x1, x2)) /
                              (h * h);

        const Mat A = cone_matrix(y, p);
        const Ten3 gA = cone_matrix_grad(y, p);
        const TestFunctionEval pe = phi.eval(y, t_mid);
        double ref = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) ref += A(i, j) * pe.hess(i, j) + gA(i, i, j) * pe.grad[j];

        const double resid = std::abs(lap_fd - ref) / (1.0 + std::abs(ref));
        ++out.sample_count;
        if (resid > out.max_residual) {
            out.max_residual = resid;
            out.argmax_y = y;
        }
    }
    return out;
}

double bu_lower_threshold() {
    const double a = std::acos(1.0 / std::sqrt(3.0));
    const double l = M_PI / (2.0 * a);
    return l * l - 1.0;
}

double bu_critical_angle_deg() { return 2.0 * std::acos(1.0 / std::sqrt(3.0)) * 180.0 / M_PI; }

BuRegime threshold_classify(double E1) {
    if (E1 < 0) throw std::invalid_argument("threshold_classify: E1 must be >= 0");
    if (E1 < bu_lower_threshold()) return BuRegime::bu_holds;
    if (E1 > 3.0) return BuRegime::bu_fails;
    return BuRegime::indeterminate;
}

}  // namespace cone
}  // namespace carlab
