#include "carlab/mollify.hpp"

#include <cmath>

namespace carlab {

namespace {

double raw_profile(double rho2) {  // unnormalized, argument |s|^2
    if (rho2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - rho2));
}

QuadratureGrid unit_box_grid(int n, int order) {
    std::vector<double> lo(static_cast<std::size_t>(n), -1.0), hi(static_cast<std::size_t>(n), 1.0);
    return make_grid(lo, hi, order);
}

}  // namespace

Mollifier make_mollifier(int n, double epsilon, int quad_order) {
    if (n < 1 || n > kMaxDim4) throw std::invalid_argument("make_mollifier: dimension out of range");
    if (!(epsilon > 0)) throw std::invalid_argument("make_mollifier: epsilon must be positive");
    Mollifier m;
    m.n = n;
    m.epsilon = epsilon;
    m.quad_order = quad_order;

    // reference grid finer than any working grid we use
    const QuadratureGrid ref = unit_box_grid(n, 64);
    double mass = 0;
    ref.for_each_node([&](const std::vector<double>& c, double w) {
        double rho2 = 0;
        for (double v : c) rho2 += v * v;
        mass += w * raw_profile(rho2);
    });
    m.norm_const = mass;

    double g1 = 0;
    ref.for_each_node([&](const std::vector<double>& c, double w) {
        double rho2 = 0;
        for (double v : c) rho2 += v * v;
        if (rho2 >= 1.0) return;
        const double q = 1.0 - rho2;
        // |grad phi| = phi * 2|s|/q^2 for the radial profile
        g1 += w * raw_profile(rho2) / mass * 2.0 * std::sqrt(rho2) / (q * q);
    });
    m.grad_l1 = g1;
    return m;
}

double mollifier_profile(const Mollifier& m, const Vec& s) {
    return raw_profile(s.norm2()) / m.norm_const;
}

Vec mollifier_profile_grad(const Mollifier& m, const Vec& s) {
    Vec g(s.n);
    const double rho2 = s.norm2();
    if (rho2 >= 1.0) return g;
    const double q = 1.0 - rho2;
    const double phi = raw_profile(rho2) / m.norm_const;
    for (int i = 0; i < s.n; ++i) g[i] = phi * (-2.0 * s[i] / (q * q));
    return g;
}

MollifiedField::MollifiedField(const CoefficientField& base, Mollifier moll)
    : base_(&base), moll_(std::move(moll)), exact_(base.is_constant()) {
    if (base.bounds.n != moll_.n)
        throw std::invalid_argument("MollifiedField: mollifier dimension mismatch");
    kernel_grid_ = unit_box_grid(moll_.n, moll_.quad_order);
}

MollifiedField mollify_field(const CoefficientField& base, const Mollifier& moll) {
    return MollifiedField(base, moll);
}

MollifiedEval MollifiedField::eval(const Vec& x, double t) const {
    const int n = moll_.n;
    MollifiedEval out;
    out.a = Mat(n);
    out.grad = Ten3(n);
    out.second = Ten4(n);

    if (exact_) {
        out.a = base_->eval_extended(x, t).A;
        return out;
    }
    if (base_->singular_distance(x) <= moll_.epsilon)
        throw std::domain_error("MollifiedField::eval: eps-ball reaches the field singularity");

    const double eps = moll_.epsilon;
    // a_eps(x)      = int a(x - eps s) phi(s) ds
    // d_k a_eps(x)  = eps^{-1} int a(x - eps s) (d_k phi)(s) ds
    // d_kl a_eps(x) = eps^{-1} int (d_l a)(x - eps s) (d_k phi)(s) ds, then symmetrized
    kernel_grid_.for_each_node([&](const std::vector<double>& c, double w) {
        Vec s(n);
        double rho2 = 0;
        for (int i = 0; i < n; ++i) {
            s[i] = c[static_cast<std::size_t>(i)];
            rho2 += s[i] * s[i];
        }
        if (rho2 >= 1.0) return;
        const double phi = raw_profile(rho2) / moll_.norm_const;
        const Vec dphi = mollifier_profile_grad(moll_, s);

        Vec y = x;
        for (int i = 0; i < n; ++i) y[i] -= eps * s[i];
        const FieldEval fe = base_->eval_extended(y, t);

        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                out.a(i, j) += w * phi * fe.A(i, j);
                for (int k = 0; k < n; ++k) {
                    out.grad(k, i, j) += w * dphi[k] / eps * fe.A(i, j);
                    for (int l = 0; l < n; ++l)
                        out.second(k, l, i, j) += w * dphi[k] / eps * fe.gradA(l, i, j);
                }
            }
    });
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double v = 0.5 * (out.second(k, l, i, j) + out.second(l, k, i, j));
                    out.second(k, l, i, j) = out.second(l, k, i, j) = v;
                }
    return out;
}

std::vector<MarginReport> verify_mollify_props(const MollifiedField& mf,
                                               const std::vector<SamplePoint>& samples, double tol,
                                               const EllipticityBounds* declared) {
    if (samples.empty()) throw std::invalid_argument("verify_mollify_props: empty sample cloud");
    const CoefficientField& base = mf.base();
    const EllipticityBounds& b = declared ? *declared : base.bounds;
    const double cn = 4.0 * mf.mollifier().grad_l1;
    const int n = b.n;

    MarginReport eig, gb, gd, db, dd, sb, sd;
    eig.check_name = "eps_eig";
    gb.check_name = "eps_grad_bound";
    gd.check_name = "eps_grad_decay";
    db.check_name = "eps_dist_bound";
    dd.check_name = "eps_dist_decay";
    sb.check_name = "eps_second_bound";
    sd.check_name = "eps_second_decay";

    for (const auto& p : samples) {
        const double r = base.decay_radius(p.x);
        if (r < 1.0)
            throw std::invalid_argument("verify_mollify_props: decay clauses need samples with |x| >= 1");
        const MollifiedEval me = mf.eval(p.x, p.t);
        const FieldEval fe = base.eval_extended(p.x, p.t);

        const Vec ev = sym_eigenvalues(me.a);
        eig.observe(std::min(ev[0] - b.lambda, b.Lambda - ev[n - 1]), p.x, p.t);

        const double gnorm = max_entry_grad_norm(me.grad);
        gb.observe(b.M - gnorm, p.x, p.t);
        gd.observe(2.0 * b.E / r - gnorm, p.x, p.t);

        double dist = 0, second = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                dist = std::max(dist, std::abs(me.a(i, j) - fe.A(i, j)));
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        second = std::max(second, std::abs(me.second(k, l, i, j)));
            }
        db.observe(2.0 * b.Lambda - dist, p.x, p.t);
        dd.observe(b.E / r - dist, p.x, p.t);
        sb.observe(cn * b.M - second, p.x, p.t);
        sd.observe(cn * b.E / r - second, p.x, p.t);
    }
    std::vector<MarginReport> out{eig, gb, gd, db, dd, sb, sd};
    for (auto& r : out) r.finalize(tol);
    return out;
}

}  // namespace carlab
