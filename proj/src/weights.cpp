#include "carlab/weights.hpp"

#include <cmath>

namespace carlab {

void WeightParams::validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("WeightParams: gamma must be positive");
    if (!(b > 0) || !(K > 0) || !(d > 0))
        throw std::invalid_argument("WeightParams: b, K, d must be positive");
    if (variant == WeightVariant::prop14 && !(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("WeightParams: alpha must lie in (1,2)");
}

DerivedConstants default_constants(const EllipticityBounds& bounds, WeightVariant variant, double d,
                                   double N) {
    bounds.validate();
    if (!(d > 0) || !(N > 0)) throw std::invalid_argument("default_constants: d, N must be positive");
    const double kappa = bounds.kappa();
    const double n2 = static_cast<double>(bounds.n) * bounds.n;

    DerivedConstants out;
    out.E0 = bounds.lambda / (16.0 * n2 * kappa * (kappa + 1.0));

    WeightParams p;
    p.variant = variant;
    p.kappa = kappa;
    p.d = d;
    if (variant == WeightVariant::prop13) {
        p.b = 1.0 / (8.0 * bounds.Lambda);
        p.K = 12.0 * d;
        p.alpha = 0.0;
    } else {
        if (!(bounds.E < out.E0))
            throw hypothesis_error("default_constants: decay constant E at or above its threshold E0");
        p.b = 1.0 / (64.0 * bounds.Lambda * std::pow(kappa + 1.0, 4));
        p.K = 13.0 * kappa * d;
        p.alpha = bounds.E > 0 ? 1.0 + bounds.E / out.E0 : 1.0 + 1e-6;
    }
    out.params = p;
    out.T1 = std::min({p.b / (32.0 * N), 1.0 / (12.0 * N * N), 0.5});
    out.tau = std::sqrt(2.0 * out.T1);
    return out;
}

// ---------------------------------------------------------------------------
// psi
// ---------------------------------------------------------------------------

PsiEval psi_eval(const Vec& x, double kappa) {
    const int n = x.n;
    const double r = x.norm();
    if (!(r > 0)) throw std::domain_error("psi_eval: singular at x = 0");
    const double xn = x[n - 1];

    // partials of r
    Vec dr(n);
    for (int i = 0; i < n; ++i) dr[i] = x[i] / r;
    const double r3 = r * r * r, r5 = r3 * r * r, r7 = r5 * r * r;
    Mat ddr(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddr(i, j) = (i == j ? 1.0 / r : 0.0) - x[i] * x[j] / r3;
    Ten3 dddr(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 3.0 * x[i] * x[j] * x[k] / r5;
                if (i == j) v -= x[k] / r3;
                if (i == k) v -= x[j] / r3;
                if (j == k) v -= x[i] / r3;
                dddr(i, j, k) = v;
            }
    Ten4 ddddr(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = -15.0 * x[i] * x[j] * x[k] * x[l] / r7;
                    if (i == j) v += 3.0 * x[k] * x[l] / r5;
                    if (i == k) v += 3.0 * x[j] * x[l] / r5;
                    if (j == k) v += 3.0 * x[i] * x[l] / r5;
                    if (i == l) v += 3.0 * x[j] * x[k] / r5;
                    if (j == l) v += 3.0 * x[i] * x[k] / r5;
                    if (k == l) v += 3.0 * x[i] * x[j] / r5;
                    if (i == j && k == l) v -= 1.0 / r3;
                    if (i == k && j == l) v -= 1.0 / r3;
                    if (j == k && i == l) v -= 1.0 / r3;
                    ddddr(i, j, k, l) = v;
                }

    // g = r x_n and its partials
    auto dn = [n](int i) { return i == n - 1 ? 1.0 : 0.0; };
    Vec dg(n);
    for (int i = 0; i < n; ++i) dg[i] = dr[i] * xn + r * dn(i);
    Mat ddg(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ddg(i, j) = ddr(i, j) * xn + dr[i] * dn(j) + dr[j] * dn(i);
    Ten3 dddg(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dddg(k, i, j) = dddr(k, i, j) * xn + ddr(i, j) * dn(k) + ddr(k, j) * dn(i) +
                                ddr(k, i) * dn(j);
    Ten4 ddddg(n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ddddg(k, l, i, j) = ddddr(k, l, i, j) * xn + dddr(l, i, j) * dn(k) +
                                        dddr(k, i, j) * dn(l) + dddr(k, l, j) * dn(i) +
                                        dddr(k, l, i) * dn(j);

    PsiEval out;
    out.value = r * r - 2.0 * kappa * r * xn + 2.0 * kappa * kappa * xn * xn;
    out.grad = Vec(n);
    for (int i = 0; i < n; ++i)
        out.grad[i] = 2.0 * x[i] - 2.0 * kappa * dg[i] + 4.0 * kappa * kappa * xn * dn(i);
    out.hess = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.hess(i, j) = 2.0 * (i == j ? 1.0 : 0.0) - 2.0 * kappa * ddg(i, j) +
                             4.0 * kappa * kappa * dn(i) * dn(j);
    out.third = Ten3(n);
    out.fourth = Ten4(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                out.third(k, i, j) = -2.0 * kappa * dddg(k, i, j);
                for (int l = 0; l < n; ++l)
                    out.fourth(k, l, i, j) = -2.0 * kappa * ddddg(k, l, i, j);
            }
    return out;
}

// ---------------------------------------------------------------------------
// whole-space weight
// ---------------------------------------------------------------------------

WeightEval weight13_eval(const Vec& x, double t, const CoefficientField& field,
                         const WeightParams& params) {
    if (params.variant != WeightVariant::prop13)
        throw std::invalid_argument("weight13_eval: params built for the other variant");
    params.validate();
    if (!(t > 0) || !(t < 2)) throw std::domain_error("weight13_eval: t outside (0,2)");
    const int n = field.bounds.n;
    const double b = params.b, K = params.K, g = params.gamma, d = params.d;

    WeightEval we;
    we.variant = WeightVariant::prop13;
    we.n = n;
    we.x = x;
    we.t = t;
    we.fe = field.eval_extended(x, t);
    const Mat& A = we.fe.A;
    const Ten3& gA = we.fe.gradA;

    we.f = std::pow(t, -K) - 1.0;
    we.df = -K * std::pow(t, -K - 1.0);
    we.ddf = K * (K + 1.0) * std::pow(t, -K - 2.0);

    const double r2 = x.norm2();
    we.logG = 2.0 * g * we.f - (b * r2 + K) / t;
    we.grad_logG = (-2.0 * b / t) * x;
    we.hess_logG = Mat(n);
    for (int i = 0; i < n; ++i) we.hess_logG(i, i) = -2.0 * b / t;

    const double q = A.quad(x);          // a^{ij} x_i x_j
    const double qt = we.fe.dtA.quad(x); // d_t a^{ij} x_i x_j
    const double trA = A.trace();
    double s1 = 0;  // d_k a^{kl} x_l
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s1 += gA(k, k, l) * x[l];

    const double core = b * r2 - 4.0 * b * b * q + K;
    const double gterm = 2.0 * g * K * std::pow(t, -K - 1.0);
    we.theta = core / (t * t) + (2.0 * b * trA + 2.0 * b * s1) / t - gterm;
    we.F = core / (t * t) + 2.0 * b * trA / t - gterm - d * (1.0 / t + 1.0);

    double tr_dtA = we.fe.dtA.trace();
    we.dtF = -2.0 * core / (t * t * t) - 4.0 * b * b * qt / (t * t) - 2.0 * b * trA / (t * t) +
             2.0 * b * tr_dtA / t + 2.0 * g * K * (K + 1.0) * std::pow(t, -K - 2.0) + d / (t * t);

    we.gradF = Vec(n);
    const Vec Ax = A * x;
    for (int k = 0; k < n; ++k) {
        double gq = 2.0 * Ax[k];  // d_k (a^{ij} x_i x_j), field-derivative part next
        double trk = 0;
        for (int i = 0; i < n; ++i) {
            trk += gA(k, i, i);
            for (int j = 0; j < n; ++j) gq += gA(k, i, j) * x[i] * x[j];
        }
        we.gradF[k] = (2.0 * b * x[k] - 4.0 * b * b * gq) / (t * t) + 2.0 * b * trk / t;
    }
    return we;
}

// ---------------------------------------------------------------------------
// half-space weight
// ---------------------------------------------------------------------------

WeightEval weight14_eval(const Vec& x, double t, const CoefficientField& field,
                         const WeightParams& params) {
    if (params.variant != WeightVariant::prop14)
        throw std::invalid_argument("weight14_eval: params built for the other variant");
    params.validate();
    if (!(t > 0) || !(t < 1)) throw std::domain_error("weight14_eval: t outside (0,1)");
    const int n = field.bounds.n;
    if (n > kMaxDim4) throw std::invalid_argument("weight14_eval: dimension above the weight cap");
    const double xn = x[n - 1];
    // Q up to the finite-difference whisker used by divergence evaluations
    if (!(xn >= 0.99)) throw std::domain_error("weight14_eval: x_n below the half-space floor");

    const double b = params.b, K = params.K, g = params.gamma, al = params.alpha, d = params.d;
    const double E = field.bounds.E;
    const double kap = params.kappa;

    // representable-range guard: the multiplier estimates cube gamma f x_n^alpha
    const double peak = 3.0 * (std::log(g) + K * std::max(0.0, -std::log(t)) + al * std::log(xn)) +
                        3.0 * std::max(0.0, -std::log(t)) + 40.0;
    if (peak > 700.0)
        throw std::domain_error(
            "weight14_eval: configuration exceeds double range (raise the t floor or lower K)");

    WeightEval we;
    we.variant = WeightVariant::prop14;
    we.n = n;
    we.x = x;
    we.t = t;
    we.fe = field.eval_extended(x, t);
    const Mat& A = we.fe.A;
    const Ten3& gA = we.fe.gradA;

    we.psi = psi_eval(x, kap);

    we.f = std::pow(t, -K) - 1.0;
    we.df = -K * std::pow(t, -K - 1.0);
    we.ddf = K * (K + 1.0) * std::pow(t, -K - 2.0);

    const double xa = std::pow(xn, al);
    we.phi1 = g * we.f * xa;
    we.dn_phi1 = g * we.f * al * std::pow(xn, al - 1.0);
    we.dnn_phi1 = g * we.f * al * (al - 1.0) * std::pow(xn, al - 2.0);
    we.dn3_phi1 = g * we.f * al * (al - 1.0) * (al - 2.0) * std::pow(xn, al - 3.0);
    we.dn4_phi1 = g * we.f * al * (al - 1.0) * (al - 2.0) * (al - 3.0) * std::pow(xn, al - 4.0);
    we.dt_phi1 = g * we.df * xa;
    we.dtt_phi1 = g * we.ddf * xa;
    we.dnt_phi1 = g * we.df * al * std::pow(xn, al - 1.0);
    we.dnnt_phi1 = g * we.df * al * (al - 1.0) * std::pow(xn, al - 2.0);

    const double phi2 = -(b * we.psi.value + K) / (2.0 * t);
    we.phi = we.phi1 + phi2;
    we.dt_phi = we.dt_phi1 + (b * we.psi.value + K) / (2.0 * t * t);
    we.dtt_phi = we.dtt_phi1 - (b * we.psi.value + K) / (t * t * t);

    const int nn = n - 1;
    we.grad_phi = (-b / (2.0 * t)) * we.psi.grad;
    we.grad_phi[nn] += we.dn_phi1;
    we.dt_grad_phi = (b / (2.0 * t * t)) * we.psi.grad;
    we.dt_grad_phi[nn] += we.dnt_phi1;

    we.hess_phi = Mat(n);
    we.dt_hess_phi = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            we.hess_phi(i, j) = -b / (2.0 * t) * we.psi.hess(i, j);
            we.dt_hess_phi(i, j) = b / (2.0 * t * t) * we.psi.hess(i, j);
        }
    we.hess_phi(nn, nn) += we.dnn_phi1;
    we.dt_hess_phi(nn, nn) += we.dnnt_phi1;

    we.third_phi = Ten3(n);
    we.fourth_phi = Ten4(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                we.third_phi(k, i, j) = -b / (2.0 * t) * we.psi.third(k, i, j);
                for (int l = 0; l < n; ++l)
                    we.fourth_phi(k, l, i, j) = -b / (2.0 * t) * we.psi.fourth(k, l, i, j);
            }
    we.third_phi(nn, nn, nn) += we.dn3_phi1;
    we.fourth_phi(nn, nn, nn, nn) += we.dn4_phi1;

    we.logG = 2.0 * we.phi;
    we.grad_logG = 2.0 * we.grad_phi;
    we.hess_logG = 2.0 * we.hess_phi;

    // H = 16 n^2 kappa E d_n Phi1 / |x| + d/t and its derivatives
    const double r = x.norm();
    const double r3 = r * r * r, r5 = r3 * r * r;
    const double hc = 16.0 * static_cast<double>(n) * n * kap * E;
    we.H = hc * we.dn_phi1 / r + d / t;
    we.dtH = hc * we.dnt_phi1 / r - d / (t * t);
    we.gradH = Vec(n);
    for (int i = 0; i < n; ++i)
        we.gradH[i] = hc * ((i == nn ? we.dnn_phi1 / r : 0.0) - we.dn_phi1 * x[i] / r3);
    we.hessH = Mat(n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            double v = -we.dn_phi1 * ((k == l ? 1.0 / r3 : 0.0) - 3.0 * x[k] * x[l] / r5);
            if (k == nn) v -= we.dnn_phi1 * x[l] / r3;
            if (l == nn) v -= we.dnn_phi1 * x[k] / r3;
            if (k == nn && l == nn) v += we.dn3_phi1 / r;
            we.hessH(k, l) = hc * v;
        }

    // theta = 2 d_t Phi - 2 a^{ij} d_ij Phi - 2 d_i a^{ij} d_j Phi - 4 <A grad Phi, grad Phi>
    double a_hess = 0, diva_grad = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a_hess += A(i, j) * we.hess_phi(i, j);
            diva_grad += gA(i, i, j) * we.grad_phi[j];
        }
    const double a_gg = A.quad(we.grad_phi);
    we.theta = 2.0 * we.dt_phi - 2.0 * a_hess - 2.0 * diva_grad - 4.0 * a_gg;
    we.F = 2.0 * we.dt_phi - 2.0 * a_hess - 4.0 * a_gg - we.H;

    // dtF
    double dta_hess = 0, a_dthess = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            dta_hess += we.fe.dtA(i, j) * we.hess_phi(i, j);
            a_dthess += A(i, j) * we.dt_hess_phi(i, j);
        }
    const double dta_gg = we.fe.dtA.quad(we.grad_phi);
    const double a_g_dtg = (A * we.grad_phi).dot(we.dt_grad_phi);
    we.dtF = 2.0 * we.dtt_phi - 2.0 * (dta_hess + a_dthess) - 4.0 * (dta_gg + 2.0 * a_g_dtg) -
             we.dtH;

    // gradF
    we.gradF = Vec(n);
    const Vec Agp = A * we.grad_phi;
    for (int k = 0; k < n; ++k) {
        double gA_hess = 0, a_third = 0, gA_gg = 0, a_hess_g = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                gA_hess += gA(k, i, j) * we.hess_phi(i, j);
                a_third += A(i, j) * we.third_phi(k, i, j);
                gA_gg += gA(k, i, j) * we.grad_phi[i] * we.grad_phi[j];
            }
        for (int i = 0; i < n; ++i) a_hess_g += we.hess_phi(i, k) * Agp[i];
        we.gradF[k] = 2.0 * we.dt_grad_phi[k] - 2.0 * (gA_hess + a_third) -
                      4.0 * (gA_gg + 2.0 * a_hess_g) - we.gradH[k];
    }
    return we;
}

// ---------------------------------------------------------------------------
// mollified layer
// ---------------------------------------------------------------------------

void attach_mollified(WeightEval& we, const MollifiedEval& me, const WeightParams& params) {
    const int n = we.n;
    const double b = params.b, t = we.t, d = params.d, K = params.K, g = params.gamma;
    const Mat& A = we.fe.A;
    const Ten3& gA = we.fe.gradA;

    Vec gradF0(n);
    Mat hessF0(n);

    if (we.variant == WeightVariant::prop13) {
        const Vec& x = we.x;
        const double r2 = x.norm2();
        const double qe = me.a.quad(x);
        const double gterm = 2.0 * g * K * std::pow(t, -K - 1.0);
        we.F0 = (b * r2 - 4.0 * b * b * qe + K) / (t * t) + 2.0 * b * me.a.trace() / t - gterm -
                d * (1.0 / t + 1.0);
        const Vec Aex = me.a * x;
        for (int k = 0; k < n; ++k) {
            double gq = 2.0 * Aex[k];
            double trk = 0;
            for (int i = 0; i < n; ++i) {
                trk += me.grad(k, i, i);
                for (int j = 0; j < n; ++j) gq += me.grad(k, i, j) * x[i] * x[j];
            }
            gradF0[k] = (2.0 * b * x[k] - 4.0 * b * b * gq) / (t * t) + 2.0 * b * trk / t;
        }
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double sq = 2.0 * me.a(k, l);  // d_l of 2 (A_eps x)_k
                double str = 0;
                for (int j = 0; j < n; ++j) sq += 2.0 * me.grad(k, l, j) * x[j] + 2.0 * me.grad(l, k, j) * x[j];
                for (int i = 0; i < n; ++i) {
                    str += me.second(k, l, i, i);
                    for (int j = 0; j < n; ++j) sq += me.second(k, l, i, j) * x[i] * x[j];
                }
                hessF0(k, l) = (k == l ? 2.0 * b / (t * t) : 0.0) - 4.0 * b * b * sq / (t * t) +
                               2.0 * b * str / t;
            }
    } else {
        const Vec& gp = we.grad_phi;
        double ae_hess = 0, ae_gg = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ae_hess += me.a(i, j) * we.hess_phi(i, j);
                ae_gg += me.a(i, j) * gp[i] * gp[j];
            }
        we.F0 = 2.0 * we.dt_phi - 2.0 * ae_hess - 4.0 * ae_gg - we.H;

        const Vec Aegp = me.a * gp;
        for (int k = 0; k < n; ++k) {
            double gAe_hess = 0, ae_third = 0, gAe_gg = 0, ae_hess_g = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    gAe_hess += me.grad(k, i, j) * we.hess_phi(i, j);
                    ae_third += me.a(i, j) * we.third_phi(k, i, j);
                    gAe_gg += me.grad(k, i, j) * gp[i] * gp[j];
                }
            for (int i = 0; i < n; ++i) ae_hess_g += we.hess_phi(i, k) * Aegp[i];
            gradF0[k] = 2.0 * we.dt_grad_phi[k] - 2.0 * (gAe_hess + ae_third) -
                        4.0 * (gAe_gg + 2.0 * ae_hess_g) - we.gradH[k];
        }
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s2 = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        s2 += 2.0 * (me.second(k, l, i, j) * we.hess_phi(i, j) +
                                     me.grad(k, i, j) * we.third_phi(l, i, j) +
                                     me.grad(l, i, j) * we.third_phi(k, i, j) +
                                     me.a(i, j) * we.fourth_phi(k, l, i, j));
                        s2 += 4.0 * (me.second(k, l, i, j) * gp[i] * gp[j] +
                                     2.0 * me.grad(k, i, j) * we.hess_phi(i, l) * gp[j] +
                                     2.0 * me.grad(l, i, j) * we.hess_phi(i, k) * gp[j] +
                                     2.0 * me.a(i, j) * (we.third_phi(k, l, i) * gp[j] +
                                                         we.hess_phi(i, l) * we.hess_phi(j, k)));
                    }
                hessF0(k, l) = 2.0 * we.dt_hess_phi(k, l) - we.hessH(k, l) - s2;
            }
    }

    we.gradF0 = gradF0;
    we.grad_FmF0 = we.gradF - gradF0;
    double lap = 0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) lap += A(k, l) * hessF0(k, l) + gA(k, k, l) * gradF0[l];
    we.lapF0_tilde = lap;
    we.has_f0 = true;
}

}  // namespace carlab
