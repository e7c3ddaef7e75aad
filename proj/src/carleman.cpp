#include "carlab/carleman.hpp"

#include <cmath>

namespace carlab {

namespace {

double log_weight(const Vec& x, double t, const WeightParams& p, double gamma, double kappa) {
    const double f = std::pow(t, -p.K) - 1.0;
    if (p.variant == WeightVariant::prop13)
        return 2.0 * gamma * f - (p.b * x.norm2() + p.K) / t;
    const double xn = x[x.n - 1];
    const double psi = psi_eval(x, kappa).value;
    return 2.0 * gamma * f * std::pow(xn, p.alpha) - (p.b * psi + p.K) / t;
}

}  // namespace

std::vector<GammaVerdict> check_inequality(const TestFunction& u, const CoefficientField& field,
                                           const WeightParams& params, const QuadratureGrid& grid,
                                           const std::vector<double>& gammas, double tol_rel,
                                           double tol_abs, bool allow_uncalibrated) {
    if (!params.d_calibrated && !allow_uncalibrated)
        throw std::invalid_argument(
            "check_inequality: weight constants are not calibrated; run calibrate-d first");
    const int n = field.bounds.n;
    if (params.variant == WeightVariant::prop13) {
        if (!(u.t_lo() > 0.0) || !(u.t_hi() < 2.0))
            throw std::invalid_argument("check_inequality: support must sit inside (0,2)");
    } else {
        const double E0 = field.bounds.lambda /
                          (16.0 * n * n * params.kappa * (params.kappa + 1.0));
        if (!(field.bounds.E < E0))
            throw hypothesis_error("check_inequality: decay constant at or above threshold");
        if (!(u.space_lo()[static_cast<std::size_t>(n - 1)] >= 1.0))
            throw std::invalid_argument("check_inequality: support must satisfy x_n >= 1");
        if (!(u.t_lo() > 0.0) || !(u.t_hi() < 1.0))
            throw std::invalid_argument("check_inequality: support must sit inside (0,1)");
    }

    std::vector<GammaVerdict> out;
    out.reserve(gammas.size());
    for (const double gamma : gammas) {
        double shift = -std::numeric_limits<double>::infinity();
        auto node = [&](const std::vector<double>& c, double& pl, double& pr) {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = c[static_cast<std::size_t>(i)];
            const double t = c[static_cast<std::size_t>(n)];
            const TestFunctionEval ue = u.eval(x, t);
            if (ue.value == 0.0 && ue.dt == 0.0 && ue.grad.norm2() == 0.0)
                return -std::numeric_limits<double>::infinity();
            const FieldEval fe = field.eval_extended(x, t);
            pl = ue.value * ue.value + ue.grad.norm2();
            double pu = ue.dt;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    pu += fe.gradA(i, i, j) * ue.grad[j] + fe.A(i, j) * ue.hess(i, j);
            pr = pu * pu;
            if (pl < -1e-14 || pr < -1e-14 || !std::isfinite(pl) || !std::isfinite(pr))
                throw std::runtime_error("check_inequality: negative or non-finite integrand");
            return log_weight(x, t, params, gamma, params.kappa);
        };

        grid.for_each_node([&](const std::vector<double>& c, double) {
            double pl = 0, pr = 0;
            const double lg = node(c, pl, pr);
            if (!std::isfinite(lg)) return;
            if (pl > 0) shift = std::max(shift, lg + std::log(pl));
            if (pr > 0) shift = std::max(shift, lg + std::log(pr));
        });

        GammaVerdict v;
        v.gamma = gamma;
        if (std::isfinite(shift)) {
            v.shift = shift;
            grid.for_each_node([&](const std::vector<double>& c, double w) {
                double pl = 0, pr = 0;
                const double lg = node(c, pl, pr);
                if (!std::isfinite(lg)) return;
                const double scale = std::exp(lg - shift);
                v.lhs += w * pl * scale;
                v.rhs += w * pr * scale;
            });
        }
        v.ratio = v.rhs > 0 ? v.lhs / v.rhs : 0.0;
        v.pass = v.lhs <= v.rhs * (1.0 + tol_rel) + tol_abs;
        out.push_back(v);
    }
    return out;
}

}  // namespace carlab
