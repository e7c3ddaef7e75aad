#include "carlab/identity.hpp"

#include <cmath>

namespace carlab {

namespace {

// Two-pass shifted accumulation of integrals int p_i * e^{logG'} over a grid:
// pass 1 finds shift = max(logG' + log|p_i|), pass 2 accumulates
// sum w p_i e^{logG'-shift}. node_eval fills polys and returns logG'
// (or -inf to skip the node).
template <int k, class NodeEval>
std::pair<std::array<double, k>, double> shifted_integrals(const QuadratureGrid& grid,
                                                           const NodeEval& node_eval) {
    double shift = -std::numeric_limits<double>::infinity();
    grid.for_each_node([&](const std::vector<double>& c, double) {
        std::array<double, k> p{};
        const double lg = node_eval(c, p);
        if (!std::isfinite(lg)) return;
        for (int i = 0; i < k; ++i)
            if (p[i] != 0.0) shift = std::max(shift, lg + std::log(std::abs(p[i])));
    });
    std::array<double, k> sums{};
    if (!std::isfinite(shift)) return {sums, 0.0};
    grid.for_each_node([&](const std::vector<double>& c, double w) {
        std::array<double, k> p{};
        const double lg = node_eval(c, p);
        if (!std::isfinite(lg)) return;
        const double scale = std::exp(lg - shift);
        for (int i = 0; i < k; ++i) sums[i] += w * p[i] * scale;
    });
    return {sums, shift};
}

Vec node_x(const std::vector<double>& c, int n) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = c[static_cast<std::size_t>(i)];
    return x;
}

double pu_value(const TestFunctionEval& ue, const FieldEval& fe) {
    double pu = ue.dt;
    const int n = ue.grad.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pu += fe.gradA(i, i, j) * ue.grad[j] + fe.A(i, j) * ue.hess(i, j);
    return pu;
}

void check_support(const TestFunction& u, const WeightParams& params) {
    if (params.variant == WeightVariant::prop13) {
        if (!(u.t_lo() >= 0.05) || !(u.t_hi() <= 2.0))
            throw std::invalid_argument("identity: support must sit inside (0,2) with a 0.05 time floor");
    } else {
        const int n = u.dim();
        if (!(u.space_lo()[static_cast<std::size_t>(n - 1)] >= 1.0))
            throw std::invalid_argument("identity: support must satisfy x_n >= 1");
        if (!(u.t_lo() >= 0.05) || !(u.t_hi() <= 1.0))
            throw std::invalid_argument("identity: support must sit inside (0,1) with a 0.05 time floor");
    }
}

}  // namespace

ResidualReport corollary32_residual(const TestFunction& u, const CoefficientField& field,
                                    const MollifiedField& moll, const WeightParams& params,
                                    const QuadratureGrid& grid) {
    check_support(u, params);
    const int n = field.bounds.n;

    auto node_eval = [&](const std::vector<double>& c, std::array<double, 2>& p) {
        const Vec x = node_x(c, n);
        const double t = c[static_cast<std::size_t>(n)];
        const TestFunctionEval ue = u.eval(x, t);
        if (ue.value == 0.0 && ue.dt == 0.0 && ue.grad.norm2() == 0.0)
            return -std::numeric_limits<double>::infinity();

        WeightEval we = params.variant == WeightVariant::prop13
                            ? weight13_eval(x, t, field, params)
                            : weight14_eval(x, t, field, params);
        attach_mollified(we, moll.eval(x, t), params);

        const Mat dg = dg_matrix(we);
        const Vec Agu = we.fe.A * ue.grad;
        const double m0 = we.dtF + we.F * (we.theta - we.F) + we.lapF0_tilde -
                          (we.fe.A * we.grad_FmF0).dot(we.grad_logG);
        const double lhs = 0.5 * ue.value * ue.value * m0 + 2.0 * dg.quad(ue.grad) +
                           Agu.dot(ue.grad) * (we.theta - we.F) -
                           ue.value * Agu.dot(we.grad_FmF0);
        const double lu = ue.dt - Agu.dot(we.grad_logG) + 0.5 * we.F * ue.value;
        const double rhs = 2.0 * lu * (pu_value(ue, we.fe) - lu);
        p[0] = lhs;
        p[1] = rhs;
        return we.logG;
    };

    auto [sums, shift] = shifted_integrals<2>(grid, node_eval);
    ResidualReport r;
    r.lhs = sums[0];
    r.rhs = sums[1];
    r.shift = shift;
    r.residual = std::abs(r.lhs - r.rhs) / (1.0 + std::abs(r.lhs) + std::abs(r.rhs));
    return r;
}

ResidualReport lemma31_residual(const TestFunction& u, const CoefficientField& field,
                                const SigmaFn& sigma, double alpha_exp, const WeightParams& params,
                                const QuadratureGrid& grid) {
    check_support(u, params);
    const int n = field.bounds.n;
    for (double t : {u.t_lo(), 0.5 * (u.t_lo() + u.t_hi()), u.t_hi()}) {
        const SigmaEval se = sigma(t);
        if (!(se.v > 0) || !(se.d1 > 0))
            throw std::invalid_argument("lemma31_residual: sigma and sigma' must be positive on the support");
    }

    auto node_eval = [&](const std::vector<double>& c, std::array<double, 2>& p) {
        const Vec x = node_x(c, n);
        const double t = c[static_cast<std::size_t>(n)];
        const TestFunctionEval ue = u.eval(x, t);
        if (ue.value == 0.0 && ue.dt == 0.0 && ue.grad.norm2() == 0.0)
            return -std::numeric_limits<double>::infinity();

        const WeightEval we = params.variant == WeightVariant::prop13
                                  ? weight13_eval(x, t, field, params)
                                  : weight14_eval(x, t, field, params);
        const SigmaEval se = sigma(t);
        const double w = std::pow(se.v, 1.0 - alpha_exp) / se.d1;
        const double logsp = se.d1 / se.v - se.d2 / se.d1;  // (log(sigma/sigma'))'

        const Mat dg = dg_matrix(we);
        const Vec Agu = we.fe.A * ue.grad;
        const double lu = ue.dt - Agu.dot(we.grad_logG) + 0.5 * we.F * ue.value -
                          0.5 * alpha_exp * se.d1 / se.v * ue.value;
        const double m = logsp * we.F + we.dtF +
                         (we.F - alpha_exp * se.d1 / se.v) * (we.theta - we.F) -
                         (we.fe.A * we.gradF).dot(we.grad_logG);
        const double lhs = w * (2.0 * lu * lu + 0.5 * ue.value * ue.value * m +
                                Agu.dot(ue.grad) * (logsp + we.theta - we.F) +
                                2.0 * dg.quad(ue.grad) - ue.value * Agu.dot(we.gradF));
        const double rhs = w * 2.0 * lu * pu_value(ue, we.fe);
        p[0] = lhs;
        p[1] = rhs;
        return we.logG;
    };

    auto [sums, shift] = shifted_integrals<2>(grid, node_eval);
    ResidualReport r;
    r.lhs = sums[0];
    r.rhs = sums[1];
    r.shift = shift;
    r.residual = std::abs(r.lhs - r.rhs) / (1.0 + std::abs(r.lhs) + std::abs(r.rhs));
    return r;
}

}  // namespace carlab
