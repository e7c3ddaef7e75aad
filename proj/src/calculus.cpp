#include "carlab/calculus.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace carlab {

void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_reference: n >= 1 required");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

Axis1D make_axis_gauss(double lo, double hi, int n) {
    if (!(hi > lo)) throw std::invalid_argument("make_axis_gauss: degenerate interval");
    std::vector<double> xs, ws;
    gauss_legendre_reference(n, xs, ws);
    Axis1D ax;
    ax.lo = lo;
    ax.hi = hi;
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    ax.nodes.reserve(n);
    ax.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
        ax.nodes.push_back(c + h * xs[i]);
        ax.weights.push_back(h * ws[i]);
    }
    return ax;
}

Axis1D make_axis_midpoint(double lo, double hi, int n) {
    if (!(hi > lo)) throw std::invalid_argument("make_axis_midpoint: degenerate interval");
    Axis1D ax;
    ax.lo = lo;
    ax.hi = hi;
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
        ax.nodes.push_back(lo + (i + 0.5) * h);
        ax.weights.push_back(h);
    }
    return ax;
}

Axis1D make_axis_gauss_graded(double lo, double hi, int panels, double ratio, int nodes_per_panel,
                              bool toward_lo) {
    if (!(hi > lo)) throw std::invalid_argument("make_axis_gauss_graded: degenerate interval");
    if (panels < 1 || ratio <= 1.0)
        throw std::invalid_argument("make_axis_gauss_graded: panels >= 1 and ratio > 1 required");
    // widths w0, w0*ratio, ... summing to (hi-lo)
    double denom = 0;
    for (int p = 0; p < panels; ++p) denom += std::pow(ratio, p);
    const double w0 = (hi - lo) / denom;
    Axis1D ax;
    ax.lo = lo;
    ax.hi = hi;
    double a = lo;
    for (int p = 0; p < panels; ++p) {
        const double w = w0 * std::pow(ratio, toward_lo ? p : (panels - 1 - p));
        const double b = (p + 1 == panels) ? hi : a + w;
        Axis1D part = make_axis_gauss(a, b, nodes_per_panel);
        ax.nodes.insert(ax.nodes.end(), part.nodes.begin(), part.nodes.end());
        ax.weights.insert(ax.weights.end(), part.weights.begin(), part.weights.end());
        a = b;
    }
    return ax;
}

QuadratureGrid QuadratureGrid::refined(int factor) const {
    QuadratureGrid g;
    g.axes.reserve(axes.size());
    for (const auto& ax : axes) {
        // re-split the original panel structure with scaled node counts
        // (panels are recoverable from weight discontinuities only with extra
        // bookkeeping; instead we store plain Gauss per axis and rebuild).
        // For graded axes refined() is handled by the caller re-making them;
        // here we rebuild a single-panel Gauss axis with factor * old count.
        g.axes.push_back(make_axis_gauss(ax.lo, ax.hi, static_cast<int>(ax.nodes.size()) * factor));
    }
    return g;
}

QuadratureGrid make_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                         int nodes_per_axis) {
    if (lo.size() != hi.size()) throw std::invalid_argument("make_grid: box rank mismatch");
    QuadratureGrid g;
    for (std::size_t i = 0; i < lo.size(); ++i)
        g.axes.push_back(make_axis_gauss(lo[i], hi[i], nodes_per_axis));
    return g;
}

double integrate(const std::function<double(const std::vector<double>&)>& f,
                 const QuadratureGrid& grid) {
    double s = 0;
    grid.for_each_node([&](const std::vector<double>& c, double w) { s += w * f(c); });
    return s;
}

QuadratureGrid make_support_grid(const TestFunction& u, int space_nodes, int t_panels,
                                 double t_ratio, int t_nodes_per_panel) {
    QuadratureGrid g;
    for (int i = 0; i < u.dim(); ++i)
        g.axes.push_back(make_axis_gauss(u.space_lo()[static_cast<std::size_t>(i)],
                                         u.space_hi()[static_cast<std::size_t>(i)], space_nodes));
    if (t_panels <= 1)
        g.axes.push_back(make_axis_gauss(u.t_lo(), u.t_hi(), t_nodes_per_panel));
    else
        g.axes.push_back(
            make_axis_gauss_graded(u.t_lo(), u.t_hi(), t_panels, t_ratio, t_nodes_per_panel, true));
    return g;
}

double convergence_order(const std::vector<double>& residuals, const std::vector<double>& hs) {
    if (residuals.size() < 3 || residuals.size() != hs.size())
        throw std::invalid_argument("convergence_order: need >= 3 matching levels");
    for (double r : residuals)
        if (!(r > 0)) return std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(residuals.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        const double x = std::log(hs[i]), y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

BumpProfile bump_profile(double s) {
    BumpProfile r;
    if (std::abs(s) >= 1.0) return r;
    const double q = 1.0 - s * s;
    r.v = std::exp(-1.0 / q);
    const double g = -2.0 * s / (q * q);
    const double gp = (-2.0 - 6.0 * s * s) / (q * q * q);
    r.d1 = r.v * g;
    r.d2 = r.v * (g * g + gp);
    return r;
}

TestFunction::TestFunction(std::vector<double> space_lo, std::vector<double> space_hi, double t_lo,
                           double t_hi, std::vector<Component> comps)
    : space_lo_(std::move(space_lo)),
      space_hi_(std::move(space_hi)),
      t_lo_(t_lo),
      t_hi_(t_hi),
      comps_(std::move(comps)) {
    if (space_lo_.size() != space_hi_.size())
        throw std::invalid_argument("TestFunction: box rank mismatch");
    for (std::size_t i = 0; i < space_lo_.size(); ++i)
        if (!(space_hi_[i] > space_lo_[i])) throw std::invalid_argument("TestFunction: degenerate box");
    if (!(t_hi_ > t_lo_)) throw std::invalid_argument("TestFunction: degenerate time interval");
}

TestFunctionEval TestFunction::eval(const Vec& x, double t) const {
    const int n = dim();
    TestFunctionEval out;
    out.grad = Vec(n);
    out.hess = Mat(n);
    for (const auto& comp : comps_) {
        // per-axis profile values and derivatives (chain rule through s = (x-c)/w)
        std::array<BumpProfile, kMaxDim> bx;
        bool zero = false;
        for (int i = 0; i < n; ++i) {
            const auto& b = comp.space[static_cast<std::size_t>(i)];
            const double s = (x[i] - b.center) / b.half;
            bx[static_cast<std::size_t>(i)] = bump_profile(s);
            bx[static_cast<std::size_t>(i)].d1 /= b.half;
            bx[static_cast<std::size_t>(i)].d2 /= b.half * b.half;
            if (bx[static_cast<std::size_t>(i)].v == 0.0) zero = true;
        }
        const double st = (t - comp.time.center) / comp.time.half;
        BumpProfile bt = bump_profile(st);
        bt.d1 /= comp.time.half;
        if (zero || bt.v == 0.0) continue;

        double prod = bt.v * comp.coeff;
        for (int i = 0; i < n; ++i) prod *= bx[static_cast<std::size_t>(i)].v;
        out.value += prod;
        out.dt += prod / bt.v * bt.d1;
        for (int i = 0; i < n; ++i) {
            const double gi = prod / bx[static_cast<std::size_t>(i)].v * bx[static_cast<std::size_t>(i)].d1;
            out.grad[i] += gi;
            out.hess(i, i) += prod / bx[static_cast<std::size_t>(i)].v * bx[static_cast<std::size_t>(i)].d2;
            for (int j = i + 1; j < n; ++j) {
                const double hij = gi / bx[static_cast<std::size_t>(j)].v * bx[static_cast<std::size_t>(j)].d1;
                out.hess(i, j) += hij;
                out.hess(j, i) += hij;
            }
        }
    }
    return out;
}

TestFunction TestFunction::scaled(double c) const {
    std::vector<Component> comps = comps_;
    for (auto& comp : comps) comp.coeff *= c;
    return TestFunction(space_lo_, space_hi_, t_lo_, t_hi_, std::move(comps));
}

TestFunction make_bump(const std::vector<double>& space_lo, const std::vector<double>& space_hi,
                       double t_lo, double t_hi, std::uint64_t seed) {
    const int n = static_cast<int>(space_lo.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto full_axis = [&](double lo, double hi) {
        return TestFunction::Bump1D{0.5 * (lo + hi), 0.5 * (hi - lo)};
    };

    std::vector<TestFunction::Component> comps;
    TestFunction::Component base;
    base.coeff = 1.0;
    for (int i = 0; i < n; ++i) base.space.push_back(full_axis(space_lo[i], space_hi[i]));
    base.time = full_axis(t_lo, t_hi);
    comps.push_back(base);

    const int extra = static_cast<int>(unif(rng) * 4.999);  // 0..4
    for (int e = 0; e < extra; ++e) {
        TestFunction::Component c;
        c.coeff = 0.1 + 0.3 * unif(rng);
        auto sub_axis = [&](double lo, double hi) {
            const double w = hi - lo;
            const double half = w * (0.15 + 0.25 * unif(rng));
            const double center = lo + half + (w - 2 * half) * unif(rng);
            return TestFunction::Bump1D{center, half};
        };
        for (int i = 0; i < n; ++i) c.space.push_back(sub_axis(space_lo[i], space_hi[i]));
        c.time = sub_axis(t_lo, t_hi);
        comps.push_back(c);
    }
    return TestFunction(space_lo, space_hi, t_lo, t_hi, std::move(comps));
}

}  // namespace carlab
