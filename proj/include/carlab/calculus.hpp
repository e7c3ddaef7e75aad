#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "carlab/linalg.hpp"

// Numerical infrastructure: Gauss-Legendre tensor grids (optionally graded
// toward one end of an axis), smooth compactly supported test functions with
// closed-form derivatives, finite-difference helpers, convergence-order fits.

namespace carlab {

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

struct Axis1D {
    double lo = 0.0, hi = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration.
void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights);

Axis1D make_axis_gauss(double lo, double hi, int n);
Axis1D make_axis_midpoint(double lo, double hi, int n);

/// Composite Gauss axis with panel widths in geometric progression, finest
/// panel at `lo` (toward_lo) or `hi`; resolves boundary layers of weights
/// that decay like exp(-c (t - lo)) with large c.
Axis1D make_axis_gauss_graded(double lo, double hi, int panels, double ratio, int nodes_per_panel,
                              bool toward_lo = true);

struct QuadratureGrid {
    std::vector<Axis1D> axes;  // by convention: spatial axes first, time last

    int dim() const { return static_cast<int>(axes.size()); }
    long total_points() const {
        long p = 1;
        for (const auto& ax : axes) p *= static_cast<long>(ax.nodes.size());
        return p;
    }
    double box_volume() const {
        double v = 1;
        for (const auto& ax : axes) v *= (ax.hi - ax.lo);
        return v;
    }
    /// Same box, k times the nodes per axis (graded panels keep their layout).
    QuadratureGrid refined(int factor = 2) const;

    /// Visit every tensor node in a fixed (odometer) order.
    /// cb(coords, weight) with coords.size() == dim().
    template <class F>
    void for_each_node(F&& cb) const {
        const int d = dim();
        std::vector<std::size_t> idx(d, 0);
        std::vector<double> c(d);
        const long total = total_points();
        for (long it = 0; it < total; ++it) {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                c[k] = axes[k].nodes[idx[k]];
                w *= axes[k].weights[idx[k]];
            }
            cb(c, w);
            for (int k = d - 1; k >= 0; --k) {
                if (++idx[k] < axes[k].nodes.size()) break;
                idx[k] = 0;
            }
        }
    }
};

QuadratureGrid make_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                         int nodes_per_axis);

double integrate(const std::function<double(const std::vector<double>&)>& f,
                 const QuadratureGrid& grid);

class TestFunction;

/// Grid over a test function's support box: Gauss axes in space, a graded
/// composite axis in time (finest panels at the early-time face, where the
/// exponential weights have their boundary layer). t_panels = 1 gives a
/// plain Gauss axis.
QuadratureGrid make_support_grid(const TestFunction& u, int space_nodes, int t_panels,
                                 double t_ratio, int t_nodes_per_panel);

/// Least-squares slope of log(residual) against log(h).
/// Returns +inf when any residual is <= 0 (already at the floor).
double convergence_order(const std::vector<double>& residuals, const std::vector<double>& hs);

// ---------------------------------------------------------------------------
// smooth test functions
// ---------------------------------------------------------------------------

/// C^inf bump profile on (-1,1): exp(-1/(1-s^2)), zero outside, with
/// closed-form first and second derivatives.
struct BumpProfile {
    double v = 0, d1 = 0, d2 = 0;
};
BumpProfile bump_profile(double s);

struct TestFunctionEval {
    double value = 0;
    double dt = 0;
    Vec grad;
    Mat hess;
};

/// Smooth compactly supported space-time function: a positive combination of
/// at most five tensor-product bumps on sub-boxes of the support.
class TestFunction {
public:
    struct Bump1D {
        double center = 0, half = 1;
    };
    struct Component {
        double coeff = 1;
        std::vector<Bump1D> space;  // size n
        Bump1D time;
    };

    TestFunction(std::vector<double> space_lo, std::vector<double> space_hi, double t_lo,
                 double t_hi, std::vector<Component> comps);

    TestFunctionEval eval(const Vec& x, double t) const;

    int dim() const { return static_cast<int>(space_lo_.size()); }
    const std::vector<double>& space_lo() const { return space_lo_; }
    const std::vector<double>& space_hi() const { return space_hi_; }
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }

    /// Scale the function by a constant.
    TestFunction scaled(double c) const;

private:
    std::vector<double> space_lo_, space_hi_;
    double t_lo_, t_hi_;
    std::vector<Component> comps_;
};

/// Seeded, reproducible bump: component 0 spans the whole box; up to four
/// additional sub-bumps with positive coefficients.
TestFunction make_bump(const std::vector<double>& space_lo, const std::vector<double>& space_hi,
                       double t_lo, double t_hi, std::uint64_t seed);

// ---------------------------------------------------------------------------
// finite differences (central, 2nd order)
// ---------------------------------------------------------------------------

template <class F>
Vec fd_gradient(const F& f, const Vec& x, double h) {
    Vec g(x.n);
    for (int i = 0; i < x.n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

template <class F>
Mat fd_hessian(const F& f, const Vec& x, double h) {
    Mat m(x.n);
    const double f0 = f(x);
    for (int i = 0; i < x.n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        m(i, i) = (f(xp) - 2 * f0 + f(xm)) / (h * h);
        for (int j = i + 1; j < x.n; ++j) {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h;
            xpp[j] += h;
            xpm[i] += h;
            xpm[j] -= h;
            xmp[i] -= h;
            xmp[j] += h;
            xmm[i] -= h;
            xmm[j] -= h;
            m(i, j) = m(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h * h);
        }
    }
    return m;
}

template <class F>
double fd_partial_t(const F& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2 * h);
}

}  // namespace carlab
