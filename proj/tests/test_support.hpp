#pragma once

// Shared oracles for the unit tests. These stay independent of the library
// paths they check: finite differences for closed-form derivatives,
// characteristic polynomials for small symmetric spectra.

#include <cmath>
#include <random>

#include "carlab/linalg.hpp"

namespace testsup {

using carlab::Mat;
using carlab::Vec;

inline double rel_err(double got, double want) {
    return std::abs(got - want) / (1.0 + std::abs(want));
}

// eigenvalues of a symmetric 2x2 via the quadratic formula, ascending
inline Vec eig2_oracle(const Mat& m) {
    const double tr = m(0, 0) + m(1, 1);
    const double disc = std::sqrt(0.25 * (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) +
                                  m(0, 1) * m(1, 0));
    Vec ev(2);
    ev[0] = 0.5 * tr - disc;
    ev[1] = 0.5 * tr + disc;
    return ev;
}

// eigenvalues of a symmetric 3x3 by the trigonometric solution of the
// characteristic cubic, ascending
inline Vec eig3_oracle(const Mat& m) {
    const double q = m.trace() / 3.0;
    Mat b = m;
    for (int i = 0; i < 3; ++i) b(i, i) -= q;
    double p2 = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p2 += b(i, j) * b(i, j);
    const double p = std::sqrt(p2 / 6.0);
    Vec ev(3);
    if (p < 1e-300) {
        ev[0] = ev[1] = ev[2] = q;
        return ev;
    }
    Mat bn = (1.0 / p) * b;
    const double det = bn(0, 0) * (bn(1, 1) * bn(2, 2) - bn(1, 2) * bn(2, 1)) -
                       bn(0, 1) * (bn(1, 0) * bn(2, 2) - bn(1, 2) * bn(2, 0)) +
                       bn(0, 2) * (bn(1, 0) * bn(2, 1) - bn(1, 1) * bn(2, 0));
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    ev[2] = q + 2.0 * p * std::cos(phi);
    ev[0] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    ev[1] = 3.0 * q - ev[0] - ev[2];
    return ev;
}

inline Vec random_point(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> unif(lo, hi);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = unif(rng);
    return x;
}

}  // namespace testsup
