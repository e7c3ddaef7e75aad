#include "carlab/linalg.hpp"

#include <algorithm>

namespace carlab {

Vec sym_eigenvalues(const Mat& m) {
    const int n = m.n;
    Mat a = m;
    // symmetrize defensively; inputs are symmetric up to rounding
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = v;
        }

    auto offdiag = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return s;
    };

    const double scale = std::max(a.frobenius(), 1e-300);
    const double tol = 1e-30 * scale * scale;
    for (int sweep = 0; sweep < 100 && offdiag() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    Vec ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.a.begin(), ev.a.begin() + n);
    return ev;
}

double sym_eig_min(const Mat& m) { return sym_eigenvalues(m)[0]; }
double sym_eig_max(const Mat& m) { return sym_eigenvalues(m)[m.n - 1]; }

}  // namespace carlab
