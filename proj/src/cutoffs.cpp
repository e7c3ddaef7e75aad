#include "carlab/cutoffs.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace carlab {
namespace cutoffs {

namespace {

// sig(s) = exp(-1/s) for s > 0, with sig' = sig/s^2, sig'' = sig (1-2s)/s^4
struct Sig {
    double v = 0, d1 = 0, d2 = 0;
};
Sig sig(double s) {
    Sig r;
    if (s <= 0) return r;
    r.v = std::exp(-1.0 / s);
    r.d1 = r.v / (s * s);
    r.d2 = r.v * (1.0 - 2.0 * s) / (s * s * s * s);
    return r;
}

// profile on [a,b] rescaled from smooth_step
Transition profile(double p, double a, double b) {
    const double w = b - a;
    Transition t = smooth_step((p - a) / w);
    t.d1 /= w;
    t.d2 /= w * w;
    return t;
}

}  // namespace

Transition smooth_step(double s) {
    Transition t;
    if (s <= 0) return t;
    if (s >= 1) {
        t.v = 1;
        return t;
    }
    const Sig a = sig(s), b = sig(1.0 - s);
    const double D = a.v + b.v;
    const double Dp = a.d1 - b.d1;
    const double Dpp = a.d2 + b.d2;
    const double N = a.d1 * b.v + a.v * b.d1;
    const double Np = a.d2 * b.v - a.v * b.d2;
    t.v = a.v / D;
    t.d1 = N / (D * D);
    t.d2 = Np / (D * D) - 2.0 * N * Dp / (D * D * D);
    (void)Dpp;
    return t;
}

double cutoff_f(double s, double K) {
    if (!(s > 0)) throw std::domain_error("cutoff_f: s must be positive");
    if (K * std::log(1.0 / s) > 690.0) return std::numeric_limits<double>::infinity();
    return std::pow(s, -K) - 1.0;
}

CutoffSpec make_cutoff_spec(double tau, double K, double alpha) {
    if (!(tau > 0) || !(K > 0)) throw std::invalid_argument("make_cutoff_spec: tau, K must be positive");
    if (!(alpha > 1) || !(alpha < 2))
        throw std::invalid_argument("make_cutoff_spec: alpha must lie in (1,2)");
    CutoffSpec spec;
    spec.tau = tau;
    spec.K = K;
    spec.alpha = alpha;
    spec.Cstar = 1.0 + cutoff_f(0.5, K) * std::pow(1.0 / tau + 2.0, alpha);
    return spec;
}

EtaEval eta_eval(const Vec& y, double s, const CutoffSpec& spec) {
    if (!(s > 0) || !(s < 1)) throw std::domain_error("eta_eval: s outside (0,1)");
    const int n = y.n;
    const double yn = y[n - 1];
    EtaEval out;
    out.grad = Vec(n);
    out.hess = Mat(n);

    const Transition e1 = profile(yn, spec.eta1_lo(), spec.eta1_hi());
    const double f = cutoff_f(s, spec.K);

    double q, dq_s, dq_n, dq_nn;
    if (std::isinf(f)) {
        q = std::numeric_limits<double>::infinity();
        dq_s = dq_n = dq_nn = 0.0;  // deep inside the eta2 = 1 plateau
    } else {
        const double ya = std::pow(yn, spec.alpha);
        const double df = -spec.K * std::pow(s, -spec.K - 1.0);
        q = f * ya / (2.0 * spec.Cstar) - 1.0;
        dq_s = df * ya / (2.0 * spec.Cstar);
        dq_n = f * spec.alpha * std::pow(yn, spec.alpha - 1.0) / (2.0 * spec.Cstar);
        dq_nn = f * spec.alpha * (spec.alpha - 1.0) * std::pow(yn, spec.alpha - 2.0) /
                (2.0 * spec.Cstar);
    }
    // eta2 transitions on q in (-3/4, -1/2)
    const Transition e2 = std::isinf(q) ? Transition{1.0, 0.0, 0.0} : profile(q, -0.75, -0.5);

    out.value = e1.v * e2.v;
    if (e2.d1 != 0.0) out.ds = e1.v * e2.d1 * dq_s;
    double gn = e1.d1 * e2.v;
    if (e2.d1 != 0.0) gn += e1.v * e2.d1 * dq_n;
    out.grad[n - 1] = gn;
    double hnn = e1.d2 * e2.v;
    if (e2.d1 != 0.0) hnn += 2.0 * e1.d1 * e2.d1 * dq_n + e1.v * e2.d1 * dq_nn;
    if (e2.d2 != 0.0) hnn += e1.v * e2.d2 * dq_n * dq_n;
    out.hess(n - 1, n - 1) = hnn;
    return out;
}

std::vector<MarginReport> verify_omega_identity(const CutoffSpec& spec, long nsamples,
                                                std::uint64_t seed, double cstar_override) {
    const double cstar = cstar_override > 0 ? cstar_override : spec.Cstar;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    MarginReport empty, match;
    empty.check_name = "empty_region_margin";
    match.check_name = "region_description";
    long mismatches = 0;

    for (long i = 0; i < nsamples; ++i) {
        // emptiness margin over the eta1 transition band
        {
            const double s = 0.5 + 0.5 * unif(rng);
            const double yn = spec.eta1_lo() + unif(rng) * (spec.eta1_hi() - spec.eta1_lo());
            Vec y(1);
            y[0] = yn;
            empty.observe(cstar - cutoff_f(s, spec.K) * std::pow(yn, spec.alpha), y, s);
        }
        // region description over a wider band
        {
            const double s = 0.5 + 0.5 * unif(rng);
            const double f = cutoff_f(s, spec.K);
            const double yn_hi = std::pow(2.5 * spec.Cstar / std::max(f, 1e-300), 1.0 / spec.alpha);
            const double lo = spec.eta1_lo() * 0.5;
            const double hi = std::max(yn_hi, spec.eta1_hi() + 1.0);
            const double yn = lo + unif(rng) * (hi - lo);
            Vec y(1);
            y[0] = yn;
            const EtaEval ee = eta_eval(y, s, spec);
            const double ratio = f * std::pow(yn, spec.alpha) / spec.Cstar;
            // skip boundary-fuzz samples
            if (std::abs(yn - spec.eta1_lo()) < 1e-9 || std::abs(yn - spec.eta1_hi()) < 1e-9 ||
                std::abs(ratio - 0.5) < 1e-9 || std::abs(ratio - 1.0) < 1e-9)
                continue;
            const bool in_transition = ee.value > 0.0 && ee.value < 1.0;
            const bool described = yn > spec.eta1_lo() && ratio > 0.5 && ratio < 1.0;
            if (in_transition != described) ++mismatches;
            ++match.sample_count;
        }
    }
    empty.finalize(1e-9);
    match.min_margin = mismatches == 0 ? 1.0 : -static_cast<double>(mismatches);
    match.finalize(0.0);
    if (mismatches > 0) {
        std::ostringstream os;
        os << mismatches << " classification mismatches";
        match.note = os.str();
    }
    return {empty, match};
}

MarginReport verify_cutoff_derivative_bound(const CutoffSpec& spec, long nsamples,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MarginReport rep;
    rep.check_name = "derivative_ratio_constant";
    rep.min_margin = 0.0;
    for (long i = 0; i < nsamples; ++i) {
        const double s = 0.5 + 0.5 * unif(rng);
        const double f = cutoff_f(s, spec.K);
        const double yn_hi = std::pow(2.5 * spec.Cstar / std::max(f, 1e-300), 1.0 / spec.alpha);
        const double lo = spec.eta1_lo() * 0.5;
        const double yn = lo + unif(rng) * (std::max(yn_hi, spec.eta1_hi() + 1.0) - lo);
        Vec y(1);
        y[0] = yn;
        const EtaEval ee = eta_eval(y, s, spec);
        const double total = std::abs(ee.ds) + ee.grad.norm() + ee.hess.frobenius();
        rep.observe_sup(total / std::pow(yn, spec.alpha));
    }
    rep.finalize(0.0);
    rep.pass = std::isfinite(rep.empirical_constant);
    return rep;
}

}  // namespace cutoffs
}  // namespace carlab
