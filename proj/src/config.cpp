#include "carlab/config.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "carlab/carleman.hpp"
#include "carlab/cone.hpp"
#include "carlab/cutoffs.hpp"
#include "carlab/estimates.hpp"
#include "carlab/identity.hpp"
#include "carlab/mollify.hpp"
#include "carlab/weights.hpp"
#include "json.hpp"

namespace carlab {

namespace trace {
namespace {
std::vector<Row>* g_sink = nullptr;
}
std::vector<Row>* sink() { return g_sink; }
void set_sink(std::vector<Row>* s) { g_sink = s; }
}  // namespace trace

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

WeightVariant variant_of(const Config& cfg) {
    if (cfg.variant == "prop13") return WeightVariant::prop13;
    if (cfg.variant == "prop14") return WeightVariant::prop14;
    throw config_error("unknown variant: " + cfg.variant);
}

std::vector<SamplePoint> cloud_min_radius(const CoefficientField& field, long count, double x_max,
                                          double t_min, double t_max, std::uint64_t seed,
                                          double min_r) {
    std::vector<SamplePoint> out;
    out.reserve(static_cast<std::size_t>(count));
    std::uint64_t s = seed;
    while (static_cast<long>(out.size()) < count) {
        for (const auto& p : sample_cloud(field, count, x_max, t_min, t_max, s)) {
            if (field.decay_radius(p.x) >= min_r) {
                out.push_back(p);
                if (static_cast<long>(out.size()) == count) break;
            }
        }
        ++s;
    }
    return out;
}

// chunked parallel sweep; min/max merges make the result order-independent
template <class Fn>
std::vector<MarginReport> run_chunked(const Fn& fn, const std::vector<SamplePoint>& samples,
                                      bool serial) {
    const unsigned hw = std::thread::hardware_concurrency();
    const long chunk_count = serial || trace::sink() || hw < 2 || samples.size() < 256
                                 ? 1
                                 : std::min<long>(hw, 8);
    if (chunk_count == 1) return fn(samples);

    const long per = static_cast<long>(samples.size()) / chunk_count;
    std::vector<std::future<std::vector<MarginReport>>> futs;
    for (long c = 0; c < chunk_count; ++c) {
        const long lo = c * per;
        const long hi = c + 1 == chunk_count ? static_cast<long>(samples.size()) : lo + per;
        std::vector<SamplePoint> part(samples.begin() + lo, samples.begin() + hi);
        futs.push_back(std::async(std::launch::async, [fn, part] { return fn(part); }));
    }
    std::vector<MarginReport> merged;
    for (auto& f : futs) {
        auto reps = f.get();
        if (merged.empty()) {
            merged = std::move(reps);
        } else {
            for (std::size_t i = 0; i < merged.size(); ++i) merged[i].merge(reps[i]);
        }
    }
    for (auto& r : merged) {
        r.finalize(r.tolerance);
        if (r.has_empirical_constant && r.min_margin == 0.0)
            r.pass = std::isfinite(r.empirical_constant);
    }
    return merged;
}

void append_checks(SuiteResult& res, const std::vector<MarginReport>& reps,
                   const std::string& prefix = "") {
    for (auto r : reps) {
        if (!prefix.empty()) r.check_name = prefix + r.check_name;
        res.pass = res.pass && r.pass;
        res.checks.push_back(std::move(r));
    }
}

void add_scalar(SuiteResult& res, const std::string& name, double v, bool ok = true) {
    res.scalars.emplace_back(name, v);
    res.pass = res.pass && ok;
}

CoefficientField psi_field(int n, double kappa) {
    Mat A = Mat::identity(n);
    A(n - 1, n - 1) = kappa;
    return make_constant_field(A);
}

std::vector<Vec> psi_samples(int n, long count, double x_max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> xs;
    xs.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        Vec x(n);
        for (int k = 0; k + 1 < n; ++k) x[k] = (2.0 * unif(rng) - 1.0) * x_max;
        x[n - 1] = unif(rng) * x_max + 1e-9;
        xs.push_back(x);
    }
    return xs;
}

CoefficientField affine_test_field(int n) {
    EllipticityBounds b;
    b.n = n;
    b.lambda = 0.5;
    b.Lambda = 4.0;
    b.M = 1.0;
    b.E = 0.0;
    return CoefficientField(b, DomainTag::whole_space_0_2, "affine", [n](const Vec& x, double) {
        FieldEval fe;
        fe.A = Mat(n);
        fe.gradA = Ten3(n);
        fe.dtA = Mat(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                fe.A(i, j) = (i == j ? 2.0 : 0.2);
                for (int k = 0; k < n; ++k) {
                    const double w = 0.05 * (k + 1) * (i == j ? 1.0 : 0.3);
                    fe.A(i, j) += w * x[k];
                    fe.gradA(k, i, j) = w;
                }
            }
        return fe;
    });
}

// --- suite runners ---------------------------------------------------------

SuiteResult suite_psi(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-psi";
    for (const double kappa : {1.0, 2.0, 5.0}) {
        const CoefficientField f = psi_field(cfg.n, kappa);
        const auto xs = psi_samples(cfg.n, cfg.count, cfg.x_max, cfg.seed);
        std::ostringstream os;
        os << "k" << kappa << "_";
        append_checks(res, check_psi_props(kappa, xs, f, cfg.tol), os.str());
    }
    return res;
}

SuiteResult suite_mollify(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-mollify";
    const CoefficientField f = make_radial_field(cfg.n, cfg.c);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);
    const auto samples = cloud_min_radius(f, cfg.count, cfg.x_max, 0.5, 1.5, cfg.seed, 1.0);
    auto fn = [&](const std::vector<SamplePoint>& part) {
        return verify_mollify_props(mf, part, cfg.tol);
    };
    append_checks(res, run_chunked(fn, samples, cfg.serial));

    const CoefficientField aff = affine_test_field(cfg.n);
    const MollifiedField maff = mollify_field(aff, m);
    double dev = 0;
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int s = 0; s < 20; ++s) {
        Vec x(cfg.n);
        for (int i = 0; i < cfg.n; ++i) x[i] = unif(rng);
        const MollifiedEval me = maff.eval(x, 1.0);
        const FieldEval fe = aff.eval_extended(x, 1.0);
        for (int i = 0; i < cfg.n; ++i)
            for (int j = 0; j < cfg.n; ++j) dev = std::max(dev, std::abs(me.a(i, j) - fe.A(i, j)));
    }
    add_scalar(res, "affine_exactness", dev, dev <= 1e-8);
    return res;
}

SuiteResult suite_cone(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-cone";
    std::vector<double> ls = cfg.l == 2.0 ? std::vector<double>{1.5, 2.0} : std::vector<double>{cfg.l};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (const double l : ls) {
        const cone::ConeParams p = cone::ConeParams::from_l(l);
        MarginReport eig;
        {
            std::ostringstream os;
            os << "l" << l << "_eigenvalues";
            eig.check_name = os.str();
        }
        for (long i = 0; i < std::min<long>(cfg.count, 2000); ++i) {
            Vec y(2);
            const double r = 0.2 + 5.0 * unif(rng);
            const double th = 1e-3 + (M_PI - 2e-3) * unif(rng);
            y[0] = r * std::cos(th);
            y[1] = r * std::sin(th);
            const Vec ev = sym_eigenvalues(cone::cone_matrix(y, p));
            const double err = std::max(std::abs(ev[0] - 1.0), std::abs(ev[1] - l * l));
            eig.observe(1e-10 - err, y, 0.0);
        }
        eig.finalize(0.0);
        res.pass = res.pass && eig.pass;
        res.checks.push_back(eig);

        std::vector<SamplePoint> samples;
        for (long i = 0; i < std::min<long>(cfg.count, 2000); ++i) {
            SamplePoint s;
            s.x = Vec(2);
            s.x[0] = (2.0 * unif(rng) - 1.0) * cfg.x_max;
            s.x[1] = unif(rng) * cfg.x_max + 1e-6;
            s.t = 0.5;
            samples.push_back(s);
        }
        std::ostringstream os;
        os << "l" << l << "_";
        append_checks(res, cone::gradient_bound_check(p, samples, cfg.tol), os.str());
    }

    // operator-equivalence convergence (Richardson over fd steps)
    const cone::ConeParams p = cone::ConeParams::from_l(ls.back());
    const TestFunction phi = make_bump({-3.0, 0.05}, {3.0, 3.0}, 0.0, 1.0, cfg.seed);
    std::vector<Vec> ys;
    for (long i = 0; i < 200; ++i) {
        Vec y(2);
        const double r = 0.5 + 2.0 * unif(rng);
        const double th = 0.15 + (M_PI - 0.3) * unif(rng);
        y[0] = r * std::cos(th);
        y[1] = r * std::sin(th);
        ys.push_back(y);
    }
    std::vector<double> resids, hs;
    for (const double h : {4e-3, 2e-3, 1e-3}) {
        resids.push_back(cone::operator_equivalence_residual(phi, p, ys, h, 0.1).max_residual);
        hs.push_back(h);
    }
    const double order = convergence_order(resids, hs);
    add_scalar(res, "equivalence_order", order, order >= 1.8);
    add_scalar(res, "bu_lower_threshold", cone::bu_lower_threshold(),
               std::abs(cone::bu_lower_threshold() - 1.7037) <= 1e-3);
    add_scalar(res, "bu_critical_angle_deg", cone::bu_critical_angle_deg(),
               std::abs(cone::bu_critical_angle_deg() - 109.47) <= 0.01);
    return res;
}

SuiteResult suite_cutoffs(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-cutoffs";
    EllipticityBounds b;
    b.n = cfg.n;
    const DerivedConstants dc =
        default_constants(b, WeightVariant::prop14, cfg.d > 0 ? cfg.d : 2.0, cfg.N);
    const cutoffs::CutoffSpec spec = cutoffs::make_cutoff_spec(dc.tau, dc.params.K, 1.5);

    append_checks(res, cutoffs::verify_omega_identity(spec, cfg.count, cfg.seed));
    const MarginReport d1 = cutoffs::verify_cutoff_derivative_bound(spec, cfg.count, cfg.seed);
    const MarginReport d4 = cutoffs::verify_cutoff_derivative_bound(spec, 4 * cfg.count, cfg.seed);
    append_checks(res, {d1, d4});
    const double drift =
        d1.empirical_constant > 0 ? d4.empirical_constant / d1.empirical_constant : 1.0;
    add_scalar(res, "derivative_ratio_drift", drift, drift <= 2.0);
    add_scalar(res, "Cstar", spec.Cstar);
    const double formula = 1.0 + cutoffs::cutoff_f(0.5, spec.K) * std::pow(1.0 / dc.tau + 2.0, 1.5);
    add_scalar(res, "Cstar_formula_delta", spec.Cstar - formula, spec.Cstar == formula);
    add_scalar(res, "T1", dc.T1);
    add_scalar(res, "tau", dc.tau);
    return res;
}

SuiteResult suite_lemma33(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-lemma33";
    const CoefficientField f = make_field(cfg);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);
    const auto samples = sample_cloud(f, cfg.count, cfg.x_max, cfg.t_min, 2.0 - 1e-3, cfg.seed);

    WeightParams params;
    if (cfg.d > 0) {
        DerivedConstants dc = default_constants(f.bounds, WeightVariant::prop13, cfg.d, cfg.N);
        params = dc.params;
        params.d_calibrated = true;
    } else {
        const auto cal_cloud = sample_cloud(f, std::min<long>(cfg.count, 2000), cfg.x_max,
                                            cfg.t_min, 2.0 - 1e-3, cfg.seed + 1);
        CalibrationResult cal =
            calibrate_d(f, mf, WeightVariant::prop13, cal_cloud, cfg.d_grid, cfg.gamma, cfg.tol);
        params = cal.params;
        add_scalar(res, "calibrated_d", cal.d);
    }
    params.gamma = cfg.gamma;

    auto fn = [&](const std::vector<SamplePoint>& part) {
        return check_lemma33(f, mf, params, part, cfg.tol);
    };
    append_checks(res, run_chunked(fn, samples, cfg.serial));
    return res;
}

SuiteResult suite_lemma34(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-lemma34";
    const CoefficientField f = make_field(cfg);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);
    const auto samples =
        sample_cloud_q(cfg.n, cfg.count, cfg.x_max, cfg.t_min, 1.0 - 1e-3, cfg.seed);

    WeightParams params;
    if (cfg.d > 0) {
        DerivedConstants dc = default_constants(f.bounds, WeightVariant::prop14, cfg.d, cfg.N);
        params = dc.params;
        params.d_calibrated = true;
    } else {
        const auto cal_cloud = sample_cloud_q(cfg.n, std::min<long>(cfg.count, 1000), cfg.x_max,
                                              cfg.t_min, 1.0 - 1e-3, cfg.seed + 1);
        CalibrationResult cal =
            calibrate_d(f, mf, WeightVariant::prop14, cal_cloud, cfg.d_grid, cfg.gamma, cfg.tol);
        params = cal.params;
        add_scalar(res, "calibrated_d", cal.d);
    }
    params.gamma = cfg.gamma;

    auto fn = [&](const std::vector<SamplePoint>& part) {
        return check_lemma34(f, mf, params, part, cfg.tol);
    };
    append_checks(res, run_chunked(fn, samples, cfg.serial));

    // exact cancellation of the leading multiplier coefficient at alpha = 1 + E/E0
    if (f.bounds.E > 0) {
        const double lam = f.bounds.lambda, Lam = f.bounds.Lambda, kap = f.bounds.kappa();
        const double lhs = (params.alpha - 1.0) * lam * lam -
                           16.0 * cfg.n * cfg.n * (kap + 1.0) * Lam * f.bounds.E;
        add_scalar(res, "alpha_identity_residual", lhs, std::abs(lhs) <= 1e-12 * lam * lam);
    }
    return res;
}

SuiteResult suite_identity(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-identity";
    const CoefficientField f = make_field(cfg);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);
    DerivedConstants dc =
        default_constants(f.bounds, WeightVariant::prop13, cfg.d > 0 ? cfg.d : 2.0, cfg.N);
    dc.params.gamma = cfg.gamma;

    std::vector<double> lo(static_cast<std::size_t>(cfg.n), -1.0),
        hi(static_cast<std::size_t>(cfg.n), 1.0);
    const TestFunction u = make_bump(lo, hi, 0.85, 1.9, cfg.seed);

    std::vector<double> resids, hs;
    double base_resid = 0;
    for (const int lvl : {0, 1, 2}) {
        const int nodes = std::max(6, cfg.nodes >> (2 - lvl));
        const QuadratureGrid g = make_support_grid(u, nodes, cfg.t_panels, cfg.t_ratio,
                                                   std::max(4, cfg.t_nodes >> (2 - lvl)));
        const ResidualReport r = corollary32_residual(u, f, mf, dc.params, g);
        resids.push_back(r.residual);
        hs.push_back(1.0 / nodes);
        if (lvl == 2) base_resid = r.residual;
    }
    add_scalar(res, "residual", base_resid, base_resid <= 1e-3);
    const double order = convergence_order(resids, hs);
    add_scalar(res, "convergence_order", order, order >= 1.8);

    const QuadratureGrid fine = make_support_grid(u, cfg.nodes, cfg.t_panels, cfg.t_ratio, cfg.t_nodes);
    const ResidualReport r26 = corollary32_residual(u, f, mf, dc.params, fine);
    const ResidualReport r25 = lemma31_residual(
        u, f, [](double t) { return SigmaEval{std::exp(t), std::exp(t), std::exp(t)}; }, 0.0,
        dc.params, fine);
    add_scalar(res, "specialization_delta", std::abs(r25.residual - r26.residual),
               std::abs(r25.residual - r26.residual) <= 1e-6);
    return res;
}

SuiteResult suite_carleman(const Config& cfg) {
    SuiteResult res;
    res.suite = "check-carleman";
    const CoefficientField f = make_field(cfg);
    const WeightVariant v = variant_of(cfg);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);

    WeightParams params;
    if (cfg.d > 0) {
        DerivedConstants dc = default_constants(f.bounds, v, cfg.d, cfg.N);
        params = dc.params;
        params.d_calibrated = true;
    } else {
        const long cal_n = std::min<long>(cfg.count, v == WeightVariant::prop13 ? 2000 : 1000);
        const auto cal_cloud =
            v == WeightVariant::prop13
                ? sample_cloud(f, cal_n, cfg.x_max, cfg.t_min, 2.0 - 1e-3, cfg.seed + 1)
                : sample_cloud_q(cfg.n, cal_n, cfg.x_max, cfg.t_min, 1.0 - 1e-3, cfg.seed + 1);
        CalibrationResult cal = calibrate_d(f, mf, v, cal_cloud, cfg.d_grid, cfg.gamma, cfg.tol);
        params = cal.params;
        add_scalar(res, "calibrated_d", cal.d);
    }

    for (int fixture = 0; fixture < 2; ++fixture) {
        TestFunction u = v == WeightVariant::prop13
                             ? make_bump(std::vector<double>(static_cast<std::size_t>(cfg.n), -1.0),
                                         std::vector<double>(static_cast<std::size_t>(cfg.n), 1.0),
                                         0.9, 1.9, cfg.seed + static_cast<std::uint64_t>(fixture))
                             : [&] {
                                   std::vector<double> lo(static_cast<std::size_t>(cfg.n), -1.0),
                                       hi(static_cast<std::size_t>(cfg.n), 1.0);
                                   lo[static_cast<std::size_t>(cfg.n - 1)] = 1.5;
                                   hi[static_cast<std::size_t>(cfg.n - 1)] = 3.0;
                                   return make_bump(lo, hi, 0.45, 0.85,
                                                    cfg.seed + static_cast<std::uint64_t>(fixture));
                               }();
        const QuadratureGrid g =
            make_support_grid(u, cfg.nodes, cfg.t_panels + 4, cfg.t_ratio, cfg.t_nodes);
        const auto verdicts = check_inequality(u, f, params, g, cfg.gammas);
        for (const auto& vd : verdicts) {
            MarginReport r;
            std::ostringstream os;
            os << "bump" << fixture << "_gamma" << vd.gamma;
            r.check_name = os.str();
            r.sample_count = g.total_points();
            r.min_margin = 1.0 - vd.ratio;
            r.tolerance = 1e-2;
            r.pass = vd.pass;
            res.pass = res.pass && vd.pass;
            res.checks.push_back(r);
        }
    }
    return res;
}

SuiteResult suite_calibrate(const Config& cfg) {
    SuiteResult res;
    res.suite = "calibrate-d";
    const CoefficientField f = make_field(cfg);
    const Mollifier m = make_mollifier(cfg.n, cfg.epsilon, cfg.conv_order);
    const MollifiedField mf = mollify_field(f, m);
    const WeightVariant v = variant_of(cfg);
    const auto cloud = v == WeightVariant::prop13
                           ? sample_cloud(f, cfg.count, cfg.x_max, cfg.t_min, 2.0 - 1e-3, cfg.seed)
                           : sample_cloud_q(cfg.n, cfg.count, cfg.x_max, cfg.t_min, 1.0 - 1e-3,
                                            cfg.seed);
    CalibrationResult cal = calibrate_d(f, mf, v, cloud, cfg.d_grid, cfg.gamma, cfg.tol);
    add_scalar(res, "calibrated_d", cal.d);
    append_checks(res, cal.reports);
    return res;
}

}  // namespace

Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream os;
                os << path << ":" << lineno << ": malformed section header";
                throw config_error(os.str());
            }
            continue;  // sections are cosmetic; keys are globally unique
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected key = value";
            throw config_error(os.str());
        }
        try {
            apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << path << ":" << lineno << ": " << e.what();
            throw config_error(os.str());
        }
    }
    return cfg;
}

void apply_override(Config& cfg, const std::string& key, const std::string& value) {
    if (key == "family") cfg.family = value;
    else if (key == "n") cfg.n = std::stoi(value);
    else if (key == "diag") cfg.diag = parse_list(value);
    else if (key == "c") cfg.c = std::stod(value);
    else if (key == "l") cfg.l = std::stod(value);
    else if (key == "variant") cfg.variant = value;
    else if (key == "gamma") cfg.gamma = std::stod(value);
    else if (key == "gammas") cfg.gammas = parse_list(value);
    else if (key == "d") cfg.d = std::stod(value);
    else if (key == "N") cfg.N = std::stod(value);
    else if (key == "d_grid") cfg.d_grid = parse_list(value);
    else if (key == "count") cfg.count = std::stol(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "x_max") cfg.x_max = std::stod(value);
    else if (key == "t_min") cfg.t_min = std::stod(value);
    else if (key == "nodes") cfg.nodes = std::stoi(value);
    else if (key == "t_panels") cfg.t_panels = std::stoi(value);
    else if (key == "t_ratio") cfg.t_ratio = std::stod(value);
    else if (key == "t_nodes") cfg.t_nodes = std::stoi(value);
    else if (key == "grid_level") cfg.grid_level = std::stoi(value);
    else if (key == "epsilon") cfg.epsilon = std::stod(value);
    else if (key == "conv_order") cfg.conv_order = std::stoi(value);
    else if (key == "tol") cfg.tol = std::stod(value);
    else if (key == "serial") cfg.serial = (value == "true" || value == "1");
    else if (key == "out_dir") cfg.out_dir = value;
    else throw config_error("unknown config key: " + key);
}

CoefficientField make_field(const Config& cfg) {
    try {
        if (cfg.family == "constant") {
            if (cfg.diag.empty()) return make_identity_field(cfg.n);
            if (static_cast<int>(cfg.diag.size()) != cfg.n)
                throw config_error("diag length must equal n");
            Mat A(cfg.n);
            for (int i = 0; i < cfg.n; ++i) A(i, i) = cfg.diag[static_cast<std::size_t>(i)];
            return make_constant_field(A);
        }
        if (cfg.family == "radial") return make_radial_field(cfg.n, cfg.c);
        if (cfg.family == "cone") {
            if (cfg.n != 2) throw config_error("cone family requires n = 2");
            return cone::shifted_field(cone::ConeParams::from_l(cfg.l));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("invalid field configuration: ") + e.what());
    }
    throw config_error("unknown field family: " + cfg.family);
}

SuiteResult run_suite(const std::string& name, const Config& cfg) {
    std::vector<trace::Row> rows;
    const bool tracing = !cfg.out_dir.empty() && cfg.serial;
    if (tracing) trace::set_sink(&rows);
    SuiteResult res;
    try {
        if (name == "check-psi") res = suite_psi(cfg);
        else if (name == "check-mollify") res = suite_mollify(cfg);
        else if (name == "check-cone") res = suite_cone(cfg);
        else if (name == "check-cutoffs") res = suite_cutoffs(cfg);
        else if (name == "check-lemma33") res = suite_lemma33(cfg);
        else if (name == "check-lemma34") res = suite_lemma34(cfg);
        else if (name == "check-identity") res = suite_identity(cfg);
        else if (name == "check-carleman") res = suite_carleman(cfg);
        else if (name == "calibrate-d") res = suite_calibrate(cfg);
        else if (name == "report-all") {
            trace::set_sink(nullptr);
            res.suite = "report-all";
            Config small = cfg;
            small.count = std::min<long>(cfg.count, 2000);
            small.out_dir.clear();
            for (const char* s :
                 {"check-psi", "check-mollify", "check-cone", "check-cutoffs", "check-lemma33",
                  "check-lemma34", "check-identity", "check-carleman"}) {
                const SuiteResult sub = run_suite(s, small);
                add_scalar(res, sub.suite, sub.pass ? 1.0 : 0.0, sub.pass);
            }
        } else {
            trace::set_sink(nullptr);
            throw config_error("unknown subcommand: " + name);
        }
    } catch (...) {
        trace::set_sink(nullptr);
        throw;
    }
    trace::set_sink(nullptr);
    res.margins = std::move(rows);
    return res;
}

std::string suite_json(const SuiteResult& res, const Config& cfg) {
    nlohmann::ordered_json j;
    j["suite"] = res.suite;
    j["params"] = {{"family", cfg.family}, {"n", cfg.n},     {"variant", cfg.variant},
                   {"gamma", cfg.gamma},   {"d", cfg.d},     {"count", cfg.count},
                   {"x_max", cfg.x_max},   {"tol", cfg.tol}, {"nodes", cfg.nodes}};
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : res.checks) {
        nlohmann::ordered_json e;
        e["name"] = c.check_name;
        e["min_margin"] = c.min_margin;
        auto argmin = nlohmann::ordered_json::array();
        for (int i = 0; i < c.argmin_x.n; ++i) argmin.push_back(c.argmin_x[i]);
        argmin.push_back(c.argmin_t);
        e["argmin"] = argmin;
        if (c.has_empirical_constant) e["empirical_constant"] = c.empirical_constant;
        e["pass"] = c.pass;
        e["tolerance"] = c.tolerance;
        e["samples"] = c.sample_count;
        if (!c.note.empty()) e["note"] = c.note;
        j["checks"].push_back(e);
    }
    for (const auto& [k, v] : res.scalars) j["scalars"][k] = v;
    j["pass"] = res.pass;
    j["versions"] = {{"carlab", "0.1.0"}};
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

std::string margins_csv(const SuiteResult& res, int n) {
    std::ostringstream os;
    os.precision(17);
    os << "check";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    os << ",t,margin\n";
    for (const auto& r : res.margins) {
        os << r.check;
        for (int i = 0; i < n; ++i) os << "," << (i < r.x.n ? r.x[i] : 0.0);
        os << "," << r.t << "," << r.margin << "\n";
    }
    return os.str();
}

void write_report_files(const SuiteResult& res, const Config& cfg) {
    if (cfg.out_dir.empty()) return;
    {
        std::ofstream out(cfg.out_dir + "/" + res.suite + ".json");
        if (!out) throw config_error("cannot write report into " + cfg.out_dir);
        out << suite_json(res, cfg);
    }
    if (!res.margins.empty()) {
        std::ofstream out(cfg.out_dir + "/" + res.suite + "_margins.csv");
        out << margins_csv(res, cfg.n);
    }
}

}  // namespace carlab
