#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "carlab/fields.hpp"
#include "carlab/report.hpp"

// Configuration, suite orchestration and reporting for the command line
// front end. Config files are flat key = value text grouped in [sections];
// see the README for the grammar and the full key list.

namespace carlab {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    // [field]
    std::string family = "constant";
    int n = 2;
    std::vector<double> diag;  // constant family: diagonal entries (empty = identity)
    double c = 0.5;            // radial family: perturbation size
    double l = 2.0;            // cone family: angle ratio
    // [params]
    std::string variant = "prop13";
    double gamma = 1.0;
    std::vector<double> gammas{0.1, 1.0, 10.0};
    double d = 0.0;  // 0 = calibrate
    double N = 1.0;
    std::vector<double> d_grid{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    // [samples]
    long count = 10000;
    std::uint64_t seed = 1;
    double x_max = 10.0;
    double t_min = 1e-3;
    // [grid]
    int nodes = 24;
    int t_panels = 6;
    double t_ratio = 3.0;
    int t_nodes = 12;
    int grid_level = 1;  // multiplies node counts
    // [mollify]
    double epsilon = 0.5;
    int conv_order = 32;
    // [checks]
    double tol = 1e-9;
    // [run]
    bool serial = false;
    std::string out_dir;
};

Config parse_config(const std::string& path);
void apply_override(Config& cfg, const std::string& key, const std::string& value);

/// Builds the configured coefficient field; throws config_error for unknown
/// families or invalid bounds.
CoefficientField make_field(const Config& cfg);

struct SuiteResult {
    std::string suite;
    std::vector<MarginReport> checks;
    std::vector<std::pair<std::string, double>> scalars;
    bool pass = true;
    std::vector<trace::Row> margins;  // filled when tracing is on
};

/// Known suites: check-psi, check-mollify, check-lemma33, check-lemma34,
/// check-identity, check-carleman, check-cone, check-cutoffs, calibrate-d,
/// report-all.
SuiteResult run_suite(const std::string& name, const Config& cfg);

std::string suite_json(const SuiteResult& res, const Config& cfg);
std::string margins_csv(const SuiteResult& res, int n);

/// Writes <suite>.json and <suite>_margins.csv into cfg.out_dir (when set).
void write_report_files(const SuiteResult& res, const Config& cfg);

}  // namespace carlab
