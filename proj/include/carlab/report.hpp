#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "carlab/linalg.hpp"

namespace carlab {

/// Result of one pointwise check swept over a sample cloud.
/// pass <=> min_margin >= -tolerance. Margins are stored in the normalized
/// form the check defines (normalization is sign-preserving).
/// Per-sample margin rows for CSV dumps; enabled only by the CLI in serial
/// mode (the sink is a plain global).
namespace trace {
struct Row {
    std::string check;
    Vec x;
    double t;
    double margin;
};
std::vector<Row>* sink();
void set_sink(std::vector<Row>* s);
}  // namespace trace

struct MarginReport {
    std::string check_name;
    long sample_count = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    Vec argmin_x;
    double argmin_t = 0.0;
    bool has_empirical_constant = false;
    double empirical_constant = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;

    void observe(double margin, const Vec& x, double t) {
        ++sample_count;
        if (auto* s = trace::sink()) s->push_back({check_name, x, t, margin});
        if (margin < min_margin) {
            min_margin = margin;
            argmin_x = x;
            argmin_t = t;
        }
    }
    void observe_sup(double value) {  // for empirical-constant checks
        ++sample_count;
        if (!has_empirical_constant || value > empirical_constant) {
            has_empirical_constant = true;
            empirical_constant = value;
        }
    }
    void finalize(double tol) {
        tolerance = tol;
        pass = min_margin >= -tol;
    }
    // merge order-independent (min/max reductions), safe for parallel sweeps
    void merge(const MarginReport& o) {
        sample_count += o.sample_count;
        if (o.min_margin < min_margin) {
            min_margin = o.min_margin;
            argmin_x = o.argmin_x;
            argmin_t = o.argmin_t;
        }
        if (o.has_empirical_constant &&
            (!has_empirical_constant || o.empirical_constant > empirical_constant)) {
            has_empirical_constant = true;
            empirical_constant = o.empirical_constant;
        }
    }
};

/// Error for configurations that violate a structural hypothesis
/// (e.g. decay constant at or above its admissible threshold).
struct hypothesis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Error for calibration sweeps that exhaust their grid without passing.
struct calibration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace carlab
