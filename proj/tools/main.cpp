// Command line front end: runs one verification suite against a config file
// (plus overrides) and writes a JSON report and pointwise-margin CSVs.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "carlab/config.hpp"

namespace {

void print_summary(const carlab::SuiteResult& res) {
    for (const auto& c : res.checks) {
        std::cout << (c.pass ? "  [pass] " : "  [FAIL] ") << c.check_name
                  << "  min_margin=" << c.min_margin;
        if (c.has_empirical_constant) std::cout << "  C_emp=" << c.empirical_constant;
        if (!c.note.empty()) std::cout << "  (" << c.note << ")";
        std::cout << "\n";
    }
    for (const auto& [k, v] : res.scalars) std::cout << "  " << k << " = " << v << "\n";
    std::cout << (res.pass ? "PASS" : "FAIL") << ": " << res.suite << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carlab: numerical verification of weighted estimates for backward parabolic operators"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    long seed = -1;
    int grid_level = 0;
    double tol = -1;
    bool serial = false;
    std::string out_dir;
    int prop = 0;

    app.add_option("--config", config_path, "config file (default: $CARLAB_CONFIG if set)");
    app.add_option("--set", overrides, "override config entries, key=value")->take_all();
    app.add_option("--seed", seed, "sample cloud seed");
    app.add_option("--grid-level", grid_level, "multiply grid node counts by 2^level");
    app.add_option("--tol", tol, "margin tolerance");
    app.add_flag("--serial", serial, "canonical serial execution (enables margin CSV dumps)");
    app.add_option("--out", out_dir, "directory for JSON/CSV reports");

    const char* names[] = {"check-psi",     "check-mollify", "check-lemma33", "check-lemma34",
                           "check-identity", "check-carleman", "check-cone",   "check-cutoffs",
                           "calibrate-d",   "report-all"};
    for (const char* n : names) {
        CLI::App* sub = app.add_subcommand(n);
        if (std::string(n) == "check-carleman")
            sub->add_option("--prop", prop, "13 or 14")->check(CLI::IsMember({13, 14}));
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        carlab::Config cfg;
        if (config_path.empty()) {
            if (const char* env = std::getenv("CARLAB_CONFIG")) config_path = env;
        }
        if (!config_path.empty()) cfg = carlab::parse_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw carlab::config_error("--set expects key=value");
            carlab::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (tol > 0) cfg.tol = tol;
        if (serial) cfg.serial = true;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (prop == 13) cfg.variant = "prop13";
        if (prop == 14) cfg.variant = "prop14";
        for (int i = 0; i < grid_level; ++i) {
            cfg.nodes *= 2;
            cfg.t_nodes *= 2;
        }

        const carlab::SuiteResult res = carlab::run_suite(cmd, cfg);
        carlab::write_report_files(res, cfg);
        print_summary(res);
        return res.pass ? 0 : 1;
    } catch (const carlab::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const carlab::hypothesis_error& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
