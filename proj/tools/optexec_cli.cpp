// optexec command-line front end. Links the C API only.
//
// Exit codes: 0 success, 1 validity failure, 2 solver abort, 3 I/O or config
// error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "optexec.h"

namespace fs = std::filesystem;

namespace {

struct ConfigHandle {
    oe_config* cfg = nullptr;
    ~ConfigHandle() { oe_config_free(cfg); }
};

struct CoeffsHandle {
    oe_coeffs* coeffs = nullptr;
    ~CoeffsHandle() { oe_coeffs_free(coeffs); }
};

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { oe_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

int exit_code(oe_status rc) {
    switch (rc) {
        case OE_OK: return 0;
        case OE_EVALIDITY: return 1;
        case OE_ESOLVER: return 2;
        case OE_EIO: return 3;
        case OE_EINVAL: return 3;
        case OE_EINTERNAL: return 2;
    }
    return 2;
}

int fail(oe_status rc) {
    std::cerr << "error: " << oe_last_error() << "\n";
    return exit_code(rc);
}

bool write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << text;
    return out.good();
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid, paths, steps;
    std::string out_dir;
    std::string format;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "run configuration file")->required();
    cmd->add_option("--seed", o.seed, "override sim.seed");
    cmd->add_option("--grid", o.grid, "override sim.grid (ODE grid intervals)");
    cmd->add_option("--paths", o.paths, "override sim.paths");
    cmd->add_option("--steps", o.steps, "override sim.steps");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "output format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
}

oe_status load_with_overrides(const CommonOpts& o, ConfigHandle& h) {
    oe_status rc = oe_config_load(o.config_path.c_str(), &h.cfg);
    if (rc != OE_OK) return rc;
    auto set = [&](const char* key, const std::string& value) {
        if (rc == OE_OK) rc = oe_config_set(h.cfg, key, value.c_str());
    };
    if (o.seed) set("sim.seed", std::to_string(*o.seed));
    if (o.grid) set("sim.grid", std::to_string(*o.grid));
    if (o.paths) set("sim.paths", std::to_string(*o.paths));
    if (o.steps) set("sim.steps", std::to_string(*o.steps));
    if (!o.out_dir.empty()) set("output.dir", o.out_dir);
    if (!o.format.empty()) set("output.format", o.format);
    return rc;
}

std::string config_value(const ConfigHandle& h, const std::string& section,
                         const std::string& key) {
    OwnedString dump;
    if (oe_config_dump(h.cfg, &dump.s) != OE_OK) return "";
    const std::string text = dump.str();
    const auto sec_pos = text.find("[" + section + "]");
    if (sec_pos == std::string::npos) return "";
    const auto key_pos = text.find("\n" + key + " = ", sec_pos);
    if (key_pos == std::string::npos) return "";
    const auto start = key_pos + key.size() + 4;
    const auto end = text.find('\n', start);
    return text.substr(start, end - start);
}

int cmd_validate(const CommonOpts& o) {
    ConfigHandle cfg;
    oe_status rc = load_with_overrides(o, cfg);
    if (rc != OE_OK) return fail(rc);
    OwnedString json;
    rc = oe_validate(cfg.cfg, &json.s);
    std::cout << json.str();
    if (rc != OE_OK && rc != OE_EVALIDITY) return fail(rc);
    return exit_code(rc);
}

int cmd_solve(const CommonOpts& o) {
    ConfigHandle cfg;
    oe_status rc = load_with_overrides(o, cfg);
    if (rc != OE_OK) return fail(rc);
    OwnedString report;
    rc = oe_validate(cfg.cfg, &report.s);
    if (rc != OE_OK) {
        std::cout << report.str();
        return fail(rc);
    }
    CoeffsHandle coeffs;
    rc = oe_solve(cfg.cfg, &coeffs.coeffs);
    if (rc != OE_OK) return fail(rc);

    const fs::path dir = config_value(cfg, "output", "dir");
    std::error_code ec;
    fs::create_directories(dir, ec);
    OwnedString csv, summary;
    if ((rc = oe_coeffs_csv(coeffs.coeffs, &csv.s)) != OE_OK) return fail(rc);
    if ((rc = oe_solve_summary_json(cfg.cfg, coeffs.coeffs, &summary.s)) != OE_OK)
        return fail(rc);
    if (!write_file(dir / "coefficients.csv", csv.str()) ||
        !write_file(dir / "solve_summary.json", summary.str())) {
        std::cerr << "error: cannot write outputs under " << dir << "\n";
        return 3;
    }
    std::cout << summary.str();
    std::cout << "wrote " << (dir / "coefficients.csv").string() << "\n";
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    ConfigHandle cfg;
    oe_status rc = load_with_overrides(o, cfg);
    if (rc != OE_OK) return fail(rc);
    OwnedString report;
    rc = oe_validate(cfg.cfg, &report.s);
    if (rc != OE_OK) {
        std::cout << report.str();
        return fail(rc);
    }
    CoeffsHandle coeffs;
    rc = oe_solve(cfg.cfg, &coeffs.coeffs);
    if (rc != OE_OK) return fail(rc);

    const fs::path dir = config_value(cfg, "output", "dir");
    std::error_code ec;
    fs::create_directories(dir, ec);

    OwnedString summary;
    rc = oe_simulate(cfg.cfg, coeffs.coeffs, &summary.s);
    if (rc != OE_OK) return fail(rc);
    if (!write_file(dir / "mc_summary.json", summary.str())) {
        std::cerr << "error: cannot write outputs under " << dir << "\n";
        return 3;
    }

    int record_paths = 3;
    try {
        record_paths = std::stoi(config_value(cfg, "output", "record_paths"));
    } catch (...) {
    }
    int n_paths = 1;
    try {
        n_paths = std::stoi(config_value(cfg, "sim", "paths"));
    } catch (...) {
    }
    for (int k = 0; k < std::min(record_paths, n_paths); ++k) {
        OwnedString path_csv;
        rc = oe_simulate_path_csv(cfg.cfg, coeffs.coeffs, static_cast<std::uint64_t>(k),
                                  &path_csv.s);
        if (rc != OE_OK) return fail(rc);
        if (!write_file(dir / ("path_" + std::to_string(k) + ".csv"), path_csv.str())) {
            std::cerr << "error: cannot write outputs under " << dir << "\n";
            return 3;
        }
    }
    std::cout << summary.str();
    std::cout << "wrote " << (dir / "mc_summary.json").string() << "\n";
    return 0;
}

int cmd_boundary(const CommonOpts& o) {
    ConfigHandle cfg;
    oe_status rc = load_with_overrides(o, cfg);
    if (rc != OE_OK) return fail(rc);
    int grid = 3600;
    try {
        grid = std::stoi(config_value(cfg, "sim", "grid"));
    } catch (...) {
    }
    OwnedString csv, json;
    rc = oe_boundary(cfg.cfg, grid, &csv.s, &json.s);
    if (rc != OE_OK) return fail(rc);

    const fs::path dir = config_value(cfg, "output", "dir");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!write_file(dir / "boundary.csv", csv.str()) ||
        !write_file(dir / "boundary_summary.json", json.str())) {
        std::cerr << "error: cannot write outputs under " << dir << "\n";
        return 3;
    }
    std::cout << json.str();
    std::cout << "wrote " << (dir / "boundary.csv").string() << "\n";
    return 0;
}

int cmd_suite(const CommonOpts& o) {
    ConfigHandle cfg;
    oe_status rc = load_with_overrides(o, cfg);
    if (rc != OE_OK) return fail(rc);
    const std::string dir = config_value(cfg, "output", "dir");
    OwnedString json;
    rc = oe_suite(cfg.cfg, dir.c_str(), &json.s);
    std::cout << json.str();
    if (rc != OE_OK) return fail(rc);
    std::cout << "wrote " << (fs::path(dir) / "suite_report.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("optexec ") + oe_version() +
                 " — optimal execution with market and limit orders"};
    app.require_subcommand(1);

    CommonOpts validate_opts, solve_opts, simulate_opts, boundary_opts, suite_opts;
    add_common(app.add_subcommand("validate", "run parameter validity checks"), validate_opts);
    add_common(app.add_subcommand("solve", "solve the value-function coefficients"), solve_opts);
    add_common(app.add_subcommand("simulate", "Monte Carlo simulation of the configured policy"),
               simulate_opts);
    add_common(app.add_subcommand("boundary", "buy-sell boundary profile and classification"),
               boundary_opts);
    add_common(app.add_subcommand("suite", "run the built-in scenario suite"), suite_opts);

    CLI11_PARSE(app, argc, argv);

    if (app.get_subcommand("validate")->parsed()) return cmd_validate(validate_opts);
    if (app.get_subcommand("solve")->parsed()) return cmd_solve(solve_opts);
    if (app.get_subcommand("simulate")->parsed()) return cmd_simulate(simulate_opts);
    if (app.get_subcommand("boundary")->parsed()) return cmd_boundary(boundary_opts);
    if (app.get_subcommand("suite")->parsed()) return cmd_suite(suite_opts);
    return 0;
}
