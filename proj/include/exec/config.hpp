#pragma once

#include <optional>
#include <string>

#include "exec/params.hpp"
#include "exec/schedule.hpp"
#include "exec/simulator.hpp"
#include "exec/value_ode.hpp"

namespace optexec {

inline constexpr const char* kVersion = "optexec/0.1.0";

struct ScheduleChoice {
    // "none" disables schedule following.
    std::optional<ScheduleKind> kind;
    double weight = 0.0;               // constant weight w(t)
    std::string file;                  // tabulated schedule CSV (t,Q)
    std::string weight_file;           // tabulated weight CSV (t,w)

    bool active() const { return kind.has_value(); }
    ScheduleSpec make_schedule(const ModelParams& model) const;
    WeightSpec make_weight() const;
};

struct OutputOptions {
    std::string dir = "out";
    std::string format = "csv";  // csv | json (summary JSON is always written)
    int record_paths = 3;        // how many path CSVs cmd_simulate writes
};

// Full run description: model + penalties + mode + solver/sim settings.
// Parsed from flat key-value text with [model] / [penalties] / [sim] /
// [schedule] / [output] sections. Unset R1/R2 default to (x0/T)^2; p0/p1 are
// convenience keys expanded to m0 = p0*x0/sqrt(T), m1 = p1*sqrt(T) at parse
// time and echoed as m0/m1 in every output.
struct RunConfig {
    ModelParams model;
    PenaltyParams penalties;
    UncertaintyMode mode = UncertaintyMode::constant;
    NoiseSource ode_noise_term = NoiseSource::m0;
    ScheduleChoice schedule;
    SimConfig sim;
    int grid = 3600;  // ODE grid intervals
    OutputOptions output;

    // provenance of defaulted fields, echoed in outputs
    bool r1_defaulted = false;
    bool r2_defaulted = false;
    std::optional<double> p0, p1;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical round-trippable form: fixed section and key order, resolved
// values (no p0/p1), full precision. parse(dump(parse(x))) == parse(x).
std::string dump_config(const RunConfig& cfg);

// JSON renderings (self-describing: every document embeds the resolved
// parameter set and the version stamp).
std::string validity_json(const RunConfig& cfg, const ValidityReport& report);
std::string solve_summary_json(const RunConfig& cfg, const ValueCoefficients& coeffs);
std::string mc_summary_json(const RunConfig& cfg, const MCResult& result,
                            const ValidityReport& report, const std::string& scenario_name = {});
std::string boundary_summary_json(const RunConfig& cfg, const BoundaryProfile& profile,
                                  const BoundaryMonotonicity& mono);
std::string config_json(const RunConfig& cfg);

// Policy-grid export, columns t,x,vStar,lStar,delta over the outer product of
// the coefficient grid (thinned by `every`) and the supplied positions.
std::string policy_grid_csv(const RunConfig& cfg, const ValueCoefficients& coeffs,
                            const std::vector<double>& xs, int every = 1);

// Validity report for the configured mode, including the post-solve
// second-order-condition sweep (solve failures are folded into that check).
ValidityReport full_validity_report(const RunConfig& cfg);

}  // namespace optexec
