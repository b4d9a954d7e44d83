#pragma once

#include <string>
#include <vector>

#include "exec/config.hpp"
#include "exec/simulator.hpp"

namespace optexec {

struct ScenarioClaim {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ScenarioResult {
    std::string name;
    bool ran = false;
    std::string error;  // set when the scenario aborted
    MCResult mc;
    std::vector<ScenarioClaim> claims;
};

struct SuiteReport {
    std::vector<ScenarioResult> scenarios;

    bool all_ran() const {
        for (const auto& s : scenarios)
            if (!s.ran) return false;
        return true;
    }
    bool all_claims_pass() const {
        for (const auto& s : scenarios)
            for (const auto& c : s.claims)
                if (!c.pass) return false;
        return true;
    }
};

// Runs the built-in experiment set on the standard parameter point
// (uncertainty variants under shared noise, impact asymmetry, beta sweep,
// buy-sell boundary pair, schedule following) and checks each scenario's
// qualitative claim. Per-scenario failures are collected, never fatal to the
// rest of the suite. Seed/step/thread settings come from `base`; when
// `out_dir` is non-empty, per-scenario sample paths, boundary curves and
// summary JSON are written beneath it.
SuiteReport run_scenario_suite(const RunConfig& base, const std::string& out_dir = {});

std::string suite_report_json(const SuiteReport& report);

}  // namespace optexec
