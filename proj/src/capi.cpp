#include "optexec.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "exec/config.hpp"
#include "exec/error.hpp"
#include "exec/policy.hpp"
#include "exec/simulator.hpp"
#include "exec/suite.hpp"
#include "exec/value_ode.hpp"

using namespace optexec;

struct oe_config {
    RunConfig cfg;
};

struct oe_coeffs {
    ValueCoefficients coeffs;
};

namespace {

thread_local std::string g_last_error;

oe_status from_kind(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::validity: return OE_EVALIDITY;
        case ErrorKind::solver: return OE_ESOLVER;
        case ErrorKind::io: return OE_EIO;
        case ErrorKind::invalid: return OE_EINVAL;
    }
    return OE_EINTERNAL;
}

template <typename Fn>
oe_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const Error& e) {
        g_last_error = e.what();
        return from_kind(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OE_EINTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

oe_status set_out(char** out, const std::string& s) {
    if (!out) return OE_OK;
    *out = dup_string(s);
    return *out ? OE_OK : OE_EINTERNAL;
}

ValueCoefficients solve_from_config(const RunConfig& cfg) {
    if (cfg.schedule.active())
        return solve_scheduled(cfg.model, cfg.penalties, cfg.schedule.make_schedule(cfg.model),
                               cfg.schedule.make_weight(), cfg.grid, cfg.ode_noise_term);
    return solve_for_mode(cfg.model, cfg.penalties, cfg.mode, cfg.grid, cfg.ode_noise_term);
}

}  // namespace

extern "C" {

const char* oe_version(void) { return kVersion; }

const char* oe_last_error(void) { return g_last_error.c_str(); }

void oe_string_free(char* s) { std::free(s); }

oe_status oe_config_parse(const char* text, oe_config** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        *out = new oe_config{parse_config(text)};
        return OE_OK;
    });
}

oe_status oe_config_load(const char* path, oe_config** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        *out = new oe_config{load_config(path)};
        return OE_OK;
    });
}

oe_status oe_config_dump(const oe_config* cfg, char** out) {
    if (!cfg || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] { return set_out(out, dump_config(cfg->cfg)); });
}

oe_status oe_config_json(const oe_config* cfg, char** out) {
    if (!cfg || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] { return set_out(out, config_json(cfg->cfg)); });
}

oe_status oe_config_set(oe_config* cfg, const char* dotted_key, const char* value) {
    if (!cfg || !dotted_key || !value) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        // Re-parse the normalized dump with the key replaced; keeps override
        // semantics identical to editing the file.
        const std::string key(dotted_key);
        const auto dot = key.find('.');
        if (dot == std::string::npos)
            throw Error(ErrorKind::invalid, "oe_config_set: key must be section.name");
        const std::string section = "[" + key.substr(0, dot) + "]";
        const std::string name = key.substr(dot + 1);
        std::string text = dump_config(cfg->cfg);
        const auto sec_pos = text.find(section);
        if (sec_pos == std::string::npos)
            throw Error(ErrorKind::invalid, "oe_config_set: unknown section in " + key);
        const auto key_pos = text.find("\n" + name + " = ", sec_pos);
        const auto next_sec = text.find("\n[", sec_pos);
        if (key_pos == std::string::npos || (next_sec != std::string::npos && key_pos > next_sec)) {
            // key absent in the dump (optional keys): append inside the section
            const auto insert_at =
                next_sec == std::string::npos ? text.size() : next_sec;
            text.insert(insert_at, name + " = " + value + "\n");
        } else {
            const auto line_start = key_pos + 1;
            const auto line_end = text.find('\n', line_start);
            text.replace(line_start, line_end - line_start, name + " = " + value);
        }
        cfg->cfg = parse_config(text);
        return OE_OK;
    });
}

void oe_config_free(oe_config* cfg) { delete cfg; }

oe_status oe_validate(const oe_config* cfg, char** json_out) {
    if (!cfg) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto report = full_validity_report(cfg->cfg);
        const auto rc = set_out(json_out, validity_json(cfg->cfg, report));
        if (rc != OE_OK) return rc;
        if (!report.ok()) {
            g_last_error = "validity check failed: " + report.first_failure();
            return OE_EVALIDITY;
        }
        return OE_OK;
    });
}

oe_status oe_solve(const oe_config* cfg, oe_coeffs** out) {
    if (!cfg || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        *out = new oe_coeffs{solve_from_config(cfg->cfg)};
        return OE_OK;
    });
}

void oe_coeffs_free(oe_coeffs* coeffs) { delete coeffs; }

oe_status oe_coeffs_eval(const oe_coeffs* coeffs, double t, double* a, double* b, double* c) {
    if (!coeffs) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        if (a) *a = coeffs->coeffs.a(t);
        if (b) *b = coeffs->coeffs.b(t);
        if (c) *c = coeffs->coeffs.c(t);
        return OE_OK;
    });
}

oe_status oe_coeffs_value(const oe_coeffs* coeffs, double t, double x, double* v) {
    if (!coeffs || !v) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        *v = coeffs->coeffs.value(t, x);
        return OE_OK;
    });
}

oe_status oe_coeffs_csv(const oe_coeffs* coeffs, char** out) {
    if (!coeffs || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] { return set_out(out, coeffs->coeffs.to_csv()); });
}

oe_status oe_solve_summary_json(const oe_config* cfg, const oe_coeffs* coeffs, char** out) {
    if (!cfg || !coeffs || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] { return set_out(out, solve_summary_json(cfg->cfg, coeffs->coeffs)); });
}

oe_status oe_policy_eval(const oe_config* cfg, const oe_coeffs* coeffs, double t, double x,
                         double out[5]) {
    if (!cfg || !coeffs || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto e = optimal_controls(coeffs->coeffs, cfg->cfg.model, cfg->cfg.penalties, t, x);
        out[0] = e.v_star;
        out[1] = e.l_star;
        out[2] = e.delta;
        out[3] = e.psi;
        out[4] = e.boundary ? *e.boundary : std::nan("");
        return OE_OK;
    });
}

oe_status oe_hjb_residual(const oe_config* cfg, const oe_coeffs* coeffs, double t, double x,
                          double* out) {
    if (!cfg || !coeffs || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        *out = hjb_residual(coeffs->coeffs, cfg->cfg.model, cfg->cfg.penalties, t, x);
        return OE_OK;
    });
}

oe_status oe_boundary(const oe_config* cfg, int grid_size, char** csv_out, char** json_out) {
    if (!cfg) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto profile = buy_sell_boundary(cfg->cfg.model, cfg->cfg.penalties, grid_size,
                                               cfg->cfg.ode_noise_term);
        const auto mono = classify_boundary_monotonicity(cfg->cfg.model, cfg->cfg.penalties,
                                                         cfg->cfg.ode_noise_term);
        auto rc = set_out(csv_out, profile.to_csv());
        if (rc != OE_OK) return rc;
        return set_out(json_out, boundary_summary_json(cfg->cfg, profile, mono));
    });
}

oe_status oe_simulate(const oe_config* cfg, const oe_coeffs* coeffs, char** json_out) {
    if (!cfg || !coeffs) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto& c = cfg->cfg;
        const auto report = run_validity_checks(c.model, c.penalties, c.mode);
        if (!report.ok()) {
            g_last_error = "validity check failed: " + report.first_failure();
            return OE_EVALIDITY;
        }
        std::optional<ScheduleSpec> sched;
        std::optional<WeightSpec> weight;
        if (c.schedule.active()) {
            sched = c.schedule.make_schedule(c.model);
            weight = c.schedule.make_weight();
        }
        const auto mc = estimate_objective(c.model, c.penalties, &coeffs->coeffs, c.sim,
                                           sched ? &*sched : nullptr,
                                           weight ? &*weight : nullptr);
        return set_out(json_out, mc_summary_json(c, mc, report));
    });
}

oe_status oe_simulate_path_csv(const oe_config* cfg, const oe_coeffs* coeffs,
                               uint64_t path_index, char** out) {
    if (!cfg || !coeffs || !out) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto& c = cfg->cfg;
        std::optional<ScheduleSpec> sched;
        std::optional<WeightSpec> weight;
        if (c.schedule.active()) {
            sched = c.schedule.make_schedule(c.model);
            weight = c.schedule.make_weight();
        }
        const auto path = simulate_path(c.model, c.penalties, &coeffs->coeffs, c.sim, path_index,
                                        sched ? &*sched : nullptr, weight ? &*weight : nullptr);
        return set_out(out, path.to_csv());
    });
}

oe_status oe_suite(const oe_config* cfg, const char* out_dir, char** json_out) {
    if (!cfg) {
        g_last_error = "null argument";
        return OE_EINVAL;
    }
    return guarded([&] {
        const auto report = run_scenario_suite(cfg->cfg, out_dir ? out_dir : "");
        const auto rc = set_out(json_out, suite_report_json(report));
        if (rc != OE_OK) return rc;
        if (!report.all_ran()) {
            g_last_error = "one or more scenarios failed to run";
            return OE_ESOLVER;
        }
        return OE_OK;
    });
}

}  // extern "C"
