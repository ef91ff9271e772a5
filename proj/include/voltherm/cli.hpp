#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "voltherm/charlib.hpp"
#include "voltherm/design.hpp"
#include "voltherm/errors.hpp"
#include "voltherm/optimizer.hpp"
#include "voltherm/reports.hpp"
#include "voltherm/runconfig.hpp"

namespace voltherm {

// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitInvalidInput = 3,
    kExitInfeasible = 4,
    kExitNoConvergence = 5,
};

namespace cli {

inline CharLib load_or_synth_charlib(const RunConfig& cfg) {
    if (cfg.charlib_path) return load_charlib(*cfg.charlib_path);
    return synth_charlib(cfg.charlib_seed);
}

inline Design load_or_synth_design(const RunConfig& cfg) {
    if (cfg.design_path) return load_design(*cfg.design_path);
    return gen_synthetic_design(cfg.design_m, cfg.design_n, cfg.design_paths, cfg.design_seed);
}

inline ThermalConfig thermal_config(const RunConfig& cfg, double t_amb) {
    ThermalConfig tc;
    tc.theta_ja = cfg.theta_ja;
    tc.r_lat = cfg.r_lat;
    tc.t_amb = t_amb;
    tc.eps_th = cfg.eps_th;
    tc.max_iters = cfg.thermal_max_iters;
    return tc;
}

inline SelectOptions select_options(const RunConfig& cfg, const CharLib& lib) {
    SelectOptions o;
    o.grid = VoltageGrid::from_lib(lib, cfg.v_step_mv);
    o.max_iters = cfg.max_iters;
    return o;
}

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + cfg.out_dir + ": " +
                                  ec.message());
    return std::filesystem::path(cfg.out_dir) / name;
}

inline void write_summary(const RunConfig& cfg, const nlohmann::json& summary) {
    std::ofstream out(out_path(cfg, "summary.json"));
    out << summary.dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// characterize: synthesize a library and write the interchange document
// ---------------------------------------------------------------------------

inline int cmd_characterize(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = synth_charlib(cfg.charlib_seed);
    const auto path = out_path(cfg, "charlib.json");
    save_charlib(lib, path);
    if (!(load_charlib(path) == lib)) // cheap self-check of the round trip
        throw Error("charlib round trip mismatch after save");
    std::cout << "characterize: wrote " << path.string() << " (seed " << cfg.charlib_seed << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// scale: thermal-aware voltage selection across an ambient sweep
// ---------------------------------------------------------------------------

inline int cmd_scale(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = load_or_synth_charlib(cfg);
    const Design design = load_or_synth_design(cfg);
    const SelectOptions opts = select_options(cfg, lib);
    const double d_worst = worst_case_delay(design, lib, cfg.guardband);
    const VoltagePair nominal = opts.grid->nominal();

    const std::vector<double> ambients = cfg.ambients();
    CsvWriter voltages(out_path(cfg, "voltages.csv"), {"t_amb_c", "v_core_mv", "v_bram_mv"});
    CsvWriter power(out_path(cfg, "power.csv"),
                    {"t_amb_c", "p_baseline_lo_w", "p_baseline_hi_w", "p_opt_lo_w", "p_opt_hi_w",
                     "saving_lo_pct", "saving_hi_pct"});

    // Reported power bounds: same voltages, activity swept from a primary
    // activity of 0.1 (internal ~0.05) up to 1.0 (internal ~0.27).
    const Design design_lo = design.with_uniform_activity(internal_activity(0.1));
    const Design design_hi = design.with_uniform_activity(internal_activity(1.0));

    bool all_converged = true;
    std::vector<TraceRow> last_trace;
    std::vector<int> core_seq, bram_seq;
    for (double t : ambients) {
        const ThermalConfig tc = thermal_config(cfg, t);
        OptResult res = select_voltages(design, lib, tc, t, cfg.delta_t, d_worst, opts);
        if (cfg.oracle) {
            const OptResult ref =
                brute_force_reference(design, lib, tc, t, cfg.delta_t, d_worst, opts);
            if (!(ref.pair == res.pair))
                throw Error("oracle mismatch at t_amb " + std::to_string(t));
        }
        all_converged = all_converged && res.converged;
        last_trace = res.trace;
        core_seq.push_back(res.pair.core_mv);
        bram_seq.push_back(res.pair.bram_mv);
        voltages.row({t, static_cast<double>(res.pair.core_mv),
                      static_cast<double>(res.pair.bram_mv)});

        const ThermalModel model = calibrate(tc, design);
        const auto base_lo = converge_at_pair(design_lo, lib, model, t, nominal, d_worst, cfg.delta_t);
        const auto base_hi = converge_at_pair(design_hi, lib, model, t, nominal, d_worst, cfg.delta_t);
        const auto opt_lo = converge_at_pair(design_lo, lib, model, t, res.pair, d_worst, cfg.delta_t);
        const auto opt_hi = converge_at_pair(design_hi, lib, model, t, res.pair, d_worst, cfg.delta_t);
        power.row({t, base_lo.power_w, base_hi.power_w, opt_lo.power_w, opt_hi.power_w,
                   100.0 * (1.0 - opt_lo.power_w / base_lo.power_w),
                   100.0 * (1.0 - opt_hi.power_w / base_hi.power_w)});
    }

    // Iteration trace of the last ambient in the sweep.
    save_trace_csv(last_trace, out_path(cfg, "trace.csv"));

    auto non_decreasing = [](const std::vector<int>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i + 1] < v[i]) return false;
        return true;
    };
    nlohmann::json summary;
    summary["command"] = "scale";
    summary["d_worst_s"] = d_worst;
    summary["ambients_c"] = ambients;
    summary["rows"] = ambients.size();
    summary["v_core_non_decreasing"] = non_decreasing(core_seq);
    summary["v_bram_non_decreasing"] = non_decreasing(bram_seq);
    summary["converged"] = all_converged;
    write_summary(cfg, summary);

    std::cout << "scale: " << ambients.size() << " ambient point(s), d_worst " << d_worst
              << " s, reports in " << cfg.out_dir << "\n";
    return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// energy: minimum-energy voltage/clock selection
// ---------------------------------------------------------------------------

inline int cmd_energy(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = load_or_synth_charlib(cfg);
    const Design design = load_or_synth_design(cfg);
    const double d_worst = worst_case_delay(design, lib, cfg.guardband);
    const ThermalConfig tc = thermal_config(cfg, cfg.t_amb);

    EnergyOptions eo;
    eo.grid = VoltageGrid::from_lib(lib, cfg.v_step_mv);
    eo.prune = cfg.prune;
    const OptResult res = optimize_energy(design, lib, tc, cfg.t_amb, cfg.delta_t, eo);

    // Baseline: nominal rails clocked at d_worst, thermally settled.
    const ThermalModel model = calibrate(tc, design);
    const auto base = converge_at_pair(design, lib, model, cfg.t_amb, eo.grid->nominal(), d_worst,
                                       cfg.delta_t);
    const double e_base = base.power_w * d_worst;

    CsvWriter out(out_path(cfg, "energy.csv"),
                  {"v_core_mv", "v_bram_mv", "freq_ratio", "energy_j", "saving_pct"});
    for (const EvaluatedPair& e : res.evaluated)
        out.row({static_cast<double>(e.pair.core_mv), static_cast<double>(e.pair.bram_mv),
                 d_worst / e.clock_s, e.energy_j, 100.0 * (1.0 - e.energy_j / e_base)});

    nlohmann::json summary;
    summary["command"] = "energy";
    summary["t_amb_c"] = cfg.t_amb;
    summary["d_worst_s"] = d_worst;
    summary["baseline_energy_j"] = e_base;
    summary["v_core_mv"] = res.pair.core_mv;
    summary["v_bram_mv"] = res.pair.bram_mv;
    summary["clock_s"] = res.clock_period_s;
    summary["freq_ratio"] = d_worst / res.clock_period_s;
    summary["energy_j"] = res.energy_per_cycle_j;
    summary["saving_pct"] = 100.0 * (1.0 - res.energy_per_cycle_j / e_base);
    summary["pairs_evaluated"] = res.stats.pairs_evaluated;
    summary["pairs_pruned"] = res.stats.pairs_pruned;
    summary["thermal_solves"] = res.stats.thermal_solves;
    summary["cache_hits"] = res.stats.cache_hits;
    write_summary(cfg, summary);

    std::cout << "energy: best (" << res.pair.core_mv << " mV, " << res.pair.bram_mv << " mV), clock "
              << res.clock_period_s << " s (freq ratio " << d_worst / res.clock_period_s
              << "), energy " << res.energy_per_cycle_j << " J/cycle\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// overscale: relaxed-constraint sweep with per-path violation report
// ---------------------------------------------------------------------------

inline int cmd_overscale(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = load_or_synth_charlib(cfg);
    const Design design = load_or_synth_design(cfg);
    const ThermalConfig tc = thermal_config(cfg, cfg.t_amb);
    const SelectOptions opts = select_options(cfg, lib);

    const auto points = overscale_sweep(design, lib, tc, cfg.t_amb, cfg.delta_t, cfg.betas,
                                        cfg.guardband, opts);

    CsvWriter out(out_path(cfg, "overscale.csv"),
                  {"beta", "power_w", "violating_path_count", "max_deficit_s"});
    nlohmann::json rows = nlohmann::json::array();
    bool all_converged = true;
    for (const OverscalePoint& p : points) {
        double max_deficit = 0;
        for (const PathViolation& v : p.violations) max_deficit = std::max(max_deficit, v.deficit_s);
        out.row({p.beta, p.result.total_power_w, static_cast<double>(p.violations.size()),
                 max_deficit});
        all_converged = all_converged && p.result.converged;
        nlohmann::json pj;
        pj["beta"] = p.beta;
        pj["v_core_mv"] = p.result.pair.core_mv;
        pj["v_bram_mv"] = p.result.pair.bram_mv;
        pj["power_w"] = p.result.total_power_w;
        nlohmann::json viol = nlohmann::json::array();
        for (const PathViolation& v : p.violations)
            viol.push_back({{"path_id", v.path_id}, {"deficit_s", v.deficit_s}});
        pj["violations"] = std::move(viol);
        rows.push_back(std::move(pj));
    }

    nlohmann::json summary;
    summary["command"] = "overscale";
    summary["t_amb_c"] = cfg.t_amb;
    summary["d_worst_s"] = worst_case_delay(design, lib, cfg.guardband);
    summary["points"] = std::move(rows);
    write_summary(cfg, summary);

    std::cout << "overscale: " << points.size() << " beta point(s), reports in " << cfg.out_dir
              << "\n";
    return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// lut: temperature-indexed voltage table for online regulation
// ---------------------------------------------------------------------------

inline int cmd_lut(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = load_or_synth_charlib(cfg);
    const Design design = load_or_synth_design(cfg);
    const ThermalConfig tc = thermal_config(cfg, cfg.t_amb);
    const SelectOptions opts = select_options(cfg, lib);

    const VidLut lut = build_vid_lut(design, lib, tc, cfg.lut_keys_or_default(), cfg.delta_t,
                                     cfg.lut_margin, opts, cfg.guardband);
    save_vid_lut(lut, out_path(cfg, "lut.csv"));

    nlohmann::json summary;
    summary["command"] = "lut";
    summary["keys"] = lut.entries.size();
    summary["margin_c"] = lut.margin_c;
    write_summary(cfg, summary);

    std::cout << "lut: " << lut.entries.size() << " entries (margin " << lut.margin_c
              << " degC) in " << cfg.out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle-check: fast search vs exhaustive reference on one instance
// ---------------------------------------------------------------------------

inline int cmd_oracle_check(const RunConfig& cfg) {
    cfg.validate();
    const CharLib lib = load_or_synth_charlib(cfg);
    const Design design = load_or_synth_design(cfg);
    const ThermalConfig tc = thermal_config(cfg, cfg.t_amb);
    const SelectOptions opts = select_options(cfg, lib);
    const double d_worst = worst_case_delay(design, lib, cfg.guardband);

    const OptResult fast = select_voltages(design, lib, tc, cfg.t_amb, cfg.delta_t, d_worst, opts);
    const OptResult ref =
        brute_force_reference(design, lib, tc, cfg.t_amb, cfg.delta_t, d_worst, opts);

    const double rel_dp = std::abs(fast.total_power_w - ref.total_power_w) /
                          std::max(ref.total_power_w, 1e-300);
    const bool match = fast.pair == ref.pair && rel_dp <= 1e-9;
    std::cout << "oracle-check: fast (" << fast.pair.core_mv << ", " << fast.pair.bram_mv
              << ") mV p=" << fast.total_power_w << " W | reference (" << ref.pair.core_mv << ", "
              << ref.pair.bram_mv << ") mV p=" << ref.total_power_w << " W -> "
              << (match ? "MATCH" : "MISMATCH") << "\n";
    return match ? kExitOk : kExitFailure;
}

} // namespace cli

// Dispatch + exception-to-exit-code policy for the executable and for tests
// that drive commands in-process.
inline int run_command(const std::string& command, const RunConfig& cfg) {
    try {
        if (command == "characterize") return cli::cmd_characterize(cfg);
        if (command == "scale") return cli::cmd_scale(cfg);
        if (command == "energy") return cli::cmd_energy(cfg);
        if (command == "overscale") return cli::cmd_overscale(cfg);
        if (command == "lut") return cli::cmd_lut(cfg);
        if (command == "oracle-check") return cli::cmd_oracle_check(cfg);
        std::cerr << "unknown command: " << command << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const JunctionCapError& e) {
        std::cerr << "junction cap: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace voltherm
