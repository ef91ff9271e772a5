#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "voltherm/analysis.hpp"
#include "voltherm/charlib.hpp"
#include "voltherm/design.hpp"
#include "voltherm/errors.hpp"
#include "voltherm/thermal.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Voltage grid
// ---------------------------------------------------------------------------

struct VoltageGrid {
    std::vector<int> core_mv;
    std::vector<int> bram_mv;

    static VoltageGrid from_lib(const CharLib& lib, int step_mv = 10) {
        if (step_mv < 1) throw ValidationError("voltage step must be >= 1 mV");
        VoltageGrid g;
        const int floor_mv = static_cast<int>(std::lround(lib.meta().v_floor * 1000));
        const int core_nom = static_cast<int>(std::lround(lib.meta().v_core_nom * 1000));
        const int bram_nom = static_cast<int>(std::lround(lib.meta().v_bram_nom * 1000));
        for (int mv = floor_mv; mv <= core_nom; mv += step_mv) g.core_mv.push_back(mv);
        for (int mv = floor_mv; mv <= bram_nom; mv += step_mv) g.bram_mv.push_back(mv);
        if (g.core_mv.back() != core_nom) g.core_mv.push_back(core_nom);
        if (g.bram_mv.back() != bram_nom) g.bram_mv.push_back(bram_nom);
        return g;
    }

    VoltagePair nominal() const { return {core_mv.back(), bram_mv.back()}; }
    std::size_t size() const { return core_mv.size() * bram_mv.size(); }
};

// Among equal-power (or equal-energy) candidates, prefer more timing margin:
// larger rail sum, then larger core voltage. Used identically by the fast
// search and the brute-force oracle so results are comparable bit for bit.
inline bool better_candidate(double score_a, const VoltagePair& a, double score_b,
                             const VoltagePair& b) {
    if (score_a != score_b) return score_a < score_b;
    const int sum_a = a.core_mv + a.bram_mv, sum_b = b.core_mv + b.bram_mv;
    if (sum_a != sum_b) return sum_a > sum_b;
    return a.core_mv > b.core_mv;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct TraceRow {
    int iteration = 0;       // 1-based
    VoltagePair pair;
    double power_w = 0;      // total power at the temps the pair was chosen under
    double max_delta_t_c = 0; // ||T_new - T_old||_inf after the thermal update
    double max_t_c = 0;      // junction (max tile) temperature after the update
};

struct OptStats {
    long thermal_solves = 0;
    long cache_hits = 0;
    long pairs_pruned = 0;
    long pairs_evaluated = 0;
    long full_searches = 0;
    long neighborhood_searches = 0;
};

struct EvaluatedPair {
    VoltagePair pair;
    double clock_s = 0;   // converged d_max
    double energy_j = 0;  // per cycle
    double power_w = 0;
    int inner_iters = 0;
    TempField temps;
};

struct OptResult {
    VoltagePair pair;
    TempField temps;
    double total_power_w = 0;
    double delay_s = 0;          // design delay at the converged state
    double clock_period_s = 0;   // clock the dynamic power is billed at
    double energy_per_cycle_j = 0;
    std::vector<TraceRow> trace;
    bool feasible = true;
    bool converged = true;
    int iterations = 0;
    OptStats stats;
    std::vector<EvaluatedPair> evaluated; // energy flow only
};

struct SelectOptions {
    std::optional<VoltageGrid> grid;       // default: 10 mV grid from the library
    int max_iters = 20;
    double junction_cap_c = 100.0;
    std::optional<double> clock_override_s; // over-scaling: bill dynamic power at
                                            // the original clock, not the relaxed
                                            // constraint
    int neighborhood_steps = 2;
};

struct EnergyOptions {
    std::optional<VoltageGrid> grid;
    int max_inner_iters = 20;
    double junction_cap_c = 100.0;
    bool prune = true; // first-pass incumbent skip + thermal-reuse cache
};

// ---------------------------------------------------------------------------
// Fixed pair / fixed clock thermal fixed point
// ---------------------------------------------------------------------------

struct FixedPointResult {
    TempField temps;
    double power_w = 0;
    double delay_s = 0;
    bool converged = false;
    int iterations = 0;
};

// Iterates power -> temperature at a fixed voltage pair and clock until the
// field moves less than delta_t. Used for baselines, LUT re-verification and
// report generation.
inline FixedPointResult converge_at_pair(const Design& design, const CharLib& lib,
                                         const ThermalModel& model, double t_amb,
                                         const VoltagePair& pair, double clock_s, double delta_t,
                                         int max_iters = 20, double junction_cap_c = 100.0) {
    FixedPointResult r;
    r.temps = TempField::uniform(design.rows(), design.cols(), t_amb);
    for (int it = 1; it <= max_iters; ++it) {
        r.iterations = it;
        const PowerField pf = tile_powers(design, r.temps, pair, clock_s, lib);
        const TempField next = solve_steady(model, pf, t_amb);
        const double d = next.max_abs_diff(r.temps);
        r.temps = next;
        if (r.temps.max() > junction_cap_c) {
            std::ostringstream os;
            os << "junction temperature " << r.temps.max() << " degC exceeds the " << junction_cap_c
               << " degC cap at (" << pair.core_mv << " mV, " << pair.bram_mv << " mV)";
            throw JunctionCapError(os.str(), r.temps.max());
        }
        if (d <= delta_t) {
            r.converged = true;
            break;
        }
    }
    r.power_w = total_power(tile_powers(design, r.temps, pair, clock_s, lib));
    r.delay_s = design_delay(design, r.temps, pair, lib).delay_s;
    return r;
}

// ---------------------------------------------------------------------------
// Voltage selection (fixed clock)
// ---------------------------------------------------------------------------

namespace detail {

struct SearchHit {
    VoltagePair pair;
    double power_w = 0;
    bool found = false;
};

// Constrained minimum-power scan over an explicit candidate set.
template <typename CoreRange, typename BramRange>
SearchHit scan_candidates(const Design& design, const CharLib& lib, const TempField& temps,
                          double constraint_s, double clock_s, const CoreRange& cores,
                          const BramRange& brams) {
    SearchHit best;
    for (int c : cores)
        for (int b : brams) {
            const VoltagePair pair{c, b};
            if (design_delay(design, temps, pair, lib).delay_s > constraint_s) continue;
            const double p = total_power(tile_powers(design, temps, pair, clock_s, lib));
            if (!best.found || better_candidate(p, pair, best.power_w, best.pair)) {
                best.pair = pair;
                best.power_w = p;
                best.found = true;
            }
        }
    return best;
}

inline std::vector<int> window(const std::vector<int>& grid, int center, int steps) {
    auto it = std::lower_bound(grid.begin(), grid.end(), center);
    const long idx = it - grid.begin();
    std::vector<int> out;
    for (long i = std::max(0L, idx - steps); i < std::min<long>(grid.size(), idx + steps + 1); ++i)
        out.push_back(grid[i]);
    return out;
}

// True when the winning value sits at the edge of the search window while the
// window itself is strictly inside the grid -- i.e. a better point might lie
// just beyond, so the caller must re-expand to the full grid.
inline bool clipped_at_window_edge(const std::vector<int>& grid, const std::vector<int>& win,
                                   int value) {
    if (value == win.front() && win.front() != grid.front()) return true;
    if (value == win.back() && win.back() != grid.back()) return true;
    return false;
}

inline OptResult run_voltage_selection(const Design& design, const CharLib& lib,
                                       const ThermalConfig& thermal_cfg, double t_amb,
                                       double delta_t, double constraint_s,
                                       const SelectOptions& opts, bool use_neighborhood) {
    if (!(delta_t > 0)) throw ValidationError("delta_t must be > 0");
    if (!(constraint_s > 0)) throw InfeasibleError("timing constraint must be > 0");
    if (t_amb < lib.meta().t_min || t_amb > lib.meta().t_max)
        throw ValidationError("ambient temperature outside the characterized range");

    const VoltageGrid grid = opts.grid ? *opts.grid : VoltageGrid::from_lib(lib);
    const double clock_s = opts.clock_override_s.value_or(constraint_s);
    const ThermalModel model = calibrate(thermal_cfg, design);

    OptResult res;
    res.temps = TempField::uniform(design.rows(), design.cols(), t_amb);
    res.clock_period_s = clock_s;

    std::optional<VoltagePair> prev;
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        res.iterations = iter;

        SearchHit hit;
        if (!use_neighborhood || !prev) {
            hit = scan_candidates(design, lib, res.temps, constraint_s, clock_s, grid.core_mv,
                                  grid.bram_mv);
            ++res.stats.full_searches;
        } else {
            const auto cores = window(grid.core_mv, prev->core_mv, opts.neighborhood_steps);
            const auto brams = window(grid.bram_mv, prev->bram_mv, opts.neighborhood_steps);
            hit = scan_candidates(design, lib, res.temps, constraint_s, clock_s, cores, brams);
            ++res.stats.neighborhood_searches;
            const bool suspicious =
                !hit.found || clipped_at_window_edge(grid.core_mv, cores, hit.pair.core_mv) ||
                clipped_at_window_edge(grid.bram_mv, brams, hit.pair.bram_mv);
            if (suspicious) {
                hit = scan_candidates(design, lib, res.temps, constraint_s, clock_s, grid.core_mv,
                                      grid.bram_mv);
                ++res.stats.full_searches;
            }
        }

        if (!hit.found) {
            const VoltagePair nominal = grid.nominal();
            const double d_nom = design_delay(design, res.temps, nominal, lib).delay_s;
            std::ostringstream os;
            os << "no voltage pair meets the " << constraint_s
               << " s constraint; nominal rails achieve " << d_nom << " s at the current "
               << "temperature field";
            throw InfeasibleError(os.str());
        }

        const PowerField pf = tile_powers(design, res.temps, hit.pair, clock_s, lib);
        const TempField next = solve_steady(model, pf, t_amb);
        ++res.stats.thermal_solves;
        const double dt = next.max_abs_diff(res.temps);
        res.temps = next;
        res.pair = hit.pair;
        prev = hit.pair;
        res.trace.push_back({iter, hit.pair, hit.power_w, dt, res.temps.max()});

        if (res.temps.max() > opts.junction_cap_c) {
            std::ostringstream os;
            os << "junction temperature " << res.temps.max() << " degC exceeds the "
               << opts.junction_cap_c << " degC cap at the minimum-power feasible pair ("
               << hit.pair.core_mv << " mV, " << hit.pair.bram_mv << " mV)";
            throw JunctionCapError(os.str(), res.temps.max());
        }

        // Converged only once the field is stationary AND the pair chosen under
        // the previous field still meets timing under the updated one.
        if (dt <= delta_t &&
            design_delay(design, res.temps, hit.pair, lib).delay_s <= constraint_s) {
            res.converged = true;
            break;
        }
        if (iter == opts.max_iters) res.converged = false; // best-so-far, flagged
    }

    res.delay_s = design_delay(design, res.temps, res.pair, lib).delay_s;
    res.total_power_w = total_power(tile_powers(design, res.temps, res.pair, clock_s, lib));
    res.energy_per_cycle_j = res.total_power_w * clock_s;
    res.feasible = res.delay_s <= constraint_s && res.temps.max() <= opts.junction_cap_c;
    return res;
}

} // namespace detail

// Thermal-aware voltage selection at a fixed clock. Iterates constrained
// minimum-power search against the steady-state thermal response until the
// temperature field is stationary. The first iteration scans the full
// |V_core| x |V_bram| grid; later iterations scan a +/-2-step window around
// the previous solution and re-expand to the full grid whenever the window
// optimum lands on the window's own (non-grid) edge.
inline OptResult select_voltages(const Design& design, const CharLib& lib,
                                 const ThermalConfig& thermal_cfg, double t_amb, double delta_t,
                                 double constraint_s, const SelectOptions& opts = {}) {
    return detail::run_voltage_selection(design, lib, thermal_cfg, t_amb, delta_t, constraint_s,
                                         opts, /*use_neighborhood=*/true);
}

// Test oracle: identical contract, but every iteration scans the full grid.
inline OptResult brute_force_reference(const Design& design, const CharLib& lib,
                                       const ThermalConfig& thermal_cfg, double t_amb,
                                       double delta_t, double constraint_s,
                                       const SelectOptions& opts = {}) {
    return detail::run_voltage_selection(design, lib, thermal_cfg, t_amb, delta_t, constraint_s,
                                         opts, /*use_neighborhood=*/false);
}

// ---------------------------------------------------------------------------
// Minimum-energy optimization (free clock)
// ---------------------------------------------------------------------------

// Energy per cycle when the same operating point is clocked at `clock_s`:
// leakage power bills for the full period, switching energy does not care.
inline double energy_at_clock(const Design& design, const CharLib& lib, const TempField& temps,
                              const VoltagePair& pair, double clock_s) {
    return total_power(tile_powers(design, temps, pair, clock_s, lib)) * clock_s;
}

// For every voltage pair, runs the clock-at-capacity thermal fixed point
// (clock = current design delay, powers at that clock, temperatures updated)
// and keeps the pair with minimum converged energy = d_max * total power.
//
// Two accelerations, both optional via EnergyOptions::prune:
//  (a) pairs whose pre-feedback energy already exceeds the incumbent are
//      skipped outright -- sound, because the feedback only heats things up;
//  (b) a thermal solve is reused when total power lands within 0.1/theta_JA W
//      of an already-solved case (a 0.1 degC mean-rise margin).
// Pairs are visited in ascending pre-feedback energy so the incumbent tightens
// as early as possible; with (a) the scan stops at the first pruned pair.
inline OptResult optimize_energy(const Design& design, const CharLib& lib,
                                 const ThermalConfig& thermal_cfg, double t_amb, double delta_t,
                                 const EnergyOptions& opts = {}) {
    if (!(delta_t > 0)) throw ValidationError("delta_t must be > 0");
    if (t_amb < lib.meta().t_min || t_amb > lib.meta().t_max)
        throw ValidationError("ambient temperature outside the characterized range");

    const VoltageGrid grid = opts.grid ? *opts.grid : VoltageGrid::from_lib(lib);
    const ThermalModel model = calibrate(thermal_cfg, design);
    const TempField init = TempField::uniform(design.rows(), design.cols(), t_amb);

    struct Candidate {
        VoltagePair pair;
        double first_energy_j;
    };
    std::vector<Candidate> order;
    order.reserve(grid.size());
    for (int c : grid.core_mv)
        for (int b : grid.bram_mv) {
            const VoltagePair pair{c, b};
            const double d0 = design_delay(design, init, pair, lib).delay_s;
            order.push_back({pair, energy_at_clock(design, lib, init, pair, d0)});
        }
    std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
        return better_candidate(a.first_energy_j, a.pair, b.first_energy_j, b.pair);
    });

    OptResult res;
    res.stats = {};
    std::map<double, TempField> solve_cache; // total power -> solved field
    const double cache_margin_w = 0.1 / thermal_cfg.theta_ja;

    auto solve_maybe_cached = [&](const PowerField& pf, double total_w) -> const TempField& {
        if (opts.prune) {
            auto it = solve_cache.lower_bound(total_w);
            double best_gap = std::numeric_limits<double>::infinity();
            auto best = solve_cache.end();
            if (it != solve_cache.end() && it->first - total_w < best_gap) {
                best_gap = it->first - total_w;
                best = it;
            }
            if (it != solve_cache.begin()) {
                auto lo = std::prev(it);
                if (total_w - lo->first < best_gap) {
                    best_gap = total_w - lo->first;
                    best = lo;
                }
            }
            if (best != solve_cache.end() && best_gap <= cache_margin_w) {
                ++res.stats.cache_hits;
                return best->second;
            }
        }
        TempField solved = solve_steady(model, pf, t_amb);
        ++res.stats.thermal_solves;
        return solve_cache.emplace(total_w, std::move(solved)).first->second;
    };

    double best_energy = std::numeric_limits<double>::infinity();
    bool have_best = false;
    int junction_skipped = 0, nonconverged = 0;
    std::vector<TraceRow> best_trace;

    for (const Candidate& cand : order) {
        if (opts.prune && have_best && cand.first_energy_j > best_energy) {
            // Sorted ascending: everything from here on is at least this bad
            // before feedback, and feedback only makes it worse.
            res.stats.pairs_pruned +=
                static_cast<long>(&order.back() - &cand) + 1;
            break;
        }

        TempField temps = init;
        std::vector<TraceRow> trace;
        bool converged = false, junction = false;
        double d_max = 0;
        for (int it = 1; it <= opts.max_inner_iters; ++it) {
            d_max = design_delay(design, temps, cand.pair, lib).delay_s;
            const PowerField pf = tile_powers(design, temps, cand.pair, d_max, lib);
            const double total_w = total_power(pf);
            const TempField& next = solve_maybe_cached(pf, total_w);
            const double dt = next.max_abs_diff(temps);
            temps = next;
            trace.push_back({it, cand.pair, total_w, dt, temps.max()});
            if (temps.max() > opts.junction_cap_c) {
                junction = true;
                break;
            }
            if (dt <= delta_t) {
                converged = true;
                break;
            }
        }
        if (junction) {
            ++junction_skipped;
            continue;
        }
        if (!converged) {
            ++nonconverged;
            continue;
        }

        d_max = design_delay(design, temps, cand.pair, lib).delay_s;
        const double power_w = total_power(tile_powers(design, temps, cand.pair, d_max, lib));
        const double energy = power_w * d_max;
        ++res.stats.pairs_evaluated;
        res.evaluated.push_back(
            {cand.pair, d_max, energy, power_w, static_cast<int>(trace.size()), temps});

        if (!have_best || better_candidate(energy, cand.pair, best_energy, res.pair)) {
            have_best = true;
            best_energy = energy;
            res.pair = cand.pair;
            res.temps = temps;
            res.total_power_w = power_w;
            res.delay_s = d_max;
            res.clock_period_s = d_max;
            res.energy_per_cycle_j = energy;
            res.iterations = static_cast<int>(trace.size());
            best_trace = trace;
        }
    }

    if (!have_best) {
        if (junction_skipped > 0 && junction_skipped + nonconverged == static_cast<int>(order.size()))
            throw JunctionCapError("junction cap exceeded at every voltage pair", 0.0);
        if (nonconverged > 0)
            throw ConvergenceError("energy optimization: no voltage pair reached a steady state");
        throw InfeasibleError("energy optimization found no usable voltage pair");
    }
    res.trace = std::move(best_trace);
    res.converged = true;
    res.feasible = true;
    return res;
}

// ---------------------------------------------------------------------------
// Voltage over-scaling
// ---------------------------------------------------------------------------

struct PathViolation {
    std::uint32_t path_id = 0;
    double deficit_s = 0; // delay beyond d_worst at the converged state
};

struct OverscalePoint {
    double beta = 1.0;
    OptResult result;
    std::vector<PathViolation> violations;
};

// Re-runs voltage selection with the timing condition relaxed to
// beta * d_worst while the clock (and therefore dynamic power) stays at
// d_worst: frequency is not lowered, timing violations are tolerated. The
// violation report lists every path slower than d_worst at the converged
// state -- the hook for downstream error models.
inline std::vector<OverscalePoint> overscale_sweep(const Design& design, const CharLib& lib,
                                                   const ThermalConfig& thermal_cfg, double t_amb,
                                                   double delta_t,
                                                   const std::vector<double>& betas,
                                                   double guardband = 1.0,
                                                   const SelectOptions& base_opts = {}) {
    const double d_worst = worst_case_delay(design, lib, guardband);
    std::vector<OverscalePoint> out;
    out.reserve(betas.size());
    for (double beta : betas) {
        if (beta < 1.0) throw ValidationError("over-scaling factor must be >= 1");
        SelectOptions opts = base_opts;
        opts.clock_override_s = d_worst;
        OverscalePoint pt;
        pt.beta = beta;
        pt.result =
            select_voltages(design, lib, thermal_cfg, t_amb, delta_t, beta * d_worst, opts);
        for (const TimingPath& p : design.paths()) {
            const double d = path_delay(design, p, pt.result.temps, pt.result.pair, lib);
            if (d > d_worst) pt.violations.push_back({p.id, d - d_worst});
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Temperature-indexed voltage look-up table
// ---------------------------------------------------------------------------

struct VidLutEntry {
    double t_c = 0;
    VoltagePair pair;
};

struct VidLut {
    double margin_c = 5.0;
    std::vector<VidLutEntry> entries; // keys strictly increasing
};

// One voltage-selection run per temperature key, each solved at key + margin
// so sensor error and spatial gradients are absorbed. Every entry is then
// re-verified from scratch at its key + margin before the table is returned.
inline VidLut build_vid_lut(const Design& design, const CharLib& lib,
                            const ThermalConfig& thermal_cfg, const std::vector<double>& keys,
                            double delta_t, double margin_c = 5.0,
                            const SelectOptions& base_opts = {}, double guardband = 1.0) {
    if (keys.empty()) throw ValidationError("LUT needs at least one temperature key");
    for (std::size_t i = 0; i + 1 < keys.size(); ++i)
        if (!(keys[i] < keys[i + 1]))
            throw ValidationError("LUT temperature keys must be strictly increasing");
    if (margin_c < 0) throw ValidationError("LUT thermal margin must be >= 0");

    const double d_worst = worst_case_delay(design, lib, guardband);
    const ThermalModel model = calibrate(thermal_cfg, design);

    VidLut lut;
    lut.margin_c = margin_c;
    for (double key : keys) {
        const double t_eff = key + margin_c;
        if (t_eff < lib.meta().t_min || t_eff > lib.meta().t_max)
            throw InfeasibleError("LUT key " + std::to_string(key) + " infeasible: key + margin " +
                                  std::to_string(t_eff) + " degC is outside the characterized range");
        OptResult r;
        try {
            r = select_voltages(design, lib, thermal_cfg, t_eff, delta_t, d_worst, base_opts);
            // Independent re-check of the stored pair at this key.
            const FixedPointResult chk =
                converge_at_pair(design, lib, model, t_eff, r.pair, d_worst, delta_t,
                                 base_opts.max_iters, base_opts.junction_cap_c);
            if (chk.delay_s > d_worst)
                throw Error("stored pair misses timing on re-verification");
        } catch (const Error& e) {
            throw InfeasibleError("LUT key " + std::to_string(key) + " infeasible: " + e.what());
        }
        lut.entries.push_back({key, r.pair});
    }
    return lut;
}

} // namespace voltherm
