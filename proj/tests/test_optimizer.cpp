#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "voltherm/optimizer.hpp"
#include "test_helpers.hpp"

using namespace voltherm;
using Catch::Matchers::ContainsSubstring;

namespace {

const CharLib& lib0() {
    static CharLib lib = synth_charlib(0);
    return lib;
}

ThermalConfig default_thermal() { return ThermalConfig{}; }

bool same_trace(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].iteration != b[i].iteration || !(a[i].pair == b[i].pair) ||
            a[i].power_w != b[i].power_w || a[i].max_delta_t_c != b[i].max_delta_t_c ||
            a[i].max_t_c != b[i].max_t_c)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("zero thermal margin forces the nominal pair") {
    const Design d = vt_test::make_two_rail_design();
    const double d_worst = worst_case_delay(d, lib0());

    // Find the ambient whose converged junction sits just below the 100 degC
    // cap: probe once to measure the (nearly load-independent) self-heating.
    const double probe_amb = 99.0;
    const OptResult probe =
        select_voltages(d, lib0(), default_thermal(), probe_amb, 0.1, d_worst);
    const double rise = probe.temps.max() - probe_amb;
    const double t_amb = 99.999 - rise;

    const OptResult res = select_voltages(d, lib0(), default_thermal(), t_amb, 0.1, d_worst);
    REQUIRE_THAT(res.temps.max(), Catch::Matchers::WithinAbs(99.999, 1e-3));
    REQUIRE(res.pair == VoltagePair{800, 950});
    REQUIRE(res.feasible);
    REQUIRE(res.converged);
}

TEST_CASE("fast search equals the exhaustive reference on random instances") {
    for (int i = 0; i < 5; ++i) {
        const Design d = gen_synthetic_design(3 + i % 3, 3 + (i * 2) % 4, 8 + 3 * i, 100 + i);
        const double t_amb = (i % 2) ? 40.0 : 25.0;
        const double d_worst = worst_case_delay(d, lib0());
        const OptResult fast =
            select_voltages(d, lib0(), default_thermal(), t_amb, 0.1, d_worst);
        const OptResult ref =
            brute_force_reference(d, lib0(), default_thermal(), t_amb, 0.1, d_worst);
        REQUIRE(fast.pair == ref.pair);
        REQUIRE(fast.total_power_w == ref.total_power_w);
        REQUIRE(fast.temps.t == ref.temps.t);
    }
}

TEST_CASE("without BRAM resources the memory rail ties resolve to nominal") {
    // All V_bram levels yield identical power, so the margin-preferring
    // tie-break must keep the memory rail at its nominal 950 mV.
    const Design d = vt_test::make_clb_design(3, 3, 0.2);
    const double d_worst = worst_case_delay(d, lib0());
    const OptResult res = select_voltages(d, lib0(), default_thermal(), 40.0, 0.1, d_worst);
    REQUIRE(res.pair.bram_mv == 950);
    REQUIRE(res.pair.core_mv < 800); // margin was actually spent on the core rail
}

TEST_CASE("unsatisfiable constraints raise the infeasible error") {
    const Design d = gen_synthetic_design(3, 3, 6, 4);
    REQUIRE_THROWS_AS(select_voltages(d, lib0(), default_thermal(), 40.0, 0.1, 1e-15),
                      InfeasibleError);
    REQUIRE_THROWS_AS(brute_force_reference(d, lib0(), default_thermal(), 40.0, 0.1, 0.0),
                      InfeasibleError);
}

TEST_CASE("overheating at the best feasible pair raises the junction-cap error") {
    const Design d = gen_synthetic_design(6, 6, 20, 0);
    ThermalConfig cfg;
    cfg.theta_ja = 12.0; // still-air package; self-heating crosses the cap
    const double d_worst = worst_case_delay(d, lib0());
    REQUIRE_THROWS_AS(select_voltages(d, lib0(), cfg, 99.9, 0.1, d_worst), JunctionCapError);
}

TEST_CASE("hitting the iteration cap returns best-so-far flagged, not an error") {
    const Design d = gen_synthetic_design(6, 6, 20, 0);
    ThermalConfig cfg;
    cfg.theta_ja = 12.0; // self-heating ~0.4 degC: needs a second iteration
    const double d_worst = worst_case_delay(d, lib0());
    SelectOptions opts;
    opts.max_iters = 1;
    const OptResult res = select_voltages(d, lib0(), cfg, 60.0, 0.1, d_worst, opts);
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.iterations == 1);
    REQUIRE(res.trace.size() == 1);
    REQUIRE(res.trace[0].max_delta_t_c > 0.1);

    // The same instance converges once the cap is lifted.
    const OptResult ok = select_voltages(d, lib0(), cfg, 60.0, 0.1, d_worst);
    REQUIRE(ok.converged);
}

TEST_CASE("minimum energy cannot improve as the ambient climbs") {
    const Design d = gen_synthetic_design(4, 4, 12, 19);
    const OptResult cool = optimize_energy(d, lib0(), default_thermal(), 25.0, 0.1);
    const OptResult warm = optimize_energy(d, lib0(), default_thermal(), 60.0, 0.1);
    REQUIRE(cool.energy_per_cycle_j <= warm.energy_per_cycle_j);
}

TEST_CASE("selection results are deterministic including the trace") {
    const Design d = gen_synthetic_design(5, 5, 15, 77);
    const double d_worst = worst_case_delay(d, lib0());
    const OptResult a = select_voltages(d, lib0(), default_thermal(), 45.0, 0.1, d_worst);
    const OptResult b = select_voltages(d, lib0(), default_thermal(), 45.0, 0.1, d_worst);
    REQUIRE(a.pair == b.pair);
    REQUIRE(a.total_power_w == b.total_power_w);
    REQUIRE(a.temps.t == b.temps.t);
    REQUIRE(same_trace(a.trace, b.trace));
}

TEST_CASE("feasibility invariant holds at the converged state") {
    const Design d = gen_synthetic_design(4, 6, 18, 13);
    const double d_worst = worst_case_delay(d, lib0());
    for (double t_amb : {25.0, 60.0}) {
        const OptResult res = select_voltages(d, lib0(), default_thermal(), t_amb, 0.1, d_worst);
        REQUIRE(res.converged);
        REQUIRE(design_delay(d, res.temps, res.pair, lib0()).delay_s <= d_worst);
        REQUIRE(res.temps.max() <= 100.0);
        REQUIRE(res.iterations <= 8);
    }
}

// ---------------------------------------------------------------------------
// Energy optimization
// ---------------------------------------------------------------------------

TEST_CASE("energy search over a single-pair grid returns that pair") {
    const Design d = gen_synthetic_design(3, 3, 6, 1);
    EnergyOptions opts;
    opts.grid = VoltageGrid{{700}, {800}};
    const OptResult res = optimize_energy(d, lib0(), default_thermal(), 40.0, 0.1, opts);
    REQUIRE(res.pair == VoltagePair{700, 800});
    // Converged clock is the design delay at the converged temperatures.
    REQUIRE(res.clock_period_s ==
            design_delay(d, res.temps, res.pair, lib0()).delay_s);
    REQUIRE_THAT(res.energy_per_cycle_j,
                 Catch::Matchers::WithinRel(res.total_power_w * res.clock_period_s, 1e-15));
}

TEST_CASE("stretching the clock beyond capacity always wastes energy") {
    // Eq. 1 algebra: (P_lkg + P_dyn/a) * a * d = (a P_lkg + P_dyn) d. The
    // canonical numbers: 1 W + 1 W at 1 s, doubled clock -> 3 J > 2 J.
    auto energy_scaled = [](double p_lkg, double p_dyn, double d, double a) {
        return (p_lkg + p_dyn / a) * a * d;
    };
    REQUIRE(energy_scaled(1.0, 1.0, 1.0, 2.0) == 3.0);
    REQUIRE(energy_scaled(1.0, 1.0, 1.0, 1.0) == 2.0);

    const Design d = gen_synthetic_design(4, 4, 10, 21);
    const OptResult res = optimize_energy(d, lib0(), default_thermal(), 40.0, 0.1);
    for (const EvaluatedPair& e : res.evaluated) {
        const double base = energy_at_clock(d, lib0(), e.temps, e.pair, e.clock_s);
        REQUIRE(energy_at_clock(d, lib0(), e.temps, e.pair, 1.5 * e.clock_s) > base);
        REQUIRE(energy_at_clock(d, lib0(), e.temps, e.pair, 2.0 * e.clock_s) > base);
    }
}

TEST_CASE("pruned energy search agrees with the exhaustive one") {
    const Design d = gen_synthetic_design(4, 4, 12, 33);
    EnergyOptions pruned, full;
    pruned.prune = true;
    full.prune = false;
    const OptResult a = optimize_energy(d, lib0(), default_thermal(), 40.0, 0.1, pruned);
    const OptResult b = optimize_energy(d, lib0(), default_thermal(), 40.0, 0.1, full);
    REQUIRE_THAT(a.energy_per_cycle_j,
                 Catch::Matchers::WithinRel(b.energy_per_cycle_j, 0.005));
    REQUIRE(b.stats.thermal_solves >= 5 * std::max<long>(a.stats.thermal_solves, 1));
    REQUIRE(a.stats.pairs_pruned + a.stats.pairs_evaluated +
                static_cast<long>(a.stats.cache_hits) >=
            a.stats.pairs_evaluated); // stats are populated
}

// ---------------------------------------------------------------------------
// Over-scaling
// ---------------------------------------------------------------------------

TEST_CASE("beta = 1 reproduces plain voltage selection with no violations") {
    const Design d = gen_synthetic_design(4, 4, 12, 8);
    const double d_worst = worst_case_delay(d, lib0());
    const auto pts = overscale_sweep(d, lib0(), default_thermal(), 40.0, 0.1, {1.0});
    const OptResult plain = select_voltages(d, lib0(), default_thermal(), 40.0, 0.1, d_worst);
    REQUIRE(pts.size() == 1);
    REQUIRE(pts[0].result.pair == plain.pair);
    REQUIRE(pts[0].result.total_power_w == plain.total_power_w);
    REQUIRE(pts[0].violations.empty());
}

TEST_CASE("over-scaling sweep: monotone power and bounded deficits") {
    const Design d = gen_synthetic_design(5, 5, 16, 3);
    const double d_worst = worst_case_delay(d, lib0());
    const std::vector<double> betas = {1.0, 1.1, 1.2, 1.3, 1.4};
    const auto pts = overscale_sweep(d, lib0(), default_thermal(), 40.0, 0.1, betas);

    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        REQUIRE(pts[i + 1].result.total_power_w <= pts[i].result.total_power_w + 1e-15);

    for (const auto& pt : pts) {
        for (const PathViolation& v : pt.violations) {
            REQUIRE(v.deficit_s <= (pt.beta - 1.0) * d_worst + 1e-18);
            // Independent rescan of the reported path.
            const TimingPath* path = nullptr;
            for (const TimingPath& p : d.paths())
                if (p.id == v.path_id) path = &p;
            REQUIRE(path != nullptr);
            const double delay = path_delay(d, *path, pt.result.temps, pt.result.pair, lib0());
            REQUIRE_THAT(delay - d_worst, Catch::Matchers::WithinRel(v.deficit_s, 1e-12));
        }
        // Dynamic power stays billed at the original clock.
        REQUIRE(pt.result.clock_period_s == d_worst);
    }
    REQUIRE_THROWS_AS(overscale_sweep(d, lib0(), default_thermal(), 40.0, 0.1, {0.9}),
                      ValidationError);
}

TEST_CASE("deep over-scaling produces a nonempty violation report") {
    const Design d = gen_synthetic_design(5, 5, 16, 3);
    const double d_worst = worst_case_delay(d, lib0());
    const auto pts = overscale_sweep(d, lib0(), default_thermal(), 40.0, 0.1, {1.35});
    REQUIRE_FALSE(pts[0].violations.empty());
    for (const PathViolation& v : pts[0].violations)
        REQUIRE(v.deficit_s <= 0.35 * d_worst + 1e-18);
}

// ---------------------------------------------------------------------------
// VID look-up table
// ---------------------------------------------------------------------------

TEST_CASE("single-key LUT matches voltage selection at key + margin") {
    const Design d = gen_synthetic_design(4, 4, 10, 6);
    const double d_worst = worst_case_delay(d, lib0());
    const VidLut lut = build_vid_lut(d, lib0(), default_thermal(), {40.0}, 0.1, 5.0);
    const OptResult direct = select_voltages(d, lib0(), default_thermal(), 45.0, 0.1, d_worst);
    REQUIRE(lut.entries.size() == 1);
    REQUIRE(lut.entries[0].t_c == 40.0);
    REQUIRE(lut.entries[0].pair == direct.pair);
}

TEST_CASE("full-range LUT entries stay feasible when re-checked at key + margin") {
    const Design d = gen_synthetic_design(4, 4, 10, 6);
    const double d_worst = worst_case_delay(d, lib0());
    std::vector<double> keys;
    for (int t = 0; t <= 85; t += 5) keys.push_back(t);
    const VidLut lut = build_vid_lut(d, lib0(), default_thermal(), keys, 0.1, 5.0);
    REQUIRE(lut.entries.size() == keys.size());

    const ThermalModel model = calibrate(default_thermal(), d);
    for (std::size_t i = 0; i < lut.entries.size(); i += 6) {
        const auto& e = lut.entries[i];
        const auto chk =
            converge_at_pair(d, lib0(), model, e.t_c + lut.margin_c, e.pair, d_worst, 0.1);
        REQUIRE(chk.delay_s <= d_worst);
        REQUIRE(chk.temps.max() <= 100.0);
    }
}

TEST_CASE("optimized power cannot improve as the ambient climbs") {
    const Design d = gen_synthetic_design(4, 4, 10, 6);
    const double d_worst = worst_case_delay(d, lib0());
    const OptResult cool = select_voltages(d, lib0(), default_thermal(), 45.0, 0.1, d_worst);
    const OptResult warm = select_voltages(d, lib0(), default_thermal(), 70.0, 0.1, d_worst);
    REQUIRE(cool.total_power_w <= warm.total_power_w);
}

TEST_CASE("infeasible LUT keys are reported by name") {
    const Design d = gen_synthetic_design(3, 3, 6, 2);
    REQUIRE_THROWS_MATCHES(
        build_vid_lut(d, lib0(), default_thermal(), {96.0}, 0.1, 5.0), InfeasibleError,
        Catch::Matchers::MessageMatches(ContainsSubstring("96")));
    REQUIRE_THROWS_AS(build_vid_lut(d, lib0(), default_thermal(), {40.0, 40.0}, 0.1, 5.0),
                      ValidationError);
    REQUIRE_THROWS_AS(build_vid_lut(d, lib0(), default_thermal(), {}, 0.1, 5.0), ValidationError);
}
