#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "voltherm/analysis.hpp"
#include "test_helpers.hpp"

using namespace voltherm;

namespace {

const CharLib& lib0() {
    static CharLib lib = synth_charlib(0);
    return lib;
}

const VoltagePair kNominal{800, 950};

} // namespace

TEST_CASE("single-segment path delay equals the library lookup") {
    const Design d = vt_test::make_clb_design(1, 1);
    TimingPath p;
    p.id = 9;
    p.segments = {{ResourceKind::LUT, 0, 0}};
    const TempField temps = TempField::uniform(1, 1, 35.0);
    REQUIRE(path_delay(d, p, temps, kNominal, lib0()) ==
            delay_of(lib0(), ResourceKind::LUT, 0.80, 35.0));
}

TEST_CASE("path delay is additive over segments") {
    const Design d = vt_test::make_clb_design(1, 1);
    TimingPath p;
    p.segments = {{ResourceKind::SB, 0, 0}, {ResourceKind::SB, 0, 0}};
    const TempField temps = TempField::uniform(1, 1, 60.0);
    REQUIRE_THAT(path_delay(d, p, temps, kNominal, lib0()),
                 Catch::Matchers::WithinRel(
                     2.0 * delay_of(lib0(), ResourceKind::SB, 0.80, 60.0), 1e-15));
}

TEST_CASE("cooler tiles on a path strictly reduce its delay") {
    const Design d = vt_test::make_clb_design(2, 2);
    TimingPath p;
    p.segments = {{ResourceKind::SB, 0, 0},
                  {ResourceKind::CB, 0, 1},
                  {ResourceKind::LUT, 1, 0},
                  {ResourceKind::SB, 1, 1}};
    TempField mixed = TempField::uniform(2, 2, 80.0);
    mixed.at(0, 1) = 45.0; // one cool tile
    const TempField hot = TempField::uniform(2, 2, 80.0);

    // Independent scalar walk over the segments.
    double oracle_mixed = 0, oracle_hot = 0;
    for (const PathSegment& s : p.segments) {
        const double rail = rail_voltage(s.kind, kNominal);
        oracle_mixed += delay_of(lib0(), s.kind, rail, mixed.at(s.row, s.col));
        oracle_hot += delay_of(lib0(), s.kind, rail, 80.0);
    }
    const double got_mixed = path_delay(d, p, mixed, kNominal, lib0());
    const double got_hot = path_delay(d, p, hot, kNominal, lib0());
    REQUIRE_THAT(got_mixed, Catch::Matchers::WithinRel(oracle_mixed, 1e-15));
    REQUIRE_THAT(got_hot, Catch::Matchers::WithinRel(oracle_hot, 1e-15));
    REQUIRE(got_mixed < got_hot);
}

TEST_CASE("design delay returns the max path and breaks ties by lowest id") {
    const Design d = vt_test::make_clb_design(1, 1);
    const TempField temps = TempField::uniform(1, 1, 40.0);
    const DelayResult r = design_delay(d, temps, kNominal, lib0());
    REQUIRE(r.critical_path_id == 0);
    REQUIRE(r.delay_s == path_delay(d, d.paths()[0], temps, kNominal, lib0()));

    // Two identical paths with ids 3 and 1: the tie goes to 1.
    Tile t;
    t.row = 0;
    t.col = 0;
    t.kind = TileKind::CLB;
    t.count(ResourceKind::LUT) = 2;
    t.alpha = 0.1;
    TimingPath a, b;
    a.id = 3;
    a.segments = {{ResourceKind::LUT, 0, 0}};
    b.id = 1;
    b.segments = {{ResourceKind::LUT, 0, 0}};
    const Design tie(1, 1, {t}, {a, b});
    REQUIRE(design_delay(tie, temps, kNominal, lib0()).critical_path_id == 1);
}

TEST_CASE("critical path flips from routing-bound to logic-bound at low core voltage") {
    const Design d = vt_test::make_cp_flip_design();
    const TempField temps = TempField::uniform(1, 2, 40.0);

    auto oracle = [&](const TimingPath& p, const VoltagePair& v) {
        double acc = 0;
        for (const PathSegment& s : p.segments)
            acc += delay_of(lib0(), s.kind, rail_voltage(s.kind, v), temps.at(s.row, s.col));
        return acc;
    };
    const VoltagePair floor_core{550, 950};
    REQUIRE(oracle(d.paths()[0], kNominal) > oracle(d.paths()[1], kNominal));
    REQUIRE(oracle(d.paths()[0], floor_core) < oracle(d.paths()[1], floor_core));

    REQUIRE(design_delay(d, temps, kNominal, lib0()).critical_path_id == 0);
    REQUIRE(design_delay(d, temps, floor_core, lib0()).critical_path_id == 1);
}

TEST_CASE("worst-case delay applies the guardband multiplier") {
    const Design d = vt_test::make_clb_design(2, 2);
    const double raw = worst_case_delay(d, lib0(), 1.0);
    REQUIRE_THAT(worst_case_delay(d, lib0(), 1.36), Catch::Matchers::WithinRel(1.36 * raw, 1e-15));
    REQUIRE_THROWS_AS(worst_case_delay(d, lib0(), 0.9), ValidationError);
}

TEST_CASE("worst-case delay dominates every in-range operating point") {
    const Design d = gen_synthetic_design(4, 4, 12, 5);
    const double wc = worst_case_delay(d, lib0());
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ut(0.0, 100.0);
    for (int i = 0; i < 50; ++i) {
        TempField temps = TempField::uniform(4, 4, 0.0);
        for (double& t : temps.t) t = ut(rng);
        REQUIRE(design_delay(d, temps, kNominal, lib0()).delay_s <= wc);
    }
}

TEST_CASE("tile powers: empty tiles contribute nothing") {
    std::vector<Tile> tiles(2);
    tiles[0].row = 0;
    tiles[0].col = 0;
    tiles[0].kind = TileKind::CLB;
    tiles[0].count(ResourceKind::LUT) = 5;
    tiles[0].alpha = 0.3;
    tiles[1].row = 0;
    tiles[1].col = 1;
    tiles[1].kind = TileKind::EMPTY;
    TimingPath p;
    p.segments = {{ResourceKind::LUT, 0, 0}};
    const Design d(1, 2, tiles, {p});
    const TempField temps = TempField::uniform(1, 2, 50.0);
    const PowerField pf = tile_powers(d, temps, kNominal, 5e-9, lib0());
    REQUIRE(pf.leakage[1] == 0.0);
    REQUIRE(pf.dynamic[1] == 0.0);
    REQUIRE(pf.leakage[0] > 0.0);
    REQUIRE(pf.dynamic[0] > 0.0);
}

TEST_CASE("doubling the clock period halves dynamic power and fixes leakage") {
    const Design d = vt_test::make_clb_design(2, 3, 0.25);
    const TempField temps = TempField::uniform(2, 3, 55.0);
    const PowerField a = tile_powers(d, temps, kNominal, 4e-9, lib0());
    const PowerField b = tile_powers(d, temps, kNominal, 8e-9, lib0());
    for (std::size_t i = 0; i < a.leakage.size(); ++i) {
        REQUIRE(a.leakage[i] == b.leakage[i]);
        REQUIRE_THAT(a.dynamic[i], Catch::Matchers::WithinRel(2.0 * b.dynamic[i], 1e-14));
    }
}

TEST_CASE("tile powers match an independent flat sum over (tile, kind) pairs") {
    const Design d = gen_synthetic_design(5, 5, 10, 9);
    TempField temps = TempField::uniform(5, 5, 20.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ut(10.0, 90.0);
    for (double& t : temps.t) t = ut(rng);
    const double clock = 6e-9;
    const VoltagePair v{700, 850};

    const PowerField pf = tile_powers(d, temps, v, clock, lib0());
    double flat = 0;
    for (const Tile& tile : d.tiles())
        for (ResourceKind k : kAllKinds) {
            if (tile.count(k) == 0) continue;
            const double rail = rail_voltage(k, v);
            flat += tile.count(k) * leakage_of(lib0(), k, rail, temps.at(tile.row, tile.col));
            flat += tile.count(k) * switch_energy_of(lib0(), k, rail, tile.alpha) / clock;
        }
    REQUIRE_THAT(total_power(pf), Catch::Matchers::WithinRel(flat, 1e-12));
}

TEST_CASE("total power of a zero field is zero") {
    REQUIRE(total_power(PowerField::zeros(3, 3)) == 0.0);
    PowerField one = PowerField::zeros(1, 1);
    one.leakage[0] = 0.25;
    one.dynamic[0] = 0.5;
    REQUIRE(total_power(one) == 0.75);
}

TEST_CASE("delay rises with temperature and falls with voltage") {
    const Design d = gen_synthetic_design(4, 4, 15, 2);
    const TempField base = TempField::uniform(4, 4, 50.0);
    const double d0 = design_delay(d, base, kNominal, lib0()).delay_s;

    std::mt19937 rng(17);
    for (int i = 0; i < 20; ++i) {
        TempField hotter = base;
        const std::size_t idx = rng() % hotter.t.size();
        hotter.t[idx] += 30.0;
        REQUIRE(design_delay(d, hotter, kNominal, lib0()).delay_s >= d0);
    }
    REQUIRE(design_delay(d, base, VoltagePair{700, 950}, lib0()).delay_s > d0);
    REQUIRE(design_delay(d, base, VoltagePair{800, 800}, lib0()).delay_s >= d0);
}

TEST_CASE("leakage tracks temperature and voltage; dynamic power ignores temperature") {
    const Design d = vt_test::make_clb_design(2, 2, 0.3);
    const TempField cool = TempField::uniform(2, 2, 30.0);
    const TempField warm = TempField::uniform(2, 2, 70.0);
    const PowerField a = tile_powers(d, cool, kNominal, 5e-9, lib0());
    const PowerField b = tile_powers(d, warm, kNominal, 5e-9, lib0());
    const PowerField c = tile_powers(d, cool, VoltagePair{700, 870}, 5e-9, lib0());
    for (std::size_t i = 0; i < a.leakage.size(); ++i) {
        REQUIRE(a.dynamic[i] == b.dynamic[i]);
        REQUIRE(b.leakage[i] > a.leakage[i]);
        REQUIRE(c.leakage[i] < a.leakage[i]);
    }
}

TEST_CASE("dynamic energy per cycle is clock-invariant") {
    const Design d = vt_test::make_clb_design(3, 3, 0.3);
    const TempField temps = TempField::uniform(3, 3, 45.0);
    double ref = -1;
    for (double clock : {1e-9, 3e-9, 10e-9, 42e-9}) {
        const PowerField pf = tile_powers(d, temps, kNominal, clock, lib0());
        double dyn = 0;
        for (double x : pf.dynamic) dyn += x;
        const double energy = dyn * clock;
        if (ref < 0) ref = energy;
        REQUIRE_THAT(energy, Catch::Matchers::WithinRel(ref, 1e-12));
    }
}

TEST_CASE("bad clock period is rejected") {
    const Design d = vt_test::make_clb_design(1, 1);
    const TempField temps = TempField::uniform(1, 1, 40.0);
    REQUIRE_THROWS_AS(tile_powers(d, temps, kNominal, 0.0, lib0()), ValidationError);
}
