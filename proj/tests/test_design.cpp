#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "voltherm/design.hpp"
#include "test_helpers.hpp"

using namespace voltherm;
using Catch::Matchers::ContainsSubstring;

namespace {

nlohmann::json minimal_design_json() {
    return nlohmann::json::parse(R"({
        "grid": {"m": 1, "n": 1},
        "tiles": [{"row": 0, "col": 0, "kind": "CLB",
                   "inventory": {"LUT": 1}, "alpha": 0.2}],
        "paths": [{"id": 0, "segments": [{"kind": "LUT", "row": 0, "col": 0}]}]
    })");
}

} // namespace

TEST_CASE("minimal single-tile design loads") {
    const Design d = design_from_json(minimal_design_json());
    REQUIRE(d.rows() == 1);
    REQUIRE(d.cols() == 1);
    REQUIRE(d.tile(0, 0).count(ResourceKind::LUT) == 1);
    REQUIRE(d.paths().size() == 1);
}

TEST_CASE("dangling path reference is rejected") {
    auto j = minimal_design_json();
    j["grid"] = {{"m", 4}, {"n", 4}};
    j["paths"][0]["segments"][0] = {{"kind", "LUT"}, {"row", 5}, {"col", 5}};
    REQUIRE_THROWS_MATCHES(design_from_json(j), ValidationError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("(5, 5)")));
}

TEST_CASE("path using a resource the tile does not hold is rejected") {
    auto j = minimal_design_json();
    j["paths"][0]["segments"][0]["kind"] = "SB";
    REQUIRE_THROWS_MATCHES(design_from_json(j), ValidationError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("SB")));
}

TEST_CASE("per-tile activities default to the attenuated primary activity") {
    auto j = minimal_design_json();
    j["grid"] = {{"m", 2}, {"n", 2}};
    j["tiles"] = nlohmann::json::array();
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            j["tiles"].push_back({{"row", r},
                                  {"col", c},
                                  {"kind", "CLB"},
                                  {"inventory", {{"LUT", 4}}}});
    j["primary_alpha"] = 0.1;
    const Design d = design_from_json(j);
    for (const Tile& t : d.tiles())
        REQUIRE_THAT(t.alpha, Catch::Matchers::WithinAbs(0.05, 1e-15));
}

TEST_CASE("missing activity without a primary activity is an error") {
    auto j = minimal_design_json();
    j["tiles"][0].erase("alpha");
    REQUIRE_THROWS_AS(design_from_json(j), ValidationError);
    j["primary_alpha"] = 0.3;
    REQUIRE_NOTHROW(design_from_json(j));
}

TEST_CASE("invalid tiles are rejected") {
    auto j = minimal_design_json();
    j["tiles"][0]["alpha"] = 1.5;
    REQUIRE_THROWS_AS(design_from_json(j), ValidationError);

    j = minimal_design_json();
    j["tiles"][0]["inventory"]["BRAM"] = 1; // BRAM outside a BRAM column
    REQUIRE_THROWS_AS(design_from_json(j), ValidationError);

    j = minimal_design_json();
    j["tiles"].push_back(j["tiles"][0]); // duplicate coordinates
    REQUIRE_THROWS_AS(design_from_json(j), ValidationError);

    j = minimal_design_json();
    j["paths"] = nlohmann::json::array(); // no timing paths
    REQUIRE_THROWS_AS(design_from_json(j), ValidationError);
}

TEST_CASE("unparseable design documents raise ParseError") {
    const auto dir = vt_test::scratch_dir("design_garbage");
    std::ofstream(dir / "bad.json") << "{]";
    REQUIRE_THROWS_AS(load_design(dir / "bad.json"), ParseError);
    std::ofstream(dir / "empty.json") << "";
    REQUIRE_THROWS_AS(load_design(dir / "empty.json"), ParseError);
}

TEST_CASE("synthetic designs are deterministic per seed") {
    const Design a = gen_synthetic_design(4, 4, 10, 7);
    const Design b = gen_synthetic_design(4, 4, 10, 7);
    REQUIRE(design_to_json(a) == design_to_json(b));
    const Design c = gen_synthetic_design(4, 4, 10, 8);
    REQUIRE(design_to_json(a) != design_to_json(c));
}

TEST_CASE("degenerate synthetic design: single tile, single path") {
    const Design d = gen_synthetic_design(1, 1, 1, 123);
    REQUIRE(d.tile_count() == 1);
    REQUIRE(d.paths().size() == 1);
    REQUIRE_FALSE(d.paths()[0].segments.empty());
}

TEST_CASE("large synthetic designs mix BRAM and non-BRAM paths") {
    const Design d = gen_synthetic_design(8, 8, 50, 1);
    bool with_bram = false, without_bram = false;
    for (const TimingPath& p : d.paths()) {
        bool has = false;
        for (const PathSegment& s : p.segments) has = has || s.kind == ResourceKind::BRAM;
        (has ? with_bram : without_bram) = true;
    }
    REQUIRE(with_bram);
    REQUIRE(without_bram);
}

TEST_CASE("every generated design passes validation unchanged") {
    // Constructors validate; re-validate explicitly across a small sweep.
    for (int m : {1, 2, 5, 8})
        for (int n : {1, 3, 6})
            for (std::uint64_t seed : {0ULL, 11ULL}) {
                const Design d = gen_synthetic_design(m, n, 12, seed);
                REQUIRE_NOTHROW(d.validate());
            }
}

TEST_CASE("design document round trip preserves content") {
    const Design d = gen_synthetic_design(5, 7, 15, 3);
    const auto dir = vt_test::scratch_dir("design_roundtrip");
    save_design(d, dir / "d.json");
    const Design back = load_design(dir / "d.json");
    REQUIRE(design_to_json(back) == design_to_json(d));
}

TEST_CASE("generator rejects bad arguments") {
    REQUIRE_THROWS_AS(gen_synthetic_design(0, 4, 5, 0), ValidationError);
    REQUIRE_THROWS_AS(gen_synthetic_design(4, 4, 0, 0), ValidationError);
}
