#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "voltherm/charlib.hpp"
#include "voltherm/design.hpp"
#include "voltherm/errors.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Fields over the tile grid
// ---------------------------------------------------------------------------

struct TempField {
    int rows = 0;
    int cols = 0;
    std::vector<double> t; // degC, row-major

    static TempField uniform(int rows, int cols, double value) {
        TempField f;
        f.rows = rows;
        f.cols = cols;
        f.t.assign(static_cast<std::size_t>(rows) * cols, value);
        return f;
    }

    double at(int r, int c) const { return t[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return t[static_cast<std::size_t>(r) * cols + c]; }
    double max() const { return *std::max_element(t.begin(), t.end()); }

    double max_abs_diff(const TempField& o) const {
        double d = 0;
        for (std::size_t i = 0; i < t.size(); ++i) d = std::max(d, std::abs(t[i] - o.t[i]));
        return d;
    }
};

struct PowerField {
    int rows = 0;
    int cols = 0;
    std::vector<double> leakage; // W per tile
    std::vector<double> dynamic; // W per tile

    static PowerField zeros(int rows, int cols) {
        PowerField f;
        f.rows = rows;
        f.cols = cols;
        f.leakage.assign(static_cast<std::size_t>(rows) * cols, 0.0);
        f.dynamic.assign(static_cast<std::size_t>(rows) * cols, 0.0);
        return f;
    }

    double tile_total(std::size_t i) const { return leakage[i] + dynamic[i]; }
};

// Candidate operating point on the discrete voltage grid. Kept in integer
// millivolts so grid arithmetic and file formats stay exact.
struct VoltagePair {
    int core_mv = 800;
    int bram_mv = 950;

    double v_core() const { return core_mv / 1000.0; }
    double v_bram() const { return bram_mv / 1000.0; }

    bool operator==(const VoltagePair&) const = default;
};

inline double rail_voltage(ResourceKind k, const VoltagePair& v) {
    return on_bram_rail(k) ? v.v_bram() : v.v_core();
}

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

// Sum of segment delays, each evaluated at its own tile's temperature and at
// the rail voltage its resource kind binds to.
inline double path_delay(const Design& design, const TimingPath& path, const TempField& temps,
                         const VoltagePair& v, const CharLib& lib) {
    if (temps.rows != design.rows() || temps.cols != design.cols())
        throw ValidationError("temperature field does not match the design grid");
    double d = 0;
    for (const PathSegment& s : path.segments)
        d += delay_of(lib, s.kind, rail_voltage(s.kind, v), temps.at(s.row, s.col));
    return d;
}

struct DelayResult {
    double delay_s = 0;
    std::uint32_t critical_path_id = 0;
};

// Max path delay; ties resolved toward the lowest path id.
inline DelayResult design_delay(const Design& design, const TempField& temps,
                                const VoltagePair& v, const CharLib& lib) {
    DelayResult best;
    bool first = true;
    for (const TimingPath& p : design.paths()) {
        const double d = path_delay(design, p, temps, v, lib);
        if (first || d > best.delay_s || (d == best.delay_s && p.id < best.critical_path_id)) {
            best.delay_s = d;
            best.critical_path_id = p.id;
            first = false;
        }
    }
    return best;
}

// The one-size-fits-all constraint: delay at maximum junction temperature and
// nominal rail voltages, times an optional reliability guardband. The default
// guardband is 1.0 -- the characterized delays are treated as already
// inclusive of transient margins.
inline double worst_case_delay(const Design& design, const CharLib& lib, double guardband = 1.0) {
    if (guardband < 1.0) throw ValidationError("guardband must be >= 1");
    const TempField hot = TempField::uniform(design.rows(), design.cols(), lib.meta().t_max);
    const VoltagePair nominal{static_cast<int>(std::lround(lib.meta().v_core_nom * 1000)),
                              static_cast<int>(std::lround(lib.meta().v_bram_nom * 1000))};
    return design_delay(design, hot, nominal, lib).delay_s * guardband;
}

// ---------------------------------------------------------------------------
// Power
// ---------------------------------------------------------------------------

// Per-tile leakage and dynamic power. Dynamic power is switching energy per
// cycle divided by the clock period, so energy-per-cycle is clock-invariant.
inline PowerField tile_powers(const Design& design, const TempField& temps, const VoltagePair& v,
                              double clock_period_s, const CharLib& lib) {
    if (!(clock_period_s > 0)) throw ValidationError("clock period must be > 0");
    if (temps.rows != design.rows() || temps.cols != design.cols())
        throw ValidationError("temperature field does not match the design grid");
    PowerField pf = PowerField::zeros(design.rows(), design.cols());
    for (const Tile& tile : design.tiles()) {
        if (tile.empty()) continue;
        const std::size_t i = design.index(tile.row, tile.col);
        const double t = temps.at(tile.row, tile.col);
        for (ResourceKind k : kAllKinds) {
            const int n = tile.count(k);
            if (n == 0) continue;
            const double rail = rail_voltage(k, v);
            pf.leakage[i] += n * leakage_of(lib, k, rail, t);
            pf.dynamic[i] += n * switch_energy_of(lib, k, rail, tile.alpha) / clock_period_s;
        }
    }
    return pf;
}

inline double total_power(const PowerField& pf) {
    double p = 0;
    for (std::size_t i = 0; i < pf.leakage.size(); ++i) p += pf.leakage[i] + pf.dynamic[i];
    return p;
}

} // namespace voltherm
