#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "voltherm/errors.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Resource kinds
// ---------------------------------------------------------------------------

// The characterized FPGA resource classes. BRAM is the only kind supplied by
// the memory rail; everything else sits on the core rail.
enum class ResourceKind : int { LUT = 0, FF, SB, CB, LOCAL, BRAM, DSP };

inline constexpr int kKindCount = 7;

inline constexpr std::array<ResourceKind, kKindCount> kAllKinds = {
    ResourceKind::LUT,  ResourceKind::FF,    ResourceKind::SB,  ResourceKind::CB,
    ResourceKind::LOCAL, ResourceKind::BRAM, ResourceKind::DSP};

inline const char* to_string(ResourceKind k) {
    switch (k) {
        case ResourceKind::LUT:   return "LUT";
        case ResourceKind::FF:    return "FF";
        case ResourceKind::SB:    return "SB";
        case ResourceKind::CB:    return "CB";
        case ResourceKind::LOCAL: return "LOCAL";
        case ResourceKind::BRAM:  return "BRAM";
        case ResourceKind::DSP:   return "DSP";
    }
    return "?";
}

inline std::optional<ResourceKind> kind_from_string(std::string_view s) {
    for (ResourceKind k : kAllKinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

inline bool on_bram_rail(ResourceKind k) { return k == ResourceKind::BRAM; }

// ---------------------------------------------------------------------------
// Tabulated surface with bilinear lookup
// ---------------------------------------------------------------------------

// Dense table of positive values over two strictly increasing knot axes.
// Lookup is bilinear and exact at knots. Queries outside the knot span are
// hard errors; values are never extrapolated.
class CharSurface {
public:
    CharSurface() = default;

    CharSurface(std::vector<double> axis1, std::vector<double> axis2,
                std::vector<std::vector<double>> values)
        : axis1_(std::move(axis1)), axis2_(std::move(axis2)), values_(std::move(values)) {
        check_well_formed();
    }

    const std::vector<double>& axis1() const { return axis1_; }
    const std::vector<double>& axis2() const { return axis2_; }
    double value_at(std::size_t i, std::size_t j) const { return values_[i][j]; }

    double min1() const { return axis1_.front(); }
    double max1() const { return axis1_.back(); }
    double min2() const { return axis2_.front(); }
    double max2() const { return axis2_.back(); }

    double at(double x, double y) const {
        if (axis1_.empty())
            throw RangeError("query on empty surface");
        if (x < min1() || x > max1() || y < min2() || y > max2()) {
            std::ostringstream os;
            os << "surface query (" << x << ", " << y << ") outside tabulated span ["
               << min1() << ", " << max1() << "] x [" << min2() << ", " << max2() << "]";
            throw RangeError(os.str());
        }
        const auto [i, tx] = locate(axis1_, x);
        const auto [j, ty] = locate(axis2_, y);
        const double v00 = values_[i][j];
        const double v01 = values_[i][j + 1];
        const double v10 = values_[i + 1][j];
        const double v11 = values_[i + 1][j + 1];
        return v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty) + v01 * (1 - tx) * ty +
               v11 * tx * ty;
    }

    // Scans adjacent knot pairs along axis1. Returns the first (i, j) whose
    // step violates the requested direction, or nullopt if monotone.
    std::optional<std::pair<std::size_t, std::size_t>>
    find_axis1_violation(bool want_non_decreasing) const {
        for (std::size_t i = 0; i + 1 < axis1_.size(); ++i)
            for (std::size_t j = 0; j < axis2_.size(); ++j) {
                const double step = values_[i + 1][j] - values_[i][j];
                if (want_non_decreasing ? step < 0 : step > 0) return std::make_pair(i, j);
            }
        return std::nullopt;
    }

    std::optional<std::pair<std::size_t, std::size_t>>
    find_axis2_violation(bool want_non_decreasing) const {
        for (std::size_t i = 0; i < axis1_.size(); ++i)
            for (std::size_t j = 0; j + 1 < axis2_.size(); ++j) {
                const double step = values_[i][j + 1] - values_[i][j];
                if (want_non_decreasing ? step < 0 : step > 0) return std::make_pair(i, j);
            }
        return std::nullopt;
    }

    bool operator==(const CharSurface& o) const {
        return axis1_ == o.axis1_ && axis2_ == o.axis2_ && values_ == o.values_;
    }

private:
    static std::pair<std::size_t, double> locate(const std::vector<double>& knots, double x) {
        // Upper knot maps into the last cell with t = 1, keeping knot hits exact.
        std::size_t hi = std::upper_bound(knots.begin(), knots.end(), x) - knots.begin();
        std::size_t cell = (hi == 0) ? 0 : hi - 1;
        if (cell >= knots.size() - 1) cell = knots.size() - 2;
        const double t = (x - knots[cell]) / (knots[cell + 1] - knots[cell]);
        return {cell, t};
    }

    void check_well_formed() const {
        if (axis1_.size() < 2 || axis2_.size() < 2)
            throw ValidationError("surface needs at least 2 knots per axis");
        for (std::size_t i = 0; i + 1 < axis1_.size(); ++i)
            if (!(axis1_[i] < axis1_[i + 1]))
                throw ValidationError("axis1 knots not strictly increasing");
        for (std::size_t j = 0; j + 1 < axis2_.size(); ++j)
            if (!(axis2_[j] < axis2_[j + 1]))
                throw ValidationError("axis2 knots not strictly increasing");
        if (values_.size() != axis1_.size())
            throw ValidationError("values row count does not match axis1 knot count");
        for (const auto& row : values_) {
            if (row.size() != axis2_.size())
                throw ValidationError("values column count does not match axis2 knot count");
            for (double v : row)
                if (!std::isfinite(v) || v <= 0.0)
                    throw ValidationError("surface values must be finite and > 0");
        }
    }

    std::vector<double> axis1_;
    std::vector<double> axis2_;
    std::vector<std::vector<double>> values_;
};

// ---------------------------------------------------------------------------
// Characterization library
// ---------------------------------------------------------------------------

struct KindTables {
    CharSurface delay;         // (V volts, T degC) -> seconds
    CharSurface leakage;       // (V volts, T degC) -> watts
    CharSurface switch_energy; // (V volts, alpha)  -> joules per clock cycle

    bool operator==(const KindTables&) const = default;
};

struct CharLibMeta {
    double v_core_nom = 0.80;
    double v_bram_nom = 0.95;
    double v_floor = 0.55;
    double t_min = 0.0;
    double t_max = 100.0;

    bool operator==(const CharLibMeta&) const = default;
};

// Clock period used when calibrating the synthetic library's leakage/dynamic
// power split. Total-power anchor ratios are defined at this clock.
inline constexpr double kAnchorClockPeriod = 10e-9; // 10 ns
inline constexpr double kAnchorActivity = 0.5;

// Immutable after construction; concurrent reads are safe.
class CharLib {
public:
    CharLib(CharLibMeta meta, std::array<KindTables, kKindCount> tables)
        : meta_(meta), tables_(std::move(tables)) {
        validate();
    }

    const CharLibMeta& meta() const { return meta_; }
    const KindTables& tables(ResourceKind k) const { return tables_[static_cast<int>(k)]; }

    double rail_nominal(ResourceKind k) const {
        return on_bram_rail(k) ? meta_.v_bram_nom : meta_.v_core_nom;
    }

    bool operator==(const CharLib& o) const {
        return meta_ == o.meta_ && tables_ == o.tables_;
    }

private:
    void validate() const {
        if (!(meta_.v_floor > 0) || !(meta_.v_floor < meta_.v_core_nom) ||
            !(meta_.v_floor < meta_.v_bram_nom))
            throw ValidationError("charlib metadata: voltage floor must be positive and below both rail nominals");
        if (!(meta_.t_min < meta_.t_max))
            throw ValidationError("charlib metadata: t_min must be below t_max");

        for (ResourceKind k : kAllKinds) {
            const KindTables& t = tables_[static_cast<int>(k)];
            const double vhi = rail_nominal(k);

            require_span(t.delay, k, "delay", meta_.v_floor, vhi, meta_.t_min, meta_.t_max);
            require_span(t.leakage, k, "leakage", meta_.v_floor, vhi, meta_.t_min, meta_.t_max);
            require_span(t.switch_energy, k, "switch_energy", meta_.v_floor, vhi, 0.0, 1.0);

            // delay: non-increasing in V, non-decreasing in T
            if (auto p = t.delay.find_axis1_violation(false))
                throw monotonicity_error(k, "delay", "voltage", "non-increasing", *p, t.delay);
            if (auto p = t.delay.find_axis2_violation(true))
                throw monotonicity_error(k, "delay", "temperature", "non-decreasing", *p, t.delay);
            // leakage: non-decreasing in both V and T
            if (auto p = t.leakage.find_axis1_violation(true))
                throw monotonicity_error(k, "leakage", "voltage", "non-decreasing", *p, t.leakage);
            if (auto p = t.leakage.find_axis2_violation(true))
                throw monotonicity_error(k, "leakage", "temperature", "non-decreasing", *p, t.leakage);
            // switching energy: non-decreasing in V; free along the alpha axis
            if (auto p = t.switch_energy.find_axis1_violation(true))
                throw monotonicity_error(k, "switch_energy", "voltage", "non-decreasing", *p,
                                         t.switch_energy);
        }
    }

    static void require_span(const CharSurface& s, ResourceKind k, const char* name,
                             double lo1, double hi1, double lo2, double hi2) {
        if (s.min1() > lo1 || s.max1() < hi1 || s.min2() > lo2 || s.max2() < hi2) {
            std::ostringstream os;
            os << to_string(k) << "." << name << " surface does not cover required query span ["
               << lo1 << ", " << hi1 << "] x [" << lo2 << ", " << hi2 << "]";
            throw ValidationError(os.str());
        }
    }

    static ValidationError monotonicity_error(ResourceKind k, const char* surface,
                                              const char* axis, const char* want,
                                              std::pair<std::size_t, std::size_t> at,
                                              const CharSurface& s) {
        std::ostringstream os;
        os << "monotonicity violation: " << to_string(k) << "." << surface << " must be " << want
           << " in " << axis << "; offending knot pair near (axis1=" << s.axis1()[at.first]
           << ", axis2=" << s.axis2()[at.second] << ")";
        return ValidationError(os.str());
    }

    CharLibMeta meta_;
    std::array<KindTables, kKindCount> tables_;
};

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

namespace detail {

inline void check_rail_range(const CharLib& lib, ResourceKind k, double v) {
    const double hi = lib.rail_nominal(k);
    if (v < lib.meta().v_floor || v > hi) {
        std::ostringstream os;
        os << to_string(k) << " voltage " << v << " V outside [" << lib.meta().v_floor << ", "
           << hi << "] V";
        throw RangeError(os.str());
    }
}

inline void check_temp_range(const CharLib& lib, double t) {
    if (t < lib.meta().t_min || t > lib.meta().t_max) {
        std::ostringstream os;
        os << "temperature " << t << " degC outside [" << lib.meta().t_min << ", "
           << lib.meta().t_max << "] degC";
        throw RangeError(os.str());
    }
}

} // namespace detail

inline double delay_of(const CharLib& lib, ResourceKind k, double v, double t) {
    detail::check_rail_range(lib, k, v);
    detail::check_temp_range(lib, t);
    return lib.tables(k).delay.at(v, t);
}

inline double leakage_of(const CharLib& lib, ResourceKind k, double v, double t) {
    detail::check_rail_range(lib, k, v);
    detail::check_temp_range(lib, t);
    return lib.tables(k).leakage.at(v, t);
}

inline double switch_energy_of(const CharLib& lib, ResourceKind k, double v, double alpha) {
    detail::check_rail_range(lib, k, v);
    if (alpha < 0.0 || alpha > 1.0)
        throw RangeError("activity " + std::to_string(alpha) + " outside [0, 1]");
    return lib.tables(k).switch_energy.at(v, alpha);
}

// Attenuation from primary-input activity to the average activity of internal
// nodes, as a piecewise-linear map through (0, 0), (0.1, 0.05), (1.0, 0.27).
inline double internal_activity(double alpha_in) {
    if (alpha_in < 0.0 || alpha_in > 1.0)
        throw RangeError("primary activity " + std::to_string(alpha_in) + " outside [0, 1]");
    if (alpha_in <= 0.1) return alpha_in * 0.5;
    return 0.05 + (alpha_in - 0.1) * (0.27 - 0.05) / 0.9;
}

// ---------------------------------------------------------------------------
// Interchange document (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json surface_to_json(const CharSurface& s) {
    nlohmann::json j;
    j["axis1"] = s.axis1();
    j["axis2"] = s.axis2();
    auto& vals = j["values"] = nlohmann::json::array();
    for (std::size_t i = 0; i < s.axis1().size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t jj = 0; jj < s.axis2().size(); ++jj) row.push_back(s.value_at(i, jj));
        vals.push_back(std::move(row));
    }
    return j;
}

inline CharSurface surface_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("axis1") || !j.contains("axis2") || !j.contains("values"))
        throw ParseError(where + ": surface needs axis1/axis2/values");
    try {
        auto a1 = j.at("axis1").get<std::vector<double>>();
        auto a2 = j.at("axis2").get<std::vector<double>>();
        auto vals = j.at("values").get<std::vector<std::vector<double>>>();
        return CharSurface(std::move(a1), std::move(a2), std::move(vals));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }
}

inline nlohmann::json charlib_to_json(const CharLib& lib) {
    nlohmann::json j;
    j["metadata"] = {{"v_core_nom", lib.meta().v_core_nom},
                     {"v_bram_nom", lib.meta().v_bram_nom},
                     {"v_floor", lib.meta().v_floor},
                     {"t_min", lib.meta().t_min},
                     {"t_max", lib.meta().t_max}};
    for (ResourceKind k : kAllKinds) {
        nlohmann::json kj;
        kj["delay"] = surface_to_json(lib.tables(k).delay);
        kj["leakage"] = surface_to_json(lib.tables(k).leakage);
        kj["switch_energy"] = surface_to_json(lib.tables(k).switch_energy);
        j[to_string(k)] = std::move(kj);
    }
    return j;
}

inline CharLib charlib_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("charlib document is not a JSON object");
    if (!j.contains("metadata")) throw ParseError("charlib document missing metadata");
    CharLibMeta meta;
    try {
        const auto& mj = j.at("metadata");
        meta.v_core_nom = mj.at("v_core_nom").get<double>();
        meta.v_bram_nom = mj.at("v_bram_nom").get<double>();
        meta.v_floor = mj.at("v_floor").get<double>();
        meta.t_min = mj.at("t_min").get<double>();
        meta.t_max = mj.at("t_max").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("charlib metadata: ") + e.what());
    }

    std::array<KindTables, kKindCount> tables;
    for (ResourceKind k : kAllKinds) {
        const char* name = to_string(k);
        if (!j.contains(name))
            throw ParseError(std::string("charlib document missing resource kind ") + name);
        const auto& kj = j.at(name);
        KindTables t;
        t.delay = surface_from_json(kj.value("delay", nlohmann::json()), std::string(name) + ".delay");
        t.leakage =
            surface_from_json(kj.value("leakage", nlohmann::json()), std::string(name) + ".leakage");
        t.switch_energy = surface_from_json(kj.value("switch_energy", nlohmann::json()),
                                            std::string(name) + ".switch_energy");
        tables[static_cast<int>(k)] = std::move(t);
    }
    return CharLib(meta, std::move(tables));
}

inline CharLib load_charlib(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open charlib file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("charlib parse error in " + path.string() + ": " + e.what());
    }
    return charlib_from_json(j);
}

inline void save_charlib(const CharLib& lib, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write charlib file: " + path.string());
    out << charlib_to_json(lib).dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic library
// ---------------------------------------------------------------------------

namespace detail {

// Deterministic uniform double in [0, 1); avoids std::uniform_real_distribution
// so output is identical across standard libraries.
class SynthRng {
public:
    explicit SynthRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}
    double uniform() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double jitter(double rel) { return 1.0 + rel * (2.0 * uniform() - 1.0); }

private:
    std::uint64_t state_;
};

struct SynthKindParams {
    double d0;      // delay at (rail nominal, t_max), seconds
    double vth;     // alpha-power threshold, volts
    double gamma;   // alpha-power exponent
    double kappa;   // delay-vs-temperature slope, 1/degC (relative to t_max)
    double leak0;   // leakage at (rail nominal, 40 degC), watts
    double lambda;  // leakage voltage sensitivity, 1/V
    double e0;      // switching energy at (rail nominal, alpha = 1), joules
    double a_floor; // activity shape value at alpha = 0 (relative)
    double p_dyn;   // dynamic-energy voltage exponent
};

inline double dsp_activity_shape(double a) {
    // Saturating multiplier-style profile: power climbs from low activity,
    // plateaus over mid activities, then droops as toggling inputs start
    // cancelling each other.
    struct Pt { double a, s; };
    static constexpr Pt pts[] = {{0.0, 0.55}, {0.05, 0.80}, {0.10, 1.00},
                                 {0.30, 1.37}, {0.70, 1.37}, {1.00, 1.15}};
    for (std::size_t i = 0; i + 1 < std::size(pts); ++i) {
        if (a <= pts[i + 1].a) {
            const double t = (a - pts[i].a) / (pts[i + 1].a - pts[i].a);
            return pts[i].s + t * (pts[i + 1].s - pts[i].s);
        }
    }
    return pts[std::size(pts) - 1].s;
}

} // namespace detail

// Builds the deterministic synthetic characterization library. Shapes follow
// published trends for 22 nm FPGA resources: alpha-power delay vs voltage,
// linear delay derating vs temperature, exp(0.015 T) leakage, ~V^2 switching
// energy (steeper for BRAM). Absolute scales (hundreds of ps, fJ..pJ, uW) are
// synthetic choices; every documented anchor is a ratio and holds for any seed.
// The leakage/dynamic split of the switch box is calibrated at a 10 ns clock
// and alpha = 0.5 (kAnchorClockPeriod / kAnchorActivity).
inline CharLib synth_charlib(std::uint64_t seed) {
    using detail::SynthKindParams;
    CharLibMeta meta; // defaults: 0.8 / 0.95 / 0.55 V, 0..100 degC

    // Voltage knots at 10 mV pitch over the full rail span; temperature at
    // 5 degC pitch; activity at 0.05 pitch.
    std::vector<double> v_knots, t_knots, a_knots;
    for (int mv = 550; mv <= 950; mv += 10) v_knots.push_back(mv / 1000.0);
    for (int t = 0; t <= 100; t += 5) t_knots.push_back(static_cast<double>(t));
    for (int a = 0; a <= 100; a += 5) a_knots.push_back(a / 100.0);

    // SB threshold solved so that the voltage margin anchor is exact:
    // f(0.68)/f(0.8) = 1/0.85 with f(V) = V / (V - vth)^gamma, gamma = 1.2.
    const double sb_gamma = 1.2;
    const double r = std::pow(1.0 / (0.85 * 0.85), 1.0 / sb_gamma);
    const double sb_vth = (0.68 * r - 0.80) / (r - 1.0);

    std::array<SynthKindParams, kKindCount> P{};
    P[static_cast<int>(ResourceKind::LUT)]   = {450e-12, 0.40,   1.30, 0.0016, 0.80e-6, 3.0, 18e-15,  0.04, 2.0};
    P[static_cast<int>(ResourceKind::FF)]    = {120e-12, 0.34,   1.20, 0.0018, 0.25e-6, 3.0, 6e-15,   0.60, 2.0};
    P[static_cast<int>(ResourceKind::SB)]    = {220e-12, sb_vth, sb_gamma, 0.0025, 0.0, 3.0, 50e-15,  0.04, 2.0};
    P[static_cast<int>(ResourceKind::CB)]    = {150e-12, 0.31,   1.20, 0.0022, 0.70e-6, 3.0, 25e-15,  0.04, 2.0};
    P[static_cast<int>(ResourceKind::LOCAL)] = {90e-12,  0.32,   1.15, 0.0020, 0.30e-6, 3.0, 8e-15,   0.04, 2.0};
    P[static_cast<int>(ResourceKind::BRAM)]  = {1500e-12, 0.45,  1.45, 0.0015, 35e-6,   4.5, 4500e-15, 0.05, 2.8};
    P[static_cast<int>(ResourceKind::DSP)]   = {2200e-12, 0.36,  1.25, 0.0017, 60e-6,   3.0, 9000e-15, 0.0,  2.0};

    detail::SynthRng rng(seed);

    std::array<KindTables, kKindCount> tables;
    for (ResourceKind kind : kAllKinds) {
        SynthKindParams kp = P[static_cast<int>(kind)];
        const double v_nom = on_bram_rail(kind) ? meta.v_bram_nom : meta.v_core_nom;

        // Seed only perturbs absolute per-kind scales. The SB leakage scale is
        // derived from its dynamic scale below, so its power split (and the
        // total-power anchor) is jitter-invariant.
        const double j_delay = rng.jitter(0.03);
        const double j_leak = rng.jitter(0.03);
        const double j_dyn = rng.jitter(0.03);
        kp.d0 *= j_delay;
        kp.e0 *= j_dyn;
        kp.leak0 *= (kind == ResourceKind::SB) ? 1.0 : j_leak;

        auto f_volt = [&](double v) { // normalized alpha-power delay factor
            const double base = v_nom / std::pow(v_nom - kp.vth, kp.gamma);
            return (v / std::pow(v - kp.vth, kp.gamma)) / base;
        };
        auto g_temp = [&](double t) { return 1.0 - kp.kappa * (meta.t_max - t); };
        auto h_leak = [&](double v) { // normalized leakage voltage factor
            return (v / v_nom) * std::exp(kp.lambda * (v - v_nom));
        };
        auto shape = [&](double a) {
            if (kind == ResourceKind::DSP) return detail::dsp_activity_shape(a);
            return kp.a_floor + (1.0 - kp.a_floor) * a;
        };

        if (kind == ResourceKind::SB) {
            // Total-power anchor: leak + dyn at (0.68 V, 40 degC) equals 0.68x
            // of the (0.80 V, 40 degC) value. With dyn ~ V^2 and leakage
            // ~ h(V), the nominal leakage fraction rho is fixed by algebra.
            const double dyn_ratio = (0.68 / 0.80) * (0.68 / 0.80);
            const double leak_ratio = h_leak(0.68) / h_leak(0.80);
            const double rho = (dyn_ratio - 0.68) / (dyn_ratio - leak_ratio);
            const double dyn_nom = kp.e0 * shape(kAnchorActivity) / kAnchorClockPeriod;
            kp.leak0 = rho / (1.0 - rho) * dyn_nom;
        }

        std::vector<std::vector<double>> delay(v_knots.size()), leak(v_knots.size()),
            energy(v_knots.size());
        for (std::size_t i = 0; i < v_knots.size(); ++i) {
            const double v = v_knots[i];
            delay[i].resize(t_knots.size());
            leak[i].resize(t_knots.size());
            energy[i].resize(a_knots.size());
            for (std::size_t j = 0; j < t_knots.size(); ++j) {
                const double t = t_knots[j];
                delay[i][j] = kp.d0 * f_volt(v) * g_temp(t);
                leak[i][j] = kp.leak0 * h_leak(v) * std::exp(0.015 * (t - 40.0));
            }
            for (std::size_t j = 0; j < a_knots.size(); ++j) {
                const double s = std::max(shape(a_knots[j]), 1e-3);
                energy[i][j] = kp.e0 * s * std::pow(v / v_nom, kp.p_dyn);
            }
        }
        KindTables kt;
        kt.delay = CharSurface(v_knots, t_knots, std::move(delay));
        kt.leakage = CharSurface(v_knots, t_knots, std::move(leak));
        kt.switch_energy = CharSurface(v_knots, a_knots, std::move(energy));
        tables[static_cast<int>(kind)] = std::move(kt);
    }

    return CharLib(meta, std::move(tables));
}

} // namespace voltherm
