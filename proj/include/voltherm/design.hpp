#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "voltherm/charlib.hpp"
#include "voltherm/errors.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Tiles, paths, design
// ---------------------------------------------------------------------------

enum class TileKind : int { CLB = 0, BRAM_COL, DSP_COL, EMPTY };

inline const char* to_string(TileKind k) {
    switch (k) {
        case TileKind::CLB:      return "CLB";
        case TileKind::BRAM_COL: return "BRAM";
        case TileKind::DSP_COL:  return "DSP";
        case TileKind::EMPTY:    return "EMPTY";
    }
    return "?";
}

inline std::optional<TileKind> tile_kind_from_string(std::string_view s) {
    if (s == "CLB") return TileKind::CLB;
    if (s == "BRAM") return TileKind::BRAM_COL;
    if (s == "DSP") return TileKind::DSP_COL;
    if (s == "EMPTY") return TileKind::EMPTY;
    return std::nullopt;
}

struct Tile {
    int row = 0;
    int col = 0;
    TileKind kind = TileKind::EMPTY;
    std::array<int, kKindCount> inventory{}; // count per ResourceKind
    double alpha = 0.0;                      // post-attenuation activity

    int count(ResourceKind k) const { return inventory[static_cast<int>(k)]; }
    int& count(ResourceKind k) { return inventory[static_cast<int>(k)]; }

    bool empty() const {
        for (int c : inventory)
            if (c > 0) return false;
        return true;
    }

    // Relative tile heights: DSP and memory columns are 4x / 6x a CLB tile.
    double area_weight() const {
        switch (kind) {
            case TileKind::DSP_COL:  return 4.0;
            case TileKind::BRAM_COL: return 6.0;
            default:                 return 1.0;
        }
    }
};

struct PathSegment {
    ResourceKind kind = ResourceKind::LUT;
    int row = 0;
    int col = 0;
};

struct TimingPath {
    std::uint32_t id = 0;
    std::vector<PathSegment> segments;
};

// Post-place-and-route design abstraction: a fully populated m x n tile grid
// plus the timing paths to analyze. Immutable after construction.
class Design {
public:
    Design(int rows, int cols, std::vector<Tile> tiles, std::vector<TimingPath> paths,
           std::optional<double> primary_alpha = std::nullopt)
        : rows_(rows), cols_(cols), tiles_(std::move(tiles)), paths_(std::move(paths)),
          primary_alpha_(primary_alpha) {
        validate();
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t tile_count() const { return tiles_.size(); }

    std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }
    const Tile& tile(int r, int c) const { return tiles_[index(r, c)]; }
    const std::vector<Tile>& tiles() const { return tiles_; }
    const std::vector<TimingPath>& paths() const { return paths_; }
    std::optional<double> primary_alpha() const { return primary_alpha_; }

    double total_area_weight() const {
        double w = 0;
        for (const Tile& t : tiles_) w += t.area_weight();
        return w;
    }

    // Copy with every non-empty tile's activity replaced; used when reporting
    // power over an activity range at fixed voltages.
    Design with_uniform_activity(double alpha) const {
        std::vector<Tile> tiles = tiles_;
        for (Tile& t : tiles)
            if (!t.empty()) t.alpha = alpha;
        return Design(rows_, cols_, std::move(tiles), paths_, primary_alpha_);
    }

    void validate() const {
        if (rows_ < 1 || cols_ < 1) throw ValidationError("grid dimensions must be >= 1");
        if (tiles_.size() != static_cast<std::size_t>(rows_) * cols_)
            throw ValidationError("tile array does not cover the full grid");
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) {
                const Tile& t = tiles_[index(r, c)];
                if (t.row != r || t.col != c)
                    throw ValidationError("tile stored at wrong grid position");
                for (ResourceKind k : kAllKinds)
                    if (t.count(k) < 0) throw ValidationError("negative resource count");
                if (t.count(ResourceKind::BRAM) > 0 && t.kind != TileKind::BRAM_COL)
                    throw ValidationError(tile_msg(t, "holds BRAM outside a BRAM column"));
                if (t.count(ResourceKind::DSP) > 0 && t.kind != TileKind::DSP_COL)
                    throw ValidationError(tile_msg(t, "holds DSP outside a DSP column"));
                if (t.kind == TileKind::EMPTY && !t.empty())
                    throw ValidationError(tile_msg(t, "is EMPTY but has resources"));
                if (t.alpha < 0.0 || t.alpha > 1.0)
                    throw ValidationError(tile_msg(t, "activity outside [0, 1]"));
            }

        if (paths_.empty()) throw ValidationError("design has no timing paths");
        std::set<std::uint32_t> ids;
        for (const TimingPath& p : paths_) {
            if (!ids.insert(p.id).second)
                throw ValidationError("duplicate path id " + std::to_string(p.id));
            if (p.segments.empty())
                throw ValidationError("path " + std::to_string(p.id) + " has no segments");
            for (const PathSegment& s : p.segments) {
                if (s.row < 0 || s.row >= rows_ || s.col < 0 || s.col >= cols_) {
                    std::ostringstream os;
                    os << "path " << p.id << " references tile (" << s.row << ", " << s.col
                       << ") outside the " << rows_ << "x" << cols_ << " grid";
                    throw ValidationError(os.str());
                }
                if (tile(s.row, s.col).count(s.kind) < 1) {
                    std::ostringstream os;
                    os << "path " << p.id << " uses " << to_string(s.kind) << " at tile ("
                       << s.row << ", " << s.col << ") which holds none";
                    throw ValidationError(os.str());
                }
            }
        }
        if (primary_alpha_ && (*primary_alpha_ < 0.0 || *primary_alpha_ > 1.0))
            throw ValidationError("primary activity outside [0, 1]");
    }

private:
    static std::string tile_msg(const Tile& t, const char* what) {
        std::ostringstream os;
        os << "tile (" << t.row << ", " << t.col << ") " << what;
        return os.str();
    }

    int rows_;
    int cols_;
    std::vector<Tile> tiles_;
    std::vector<TimingPath> paths_;
    std::optional<double> primary_alpha_;
};

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

inline nlohmann::json design_to_json(const Design& d) {
    nlohmann::json j;
    j["grid"] = {{"m", d.rows()}, {"n", d.cols()}};
    auto& tiles = j["tiles"] = nlohmann::json::array();
    for (const Tile& t : d.tiles()) {
        if (t.kind == TileKind::EMPTY && t.empty()) continue; // implied
        nlohmann::json tj;
        tj["row"] = t.row;
        tj["col"] = t.col;
        tj["kind"] = to_string(t.kind);
        nlohmann::json inv = nlohmann::json::object();
        for (ResourceKind k : kAllKinds)
            if (t.count(k) > 0) inv[to_string(k)] = t.count(k);
        tj["inventory"] = std::move(inv);
        tj["alpha"] = t.alpha;
        tiles.push_back(std::move(tj));
    }
    auto& paths = j["paths"] = nlohmann::json::array();
    for (const TimingPath& p : d.paths()) {
        nlohmann::json pj;
        pj["id"] = p.id;
        auto& segs = pj["segments"] = nlohmann::json::array();
        for (const PathSegment& s : p.segments)
            segs.push_back({{"kind", to_string(s.kind)}, {"row", s.row}, {"col", s.col}});
        paths.push_back(std::move(pj));
    }
    if (d.primary_alpha()) j["primary_alpha"] = *d.primary_alpha();
    return j;
}

inline Design design_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("grid"))
        throw ParseError("design document missing grid object");
    int rows = 0, cols = 0;
    std::optional<double> primary_alpha;
    std::vector<Tile> tiles;
    std::vector<TimingPath> paths;
    try {
        rows = j.at("grid").at("m").get<int>();
        cols = j.at("grid").at("n").get<int>();
        if (rows < 1 || cols < 1) throw ValidationError("grid dimensions must be >= 1");
        if (j.contains("primary_alpha")) primary_alpha = j.at("primary_alpha").get<double>();

        tiles.assign(static_cast<std::size_t>(rows) * cols, Tile{});
        std::vector<bool> seen(tiles.size(), false), has_alpha(tiles.size(), false);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                tiles[static_cast<std::size_t>(r) * cols + c].row = r;
                tiles[static_cast<std::size_t>(r) * cols + c].col = c;
            }

        for (const auto& tj : j.value("tiles", nlohmann::json::array())) {
            const int r = tj.at("row").get<int>();
            const int c = tj.at("col").get<int>();
            if (r < 0 || r >= rows || c < 0 || c >= cols) {
                std::ostringstream os;
                os << "tile (" << r << ", " << c << ") outside the " << rows << "x" << cols
                   << " grid";
                throw ValidationError(os.str());
            }
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            if (seen[idx])
                throw ValidationError("duplicate tile entry (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ")");
            seen[idx] = true;
            Tile& t = tiles[idx];
            const std::string ks = tj.value("kind", "CLB");
            auto kind = tile_kind_from_string(ks);
            if (!kind) throw ParseError("unknown tile kind '" + ks + "'");
            t.kind = *kind;
            if (tj.contains("inventory")) {
                for (auto it = tj.at("inventory").begin(); it != tj.at("inventory").end(); ++it) {
                    auto rk = kind_from_string(it.key());
                    if (!rk) throw ParseError("unknown resource kind '" + it.key() + "'");
                    t.count(*rk) = it.value().get<int>();
                }
            }
            if (tj.contains("alpha")) {
                t.alpha = tj.at("alpha").get<double>();
                has_alpha[idx] = true;
            }
        }

        // Tiles without an explicit activity inherit the attenuated
        // primary-input activity.
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            if (has_alpha[i] || tiles[i].empty()) continue;
            if (!primary_alpha)
                throw ValidationError("tile (" + std::to_string(tiles[i].row) + ", " +
                                      std::to_string(tiles[i].col) +
                                      ") has no activity and no primary_alpha is given");
            tiles[i].alpha = internal_activity(*primary_alpha);
        }

        for (const auto& pj : j.value("paths", nlohmann::json::array())) {
            TimingPath p;
            p.id = pj.at("id").get<std::uint32_t>();
            for (const auto& sj : pj.at("segments")) {
                PathSegment s;
                const std::string ks = sj.at("kind").get<std::string>();
                auto rk = kind_from_string(ks);
                if (!rk) throw ParseError("unknown resource kind '" + ks + "' in path");
                s.kind = *rk;
                s.row = sj.at("row").get<int>();
                s.col = sj.at("col").get<int>();
                p.segments.push_back(s);
            }
            paths.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("design document: ") + e.what());
    }
    return Design(rows, cols, std::move(tiles), std::move(paths), primary_alpha);
}

inline Design load_design(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open design file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("design parse error in " + path.string() + ": " + e.what());
    }
    return design_from_json(j);
}

inline void save_design(const Design& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write design file: " + path.string());
    out << design_to_json(d).dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic designs
// ---------------------------------------------------------------------------

// Deterministic random design: CLB fabric with repeating BRAM/DSP columns and
// a mix of routing-dominated, logic-dominated and BRAM-terminated paths, so
// the diverging per-kind voltage behavior actually shows up in timing.
inline Design gen_synthetic_design(int m, int n, int path_count, std::uint64_t seed) {
    if (m < 1 || n < 1) throw ValidationError("grid dimensions must be >= 1");
    if (path_count < 1) throw ValidationError("path_count must be >= 1");

    detail::SynthRng rng(seed ^ 0xd1f3a5c7b9e80642ULL);
    auto rand_int = [&](int lo, int hi) { // inclusive
        return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
    };

    auto col_kind = [&](int c) {
        if (n < 3) return TileKind::CLB;
        if (c % 5 == 2) return TileKind::BRAM_COL;
        if (n >= 5 && c % 5 == 4) return TileKind::DSP_COL;
        return TileKind::CLB;
    };

    std::vector<Tile> tiles(static_cast<std::size_t>(m) * n);
    std::vector<std::size_t> clb_idx, bram_idx, dsp_idx, live_idx;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * n + c;
            Tile& t = tiles[idx];
            t.row = r;
            t.col = c;
            t.kind = col_kind(c);
            const double util = 0.35 + 0.65 * rng.uniform();
            t.alpha = 0.05 + 0.30 * rng.uniform();
            switch (t.kind) {
                case TileKind::CLB: {
                    // A sprinkling of unused CLB sites, but never the first one.
                    if (!clb_idx.empty() && rng.uniform() < 0.08) {
                        t.kind = TileKind::EMPTY;
                        t.alpha = 0.0;
                        continue;
                    }
                    t.count(ResourceKind::LUT) = std::max(1, static_cast<int>(10 * util));
                    t.count(ResourceKind::FF) = std::max(1, static_cast<int>(10 * util));
                    t.count(ResourceKind::LOCAL) = std::max(1, static_cast<int>(60 * util));
                    t.count(ResourceKind::CB) = std::max(1, static_cast<int>(80 * util));
                    t.count(ResourceKind::SB) = std::max(1, static_cast<int>(160 * util));
                    clb_idx.push_back(idx);
                    break;
                }
                case TileKind::BRAM_COL:
                    t.count(ResourceKind::BRAM) = 1;
                    t.count(ResourceKind::CB) = std::max(1, static_cast<int>(40 * util));
                    t.count(ResourceKind::SB) = std::max(1, static_cast<int>(120 * util));
                    bram_idx.push_back(idx);
                    break;
                case TileKind::DSP_COL:
                    t.count(ResourceKind::DSP) = 1;
                    t.count(ResourceKind::CB) = std::max(1, static_cast<int>(40 * util));
                    t.count(ResourceKind::SB) = std::max(1, static_cast<int>(120 * util));
                    dsp_idx.push_back(idx);
                    break;
                case TileKind::EMPTY:
                    break;
            }
            live_idx.push_back(idx);
        }

    auto pick = [&](const std::vector<std::size_t>& from) {
        return tiles[from[static_cast<std::size_t>(rng.uniform() * from.size())]];
    };
    auto seg = [&](ResourceKind k, const Tile& t) { return PathSegment{k, t.row, t.col}; };

    std::vector<TimingPath> paths;
    paths.reserve(path_count);
    for (int i = 0; i < path_count; ++i) {
        TimingPath p;
        p.id = static_cast<std::uint32_t>(i);
        int style = i % 3;
        if (style == 2 && bram_idx.empty()) style = 0;
        if ((style == 0 || style == 2) && live_idx.empty()) style = 1;
        switch (style) {
            case 0: { // routing-dominated: long SB/CB chains across the fabric
                const int len = rand_int(6, 14);
                for (int s = 0; s < len; ++s)
                    p.segments.push_back(
                        seg(s % 3 == 2 ? ResourceKind::CB : ResourceKind::SB, pick(live_idx)));
                break;
            }
            case 1: { // logic-dominated, optionally through a DSP column
                const int stages = rand_int(2, 5);
                for (int s = 0; s < stages; ++s) {
                    const Tile& t = pick(clb_idx);
                    p.segments.push_back(seg(ResourceKind::LOCAL, t));
                    p.segments.push_back(seg(ResourceKind::LUT, t));
                }
                if (!dsp_idx.empty() && i % 6 == 1)
                    p.segments.push_back(seg(ResourceKind::DSP, pick(dsp_idx)));
                p.segments.push_back(seg(ResourceKind::FF, pick(clb_idx)));
                break;
            }
            default: { // BRAM-terminated
                p.segments.push_back(seg(ResourceKind::LUT, pick(clb_idx)));
                const int hops = rand_int(1, 4);
                for (int s = 0; s < hops; ++s)
                    p.segments.push_back(
                        seg(s % 2 == 0 ? ResourceKind::SB : ResourceKind::CB, pick(live_idx)));
                p.segments.push_back(seg(ResourceKind::BRAM, pick(bram_idx)));
                break;
            }
        }
        paths.push_back(std::move(p));
    }

    return Design(m, n, std::move(tiles), std::move(paths));
}

} // namespace voltherm
