#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voltherm/errors.hpp"
#include "voltherm/optimizer.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Minimal CSV support for the report formats this tool emits
// ---------------------------------------------------------------------------

inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("csv is missing column '" + name + "'");
    }
};

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path), columns_(header.size()) {
        if (!out_) throw Error("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw Error("csv row arity mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << fmt_double(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t columns_;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open csv: " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty csv: " + path.string());
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(path.string() + ":" + std::to_string(lineno) +
                                 ": not a number: '" + cell + "'");
            }
        }
        if (row.size() != t.header.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// VID LUT export / import
// ---------------------------------------------------------------------------

inline void save_vid_lut(const VidLut& lut, const std::filesystem::path& path) {
    CsvWriter w(path, {"t_c", "v_core_mv", "v_bram_mv"});
    for (const VidLutEntry& e : lut.entries)
        w.row({e.t_c, static_cast<double>(e.pair.core_mv), static_cast<double>(e.pair.bram_mv)});
}

inline VidLut load_vid_lut(const std::filesystem::path& path, double margin_c = 5.0) {
    const CsvTable t = read_csv(path);
    if (t.header != std::vector<std::string>{"t_c", "v_core_mv", "v_bram_mv"})
        throw ParseError("unexpected LUT csv header in " + path.string());
    VidLut lut;
    lut.margin_c = margin_c;
    for (const auto& r : t.rows) {
        VidLutEntry e;
        e.t_c = r[0];
        e.pair.core_mv = static_cast<int>(r[1]);
        e.pair.bram_mv = static_cast<int>(r[2]);
        if (!lut.entries.empty() && !(e.t_c > lut.entries.back().t_c))
            throw ValidationError("LUT keys must be strictly increasing");
        lut.entries.push_back(e);
    }
    return lut;
}

// ---------------------------------------------------------------------------
// Iteration trace (Iter / V_core / V_bram / Power / T_junct)
// ---------------------------------------------------------------------------

inline void save_trace_csv(const std::vector<TraceRow>& trace,
                           const std::filesystem::path& path) {
    CsvWriter w(path, {"iteration", "v_core_mv", "v_bram_mv", "power_w", "t_junct_c"});
    for (const TraceRow& r : trace)
        w.row({static_cast<double>(r.iteration), static_cast<double>(r.pair.core_mv),
               static_cast<double>(r.pair.bram_mv), r.power_w, r.max_t_c});
}

} // namespace voltherm
