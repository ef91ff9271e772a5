#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "voltherm/errors.hpp"

namespace voltherm {

// Everything a CLI run needs. A JSON config file mirrors these field names;
// command-line flags override individual entries afterwards.
struct RunConfig {
    // inputs: files win over synthetic seeds when given
    std::optional<std::string> charlib_path;
    std::uint64_t charlib_seed = 0;
    std::optional<std::string> design_path;
    int design_m = 6;
    int design_n = 6;
    int design_paths = 20;
    std::uint64_t design_seed = 0;

    // operating point / sweep
    double t_amb = 40.0;
    std::optional<std::vector<double>> t_amb_sweep; // used by `scale`

    // thermal model
    double theta_ja = 2.0;
    double r_lat = 5.0;
    double eps_th = 0.01;
    int thermal_max_iters = 50000;

    // optimization
    double delta_t = 0.1;
    double guardband = 1.0;
    int max_iters = 20;
    int v_step_mv = 10;

    // over-scaling / LUT
    std::vector<double> betas = {1.0, 1.1, 1.2, 1.3, 1.4};
    std::vector<double> lut_keys; // empty -> 0..85 step 5
    double lut_margin = 5.0;

    // modes
    std::string out_dir = "out";
    bool oracle = false;
    bool prune = true;

    std::vector<double> lut_keys_or_default() const {
        if (!lut_keys.empty()) return lut_keys;
        std::vector<double> keys;
        for (int t = 0; t <= 85; t += 5) keys.push_back(t);
        return keys;
    }

    std::vector<double> ambients() const {
        if (t_amb_sweep && !t_amb_sweep->empty()) return *t_amb_sweep;
        return {t_amb};
    }

    void validate() const {
        if (charlib_path && !std::filesystem::exists(*charlib_path))
            throw ValidationError("charlib file does not exist: " + *charlib_path);
        if (design_path && !std::filesystem::exists(*design_path))
            throw ValidationError("design file does not exist: " + *design_path);
        if (design_m < 1 || design_n < 1 || design_paths < 1)
            throw ValidationError("synthetic design dimensions/path count must be >= 1");
        if (!(theta_ja > 0) || !(r_lat > 0) || !(eps_th > 0))
            throw ValidationError("thermal parameters must be positive");
        if (!(delta_t > 0)) throw ValidationError("delta_t must be > 0");
        if (guardband < 1.0) throw ValidationError("guardband must be >= 1");
        if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
        if (v_step_mv < 1) throw ValidationError("voltage step must be >= 1 mV");
        for (double b : betas)
            if (b < 1.0) throw ValidationError("over-scaling factors must be >= 1");
        if (lut_margin < 0) throw ValidationError("LUT margin must be >= 0");
        for (double a : ambients())
            if (a < 0.0 || a > 100.0)
                throw ValidationError("ambient temperature must stay within [0, 100] degC");
    }
};

namespace detail {

inline std::vector<double> sweep_from_json(const nlohmann::json& j, const char* what) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object()) {
        const double start = j.at("start").get<double>();
        const double stop = j.at("stop").get<double>();
        const double step = j.at("step").get<double>();
        if (!(step > 0)) throw ValidationError(std::string(what) + ": sweep step must be > 0");
        std::vector<double> v;
        for (double x = start; x <= stop + 1e-9; x += step) v.push_back(x);
        return v;
    }
    throw ParseError(std::string(what) + ": expected an array or {start, stop, step}");
}

} // namespace detail

inline RunConfig runconfig_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("charlib")) c.charlib_path = j.at("charlib").get<std::string>();
        c.charlib_seed = j.value("charlib_seed", c.charlib_seed);
        if (j.contains("design")) c.design_path = j.at("design").get<std::string>();
        c.design_m = j.value("design_m", c.design_m);
        c.design_n = j.value("design_n", c.design_n);
        c.design_paths = j.value("design_paths", c.design_paths);
        c.design_seed = j.value("design_seed", c.design_seed);
        c.t_amb = j.value("t_amb", c.t_amb);
        if (j.contains("t_amb_sweep"))
            c.t_amb_sweep = detail::sweep_from_json(j.at("t_amb_sweep"), "t_amb_sweep");
        c.theta_ja = j.value("theta_ja", c.theta_ja);
        c.r_lat = j.value("r_lat", c.r_lat);
        c.eps_th = j.value("eps_th", c.eps_th);
        c.thermal_max_iters = j.value("thermal_max_iters", c.thermal_max_iters);
        c.delta_t = j.value("delta_t", c.delta_t);
        c.guardband = j.value("guardband", c.guardband);
        c.max_iters = j.value("max_iters", c.max_iters);
        c.v_step_mv = j.value("v_step_mv", c.v_step_mv);
        if (j.contains("betas")) c.betas = j.at("betas").get<std::vector<double>>();
        if (j.contains("lut_keys")) c.lut_keys = detail::sweep_from_json(j.at("lut_keys"), "lut_keys");
        c.lut_margin = j.value("lut_margin", c.lut_margin);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.oracle = j.value("oracle", c.oracle);
        c.prune = j.value("prune", c.prune);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("run config: ") + e.what());
    }
    return c;
}

inline RunConfig load_runconfig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config parse error in " + path.string() + ": " + e.what());
    }
    return runconfig_from_json(j);
}

} // namespace voltherm
