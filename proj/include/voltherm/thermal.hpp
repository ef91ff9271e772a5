#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "voltherm/analysis.hpp"
#include "voltherm/design.hpp"
#include "voltherm/errors.hpp"

namespace voltherm {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ThermalConfig {
    double theta_ja = 2.0;  // effective junction-to-ambient resistance, degC/W
    double r_lat = 5.0;     // lateral resistance per unit shared edge, degC/W
    double t_amb = 25.0;    // ambient, degC
    double eps_th = 0.01;   // solver tolerance, degC
    int max_iters = 50000;  // relaxation sweep cap
};

// ---------------------------------------------------------------------------
// Calibrated resistive-grid model
// ---------------------------------------------------------------------------

// Steady-state 5-point resistive network: every tile couples laterally to its
// grid neighbors and convects to ambient. Convective conductance scales with
// tile area weight; the global convective scale is calibrated so 1 W of total
// power raises the area-weighted mean temperature by exactly theta_JA.
class ThermalModel {
public:
    ThermalModel() = default;

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const ThermalConfig& config() const { return cfg_; }
    double conv_resistance(std::size_t i) const { return 1.0 / g_conv_[i]; }

    // Balance per tile: g_conv*(T - T_amb) = P + sum_nb g_lat*(T_nb - T).
    // Damped Gauss-Seidel; the matrix is an irreducibly diagonally dominant
    // M-matrix, so plain sweeps converge monotonically. The sweep increment
    // understates true error by ~1/(1 - rho) for the slowest mode, so the stop
    // also folds in the observed increment contraction ratio.
    TempField solve(const PowerField& pf, double t_amb) const {
        if (pf.rows != rows_ || pf.cols != cols_)
            throw ValidationError("power field does not match the calibrated grid");
        TempField temps = TempField::uniform(rows_, cols_, t_amb);
        const double target = cfg_.eps_th * 1e-2;
        double prev_delta = 0;
        for (int iter = 0; iter < cfg_.max_iters; ++iter) {
            double max_delta = 0;
            for (std::size_t i = 0; i < temps.t.size(); ++i) {
                double num = g_conv_[i] * t_amb + pf.tile_total(i);
                double den = g_conv_[i];
                for (const auto& [nb, g] : neighbors_[i]) {
                    num += g * temps.t[nb];
                    den += g;
                }
                const double next = num / den;
                max_delta = std::max(max_delta, std::abs(next - temps.t[i]));
                temps.t[i] = next;
            }
            if (max_delta == 0.0) return temps;
            if (iter > 0 && prev_delta > 0) {
                const double rho = std::min(max_delta / prev_delta, 1.0 - 1e-9);
                if (max_delta * rho / (1.0 - rho) <= target) return temps;
            }
            prev_delta = max_delta;
        }
        throw ConvergenceError("thermal solve did not converge within " +
                               std::to_string(cfg_.max_iters) + " sweeps");
    }

    // Area-weighted mean rise over ambient; by heat conservation this equals
    // theta_JA * total power once calibrated.
    double mean_rise(const TempField& temps, double t_amb) const {
        double acc = 0;
        for (std::size_t i = 0; i < temps.t.size(); ++i)
            acc += area_w_[i] * (temps.t[i] - t_amb);
        return acc / total_area_w_;
    }

    double total_area_weight() const { return total_area_w_; }
    const std::vector<double>& area_weights() const { return area_w_; }

private:
    friend ThermalModel calibrate(const ThermalConfig&, const Design&);

    int rows_ = 0;
    int cols_ = 0;
    ThermalConfig cfg_;
    std::vector<double> g_conv_;   // W/degC per tile
    std::vector<double> area_w_;
    double total_area_w_ = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> neighbors_; // (index, conductance)
};

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

inline ThermalModel calibrate(const ThermalConfig& cfg, const Design& design) {
    if (!(cfg.theta_ja > 0)) throw ValidationError("theta_JA must be > 0");
    if (!(cfg.r_lat > 0)) throw ValidationError("lateral resistance must be > 0");
    if (!(cfg.eps_th > 0)) throw ValidationError("thermal tolerance must be > 0");

    ThermalModel m;
    m.rows_ = design.rows();
    m.cols_ = design.cols();
    m.cfg_ = cfg;

    const std::size_t n = design.tile_count();
    m.area_w_.resize(n);
    for (const Tile& t : design.tiles()) m.area_w_[design.index(t.row, t.col)] = t.area_weight();
    m.total_area_w_ = design.total_area_weight();

    // Lateral conductance scales with the shared edge length: horizontal
    // neighbors overlap by the shorter of the two tile heights, vertical
    // neighbors share a full tile width.
    m.neighbors_.assign(n, {});
    for (int r = 0; r < m.rows_; ++r)
        for (int c = 0; c < m.cols_; ++c) {
            const std::size_t i = design.index(r, c);
            if (c + 1 < m.cols_) {
                const std::size_t j = design.index(r, c + 1);
                const double g = std::min(m.area_w_[i], m.area_w_[j]) / cfg.r_lat;
                m.neighbors_[i].push_back({j, g});
                m.neighbors_[j].push_back({i, g});
            }
            if (r + 1 < m.rows_) {
                const std::size_t j = design.index(r + 1, c);
                const double g = 1.0 / cfg.r_lat;
                m.neighbors_[i].push_back({j, g});
                m.neighbors_[j].push_back({i, g});
            }
        }

    // With convective resistance proportional to 1/area and power spread
    // uniformly by area, the network settles at a uniform rise, so the scale
    // has the closed form R_c = theta_JA * total_area. The bisection below
    // verifies the calibration against an actual solve and refines the scale
    // if the two ever disagree beyond tolerance.
    PowerField uniform = PowerField::zeros(m.rows_, m.cols_);
    for (std::size_t i = 0; i < n; ++i)
        uniform.dynamic[i] = m.area_w_[i] / m.total_area_w_; // 1 W total

    double scale = cfg.theta_ja * m.total_area_w_;
    auto rise_with_scale = [&](double s) {
        for (std::size_t i = 0; i < n; ++i) m.g_conv_[i] = m.area_w_[i] / s;
        return m.mean_rise(m.solve(uniform, 0.0), 0.0);
    };

    m.g_conv_.resize(n);
    double rise = rise_with_scale(scale);
    if (std::abs(rise - cfg.theta_ja) > cfg.eps_th) {
        double lo = scale * 0.25, hi = scale * 4.0;
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            rise = rise_with_scale(mid);
            if (std::abs(rise - cfg.theta_ja) <= cfg.eps_th * 0.5) {
                ok = true;
                break;
            }
            (rise > cfg.theta_ja ? hi : lo) = mid; // rise grows with scale
        }
        if (!ok)
            throw ConvergenceError("thermal calibration bisection failed to reach theta_JA");
    }
    return m;
}

inline TempField solve_steady(const ThermalModel& model, const PowerField& pf, double t_amb) {
    return model.solve(pf, t_amb);
}

inline TempField solve_steady(const ThermalModel& model, const PowerField& pf) {
    return model.solve(pf, model.config().t_amb);
}

} // namespace voltherm
