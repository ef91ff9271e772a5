// Command-line front end: thermal-aware voltage selection, minimum-energy
// search, voltage over-scaling sweeps and VID look-up-table generation on top
// of a characterized delay/power library and a grid thermal model.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "voltherm/cli.hpp"
#include "voltherm/runconfig.hpp"

int main(int argc, char** argv) {
    using namespace voltherm;

    CLI::App app{"voltherm - thermal-margin-driven voltage selection for FPGA designs"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> charlib_path, design_path;
    std::optional<double> t_amb, theta_ja, guardband;
    bool no_prune = false, oracle = false;

    app.add_option("--config", config_path, "JSON run configuration file");
    app.add_option("--out", out_dir, "output directory for reports");
    app.add_option("--seed", seed, "seed for synthetic charlib and design");
    app.add_option("--charlib", charlib_path, "characterization library JSON");
    app.add_option("--design", design_path, "design JSON");
    app.add_option("--t-amb", t_amb, "ambient temperature, degC");
    app.add_option("--theta-ja", theta_ja, "junction-to-ambient resistance, degC/W");
    app.add_option("--guardband", guardband, "timing guardband multiplier (>= 1)");
    app.add_flag("--no-prune", no_prune, "disable energy-search pruning and thermal reuse");
    app.add_flag("--oracle", oracle, "cross-check against the exhaustive reference");

    const char* names[] = {"characterize", "scale", "energy", "overscale", "lut", "oracle-check"};
    const char* descs[] = {
        "synthesize a characterization library and write charlib.json",
        "select (V_core, V_bram) at fixed clock across an ambient sweep",
        "search the minimum-energy voltage/clock point",
        "sweep relaxed timing constraints and report path violations",
        "build the temperature-indexed voltage look-up table",
        "compare the fast search against the exhaustive reference"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], descs[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        if (config_path) cfg = load_runconfig(*config_path);
        if (out_dir) cfg.out_dir = *out_dir;
        if (seed) {
            cfg.charlib_seed = *seed;
            cfg.design_seed = *seed;
        }
        if (charlib_path) cfg.charlib_path = *charlib_path;
        if (design_path) cfg.design_path = *design_path;
        if (t_amb) cfg.t_amb = *t_amb;
        if (theta_ja) cfg.theta_ja = *theta_ja;
        if (guardband) cfg.guardband = *guardband;
        if (no_prune) cfg.prune = false;
        if (oracle) cfg.oracle = true;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitInvalidInput;
    }

    return run_command(app.get_subcommands().front()->get_name(), cfg);
}
