// qtl: experiment runner for the transfer-learning sweeps and the property suite.
//
//   qtl risk-curve  --config PATH | --preset fig2   [--seed U64] [--out DIR] [--threads N]
//   qtl shift-sweep --config PATH | --preset fig3   [...]
//   qtl bounds      --config PATH | --preset NAME   [...]
//   qtl validate    [--seed U64] [--threads N]
//
// Exit codes: 0 success, 1 validation failure or runtime error, 2 config error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qtl/qtl.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config) {
    if (needs_config) {
        auto* cfg = cmd->add_option("--config", o.config_path, "experiment config (JSON, schema 1)");
        auto* pre = cmd->add_option("--preset", o.preset, "built-in config: fig2 or fig3");
        cfg->excludes(pre);
    }
    cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
    if (needs_config) cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = auto (QTL_THREADS, else all cores)");
}

qtl::ExperimentConfig load(const CommonOptions& o) {
    if (o.config_path.empty() && o.preset.empty()) throw qtl::ConfigInvalid("config: pass --config PATH or --preset NAME");
    qtl::ExperimentConfig cfg = o.preset.empty() ? qtl::load_config(o.config_path) : qtl::preset_config(o.preset);
    if (o.seed) cfg.master_seed = *o.seed;
    if (!o.out.empty()) cfg.output_dir = o.out;
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void write_meta(const fs::path& dir, const std::string& command, const qtl::ExperimentConfig& cfg) {
    qtl::Json meta;
    meta["command"] = command;
    meta["config"] = qtl::config_to_json(cfg);
    meta["grid"] = {{"resolution", cfg.grid_resolution},
                    {"points", qtl::make_grid(cfg).size()},
                    {"num_params", cfg.ansatz.num_params()},
                    {"span", "[0, 2pi) per axis"},
                    {"refine", cfg.refine}};
    write_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

fs::path prepare_dir(const qtl::ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum transfer-learning experiment runner"};
    app.require_subcommand(1);

    CommonOptions risk_opts, shift_opts, bounds_opts, validate_opts;
    auto* risk = app.add_subcommand("risk-curve", "excess risk vs (N_S, N_T); writes risk_curve.csv/.svg");
    auto* shift = app.add_subcommand("shift-sweep", "transfer excess risk vs target mean shift; writes shift_sweep.csv/.svg");
    auto* bounds = app.add_subcommand("bounds", "bound-term breakdown; writes bounds.csv");
    auto* validate = app.add_subcommand("validate", "cross-module property suite");
    add_common(risk, risk_opts, true);
    add_common(shift, shift_opts, true);
    add_common(bounds, bounds_opts, true);
    add_common(validate, validate_opts, false);
    bool corrupt_helstrom = false;
    double effort = 1.0;
    validate->add_flag("--corrupt-helstrom", corrupt_helstrom)->group("");
    validate->add_option("--effort", effort)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (*risk) {
            const qtl::ExperimentConfig cfg = load(risk_opts);
            const auto result = qtl::run_risk_curve(cfg, risk_opts.threads);
            const fs::path dir = prepare_dir(cfg);
            const std::string csv = result.table.str();
            write_file(dir / "risk_curve.csv", csv);
            write_file(dir / "risk_curve_replications.csv", result.per_replication.str());
            write_file(dir / "risk_curve.svg", qtl::risk_curve_svg(csv));
            write_meta(dir, "risk-curve", cfg);
            std::cout << csv << "wrote " << dir.string() << "/risk_curve.{csv,svg} in " << seconds_since(t0) << " s\n";
        } else if (*shift) {
            const qtl::ExperimentConfig cfg = load(shift_opts);
            const auto result = qtl::run_shift_sweep(cfg, shift_opts.threads);
            const fs::path dir = prepare_dir(cfg);
            const std::string csv = result.table.str();
            write_file(dir / "shift_sweep.csv", csv);
            write_file(dir / "shift_sweep.svg", qtl::shift_sweep_svg(csv));
            write_meta(dir, "shift-sweep", cfg);
            std::cout << csv << "wrote " << dir.string() << "/shift_sweep.{csv,svg} in " << seconds_since(t0) << " s\n";
        } else if (*bounds) {
            const qtl::ExperimentConfig cfg = load(bounds_opts);
            const std::string csv = qtl::run_bounds(cfg, bounds_opts.threads).str();
            const fs::path dir = prepare_dir(cfg);
            write_file(dir / "bounds.csv", csv);
            write_meta(dir, "bounds", cfg);
            std::cout << csv << "wrote " << dir.string() << "/bounds.csv in " << seconds_since(t0) << " s\n";
        } else if (*validate) {
            qtl::ValidationOptions opt;
            opt.seed = validate_opts.seed.value_or(0);
            opt.corrupt_helstrom = corrupt_helstrom;
            opt.effort = effort;
            const bool ok = qtl::print_validation(std::cout, qtl::run_validation(opt));
            std::cout << "elapsed " << seconds_since(t0) << " s\n";
            return ok ? 0 : 1;
        }
    } catch (const qtl::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qtl::DegenerateSpec& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qtl::GridTooLarge& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
