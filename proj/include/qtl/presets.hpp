#pragma once

// Built-in experiment presets. configs/fig2.json and configs/fig3.json hold
// the same text; a unit test keeps them in sync.

#include <string>
#include <string_view>

#include "qtl/config.hpp"

namespace qtl {

inline constexpr std::string_view kFig2Preset = R"json({
  "schema": 1,
  "description": "Excess risk vs target sample size for several source sample sizes",
  "ansatz": "rx_rot_rx",
  "grid": {"resolution": 16, "refine": false},
  "quantization": {"bins": 100, "span_sigmas": 4},
  "source": {"kind": "gaussian", "mu0": 1.0, "mu1": -1.0, "sigma2": 0.11, "prior0": 0.5},
  "target": {"kind": "gaussian", "mu0": 1.5, "mu1": -0.5, "sigma2": 0.11, "prior0": 0.5},
  "n_source": [0, 10, 100],
  "n_target": [2, 4, 8, 16, 32, 64],
  "replications": 200,
  "bound": {"delta": 0.5, "d_st_mode": "trace", "r_mode": "analytic_cap"},
  "rademacher": {"outer": 50, "sigma_draws": 100, "exhaustive_max_n": 12},
  "master_seed": 20240611,
  "output_dir": "out/fig2"
}
)json";

inline constexpr std::string_view kFig3Preset = R"json({
  "schema": 1,
  "description": "Transfer excess risk vs shift of both target means",
  "ansatz": "rx_rot_rx",
  "grid": {"resolution": 16, "refine": false},
  "quantization": {"bins": 100, "span_sigmas": 4},
  "source": {"kind": "gaussian", "mu0": 1.0, "mu1": -2.0, "sigma2": 1.0, "prior0": 0.5},
  "n_source": [10],
  "n_target": [4],
  "shifts": [-2.0, -1.75, -1.5, -1.25, -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
  "replications": 200,
  "bound": {"delta": 0.9, "d_st_mode": "trace", "r_mode": "analytic_cap"},
  "rademacher": {"outer": 50, "sigma_draws": 100, "exhaustive_max_n": 12},
  "master_seed": 20240611,
  "output_dir": "out/fig3"
}
)json";

inline ExperimentConfig preset_config(const std::string& name) {
    if (name == "fig2") return parse_config(parse_json_text(std::string(kFig2Preset), "preset fig2"));
    if (name == "fig3") return parse_config(parse_json_text(std::string(kFig3Preset), "preset fig3"));
    throw ConfigInvalid("preset: unknown preset '" + name + "' (expected fig2 or fig3)");
}

}  // namespace qtl
