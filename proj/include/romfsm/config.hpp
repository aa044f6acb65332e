#pragma once

#include "romfsm/burgers.hpp"
#include "romfsm/fsm.hpp"
#include "romfsm/observations.hpp"
#include "romfsm/vorticity.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace romfsm {

enum class Problem { burgers1d, turbulence2d };
enum class ObsStrategy { full_projection, sparse_pinv, sparse_reconstruction };
enum class Scale { paper, desk };

struct RomConfig {
    int r = 0;
    double dt = 0.0;
    double t_final = 0.0;
};

struct ObsConfig {
    SensorLayout::Kind layout = SensorLayout::Kind::full;
    Vec times;
    double sigma = 0.0;
    std::uint64_t seed = 0;  // master seed for the whole experiment
    ObsStrategy strategy = ObsStrategy::full_projection;
    int sensor_stride = 32;  // 2D sparse layouts
};

struct ExperimentConfig {
    Problem problem = Problem::burgers1d;
    // 1D
    BurgersConfig burgers;
    Grid1D grid1d;
    // 2D
    VorticityConfig vorticity;
    Grid2D grid2d;

    RomConfig rom;
    ObsConfig obs;
    AssimilationConfig fsm;
    std::string output_dir;

    void validate() const;
    void apply_scale(Scale scale);  // desk swaps 512^2 -> 128^2 (2D only)
    void apply_seed(std::uint64_t master_seed);
};

/// Strict flat key-value format with [section] headers; unknown sections or
/// keys are errors (ConfigError).
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace romfsm
