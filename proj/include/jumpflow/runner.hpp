#pragma once

#include <string>

#include "jumpflow/config.hpp"
#include "jumpflow/model.hpp"

namespace jumpflow {

struct RunOverrides {
    bool seed_set = false;
    std::uint64_t seed = 0;
    int threads = 0; // 0: library default
};

/// Builds the Model a configuration describes (grid, operator, drift, noise,
/// solver parameters, initial datum).
Model build_model(const ExperimentConfig& cfg);

/// Runs the configured experiment and writes report.csv, report.svg (when the
/// experiment plots) and manifest.txt into out_dir. Returns 0 iff every
/// assertion of the experiment passed; failures print a one-line reason.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                   const RunOverrides& overrides = {});

} // namespace jumpflow
