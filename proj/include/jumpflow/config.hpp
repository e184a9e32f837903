#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jumpflow {

/// Parsed experiment configuration (INI-style `key = value` with `[section]`
/// headers and `#` comments). Defaults are the field initializers.
struct ExperimentConfig {
    // [grid]
    int n_interior = 31;

    // [operator]
    std::string operator_kind = "laplacian"; // laplacian | fractional
    double fractional_s = 0.5;

    // [nonlinearity] f(r) = a0 + a1 r + a3 r^3 + a5 r^5, shift eta
    double a0 = 0.0, a1 = 0.0, a3 = 0.0, a5 = 0.0, eta = 0.0;

    // [noise]
    std::string noise_kind = "multiplicative"; // multiplicative | additive
    std::vector<std::pair<double, double>> marks = {{0.1, 1.0}}; // (sigma_i, m_i)
    std::string g_kind = "identity"; // identity | constant | tanh | zero
    std::string profile = "sine";    // additive spatial profile: flat | sine
    int profile_mode = 1;

    // [solver]
    double T = 1.0;
    double dt = 0.01;
    double lambda = 1e-3;
    std::vector<double> lambda_seq = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    bool alpha_auto = true;
    double alpha = 0.0;
    double tol = 1e-9;
    double picard_tol = 1e-7;
    std::string x0_kind = "sine"; // sine | constant | zero
    double x0_amp = 1.0;
    int x0_mode = 1;

    // [experiment]
    std::string name = "simulate";
    long samples = 10000;
    std::uint64_t seed = 1;
    double horizon = 0.0; // 0: derived from T per experiment
    double dx_amp = 0.5;
    int dx_mode = 1;
    double dg_amp = 0.0;
    std::vector<double> s_levels = {-1.0, -2.0, -4.0, -8.0};
    double kb_spacing = 0.25;
    std::vector<int> cutoff_levels = {1, 2, 4};
};

struct ConfigError {
    int line = 0;
    std::string message;
};

struct ParseResult {
    std::optional<ExperimentConfig> config; // set only when errors is empty
    std::vector<ConfigError> errors;
    std::vector<std::string> warnings; // e.g. duplicate keys (last one wins)
};

/// Parses and validates; collects every error (not just the first).
ParseResult parse_config(const std::string& text);

/// Canonical dump of an (already valid) configuration, used in manifests.
std::string dump_config(const ExperimentConfig& c);

} // namespace jumpflow
