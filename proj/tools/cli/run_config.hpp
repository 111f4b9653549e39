#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pencilcrt/bench_harness.hpp"
#include "pencilcrt/cs_baseline.hpp"
#include "pencilcrt/pipeline.hpp"

namespace pencilcrt::cli {

/// Config parse or validation failure (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SamplingSection {
    double rate1_hz = 101.0;
    double rate2_hz = 103.0;
    std::size_t n_samples = 256;
    std::int64_t start_index = 0;
    double snr_db = kNoiseless;
    std::uint64_t seed = 0;
};

struct PencilOverrides {
    std::optional<std::size_t> pencil_param_L;
    std::optional<std::size_t> model_order;
    std::optional<double> svd_rel_threshold;
    std::optional<double> unit_circle_tol;

    PencilConfig apply(PencilConfig base) const;
};

struct DealiasSection {
    std::optional<std::uint32_t> max_fold_index_n;
    std::optional<double> f_max_hint_hz;
    std::optional<double> freq_match_tol_hz;
    double amp_weight = 1.0;
    double phase_weight = 1.0;
};

struct CsSection {
    std::size_t full_length_N = 2048;
    std::optional<std::size_t> sparsity_K;
    std::optional<std::size_t> measurements_M;
};

struct ExperimentSection {
    double nyquist_rate_hz = 10240.0;
    std::vector<double> snr_grid_db{0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
    std::optional<std::vector<std::size_t>> sample_lengths;  // default [2M, 4M, 16M]
    std::size_t trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<Method> methods{Method::Gea, Method::Cs};
    bool use_true_order = true;
    std::size_t threads = 0;
};

/// The JSON run configuration. Every section is optional; unknown keys
/// anywhere are rejected.
struct RunConfig {
    std::optional<SignalSpec> signal;
    SamplingSection sampling;
    PencilOverrides pencil;
    OrderConfig order;
    DealiasSection dealias;
    CsSection cs;
    ExperimentSection experiment;
    std::optional<std::string> output_path;

    /// Two-channel estimator settings for streams at the given rates.
    PipelineConfig pipeline_config(double rate1_hz, double rate2_hz) const;

    /// Sweep settings; signal defaults to the built-in ten-tone set.
    ExperimentConfig experiment_config() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Text appended to --help: every key with its default.
std::string config_reference();

}  // namespace pencilcrt::cli
