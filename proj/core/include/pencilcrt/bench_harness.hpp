#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pencilcrt/matrix_pencil.hpp"
#include "pencilcrt/model_order.hpp"
#include "pencilcrt/signal_model.hpp"

namespace pencilcrt {

enum class Method { Gea, Cs };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

/// Ten off-grid tones in [500, 9500] Hz whose aliases at 101 Hz and 103 Hz
/// are at least 4 Hz apart (over 2 bins at 108 samples).
SignalSpec default_ground_truth();

/// Pencil settings for sweeps: with the order pinned to the number of tones
/// there are no spurious poles to gate, so the unit-circle gate is loose.
inline PencilConfig harness_pencil_defaults() {
    PencilConfig p;
    p.unit_circle_tol = 0.5;
    return p;
}

struct ExperimentConfig {
    SignalSpec spec = default_ground_truth();
    double rate1_hz = 101.0;
    double rate2_hz = 103.0;
    double nyquist_rate_hz = 10240.0;
    std::size_t full_length_N = 2048;
    std::vector<double> snr_grid_db{0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
    std::vector<std::size_t> sample_lengths{108, 216, 864};
    std::size_t trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<Method> methods{Method::Gea, Method::Cs};
    std::optional<std::size_t> cs_sparsity_K;  // OMP rounds; default: number of tones

    // GEA settings. With use_true_order the pencil order is the number of
    // ground-truth tones; otherwise it comes from FFT peak counting.
    bool use_true_order = true;
    PencilConfig pencil = harness_pencil_defaults();
    OrderConfig order;
    std::optional<std::uint32_t> max_fold_index_n;  // default ceil(nyquist / min rate)
    std::optional<double> freq_match_tol_hz;  // default fold_residual_gap / 2
    double amp_weight = 1.0;
    double phase_weight = 1.0;

    // 0 = PENCILCRT_THREADS or hardware concurrency.
    std::size_t threads = 0;

    void validate() const;
};

/// Error of one estimated tone against its matched ground-truth tone.
struct ToneError {
    double freq_abs_hz = 0.0;
    double amp_rel = 0.0;
    double phase_rad = 0.0;  // |wrap(est - truth)|
};

struct TrialRecord {
    std::optional<std::string> failure;  // error kind or "missed-tone"
    std::vector<ToneError> errors;       // one per ground-truth tone on success

    bool ok() const noexcept { return !failure.has_value(); }
    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct EstimatedTone {
    double freq_hz;
    double amplitude;
    double phase_rad;
};

/// Greedy nearest-frequency matching on globally sorted distances. Returns,
/// for each truth tone, the index of its estimate (nullopt if unmatched).
std::vector<std::optional<std::size_t>> match_to_truth(std::span<const EstimatedTone> estimates,
                                                       std::span<const Tone> truth);

inline bool operator==(const ToneError& a, const ToneError& b) {
    return a.freq_abs_hz == b.freq_abs_hz && a.amp_rel == b.amp_rel && a.phase_rad == b.phase_rad;
}

/// Noise, sensing matrix and every other random draw derive from
/// (master_seed, trial_index, method, channel) only.
TrialRecord run_trial(const ExperimentConfig& cfg, double snr_db, std::size_t length,
                      std::size_t trial_index, Method method);

struct BenchmarkCell {
    Method method = Method::Gea;
    std::size_t sample_length = 0;
    double snr_db = 0.0;
    std::optional<double> rmse_freq_hz;  // nullopt when every trial failed
    std::optional<double> rmse_amp_rel;
    std::optional<double> rmse_phase_rad;
    std::size_t failure_count = 0;

    friend bool operator==(const BenchmarkCell&, const BenchmarkCell&) = default;
};

struct BenchmarkResult {
    std::vector<BenchmarkCell> cells;  // method-major, then length, then SNR

    const BenchmarkCell& at(Method method, std::size_t length, double snr_db) const;
    friend bool operator==(const BenchmarkResult&, const BenchmarkResult&) = default;
};

/// Runs the full grid. Per-trial work may run on several threads; the
/// result does not depend on the thread count.
BenchmarkResult run_sweep(const ExperimentConfig& cfg);

double compute_rmse(std::span<const double> errors);

/// Thread count used when ExperimentConfig::threads is 0.
std::size_t default_thread_count();

}  // namespace pencilcrt
