#include "pencilcrt/bench_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <tuple>

#include "pencilcrt/cs_baseline.hpp"
#include "pencilcrt/error.hpp"
#include "pencilcrt/pipeline.hpp"
#include "pencilcrt/seeding.hpp"

namespace pencilcrt {

namespace {

constexpr std::uint64_t kChannel1 = 1;
constexpr std::uint64_t kChannel2 = 2;
constexpr std::uint64_t kSensing = 3;

std::uint64_t method_index(Method m) noexcept { return m == Method::Gea ? 0 : 1; }

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial, Method m, std::uint64_t channel) {
    return derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(trial), method_index(m), channel});
}

TrialRecord score(std::span<const EstimatedTone> estimates, std::span<const Tone> truth) {
    TrialRecord rec;
    const auto match = match_to_truth(estimates, truth);
    for (std::size_t j = 0; j < truth.size(); ++j) {
        if (!match[j]) {
            rec.failure = "missed-tone";
            rec.errors.clear();
            return rec;
        }
        const auto& est = estimates[*match[j]];
        const auto& t = truth[j];
        rec.errors.push_back({std::abs(est.freq_hz - t.freq_hz()),
                              std::abs(est.amplitude - t.amplitude()) / t.amplitude(),
                              std::abs(wrap_phase(est.phase_rad - t.phase_rad()))});
    }
    return rec;
}

TrialRecord failed(std::string tag) {
    TrialRecord rec;
    rec.failure = std::move(tag);
    return rec;
}

PipelineConfig gea_pipeline_config(const ExperimentConfig& cfg) {
    PipelineConfig p;
    p.pencil = cfg.pencil;
    if (cfg.use_true_order) p.pencil.model_order = cfg.spec.size();
    p.order = cfg.order;
    p.dealias = DealiasConfig::for_max_frequency(cfg.rate1_hz, cfg.rate2_hz, cfg.nyquist_rate_hz);
    if (cfg.max_fold_index_n) p.dealias.max_fold_index_n = *cfg.max_fold_index_n;
    p.dealias.freq_match_tol_hz = cfg.freq_match_tol_hz.value_or(
        0.5 * fold_residual_gap(cfg.rate1_hz, cfg.rate2_hz, p.dealias.max_fold_index_n));
    p.dealias.amp_weight = cfg.amp_weight;
    p.dealias.phase_weight = cfg.phase_weight;
    return p;
}

std::vector<TrialRecord> gea_trials(const ExperimentConfig& cfg, std::span<const double> snrs,
                                    std::size_t length, std::size_t trial) {
    const auto clean1 = synthesize(cfg.spec, cfg.rate1_hz, length);
    const auto clean2 = synthesize(cfg.spec, cfg.rate2_hz, length);
    const auto pcfg = gea_pipeline_config(cfg);
    const auto seed1 = trial_seed(cfg, trial, Method::Gea, kChannel1);
    const auto seed2 = trial_seed(cfg, trial, Method::Gea, kChannel2);

    std::vector<TrialRecord> out;
    out.reserve(snrs.size());
    for (double snr : snrs) {
        try {
            const auto result = run_pipeline(add_awgn(clean1, snr, seed1), add_awgn(clean2, snr, seed2), pcfg);
            std::vector<EstimatedTone> est;
            std::optional<std::string> row_failure;
            for (const auto& row : result.rows) {
                if (row.tone) {
                    est.push_back({row.tone->freq_hz, row.tone->amplitude, row.tone->phase_rad});
                } else if (!row_failure) {
                    row_failure = to_string(row.error.value_or(ErrorKind::NoCandidate));
                }
            }
            out.push_back(row_failure ? failed(*row_failure) : score(est, cfg.spec.tones()));
        } catch (const Error& e) {
            out.push_back(failed(to_string(e.kind())));
        }
    }
    return out;
}

std::vector<TrialRecord> cs_trials(const ExperimentConfig& cfg, std::span<const double> snrs,
                                   std::size_t length, std::size_t trial) {
    const auto clean = synthesize(cfg.spec, cfg.nyquist_rate_hz, cfg.full_length_N);
    const auto sensing = make_sensing_matrix(length, cfg.full_length_N, trial_seed(cfg, trial, Method::Cs, kSensing));
    const auto dictionary = dft_dictionary(sensing);
    const auto noise_seed = trial_seed(cfg, trial, Method::Cs, kChannel1);

    std::vector<TrialRecord> out;
    out.reserve(snrs.size());
    for (double snr : snrs) {
        try {
            const auto noisy = add_awgn(clean, snr, noise_seed);
            const auto recovery = omp_recover_with_dictionary(measure(sensing, noisy.samples), dictionary,
                                                              cfg.cs_sparsity_K.value_or(cfg.spec.size()));
            std::vector<EstimatedTone> est;
            for (const auto& t : extract_tones(recovery, cfg.full_length_N, cfg.nyquist_rate_hz))
                est.push_back({t.freq_hz(), t.amplitude(), t.phase_rad()});
            out.push_back(score(est, cfg.spec.tones()));
        } catch (const Error& e) {
            out.push_back(failed(to_string(e.kind())));
        }
    }
    return out;
}

std::vector<TrialRecord> trials_over_snr(const ExperimentConfig& cfg, std::span<const double> snrs,
                                         std::size_t length, std::size_t trial, Method method) {
    return method == Method::Gea ? gea_trials(cfg, snrs, length, trial) : cs_trials(cfg, snrs, length, trial);
}

}  // namespace

std::string_view to_string(Method m) noexcept { return m == Method::Gea ? "gea" : "cs"; }

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "gea") return Method::Gea;
    if (name == "cs") return Method::Cs;
    return std::nullopt;
}

SignalSpec default_ground_truth() {
    return SignalSpec({
        Tone(3691.420, 1.993, 0.8435),
        Tone(4521.259, 1.689, -0.9974),
        Tone(5266.797, 1.433, -0.3541),
        Tone(6363.628, 1.983, 2.8210),
        Tone(6726.619, 0.823, -2.1197),
        Tone(7308.853, 0.740, 1.6350),
        Tone(7478.863, 1.419, -2.8024),
        Tone(7873.181, 0.566, -1.5157),
        Tone(8263.823, 0.554, 0.3889),
        Tone(8807.002, 1.272, 2.2585),
    });
}

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
    if (!(rate1_hz > 0.0) || !(rate2_hz > 0.0)) bad("sub-rates must be positive");
    if (rate1_hz == rate2_hz) bad("rates must differ");
    if (!(nyquist_rate_hz > 0.0)) bad("nyquist_rate_hz must be positive");
    if (spec.max_freq_hz() >= nyquist_rate_hz) bad("ground-truth tones must lie below nyquist_rate_hz");
    if (full_length_N == 0) bad("full_length_N must be positive");
    if (snr_grid_db.empty()) bad("snr_grid_db must be non-empty");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        if (std::isnan(snr_grid_db[i])) bad("snr_grid_db contains NaN");
        if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) bad("snr_grid_db must be strictly increasing");
    }
    if (sample_lengths.empty()) bad("sample_lengths must be non-empty");
    if (trials == 0) bad("trials must be >= 1");
    if (methods.empty()) bad("methods must be non-empty");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i] == methods[j]) bad("methods must be distinct");
    const bool has_cs = std::find(methods.begin(), methods.end(), Method::Cs) != methods.end();
    for (std::size_t len : sample_lengths) {
        if (len == 0) bad("sample lengths must be positive");
        if (has_cs && (len > full_length_N || len < cs_sparsity_K.value_or(spec.size())))
            bad("CS sample length must lie in [K, full_length_N]");
    }
    pencil.validate();
    order.validate();
    if (freq_match_tol_hz && !(*freq_match_tol_hz > 0.0)) bad("freq_match_tol_hz must be positive");
    if (max_fold_index_n && *max_fold_index_n == 0) bad("max_fold_index_n must be >= 1");
    if (cs_sparsity_K && *cs_sparsity_K == 0) bad("sparsity_K must be >= 1");
}

std::vector<std::optional<std::size_t>> match_to_truth(std::span<const EstimatedTone> estimates,
                                                       std::span<const Tone> truth) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> dist;
    dist.reserve(estimates.size() * truth.size());
    for (std::size_t i = 0; i < estimates.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j)
            dist.emplace_back(std::abs(estimates[i].freq_hz - truth[j].freq_hz()), j, i);
    std::sort(dist.begin(), dist.end());

    std::vector<std::optional<std::size_t>> match(truth.size());
    std::vector<bool> used(estimates.size(), false);
    for (const auto& [d, j, i] : dist) {
        if (match[j] || used[i]) continue;
        match[j] = i;
        used[i] = true;
    }
    return match;
}

TrialRecord run_trial(const ExperimentConfig& cfg, double snr_db, std::size_t length,
                      std::size_t trial_index, Method method) {
    cfg.validate();
    const double snrs[1] = {snr_db};
    return trials_over_snr(cfg, snrs, length, trial_index, method).front();
}

double compute_rmse(std::span<const double> errors) {
    if (errors.empty()) throw Error(ErrorKind::InvalidArgument, "RMSE of an empty list");
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

std::size_t default_thread_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PENCILCRT_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
    }
    return n;
}

const BenchmarkCell& BenchmarkResult::at(Method method, std::size_t length, double snr_db) const {
    for (const auto& c : cells)
        if (c.method == method && c.sample_length == length && c.snr_db == snr_db) return c;
    throw Error(ErrorKind::InvalidArgument, "no such benchmark cell");
}

BenchmarkResult run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_lengths = cfg.sample_lengths.size();
    const std::size_t n_snr = cfg.snr_grid_db.size();
    const std::size_t n_trials = cfg.trials;

    // records[((m * L + l) * T + t) * S + s]
    std::vector<TrialRecord> records(n_methods * n_lengths * n_trials * n_snr);
    const std::size_t n_tasks = n_methods * n_lengths * n_trials;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const std::size_t t = task % n_trials;
            const std::size_t l = (task / n_trials) % n_lengths;
            const std::size_t m = task / (n_trials * n_lengths);
            auto recs = trials_over_snr(cfg, cfg.snr_grid_db, cfg.sample_lengths[l], t, cfg.methods[m]);
            std::move(recs.begin(), recs.end(), records.begin() + static_cast<std::ptrdiff_t>(task * n_snr));
        }
    };

    const std::size_t n_threads = std::min(n_tasks, cfg.threads ? cfg.threads : default_thread_count());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    BenchmarkResult result;
    result.cells.reserve(n_methods * n_lengths * n_snr);
    for (std::size_t m = 0; m < n_methods; ++m) {
        for (std::size_t l = 0; l < n_lengths; ++l) {
            for (std::size_t s = 0; s < n_snr; ++s) {
                BenchmarkCell cell;
                cell.method = cfg.methods[m];
                cell.sample_length = cfg.sample_lengths[l];
                cell.snr_db = cfg.snr_grid_db[s];
                std::vector<double> ef, ea, ep;
                for (std::size_t t = 0; t < n_trials; ++t) {
                    const auto& rec = records[((m * n_lengths + l) * n_trials + t) * n_snr + s];
                    if (!rec.ok()) {
                        ++cell.failure_count;
                        continue;
                    }
                    for (const auto& e : rec.errors) {
                        ef.push_back(e.freq_abs_hz);
                        ea.push_back(e.amp_rel);
                        ep.push_back(e.phase_rad);
                    }
                }
                if (!ef.empty()) {
                    cell.rmse_freq_hz = compute_rmse(ef);
                    cell.rmse_amp_rel = compute_rmse(ea);
                    cell.rmse_phase_rad = compute_rmse(ep);
                }
                result.cells.push_back(cell);
            }
        }
    }
    return result;
}

}  // namespace pencilcrt
