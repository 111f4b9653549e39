#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pencilcrt/dealias_crt.hpp"
#include "pencilcrt/error.hpp"

namespace pencilcrt::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) fail(where, "unknown key '" + key + "'");
    }
}

double get_real(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "expected a finite number");
    return d;
}

// Accepts a number, "inf", or null (noiseless).
double get_snr(const json& v, const std::string& where) {
    if (v.is_null()) return kNoiseless;
    if (v.is_string() && v.get<std::string>() == "inf") return kNoiseless;
    return get_real(v, where);
}

std::uint64_t get_uint(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        fail(where, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::int64_t get_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<std::int64_t>();
}

std::size_t get_positive(const json& v, const std::string& where) {
    const auto u = get_uint(v, where);
    if (u == 0) fail(where, "must be positive");
    return static_cast<std::size_t>(u);
}

// Integer or the string "auto".
std::optional<std::size_t> get_auto_positive(const json& v, const std::string& where) {
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    return get_positive(v, where);
}

bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) fail(where, "expected true or false");
    return v.get<bool>();
}

SignalSpec parse_signal(const json& j) {
    check_keys(j, "signal", {"tones"});
    if (!j.contains("tones") || !j["tones"].is_array()) fail("signal.tones", "expected an array");
    std::vector<Tone> tones;
    std::size_t i = 0;
    for (const auto& t : j["tones"]) {
        const std::string where = "signal.tones[" + std::to_string(i++) + "]";
        check_keys(t, where, {"freq_hz", "amplitude", "phase_rad"});
        if (!t.contains("freq_hz") || !t.contains("amplitude")) fail(where, "freq_hz and amplitude are required");
        const double phase = t.contains("phase_rad") ? get_real(t["phase_rad"], where + ".phase_rad") : 0.0;
        try {
            tones.emplace_back(get_real(t["freq_hz"], where + ".freq_hz"),
                               get_real(t["amplitude"], where + ".amplitude"), phase);
        } catch (const Error& e) {
            fail(where, e.what());
        }
    }
    try {
        return SignalSpec(std::move(tones));
    } catch (const Error& e) {
        fail("signal", e.what());
    }
}

void parse_sampling(const json& j, SamplingSection& s) {
    check_keys(j, "sampling", {"rate1_hz", "rate2_hz", "n_samples", "start_index", "snr_db", "seed"});
    if (j.contains("rate1_hz")) s.rate1_hz = get_real(j["rate1_hz"], "sampling.rate1_hz");
    if (j.contains("rate2_hz")) s.rate2_hz = get_real(j["rate2_hz"], "sampling.rate2_hz");
    if (j.contains("n_samples")) s.n_samples = get_positive(j["n_samples"], "sampling.n_samples");
    if (j.contains("start_index")) s.start_index = get_int(j["start_index"], "sampling.start_index");
    if (j.contains("snr_db")) s.snr_db = get_snr(j["snr_db"], "sampling.snr_db");
    if (j.contains("seed")) s.seed = get_uint(j["seed"], "sampling.seed");
    if (!(s.rate1_hz > 0.0) || !(s.rate2_hz > 0.0)) fail("sampling", "rates must be positive");
}

void parse_pencil(const json& j, PencilOverrides& p) {
    check_keys(j, "pencil", {"pencil_param_L", "model_order", "svd_rel_threshold", "unit_circle_tol"});
    if (j.contains("pencil_param_L")) p.pencil_param_L = get_auto_positive(j["pencil_param_L"], "pencil.pencil_param_L");
    if (j.contains("model_order")) p.model_order = get_auto_positive(j["model_order"], "pencil.model_order");
    if (j.contains("svd_rel_threshold"))
        p.svd_rel_threshold = get_real(j["svd_rel_threshold"], "pencil.svd_rel_threshold");
    if (j.contains("unit_circle_tol")) p.unit_circle_tol = get_real(j["unit_circle_tol"], "pencil.unit_circle_tol");
    try {
        p.apply(PencilConfig{}).validate();
    } catch (const Error& e) {
        fail("pencil", e.what());
    }
}

void parse_order(const json& j, OrderConfig& o) {
    check_keys(j, "order", {"rel_peak_threshold", "min_peak_separation_bins"});
    if (j.contains("rel_peak_threshold")) o.rel_peak_threshold = get_real(j["rel_peak_threshold"], "order.rel_peak_threshold");
    if (j.contains("min_peak_separation_bins"))
        o.min_peak_separation_bins = get_positive(j["min_peak_separation_bins"], "order.min_peak_separation_bins");
    try {
        o.validate();
    } catch (const Error& e) {
        fail("order", e.what());
    }
}

void parse_dealias(const json& j, DealiasSection& d) {
    check_keys(j, "dealias", {"max_fold_index_n", "f_max_hint_hz", "freq_match_tol_hz", "amp_weight", "phase_weight"});
    if (j.contains("max_fold_index_n")) {
        const auto n = get_auto_positive(j["max_fold_index_n"], "dealias.max_fold_index_n");
        if (n && *n > std::numeric_limits<std::uint32_t>::max()) fail("dealias.max_fold_index_n", "too large");
        if (n) d.max_fold_index_n = static_cast<std::uint32_t>(*n);
    }
    if (j.contains("f_max_hint_hz")) {
        d.f_max_hint_hz = get_real(j["f_max_hint_hz"], "dealias.f_max_hint_hz");
        if (!(*d.f_max_hint_hz > 0.0)) fail("dealias.f_max_hint_hz", "must be positive");
    }
    if (j.contains("freq_match_tol_hz") &&
        !(j["freq_match_tol_hz"].is_string() && j["freq_match_tol_hz"].get<std::string>() == "auto")) {
        d.freq_match_tol_hz = get_real(j["freq_match_tol_hz"], "dealias.freq_match_tol_hz");
        if (!(*d.freq_match_tol_hz > 0.0)) fail("dealias.freq_match_tol_hz", "must be positive");
    }
    if (j.contains("amp_weight")) d.amp_weight = get_real(j["amp_weight"], "dealias.amp_weight");
    if (j.contains("phase_weight")) d.phase_weight = get_real(j["phase_weight"], "dealias.phase_weight");
    if (d.amp_weight < 0.0 || d.phase_weight < 0.0) fail("dealias", "weights must be non-negative");
}

void parse_cs(const json& j, CsSection& c) {
    check_keys(j, "cs", {"full_length_N", "sparsity_K", "measurements_M"});
    if (j.contains("full_length_N")) c.full_length_N = get_positive(j["full_length_N"], "cs.full_length_N");
    if (j.contains("sparsity_K")) c.sparsity_K = get_positive(j["sparsity_K"], "cs.sparsity_K");
    if (j.contains("measurements_M")) c.measurements_M = get_positive(j["measurements_M"], "cs.measurements_M");
    const std::size_t k = c.sparsity_K.value_or(1);
    if (k > c.full_length_N) fail("cs", "need K <= N");
    if (c.measurements_M && (*c.measurements_M < k || *c.measurements_M > c.full_length_N))
        fail("cs", "need K <= M <= N");
}

void parse_experiment(const json& j, ExperimentSection& e) {
    check_keys(j, "experiment", {"nyquist_rate_hz", "snr_grid_db", "sample_lengths", "trials", "master_seed",
                                 "methods", "use_true_order", "threads"});
    if (j.contains("nyquist_rate_hz")) e.nyquist_rate_hz = get_real(j["nyquist_rate_hz"], "experiment.nyquist_rate_hz");
    if (j.contains("snr_grid_db")) {
        const auto& g = j["snr_grid_db"];
        if (!g.is_array() || g.empty()) fail("experiment.snr_grid_db", "expected a non-empty array");
        e.snr_grid_db.clear();
        for (const auto& v : g) e.snr_grid_db.push_back(get_snr(v, "experiment.snr_grid_db"));
        for (std::size_t i = 1; i < e.snr_grid_db.size(); ++i)
            if (!(e.snr_grid_db[i] > e.snr_grid_db[i - 1]))
                fail("experiment.snr_grid_db", "must be strictly increasing");
    }
    if (j.contains("sample_lengths")) {
        const auto& g = j["sample_lengths"];
        if (!g.is_array() || g.empty()) fail("experiment.sample_lengths", "expected a non-empty array");
        std::vector<std::size_t> lens;
        for (const auto& v : g) lens.push_back(get_positive(v, "experiment.sample_lengths"));
        e.sample_lengths = std::move(lens);
    }
    if (j.contains("trials")) e.trials = get_positive(j["trials"], "experiment.trials");
    if (j.contains("master_seed")) e.master_seed = get_uint(j["master_seed"], "experiment.master_seed");
    if (j.contains("methods")) {
        const auto& g = j["methods"];
        if (!g.is_array() || g.empty()) fail("experiment.methods", "expected a non-empty array");
        e.methods.clear();
        for (const auto& v : g) {
            const auto m = v.is_string() ? parse_method(v.get<std::string>()) : std::nullopt;
            if (!m) fail("experiment.methods", "expected \"gea\" or \"cs\"");
            if (std::find(e.methods.begin(), e.methods.end(), *m) != e.methods.end())
                fail("experiment.methods", "duplicate method");
            e.methods.push_back(*m);
        }
    }
    if (j.contains("use_true_order")) e.use_true_order = get_bool(j["use_true_order"], "experiment.use_true_order");
    if (j.contains("threads")) e.threads = static_cast<std::size_t>(get_uint(j["threads"], "experiment.threads"));
}

}  // namespace

PencilConfig PencilOverrides::apply(PencilConfig base) const {
    if (pencil_param_L) base.pencil_param_L = pencil_param_L;
    if (model_order) base.model_order = model_order;
    if (svd_rel_threshold) base.svd_rel_threshold = *svd_rel_threshold;
    if (unit_circle_tol) base.unit_circle_tol = *unit_circle_tol;
    return base;
}

PipelineConfig RunConfig::pipeline_config(double rate1_hz, double rate2_hz) const {
    PipelineConfig p;
    p.pencil = pencil.apply(PencilConfig{});
    p.order = order;
    p.dealias.rate1_hz = rate1_hz;
    p.dealias.rate2_hz = rate2_hz;
    const double min_rate = std::min(rate1_hz, rate2_hz);
    if (dealias.max_fold_index_n) {
        p.dealias.max_fold_index_n = *dealias.max_fold_index_n;
    } else if (dealias.f_max_hint_hz) {
        p.dealias = DealiasConfig::for_max_frequency(rate1_hz, rate2_hz, *dealias.f_max_hint_hz);
    } else {
        // Cover the unambiguous range [0, lcm) and no more.
        const double range = unambiguous_range(rate1_hz, rate2_hz);
        if (!std::isfinite(range) || range / min_rate > 1e7)
            throw ConfigError("dealias: rates share no usable common grid; set max_fold_index_n or f_max_hint_hz");
        p.dealias.max_fold_index_n =
            static_cast<std::uint32_t>(std::max(1.0, std::ceil(range / min_rate) - 1.0));
    }
    p.dealias.freq_match_tol_hz = dealias.freq_match_tol_hz;
    p.dealias.amp_weight = dealias.amp_weight;
    p.dealias.phase_weight = dealias.phase_weight;
    return p;
}

ExperimentConfig RunConfig::experiment_config() const {
    ExperimentConfig e;
    if (signal) e.spec = *signal;
    e.rate1_hz = sampling.rate1_hz;
    e.rate2_hz = sampling.rate2_hz;
    e.nyquist_rate_hz = experiment.nyquist_rate_hz;
    e.full_length_N = cs.full_length_N;
    e.cs_sparsity_K = cs.sparsity_K;
    e.snr_grid_db = experiment.snr_grid_db;
    if (experiment.sample_lengths) {
        e.sample_lengths = *experiment.sample_lengths;
    } else {
        const std::size_t k = cs.sparsity_K.value_or(e.spec.size());
        if (k > cs.full_length_N) throw ConfigError("cs: sparsity exceeds full_length_N");
        const std::size_t m = cs.measurements_M.value_or(min_measurements(cs.full_length_N, k));
        e.sample_lengths = {2 * m, 4 * m, 16 * m};
    }
    e.trials = experiment.trials;
    e.master_seed = experiment.master_seed;
    e.methods = experiment.methods;
    e.use_true_order = experiment.use_true_order;
    e.threads = experiment.threads;
    e.pencil = pencil.apply(harness_pencil_defaults());
    e.order = order;
    if (dealias.max_fold_index_n) {
        e.max_fold_index_n = dealias.max_fold_index_n;
    } else if (dealias.f_max_hint_hz) {
        e.max_fold_index_n = DealiasConfig::for_max_frequency(e.rate1_hz, e.rate2_hz, *dealias.f_max_hint_hz)
                                 .max_fold_index_n;
    }
    e.freq_match_tol_hz = dealias.freq_match_tol_hz;
    e.amp_weight = dealias.amp_weight;
    e.phase_weight = dealias.phase_weight;
    try {
        e.validate();
    } catch (const Error& err) {
        throw ConfigError(std::string("experiment: ") + err.what());
    }
    return e;
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"signal", "sampling", "pencil", "order", "dealias", "cs", "experiment", "output"});

    RunConfig cfg;
    try {
        if (root.contains("signal")) cfg.signal = parse_signal(root["signal"]);
        if (root.contains("sampling")) parse_sampling(root["sampling"], cfg.sampling);
        if (root.contains("pencil")) parse_pencil(root["pencil"], cfg.pencil);
        if (root.contains("order")) parse_order(root["order"], cfg.order);
        if (root.contains("dealias")) parse_dealias(root["dealias"], cfg.dealias);
        if (root.contains("cs")) parse_cs(root["cs"], cfg.cs);
        if (root.contains("experiment")) parse_experiment(root["experiment"], cfg.experiment);
        if (root.contains("output")) {
            check_keys(root["output"], "output", {"path"});
            if (root["output"].contains("path")) {
                if (!root["output"]["path"].is_string()) fail("output.path", "expected a string");
                cfg.output_path = root["output"]["path"].get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string config_reference() {
    return R"(Config file (JSON; every section optional, unknown keys rejected):
  signal.tones[]            {freq_hz >= 0, amplitude > 0, phase_rad = 0}
                            bench default: built-in 10-tone set in [500, 9500] Hz
  sampling.rate1_hz         101
  sampling.rate2_hz         103
  sampling.n_samples        256
  sampling.start_index      0
  sampling.snr_db           null (noiseless); number or "inf"
  sampling.seed             0
  pencil.pencil_param_L     "auto" (floor(N/3))
  pencil.model_order        "auto" (FFT peak count; bench: number of tones)
  pencil.svd_rel_threshold  1e-3
  pencil.unit_circle_tol    1e-2 (bench: 0.5)
  order.rel_peak_threshold  0.1
  order.min_peak_separation_bins  2
  dealias.max_fold_index_n  "auto": ceil(f_max_hint_hz / min rate) if a hint is
                            given, else cover [0, lcm(rate1, rate2))
                            (bench: ceil(nyquist_rate_hz / min rate))
  dealias.f_max_hint_hz     unset
  dealias.freq_match_tol_hz "auto": max(rate1, rate2) * 1e-3
                            (bench: half the smallest fold-residual gap)
  dealias.amp_weight        1
  dealias.phase_weight      1
  cs.full_length_N          2048
  cs.sparsity_K             number of tones
  cs.measurements_M         max(K, ceil(K ln(N/K)))
  experiment.nyquist_rate_hz  10240
  experiment.snr_grid_db    [0, 10, 20, 30, 40, 50] (strictly increasing; "inf" allowed)
  experiment.sample_lengths [2M, 4M, 16M]
  experiment.trials         100
  experiment.master_seed    1
  experiment.methods        ["gea", "cs"]
  experiment.use_true_order true
  experiment.threads        0 (PENCILCRT_THREADS or all cores)
  output.path               used when --out is absent
)";
}

}  // namespace pencilcrt::cli
