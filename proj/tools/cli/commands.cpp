#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pencilcrt/error.hpp"
#include "pencilcrt/seeding.hpp"
#include "pencilcrt/stream_io.hpp"
#include "run_config.hpp"

namespace pencilcrt::cli {

namespace {

constexpr const char* kStream1Name = "ch1.snyq";
constexpr const char* kStream2Name = "ch2.snyq";

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

// Writes via a temporary buffer so a failed run never leaves half a file.
void write_text_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buf;
    body(buf);
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    const std::string text = buf.str();
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    file.close();
    if (!file) throw IoError("failed writing " + path.string());
}

std::optional<std::filesystem::path> output_target(const CommonArgs& args, const RunConfig& cfg) {
    if (args.out) return args.out;
    if (cfg.output_path) return std::filesystem::path(*cfg.output_path);
    return std::nullopt;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io) {
            err << "i/o error: " << e.what() << '\n';
            return kExitIo;
        }
        if (e.kind() == ErrorKind::InvalidArgument) {
            err << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        err << "estimation failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitPartial;
    }
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_tone_table(std::ostream& out, const PipelineResult& result) {
    out << "freq_hz,amplitude,phase_rad,k1,k2,residual_hz,status\n";
    for (const auto& row : result.rows) {
        if (row.tone) {
            const auto& t = *row.tone;
            out << format_number(t.freq_hz) << ',' << format_number(t.amplitude) << ','
                << format_number(t.phase_rad) << ',' << t.k1 << ',' << t.k2 << ','
                << format_number(t.residual_hz) << ",ok\n";
        } else {
            const double amp = 0.5 * (row.pair.chan1.amplitude + row.pair.chan2.amplitude);
            const double phase = wrap_phase(std::arg(std::polar(1.0, row.pair.chan1.phase_rad) +
                                                     std::polar(1.0, row.pair.chan2.phase_rad)));
            out << "NA," << format_number(amp) << ',' << format_number(phase) << ",NA,NA,NA,"
                << to_string(row.error.value_or(ErrorKind::NoCandidate)) << '\n';
        }
    }
}

void write_bench_csv(std::ostream& out, const BenchmarkResult& result) {
    out << "method,sample_length,snr_db,rmse_freq_hz,rmse_amp_rel,rmse_phase_rad,failures\n";
    for (const auto& c : result.cells) {
        out << to_string(c.method) << ',' << c.sample_length << ',' << format_number(c.snr_db) << ','
            << format_optional(c.rmse_freq_hz) << ',' << format_optional(c.rmse_amp_rel) << ','
            << format_optional(c.rmse_phase_rad) << ',' << c.failure_count << '\n';
    }
}

void write_bench_long_csv(std::ostream& out, const BenchmarkResult& result) {
    out << "method,sample_length,snr_db,metric,value\n";
    for (const auto& c : result.cells) {
        const std::string prefix = std::string(to_string(c.method)) + ',' + std::to_string(c.sample_length) +
                                   ',' + format_number(c.snr_db) + ',';
        out << prefix << "rmse_freq_hz," << format_optional(c.rmse_freq_hz) << '\n';
        out << prefix << "rmse_amp_rel," << format_optional(c.rmse_amp_rel) << '\n';
        out << prefix << "rmse_phase_rad," << format_optional(c.rmse_phase_rad) << '\n';
        out << prefix << "failures," << c.failure_count << '\n';
    }
}

std::filesystem::path long_format_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    const std::string stem = p.stem().string();
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    p.replace_filename(stem + "_long" + ext);
    return p;
}

int cmd_synth(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_run_config(args.config);
        if (!cfg.signal) throw ConfigError("synth needs a signal section");
        const auto& s = cfg.sampling;
        if (s.rate1_hz == s.rate2_hz) throw ConfigError("sampling: rates must differ");
        const std::uint64_t seed = args.seed.value_or(s.seed);

        const std::filesystem::path dir = args.out.value_or(cfg.output_path.value_or("."));
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

        const double rates[2] = {s.rate1_hz, s.rate2_hz};
        const char* names[2] = {kStream1Name, kStream2Name};
        for (std::uint64_t ch = 0; ch < 2; ++ch) {
            const auto clean = synthesize(*cfg.signal, rates[ch], s.n_samples, s.start_index);
            write_stream_file(dir / names[ch], add_awgn(clean, s.snr_db, derive_seed(seed, {ch + 1})));
        }
        out << "synth: wrote " << (dir / kStream1Name).string() << " and " << (dir / kStream2Name).string()
            << " (" << s.n_samples << " samples at " << format_number(s.rate1_hz) << " Hz and "
            << format_number(s.rate2_hz) << " Hz, snr_db=" << format_number(s.snr_db) << ")\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_estimate(const CommonArgs& args, const std::filesystem::path& stream1,
                 const std::filesystem::path& stream2, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_run_config(args.config);
        const auto ch1 = read_stream_file(stream1);
        const auto ch2 = read_stream_file(stream2);
        if (ch1.rate_hz == ch2.rate_hz) throw ConfigError("rates must differ");

        const auto result = run_pipeline(ch1, ch2, cfg.pipeline_config(ch1.rate_hz, ch2.rate_hz));
        const auto target = output_target(args, cfg);
        if (target) {
            write_text_file(*target, [&](std::ostream& os) { write_tone_table(os, result); });
        } else {
            write_tone_table(out, result);
        }
        for (const auto& row : result.rows)
            if (!row.tone) err << "unresolved component: " << row.message << '\n';
        return static_cast<int>(result.fully_resolved() ? kExitOk : kExitPartial);
    });
}

int cmd_bench(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_run_config(args.config);
        ExperimentConfig exp = cfg.experiment_config();
        if (args.seed) exp.master_seed = *args.seed;
        const auto path = output_target(args, cfg);
        if (!path) throw ConfigError("bench needs --out or output.path");

        const auto result = run_sweep(exp);
        write_text_file(*path, [&](std::ostream& os) { write_bench_csv(os, result); });
        write_text_file(long_format_path(*path), [&](std::ostream& os) { write_bench_long_csv(os, result); });
        out << "bench: " << result.cells.size() << " cells, " << exp.trials << " trials each -> "
            << path->string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-rate sub-Nyquist tone estimation (matrix pencil + CRT)", "pencilcrt"};
    app.require_subcommand(1);
    app.footer(config_reference() + "\nExit status: 0 ok, 1 partial/ambiguous, 2 config error, 3 i/o error.\n"
               "PENCILCRT_THREADS caps bench parallelism.");

    CommonArgs common;
    std::string config, out_path;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub, const char* out_help) {
        sub->add_option("--config", config, "JSON run configuration")->required();
        sub->add_option("--out", out_path, out_help);
        sub->add_option("--seed", seed, "override the configured seed");
    };

    auto* synth = app.add_subcommand("synth", "synthesize both channel stream files");
    add_common(synth, "output directory for ch1.snyq / ch2.snyq");
    auto* estimate = app.add_subcommand("estimate", "estimate tones from two stream files");
    add_common(estimate, "tone table CSV (default: stdout)");
    std::vector<std::string> streams;
    estimate->add_option("streams", streams, "channel 1 and channel 2 stream files")->required()->expected(2);
    auto* bench = app.add_subcommand("bench", "Monte Carlo RMSE sweep, GEA vs CS");
    add_common(bench, "RMSE CSV path (a _long copy is written alongside)");

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    common.config = config;
    if (!out_path.empty()) common.out = out_path;
    for (auto* sub : {synth, estimate, bench})
        if (sub->count("--seed") > 0) common.seed = seed;

    if (synth->parsed()) return cmd_synth(common, out, err);
    if (estimate->parsed()) return cmd_estimate(common, streams.at(0), streams.at(1), out, err);
    return cmd_bench(common, out, err);
}

}  // namespace pencilcrt::cli
