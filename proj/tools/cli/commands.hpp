#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pencilcrt/bench_harness.hpp"
#include "pencilcrt/pipeline.hpp"

namespace pencilcrt::cli {

/// Stable process exit statuses.
enum ExitStatus : int {
    kExitOk = 0,
    kExitPartial = 1,
    kExitConfig = 2,
    kExitIo = 3,
};

/// I/O failure on outputs (exit status 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Locale-independent, round-trippable number text: 17 significant digits,
/// "inf"/"-inf" for infinities and "NA" for NaN.
std::string format_number(double v);

/// `freq_hz,amplitude,phase_rad,k1,k2,residual_hz,status`, LF line endings.
/// Unresolved rows carry NA in the frequency and fold columns.
void write_tone_table(std::ostream& out, const PipelineResult& result);

/// `method,sample_length,snr_db,rmse_freq_hz,rmse_amp_rel,rmse_phase_rad,failures`
void write_bench_csv(std::ostream& out, const BenchmarkResult& result);

/// Long format `method,sample_length,snr_db,metric,value` (one row per metric).
void write_bench_long_csv(std::ostream& out, const BenchmarkResult& result);

/// `results.csv` -> `results_long.csv`.
std::filesystem::path long_format_path(const std::filesystem::path& csv_path);

struct CommonArgs {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
};

int cmd_synth(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_estimate(const CommonArgs& args, const std::filesystem::path& stream1,
                 const std::filesystem::path& stream2, std::ostream& out, std::ostream& err);
int cmd_bench(const CommonArgs& args, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace pencilcrt::cli
