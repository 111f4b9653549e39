#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace pencilcrt {

using cplx = std::complex<double>;

/// Wraps an angle into [-pi, pi).
double wrap_phase(double phase_rad) noexcept;

/// One complex exponential component a * exp(j(2 pi f t + phi)).
class Tone {
public:
    /// Throws Error(InvalidArgument) unless freq >= 0, amplitude > 0 and all
    /// values are finite. The phase is canonicalized into [-pi, pi).
    Tone(double freq_hz, double amplitude, double phase_rad);

    double freq_hz() const noexcept { return freq_hz_; }
    double amplitude() const noexcept { return amplitude_; }
    double phase_rad() const noexcept { return phase_rad_; }

    friend bool operator==(const Tone&, const Tone&) = default;

private:
    double freq_hz_;
    double amplitude_;
    double phase_rad_;
};

/// Ordered set of tones with pairwise distinct frequencies.
class SignalSpec {
public:
    explicit SignalSpec(std::vector<Tone> tones);

    const std::vector<Tone>& tones() const noexcept { return tones_; }
    std::size_t size() const noexcept { return tones_.size(); }
    double max_freq_hz() const noexcept;

private:
    std::vector<Tone> tones_;
};

/// Uniformly sampled complex sequence. Sample i was taken at absolute
/// index start_index + i, i.e. at time (start_index + i) / rate_hz.
struct SampledStream {
    double rate_hz = 1.0;
    std::vector<cplx> samples;
    std::int64_t start_index = 0;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

/// Marks a noiseless channel when passed as snr_db.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

SampledStream synthesize(const SignalSpec& spec, double rate_hz, std::size_t n_samples,
                         std::int64_t start_index = 0);

/// Adds circular complex Gaussian noise at the given SNR, measured against
/// the mean power of the whole stream. snr_db = +inf returns a copy.
SampledStream add_awgn(const SampledStream& stream, double snr_db, std::uint64_t seed);

/// Folded frequency freq mod rate, in [0, rate).
double alias_of(double freq_hz, double rate_hz);

double mean_power(std::span<const cplx> samples) noexcept;

}  // namespace pencilcrt
