#include "pencilcrt/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pencilcrt/error.hpp"
#include "pencilcrt/seeding.hpp"

namespace pencilcrt {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_phase(double phase_rad) noexcept {
    if (phase_rad >= -std::numbers::pi && phase_rad < std::numbers::pi) return phase_rad;
    double w = phase_rad - kTwoPi * std::floor((phase_rad + std::numbers::pi) / kTwoPi);
    if (w >= std::numbers::pi) w -= kTwoPi;
    if (w < -std::numbers::pi) w = -std::numbers::pi;
    return w;
}

Tone::Tone(double freq_hz, double amplitude, double phase_rad)
    : freq_hz_(freq_hz), amplitude_(amplitude), phase_rad_(wrap_phase(phase_rad)) {
    if (!std::isfinite(freq_hz) || freq_hz < 0.0)
        throw Error(ErrorKind::InvalidArgument, "tone frequency must be finite and >= 0");
    if (!std::isfinite(amplitude) || amplitude <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "tone amplitude must be finite and > 0");
    if (!std::isfinite(phase_rad))
        throw Error(ErrorKind::InvalidArgument, "tone phase must be finite");
}

SignalSpec::SignalSpec(std::vector<Tone> tones) : tones_(std::move(tones)) {
    if (tones_.empty()) throw Error(ErrorKind::InvalidArgument, "signal needs at least one tone");
    for (std::size_t i = 0; i < tones_.size(); ++i)
        for (std::size_t j = i + 1; j < tones_.size(); ++j)
            if (tones_[i].freq_hz() == tones_[j].freq_hz())
                throw Error(ErrorKind::InvalidArgument,
                            "duplicate tone frequency " + std::to_string(tones_[i].freq_hz()));
}

double SignalSpec::max_freq_hz() const noexcept {
    double f = 0.0;
    for (const auto& t : tones_) f = std::max(f, t.freq_hz());
    return f;
}

double alias_of(double freq_hz, double rate_hz) {
    if (!(rate_hz > 0.0)) throw Error(ErrorKind::InvalidArgument, "rate must be positive");
    // fmod is exact, so the folded value carries no extra rounding.
    double r = std::fmod(freq_hz, rate_hz);
    if (r < 0.0) r += rate_hz;
    if (r >= rate_hz) r = 0.0;
    return r;
}

SampledStream synthesize(const SignalSpec& spec, double rate_hz, std::size_t n_samples,
                         std::int64_t start_index) {
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz))
        throw Error(ErrorKind::InvalidArgument, "sampling rate must be positive");
    if (n_samples == 0) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");

    SampledStream out;
    out.rate_hz = rate_hz;
    out.start_index = start_index;
    out.samples.assign(n_samples, cplx{0.0, 0.0});

    for (const Tone& tone : spec.tones()) {
        // Only the folded frequency matters at integer sample instants; folding
        // first keeps the phase argument small for far-out-of-band tones.
        const double folded = alias_of(tone.freq_hz(), rate_hz);
        for (std::size_t i = 0; i < n_samples; ++i) {
            const double n = static_cast<double>(start_index + static_cast<std::int64_t>(i));
            const double cycles = std::fmod(folded * n, rate_hz) / rate_hz;
            out.samples[i] += std::polar(tone.amplitude(), kTwoPi * cycles + tone.phase_rad());
        }
    }
    return out;
}

double mean_power(std::span<const cplx> samples) noexcept {
    if (samples.empty()) return 0.0;
    double p = 0.0;
    for (const auto& s : samples) p += std::norm(s);
    return p / static_cast<double>(samples.size());
}

SampledStream add_awgn(const SampledStream& stream, double snr_db, std::uint64_t seed) {
    if (stream.empty()) throw Error(ErrorKind::InvalidArgument, "cannot add noise to an empty stream");
    if (std::isnan(snr_db)) throw Error(ErrorKind::InvalidArgument, "snr_db is NaN");
    SampledStream out = stream;
    if (snr_db == kNoiseless) return out;

    const double noise_var = mean_power(stream.samples) / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_var / 2.0);
    if (sigma == 0.0) return out;

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& s : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += cplx{sigma * re, sigma * im};
    }
    return out;
}

}  // namespace pencilcrt
