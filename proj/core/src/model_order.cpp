#include "pencilcrt/model_order.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "pencilcrt/error.hpp"

namespace pencilcrt {

void OrderConfig::validate() const {
    if (!(rel_peak_threshold > 0.0 && rel_peak_threshold < 1.0))
        throw Error(ErrorKind::InvalidArgument, "rel_peak_threshold must lie in (0, 1)");
    if (min_peak_separation_bins == 0)
        throw Error(ErrorKind::InvalidArgument, "min_peak_separation_bins must be >= 1");
}

std::vector<double> magnitude_spectrum(const SampledStream& stream) {
    Eigen::FFT<double> fft;
    std::vector<cplx> spectrum;
    fft.fwd(spectrum, stream.samples);
    std::vector<double> mag(spectrum.size());
    std::transform(spectrum.begin(), spectrum.end(), mag.begin(), [](cplx c) { return std::abs(c); });
    return mag;
}

std::size_t estimate_order(const SampledStream& stream, const OrderConfig& cfg) {
    cfg.validate();
    if (stream.size() < 8)
        throw Error(ErrorKind::InsufficientSamples, "order estimation needs at least 8 samples");

    const auto mag = magnitude_spectrum(stream);
    const std::size_t n = mag.size();
    const double peak = *std::max_element(mag.begin(), mag.end());
    if (peak == 0.0) return 0;

    const double floor = cfg.rel_peak_threshold * peak;
    // Peaks exactly min_peak_separation_bins apart must both count, so only closer bins compete.
    const std::size_t reach = std::min(std::max<std::size_t>(1, cfg.min_peak_separation_bins - 1), (n - 1) / 2);
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (mag[k] < floor) continue;
        bool is_peak = true;
        for (std::size_t d = 1; d <= reach && is_peak; ++d) {
            is_peak = mag[k] > mag[(k + d) % n] && mag[k] > mag[(k + n - d) % n];
        }
        if (is_peak) ++count;
    }
    return count;
}

}  // namespace pencilcrt
