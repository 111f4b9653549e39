#pragma once

#include <cstddef>
#include <vector>

#include "pencilcrt/signal_model.hpp"

namespace pencilcrt {

struct OrderConfig {
    double rel_peak_threshold = 0.1;
    std::size_t min_peak_separation_bins = 2;

    void validate() const;
};

/// |DFT| of the stream (unnormalized, no window).
std::vector<double> magnitude_spectrum(const SampledStream& stream);

/// Counts DFT peaks: bins strictly above every neighbour within
/// min_peak_separation_bins (circularly) and at least rel_peak_threshold of
/// the global maximum. Needs at least 8 samples.
std::size_t estimate_order(const SampledStream& stream, const OrderConfig& cfg);

/// A collision in one channel can merge two peaks, so the larger count wins.
constexpr std::size_t combine_order(std::size_t order1, std::size_t order2) noexcept {
    return order1 > order2 ? order1 : order2;
}

}  // namespace pencilcrt
