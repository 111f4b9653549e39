#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pencilcrt/dealias_crt.hpp"
#include "pencilcrt/error.hpp"
#include "pencilcrt/matrix_pencil.hpp"
#include "pencilcrt/model_order.hpp"

namespace pencilcrt {

/// Settings for the two-channel estimator. The dealias rates are taken from
/// the streams, so only the fold range, tolerance and weights matter there.
struct PipelineConfig {
    PencilConfig pencil;
    OrderConfig order;
    DealiasConfig dealias;
};

/// One paired component. `tone` is set when de-aliasing succeeded; otherwise
/// `error` names the failure (no candidate or ambiguous) and `candidates_hz`
/// lists the consistent frequencies for an ambiguity.
struct PipelineRow {
    PairedComponent pair;
    std::optional<ResolvedTone> tone;
    std::optional<ErrorKind> error;
    std::vector<double> candidates_hz;
    std::string message;
};

struct PipelineResult {
    std::size_t order = 0;
    std::vector<PipelineRow> rows;  // resolved rows by frequency, then failures

    bool fully_resolved() const noexcept;
    std::vector<ResolvedTone> resolved() const;
};

/// Order estimation (unless the pencil config fixes it), one pencil solve per
/// channel, cross-channel pairing and fold-index resolution.
///
/// Whole-run failures (insufficient samples, order deficiency, component
/// count mismatch) throw. Per-component resolution failures are recorded in
/// the returned rows.
PipelineResult run_pipeline(const SampledStream& channel1, const SampledStream& channel2,
                            const PipelineConfig& cfg);

}  // namespace pencilcrt
