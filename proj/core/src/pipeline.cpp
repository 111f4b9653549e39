#include "pencilcrt/pipeline.hpp"

#include <algorithm>

namespace pencilcrt {

bool PipelineResult::fully_resolved() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const PipelineRow& r) { return r.tone.has_value(); });
}

std::vector<ResolvedTone> PipelineResult::resolved() const {
    std::vector<ResolvedTone> out;
    for (const auto& r : rows)
        if (r.tone) out.push_back(*r.tone);
    return out;
}

PipelineResult run_pipeline(const SampledStream& channel1, const SampledStream& channel2,
                            const PipelineConfig& cfg) {
    DealiasConfig dealias = cfg.dealias;
    dealias.rate1_hz = channel1.rate_hz;
    dealias.rate2_hz = channel2.rate_hz;
    dealias.validate();

    PipelineResult result;
    PencilConfig pencil = cfg.pencil;
    if (!pencil.model_order) {
        result.order = combine_order(estimate_order(channel1, cfg.order), estimate_order(channel2, cfg.order));
        if (result.order == 0) return result;
        pencil.model_order = result.order;
    } else {
        result.order = *pencil.model_order;
    }

    const auto set1 = solve_pencil(channel1, pencil);
    const auto set2 = solve_pencil(channel2, pencil);
    const auto pairs = pair_components(set1, set2, dealias);

    for (const auto& pair : pairs) {
        PipelineRow row;
        row.pair = pair;
        try {
            row.tone = resolve_frequency(pair, dealias);
        } catch (const AmbiguityError& e) {
            row.error = ErrorKind::Ambiguous;
            row.candidates_hz = e.candidates_hz();
            row.message = e.what();
        } catch (const Error& e) {
            row.error = e.kind();
            row.message = e.what();
        }
        result.rows.push_back(std::move(row));
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), [](const PipelineRow& a, const PipelineRow& b) {
        if (a.tone.has_value() != b.tone.has_value()) return a.tone.has_value();
        if (a.tone) return a.tone->freq_hz < b.tone->freq_hz;
        return a.pair.chan1.alias_freq_hz < b.pair.chan1.alias_freq_hz;
    });
    return result;
}

}  // namespace pencilcrt
