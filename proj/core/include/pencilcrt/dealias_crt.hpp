#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pencilcrt/matrix_pencil.hpp"

namespace pencilcrt {

struct DealiasConfig {
    double rate1_hz = 1.0;
    double rate2_hz = 2.0;
    std::uint32_t max_fold_index_n = 1;
    std::optional<double> freq_match_tol_hz;  // default max(rate1, rate2) * 1e-3
    double amp_weight = 1.0;
    double phase_weight = 1.0;

    double match_tol_hz() const noexcept;
    void validate() const;

    /// Builds a config whose fold range covers [0, f_max_hint_hz]:
    /// n = ceil(f_max_hint / min(rate1, rate2)).
    static DealiasConfig for_max_frequency(double rate1_hz, double rate2_hz, double f_max_hint_hz);
};

struct PairedComponent {
    AliasedComponent chan1;
    AliasedComponent chan2;
    double match_cost = 0.0;
};

struct ResolvedTone {
    double freq_hz = 0.0;
    double amplitude = 0.0;
    double phase_rad = 0.0;
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;
    double residual_hz = 0.0;
};

/// amp_weight * |ln(a1 / a2)| + phase_weight * |wrap(phi1 - phi2)|.
double pairing_cost(const AliasedComponent& a, const AliasedComponent& b, const DealiasConfig& cfg);

/// Minimum-total-cost perfect matching between the two channel sets
/// (Hungarian algorithm). Output is ordered by set1 index.
std::vector<PairedComponent> pair_components(std::span<const AliasedComponent> set1,
                                             std::span<const AliasedComponent> set2,
                                             const DealiasConfig& cfg);

/// Searches k1, k2 in [0, n] for k1*rate1 + alias1 ~= k2*rate2 + alias2.
/// Throws Error(NoCandidate) when nothing lies within tolerance and
/// AmbiguityError when two candidates are further apart than the tolerance.
ResolvedTone resolve_frequency(const PairedComponent& pair, const DealiasConfig& cfg);

/// Smallest non-zero |d1 * rate1 - d2 * rate2| over fold-index differences
/// |d1|, |d2| <= n. A pair of exact aliases has a single candidate for any
/// match tolerance below half this gap.
double fold_residual_gap(double rate1_hz, double rate2_hz, std::uint32_t n);

/// Unique x in [0, prod(moduli)) with x = residues[i] (mod moduli[i]).
/// Throws Error(Precondition) for non-coprime moduli, out-of-range
/// residues, or a product that does not fit in 64 bits.
std::uint64_t crt_integer(std::span<const std::uint64_t> residues,
                          std::span<const std::uint64_t> moduli);

/// Width of the frequency interval starting at 0 on which alias pairs are
/// unique: lcm(rate1, rate2). Non-integer rates are first scaled to the
/// coarsest decimal grid (step 10^-d, d <= 9) on which both are integers.
double unambiguous_range(double rate1_hz, double rate2_hz);

}  // namespace pencilcrt
