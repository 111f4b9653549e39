#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pencilcrt/signal_model.hpp"

namespace pencilcrt {

/// Shifted Hankel pair built from one stream:
///   x_left(r, c)  = samples[r + c]
///   x_right(r, c) = samples[r + c + 1]
/// Both are (N - L) x L.
struct HankelPencil {
    Eigen::MatrixXcd x_left;
    Eigen::MatrixXcd x_right;
    std::size_t pencil_param_L = 0;
};

struct PencilConfig {
    std::optional<std::size_t> pencil_param_L;  // default floor(N / 3)
    std::optional<std::size_t> model_order;     // default: SVD threshold
    double svd_rel_threshold = 1e-3;
    double unit_circle_tol = 1e-2;

    void validate() const;
};

/// One component seen by a single undersampled channel.
struct AliasedComponent {
    double alias_freq_hz = 0.0;  // [0, rate)
    double amplitude = 0.0;
    double phase_rad = 0.0;      // [-pi, pi), referenced to absolute sample 0
    cplx pole{1.0, 0.0};         // generalized eigenvalue exp(j 2 pi f_alias / rate)
};

struct AmplitudePhase {
    double amplitude = 0.0;
    double phase_rad = 0.0;
};

HankelPencil build_pencil(const SampledStream& stream, std::size_t L);

/// Singular-value filtered matrix pencil. Returns the surviving components
/// sorted by ascending alias frequency.
///
/// The pencil (x_right, x_left) is reduced to the r-dimensional signal
/// subspace of x_left = U S V^H: the poles are the eigenvalues of
/// S_r^-1 U_r^H x_right V_r. Poles further than unit_circle_tol from the unit
/// circle are discarded, then amplitudes and phases come from a least-squares
/// fit of the surviving exponentials to the raw samples.
///
/// Throws Error(InsufficientSamples) for short streams and
/// OrderDeficientError when an explicit model order exceeds the pencil rank.
std::vector<AliasedComponent> solve_pencil(const SampledStream& stream, const PencilConfig& cfg);

/// Least-squares complex amplitudes of exp(j 2 pi f n / rate) on the given
/// alias frequencies. n is the absolute sample index, so phases refer to
/// absolute sample 0.
std::vector<AmplitudePhase> estimate_amplitudes(const SampledStream& stream,
                                                std::span<const double> alias_freqs_hz);

/// Alias frequency in [0, rate) encoded by the angle of a pole.
double pole_to_alias(cplx pole, double rate_hz) noexcept;

}  // namespace pencilcrt
