#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pencilcrt/signal_model.hpp"

namespace pencilcrt {

struct CsConfig {
    std::size_t full_length_N = 2048;
    std::size_t sparsity_K = 10;
    std::size_t measurements_M = 54;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SparseRecovery {
    std::vector<std::size_t> support;  // DFT bins, selection order
    std::vector<cplx> coefficients;    // aligned with support
    double residual_norm = 0.0;
    std::vector<double> residual_history;  // norm after each iteration
};

/// Smallest M with M >= K ln(N / K), floored at K.
std::size_t min_measurements(std::size_t N, std::size_t K);

/// M x N standard Gaussian draw with orthonormalized rows.
Eigen::MatrixXd make_sensing_matrix(std::size_t M, std::size_t N, std::uint64_t seed);

/// sensing * F, where column k of F is the unitary DFT atom
/// exp(j 2 pi k n / N) / sqrt(N).
Eigen::MatrixXcd dft_dictionary(const Eigen::MatrixXd& sensing);

/// y = sensing * x for a length-N complex signal.
Eigen::VectorXcd measure(const Eigen::MatrixXd& sensing, const std::vector<cplx>& signal);

/// Orthogonal matching pursuit over the sensed unitary DFT dictionary:
/// exactly K rounds of (pick the atom with the largest normalized
/// correlation, least-squares refit on the support, update the residual).
/// Ties go to the lowest bin. Stops early only on an exactly zero residual.
SparseRecovery omp_recover(const Eigen::VectorXcd& measurements, const Eigen::MatrixXd& sensing,
                           std::size_t K);

/// Same as above with a precomputed dft_dictionary(sensing).
SparseRecovery omp_recover_with_dictionary(const Eigen::VectorXcd& measurements,
                                           const Eigen::MatrixXcd& dictionary, std::size_t K);

/// Bin b -> b * rate / N; amplitude |c| / sqrt(N) so an on-grid unit tone
/// maps back to amplitude 1; phase arg(c). Zero coefficients are skipped.
std::vector<Tone> extract_tones(const SparseRecovery& recovery, std::size_t N, double nyquist_rate_hz);

}  // namespace pencilcrt
