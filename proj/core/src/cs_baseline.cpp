#include "pencilcrt/cs_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

#include "pencilcrt/error.hpp"
#include "pencilcrt/seeding.hpp"

namespace pencilcrt {

void CsConfig::validate() const {
    if (sparsity_K == 0 || measurements_M == 0 || full_length_N == 0)
        throw Error(ErrorKind::InvalidArgument, "N, K and M must be positive");
    if (!(sparsity_K <= measurements_M && measurements_M <= full_length_N))
        throw Error(ErrorKind::InvalidArgument, "need K <= M <= N");
}

std::size_t min_measurements(std::size_t N, std::size_t K) {
    if (K == 0 || K > N) throw Error(ErrorKind::Precondition, "need 1 <= K <= N");
    const double k = static_cast<double>(K);
    const double bound = std::ceil(k * std::log(static_cast<double>(N) / k));
    return std::max(K, static_cast<std::size_t>(bound));
}

Eigen::MatrixXd make_sensing_matrix(std::size_t M, std::size_t N, std::uint64_t seed) {
    if (M == 0 || M > N) throw Error(ErrorKind::Precondition, "sensing matrix needs 1 <= M <= N");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(N));
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = gauss(rng);

    // Row Gram-Schmidt via Cholesky QR, applied twice so the rows are
    // orthonormal to working precision. Same result as Householder QR with a
    // positive-diagonal R, at matrix-multiply speed.
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(g.rows(), g.rows());
        gram.selfadjointView<Eigen::Lower>().rankUpdate(g);
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success)
            throw Error(ErrorKind::InvalidComponent, "sensing matrix draw is rank deficient");
        llt.matrixL().solveInPlace(g);
    }
    return g;
}

Eigen::MatrixXcd dft_dictionary(const Eigen::MatrixXd& sensing) {
    const Eigen::Index m = sensing.rows();
    const Eigen::Index n = sensing.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::FFT<double> fft;
    Eigen::MatrixXcd dict(m, n);
    std::vector<double> row(static_cast<std::size_t>(n));
    std::vector<cplx> spec;
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) row[static_cast<std::size_t>(c)] = sensing(r, c);
        fft.fwd(spec, row);
        // sum_n phi[n] e^{+j 2 pi k n / N} = conj(sum_n phi[n] e^{-j 2 pi k n / N}) for real phi
        for (Eigen::Index c = 0; c < n; ++c) dict(r, c) = std::conj(spec[static_cast<std::size_t>(c)]) * scale;
    }
    return dict;
}

Eigen::VectorXcd measure(const Eigen::MatrixXd& sensing, const std::vector<cplx>& signal) {
    if (static_cast<Eigen::Index>(signal.size()) != sensing.cols())
        throw Error(ErrorKind::InvalidArgument, "signal length does not match sensing matrix");
    const Eigen::Map<const Eigen::VectorXcd> x(signal.data(), static_cast<Eigen::Index>(signal.size()));
    return sensing.cast<cplx>() * x;
}

SparseRecovery omp_recover_with_dictionary(const Eigen::VectorXcd& measurements,
                                           const Eigen::MatrixXcd& dictionary, std::size_t K) {
    const Eigen::Index m = dictionary.rows();
    const Eigen::Index n = dictionary.cols();
    if (measurements.size() != m)
        throw Error(ErrorKind::InvalidArgument, "measurement length does not match dictionary");
    if (K == 0 || static_cast<Eigen::Index>(K) > m)
        throw Error(ErrorKind::Precondition, "OMP needs 1 <= K <= M");

    const Eigen::VectorXd col_norm = dictionary.colwise().norm().transpose();
    SparseRecovery out;
    Eigen::VectorXcd residual = measurements;
    out.residual_norm = residual.norm();
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    Eigen::VectorXcd coef;

    for (std::size_t iter = 0; iter < K && out.residual_norm > 0.0; ++iter) {
        const Eigen::VectorXcd corr = dictionary.adjoint() * residual;
        Eigen::Index best = -1;
        double best_score = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (chosen[static_cast<std::size_t>(k)] || col_norm(k) == 0.0) continue;
            const double score = std::abs(corr(k)) / col_norm(k);
            if (score > best_score) {
                best_score = score;
                best = k;
            }
        }
        if (best < 0) break;
        chosen[static_cast<std::size_t>(best)] = true;
        out.support.push_back(static_cast<std::size_t>(best));

        Eigen::MatrixXcd sub(m, static_cast<Eigen::Index>(out.support.size()));
        for (std::size_t j = 0; j < out.support.size(); ++j)
            sub.col(static_cast<Eigen::Index>(j)) = dictionary.col(static_cast<Eigen::Index>(out.support[j]));
        coef = sub.colPivHouseholderQr().solve(measurements);
        residual = measurements - sub * coef;
        out.residual_norm = residual.norm();
        out.residual_history.push_back(out.residual_norm);
    }

    out.coefficients.assign(coef.data(), coef.data() + coef.size());
    return out;
}

SparseRecovery omp_recover(const Eigen::VectorXcd& measurements, const Eigen::MatrixXd& sensing,
                           std::size_t K) {
    if (measurements.size() != sensing.rows())
        throw Error(ErrorKind::InvalidArgument, "measurement length does not match sensing matrix");
    if (K == 0 || static_cast<Eigen::Index>(K) > sensing.rows())
        throw Error(ErrorKind::Precondition, "OMP needs 1 <= K <= M");
    return omp_recover_with_dictionary(measurements, dft_dictionary(sensing), K);
}

std::vector<Tone> extract_tones(const SparseRecovery& recovery, std::size_t N, double nyquist_rate_hz) {
    if (N == 0 || !(nyquist_rate_hz > 0.0))
        throw Error(ErrorKind::InvalidArgument, "N and rate must be positive");
    const double root_n = std::sqrt(static_cast<double>(N));
    std::vector<Tone> tones;
    for (std::size_t i = 0; i < recovery.support.size() && i < recovery.coefficients.size(); ++i) {
        const cplx c = recovery.coefficients[i];
        const double amp = std::abs(c) / root_n;
        if (!(amp > 0.0)) continue;
        const double freq = static_cast<double>(recovery.support[i]) * nyquist_rate_hz / static_cast<double>(N);
        tones.emplace_back(freq, amp, std::arg(c));
    }
    return tones;
}

}  // namespace pencilcrt
