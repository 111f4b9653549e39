#include "pencilcrt/matrix_pencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "pencilcrt/error.hpp"

namespace pencilcrt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Singular values at or below this fraction of the largest count as exact
// zeros when checking an explicit model order.
constexpr double kRankFloor = 1e-10;

// Components weaker than this fraction of the strongest are numerical zeros.
constexpr double kAmplitudeFloor = 1e-12;

}  // namespace

void PencilConfig::validate() const {
    if (pencil_param_L && *pencil_param_L == 0)
        throw Error(ErrorKind::InvalidArgument, "pencil_param_L must be positive");
    if (model_order && *model_order == 0)
        throw Error(ErrorKind::InvalidArgument, "model_order must be positive");
    if (!(svd_rel_threshold > 0.0 && svd_rel_threshold < 1.0))
        throw Error(ErrorKind::InvalidArgument, "svd_rel_threshold must lie in (0, 1)");
    if (!(unit_circle_tol > 0.0) || !std::isfinite(unit_circle_tol))
        throw Error(ErrorKind::InvalidArgument, "unit_circle_tol must be positive");
}

double pole_to_alias(cplx pole, double rate_hz) noexcept {
    double angle = std::arg(pole);
    if (angle < 0.0) angle += kTwoPi;
    double f = angle / kTwoPi * rate_hz;
    if (f >= rate_hz || f < 0.0) f = 0.0;
    return f;
}

HankelPencil build_pencil(const SampledStream& stream, std::size_t L) {
    const std::size_t n = stream.size();
    if (L == 0) throw Error(ErrorKind::InvalidArgument, "pencil parameter L must be >= 1");
    if (n < L + 1)
        throw Error(ErrorKind::InsufficientSamples,
                    "pencil with L=" + std::to_string(L) + " needs at least " +
                        std::to_string(L + 1) + " samples, got " + std::to_string(n));

    const auto rows = static_cast<Eigen::Index>(n - L);
    const auto cols = static_cast<Eigen::Index>(L);
    HankelPencil p;
    p.pencil_param_L = L;
    p.x_left.resize(rows, cols);
    p.x_right.resize(rows, cols);
    const auto& s = stream.samples;
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            p.x_left(r, c) = s[static_cast<std::size_t>(r + c)];
            p.x_right(r, c) = s[static_cast<std::size_t>(r + c + 1)];
        }
    }
    return p;
}

std::vector<AmplitudePhase> estimate_amplitudes(const SampledStream& stream,
                                                std::span<const double> alias_freqs_hz) {
    const std::size_t n = stream.size();
    const std::size_t k = alias_freqs_hz.size();
    if (k == 0) return {};
    if (k > n)
        throw Error(ErrorKind::InsufficientSamples,
                    "more frequencies than samples in amplitude fit");
    const double rate = stream.rate_hz;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double d = std::abs(alias_of(alias_freqs_hz[i], rate) - alias_of(alias_freqs_hz[j], rate));
            d = std::min(d, rate - d);
            if (d <= 1e-9 * rate)
                throw Error(ErrorKind::DegenerateBasis, "duplicate frequencies in amplitude fit");
        }
    }

    Eigen::MatrixXcd basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t row = 0; row < n; ++row) {
        const double idx = static_cast<double>(stream.start_index + static_cast<std::int64_t>(row));
        rhs(static_cast<Eigen::Index>(row)) = stream.samples[row];
        for (std::size_t col = 0; col < k; ++col) {
            const double f = alias_of(alias_freqs_hz[col], rate);
            const double cycles = std::fmod(f * idx, rate) / rate;
            basis(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                std::polar(1.0, kTwoPi * cycles);
        }
    }

    const Eigen::VectorXcd coef = basis.colPivHouseholderQr().solve(rhs);
    std::vector<AmplitudePhase> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const cplx c = coef(static_cast<Eigen::Index>(i));
        out[i].amplitude = std::abs(c);
        out[i].phase_rad = out[i].amplitude == 0.0 ? 0.0 : wrap_phase(std::arg(c));
    }
    return out;
}

std::vector<AliasedComponent> solve_pencil(const SampledStream& stream, const PencilConfig& cfg) {
    cfg.validate();
    const std::size_t n = stream.size();
    const std::size_t order = cfg.model_order.value_or(1);
    if (n < 2 * (order + 1))
        throw Error(ErrorKind::InsufficientSamples,
                    "matrix pencil needs at least " + std::to_string(2 * (order + 1)) +
                        " samples, got " + std::to_string(n));

    std::size_t L = cfg.pencil_param_L.value_or(n / 3);
    L = std::clamp(L, order, n - order);
    L = std::clamp<std::size_t>(L, 1, n - 1);

    const HankelPencil pencil = build_pencil(stream, L);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(pencil.x_left, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;

    Eigen::Index rank = 0;
    if (cfg.model_order) {
        const auto wanted = static_cast<Eigen::Index>(*cfg.model_order);
        Eigen::Index achieved = 0;
        while (achieved < sigma.size() && sigma_max > 0.0 && sigma(achieved) > kRankFloor * sigma_max)
            ++achieved;
        if (achieved < wanted)
            throw OrderDeficientError(*cfg.model_order, static_cast<std::size_t>(achieved));
        rank = wanted;
    } else {
        if (sigma_max == 0.0) return {};
        while (rank < sigma.size() && sigma(rank) >= cfg.svd_rel_threshold * sigma_max) ++rank;
    }

    const Eigen::MatrixXcd u = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXcd v = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd inv_sigma = sigma.head(rank).cwiseInverse();
    const Eigen::MatrixXcd reduced = inv_sigma.asDiagonal() * (u.adjoint() * pencil.x_right * v);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(reduced, /*computeEigenvectors=*/false);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorKind::InvalidComponent, "eigensolver failed on reduced pencil");

    std::vector<cplx> poles;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const cplx z = eig.eigenvalues()(i);
        if (std::abs(std::abs(z) - 1.0) <= cfg.unit_circle_tol) poles.push_back(z);
    }
    std::sort(poles.begin(), poles.end(), [&](cplx a, cplx b) {
        return pole_to_alias(a, stream.rate_hz) < pole_to_alias(b, stream.rate_hz);
    });

    std::vector<double> freqs;
    freqs.reserve(poles.size());
    for (cplx z : poles) freqs.push_back(pole_to_alias(z, stream.rate_hz));
    const auto amps = estimate_amplitudes(stream, freqs);

    double amp_max = 0.0;
    for (const auto& a : amps) amp_max = std::max(amp_max, a.amplitude);

    std::vector<AliasedComponent> out;
    out.reserve(poles.size());
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (amps[i].amplitude <= kAmplitudeFloor * amp_max) continue;
        out.push_back({freqs[i], amps[i].amplitude, amps[i].phase_rad, poles[i]});
    }
    return out;
}

}  // namespace pencilcrt
