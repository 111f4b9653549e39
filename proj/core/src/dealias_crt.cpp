#include "pencilcrt/dealias_crt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "pencilcrt/error.hpp"

namespace pencilcrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
    double freq_hz;
    std::int64_t k1;
    std::int64_t k2;
    double residual_hz;
};

// Minimum-cost assignment for a square cost matrix (row i -> column
// result[i]), shortest augmenting paths with row/column potentials.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

bool is_integral(double x) noexcept { return std::isfinite(x) && x == std::floor(x); }

__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;

// Inverse of a modulo m (gcd(a, m) == 1, m > 1).
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    std::int64_t old_r = static_cast<std::int64_t>(a % m), r = static_cast<std::int64_t>(m);
    i128 old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        std::int64_t tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        i128 tmp_s = old_s - static_cast<i128>(q) * s;
        old_s = s;
        s = tmp_s;
    }
    // old_r is the gcd; the caller has already checked coprimality.
    i128 inv = old_s % static_cast<i128>(m);
    if (inv < 0) inv += m;
    return static_cast<std::uint64_t>(inv);
}

double circular_mean(double a, double b) noexcept {
    const cplx sum = std::polar(1.0, a) + std::polar(1.0, b);
    if (std::abs(sum) == 0.0) return wrap_phase(a);
    return wrap_phase(std::arg(sum));
}

ResolvedTone finish(const PairedComponent& pair, const Candidate& c) {
    ResolvedTone t;
    t.freq_hz = c.freq_hz;
    t.k1 = c.k1;
    t.k2 = c.k2;
    t.residual_hz = c.residual_hz;
    t.amplitude = 0.5 * (pair.chan1.amplitude + pair.chan2.amplitude);
    t.phase_rad = circular_mean(pair.chan1.phase_rad, pair.chan2.phase_rad);
    return t;
}

[[noreturn]] void throw_ambiguous(std::vector<Candidate> cands) {
    std::vector<double> freqs;
    for (const auto& c : cands) freqs.push_back(c.freq_hz);
    std::sort(freqs.begin(), freqs.end());
    std::ostringstream msg;
    msg << "ambiguous fold indices; consistent frequencies:";
    for (double f : freqs) msg << ' ' << f;
    throw AmbiguityError(std::move(freqs), msg.str());
}

// Exact residue path for integer rates and aliases. Returns nullopt when it
// does not apply or finds nothing, leaving the decision to the tolerance search.
std::optional<Candidate> exact_crt_path(double a1, double a2, const DealiasConfig& cfg) {
    const double r1 = cfg.rate1_hz, r2 = cfg.rate2_hz;
    constexpr double kMaxExact = 4294967296.0;  // keeps lcm within 64 bits
    if (!is_integral(r1) || !is_integral(r2) || !is_integral(a1) || !is_integral(a2)) return std::nullopt;
    if (r1 >= kMaxExact || r2 >= kMaxExact) return std::nullopt;
    const auto m1 = static_cast<std::uint64_t>(r1);
    const auto m2 = static_cast<std::uint64_t>(r2);
    if (std::gcd(m1, m2) != 1) return std::nullopt;

    const std::uint64_t res[2] = {static_cast<std::uint64_t>(a1), static_cast<std::uint64_t>(a2)};
    const std::uint64_t mod[2] = {m1, m2};
    const std::uint64_t base = crt_integer(res, mod);
    const std::uint64_t lcm = m1 * m2;
    const auto n = static_cast<std::uint64_t>(cfg.max_fold_index_n);

    std::vector<Candidate> found;
    for (std::uint64_t f = base;; f += lcm) {
        const std::uint64_t k1 = (f - res[0]) / m1;
        const std::uint64_t k2 = (f - res[1]) / m2;
        if (k1 > n || k2 > n) break;
        found.push_back({static_cast<double>(f), static_cast<std::int64_t>(k1),
                         static_cast<std::int64_t>(k2), 0.0});
    }
    if (found.empty()) return std::nullopt;
    if (found.size() > 1 && found[1].freq_hz - found[0].freq_hz > cfg.match_tol_hz())
        throw_ambiguous(std::move(found));
    return found.front();
}

}  // namespace

double DealiasConfig::match_tol_hz() const noexcept {
    return freq_match_tol_hz.value_or(std::max(rate1_hz, rate2_hz) * 1e-3);
}

void DealiasConfig::validate() const {
    if (!(rate1_hz > 0.0) || !(rate2_hz > 0.0) || !std::isfinite(rate1_hz) || !std::isfinite(rate2_hz))
        throw Error(ErrorKind::InvalidArgument, "sampling rates must be positive");
    if (rate1_hz == rate2_hz) throw Error(ErrorKind::InvalidArgument, "rates must differ");
    if (max_fold_index_n == 0) throw Error(ErrorKind::InvalidArgument, "max_fold_index_n must be >= 1");
    if (!(match_tol_hz() > 0.0)) throw Error(ErrorKind::InvalidArgument, "freq_match_tol_hz must be positive");
    if (!(amp_weight >= 0.0) || !(phase_weight >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "pairing weights must be non-negative");
}

DealiasConfig DealiasConfig::for_max_frequency(double rate1_hz, double rate2_hz, double f_max_hint_hz) {
    DealiasConfig cfg;
    cfg.rate1_hz = rate1_hz;
    cfg.rate2_hz = rate2_hz;
    const double n = std::ceil(f_max_hint_hz / std::min(rate1_hz, rate2_hz));
    cfg.max_fold_index_n = static_cast<std::uint32_t>(std::max(1.0, n));
    return cfg;
}

double pairing_cost(const AliasedComponent& a, const AliasedComponent& b, const DealiasConfig& cfg) {
    double dphi = std::remainder(a.phase_rad - b.phase_rad, 2.0 * std::numbers::pi);
    return cfg.amp_weight * std::abs(std::log(a.amplitude / b.amplitude)) +
           cfg.phase_weight * std::abs(dphi);
}

std::vector<PairedComponent> pair_components(std::span<const AliasedComponent> set1,
                                             std::span<const AliasedComponent> set2,
                                             const DealiasConfig& cfg) {
    if (set1.empty() || set2.empty())
        throw Error(ErrorKind::Cardinality, "cannot pair empty component sets");
    if (set1.size() != set2.size())
        throw Error(ErrorKind::Cardinality, "channel component counts differ (" +
                                                std::to_string(set1.size()) + " vs " +
                                                std::to_string(set2.size()) + ")");
    const std::size_t m = set1.size();
    std::vector<std::vector<double>> cost(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cost[i][j] = pairing_cost(set1[i], set2[j], cfg);
            if (!std::isfinite(cost[i][j]))
                throw Error(ErrorKind::InvalidComponent, "non-finite pairing cost");
        }
    }
    const auto assign = hungarian(cost);
    std::vector<PairedComponent> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back({set1[i], set2[assign[i]], cost[i][assign[i]]});
    return out;
}

ResolvedTone resolve_frequency(const PairedComponent& pair, const DealiasConfig& cfg) {
    cfg.validate();
    const double r1 = cfg.rate1_hz, r2 = cfg.rate2_hz;
    const double a1 = pair.chan1.alias_freq_hz, a2 = pair.chan2.alias_freq_hz;
    if (!(a1 >= 0.0 && a1 < r1) || !(a2 >= 0.0 && a2 < r2))
        throw Error(ErrorKind::InvalidComponent, "alias frequency outside [0, rate)");

    if (auto exact = exact_crt_path(a1, a2, cfg)) return finish(pair, *exact);

    const double tol = cfg.match_tol_hz();
    const auto n = static_cast<std::int64_t>(cfg.max_fold_index_n);
    std::vector<Candidate> cands;
    for (std::int64_t k1 = 0; k1 <= n; ++k1) {
        const double f1 = static_cast<double>(k1) * r1 + a1;
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((f1 - tol - a2) / r2)));
        const auto hi = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((f1 + tol - a2) / r2)));
        for (std::int64_t k2 = lo; k2 <= hi; ++k2) {
            const double f2 = static_cast<double>(k2) * r2 + a2;
            const double res = std::abs(f1 - f2);
            if (res <= tol) cands.push_back({0.5 * (f1 + f2), k1, k2, res});
        }
    }
    if (cands.empty())
        throw Error(ErrorKind::NoCandidate, "no fold indices within tolerance for aliases (" +
                                                std::to_string(a1) + ", " + std::to_string(a2) + ")");

    const auto best = *std::min_element(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.residual_hz != y.residual_hz) return x.residual_hz < y.residual_hz;
        return x.freq_hz < y.freq_hz;
    });
    for (const auto& c : cands)
        if (std::abs(c.freq_hz - best.freq_hz) > tol) throw_ambiguous(std::move(cands));
    return finish(pair, best);
}

double fold_residual_gap(double rate1_hz, double rate2_hz, std::uint32_t n) {
    if (!(rate1_hz > 0.0) || !(rate2_hz > 0.0))
        throw Error(ErrorKind::InvalidArgument, "rates must be positive");
    const auto nn = static_cast<std::int64_t>(n);
    double gap = std::min(rate1_hz, rate2_hz);  // d1 = 0 or d2 = 0
    for (std::int64_t d1 = 1; d1 <= nn; ++d1) {
        const double f1 = static_cast<double>(d1) * rate1_hz;
        const auto d2 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(f1 / rate2_hz)), 1, nn);
        for (std::int64_t d : {d2 - 1, d2, d2 + 1}) {
            if (d < 1 || d > nn) continue;
            const double r = std::abs(f1 - static_cast<double>(d) * rate2_hz);
            if (r > 0.0) gap = std::min(gap, r);
        }
    }
    return gap;
}

std::uint64_t crt_integer(std::span<const std::uint64_t> residues,
                          std::span<const std::uint64_t> moduli) {
    if (residues.size() != moduli.size() || moduli.empty())
        throw Error(ErrorKind::Precondition, "residues and moduli must be non-empty and equal length");
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        if (moduli[i] == 0) throw Error(ErrorKind::Precondition, "moduli must be positive");
        if (residues[i] >= moduli[i]) throw Error(ErrorKind::Precondition, "residue not below its modulus");
        for (std::size_t j = 0; j < i; ++j)
            if (std::gcd(moduli[i], moduli[j]) != 1)
                throw Error(ErrorKind::Precondition, "moduli are not pairwise coprime");
    }

    // Garner-style incremental combination: x is the solution modulo prod.
    std::uint64_t x = residues[0];
    std::uint64_t prod = moduli[0];
    for (std::size_t i = 1; i < moduli.size(); ++i) {
        const std::uint64_t m = moduli[i];
        const u128 next_prod = static_cast<u128>(prod) * m;
        if (next_prod > std::numeric_limits<std::uint64_t>::max())
            throw Error(ErrorKind::Precondition, "product of moduli overflows 64 bits");
        if (m == 1) {
            prod = static_cast<std::uint64_t>(next_prod);
            continue;
        }
        // x + prod * t = r (mod m)  =>  t = (r - x) * prod^-1 (mod m)
        const std::uint64_t inv = mod_inverse(prod % m, m);
        const std::uint64_t diff = (residues[i] + m - x % m) % m;
        const auto t = static_cast<std::uint64_t>((static_cast<u128>(diff) * inv) % m);
        x = static_cast<std::uint64_t>(x + static_cast<u128>(prod) * t);
        prod = static_cast<std::uint64_t>(next_prod);
    }
    return x;
}

double unambiguous_range(double rate1_hz, double rate2_hz) {
    if (!(rate1_hz > 0.0) || !(rate2_hz > 0.0))
        throw Error(ErrorKind::InvalidArgument, "rates must be positive");
    double scale = 1.0;
    for (int d = 0; d <= 9; ++d, scale *= 10.0) {
        const double s1 = std::round(rate1_hz * scale);
        const double s2 = std::round(rate2_hz * scale);
        const bool on_grid = std::abs(s1 / scale - rate1_hz) <= 1e-12 * rate1_hz &&
                             std::abs(s2 / scale - rate2_hz) <= 1e-12 * rate2_hz;
        if (on_grid && s1 < 1.8e19 && s2 < 1.8e19) {
            const auto i1 = static_cast<std::uint64_t>(s1);
            const auto i2 = static_cast<std::uint64_t>(s2);
            const u128 l = static_cast<u128>(i1 / std::gcd(i1, i2)) * i2;
            return static_cast<double>(l) / scale;
        }
    }
    // No common decimal grid: the residue pair never repeats exactly.
    return std::numeric_limits<double>::infinity();
}

}  // namespace pencilcrt
