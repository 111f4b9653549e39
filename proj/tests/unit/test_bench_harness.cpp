#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "pencilcrt/bench_harness.hpp"
#include "pencilcrt/error.hpp"
#include "pencilcrt/seeding.hpp"

using namespace pencilcrt;

namespace {

ExperimentConfig micro(std::vector<Method> methods = {Method::Gea, Method::Cs}) {
    ExperimentConfig c;
    c.methods = std::move(methods);
    c.trials = 2;
    c.snr_grid_db = {10.0, 30.0};
    c.sample_lengths = {108};
    return c;
}

// On the 5 Hz CS grid (10240 Hz / 2048).
SignalSpec on_grid_spec() {
    return SignalSpec({Tone(3690, 1.9, 0.8), Tone(4525, 1.6, -1.0), Tone(5265, 1.4, -0.35), Tone(6365, 1.98, 2.8),
                       Tone(6725, 0.82, -2.1), Tone(7310, 0.74, 1.6), Tone(7480, 1.42, -2.8),
                       Tone(7875, 0.57, -1.5), Tone(8265, 0.55, 0.39), Tone(8805, 1.27, 2.26)});
}

}  // namespace

TEST_SUITE("bench_harness") {

TEST_CASE("rmse") {
    const double z[] = {0, 0, 0}, ones[] = {1, 1}, tf[] = {3, 4};
    CHECK(compute_rmse(z) == 0.0);
    CHECK(compute_rmse(ones) == 1.0);
    CHECK(compute_rmse(tf) == doctest::Approx(3.5355339059).epsilon(1e-10));
    CHECK_THROWS_AS(compute_rmse(std::span<const double>{}), Error);
}

TEST_CASE("method names") {
    CHECK(to_string(Method::Gea) == "gea");
    CHECK(to_string(Method::Cs) == "cs");
    CHECK(parse_method("cs") == Method::Cs);
    CHECK(parse_method("gea") == Method::Gea);
    CHECK_FALSE(parse_method("omp"));
}

TEST_CASE("seed derivation separates every path component") {
    static_assert(derive_seed(1, {0, 0, 1}) != derive_seed(1, {0, 0, 2}));
    CHECK(derive_seed(1, {0, 0, 1}) != derive_seed(2, {0, 0, 1}));
    CHECK(derive_seed(1, {0, 1, 1}) != derive_seed(1, {0, 0, 1}));
    CHECK(derive_seed(1, {1, 0, 1}) != derive_seed(1, {0, 0, 1}));
    CHECK(derive_seed(7, {3, 1}) == derive_seed(7, {3, 1}));
}

TEST_CASE("built-in ground truth is well separated in both channels and off the cs grid") {
    const auto spec = default_ground_truth();
    CHECK(spec.size() == 10);
    for (double rate : {101.0, 103.0}) {
        const double bin = rate / 108.0;
        for (std::size_t i = 0; i < spec.size(); ++i)
            for (std::size_t j = i + 1; j < spec.size(); ++j) {
                double d = std::abs(alias_of(spec.tones()[i].freq_hz(), rate) - alias_of(spec.tones()[j].freq_hz(), rate));
                d = std::min(d, rate - d);
                CHECK(d > 2.0 * bin);
            }
    }
    for (const auto& t : spec.tones()) {
        CHECK(t.freq_hz() >= 500.0);
        CHECK(t.freq_hz() <= 9500.0);
        CHECK(t.amplitude() >= 0.5);
        CHECK(t.amplitude() <= 2.0);
        const double off = std::remainder(t.freq_hz(), 5.0);
        CHECK(std::abs(off) > 1.0);
    }
}

TEST_CASE("matching exact estimates is the identity") {
    const auto spec = default_ground_truth();
    std::vector<EstimatedTone> est;
    for (const auto& t : spec.tones()) est.push_back({t.freq_hz(), t.amplitude(), t.phase_rad()});
    const auto m = match_to_truth(est, spec.tones());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == i);
}

TEST_CASE("matching is greedy on globally sorted distance") {
    const std::vector<Tone> truth{Tone(100, 1, 0), Tone(110, 1, 0)};
    // 104 is nearest to 100; 108 is nearer to 110 than to 100.
    std::vector<EstimatedTone> est{{108, 1, 0}, {104, 1, 0}};
    auto m = match_to_truth(est, truth);
    CHECK(m[0] == 1u);
    CHECK(m[1] == 0u);
    // Greedy, not optimal: 106 takes 110 first, leaving 115 for 100.
    est = {{106, 1, 0}, {115, 1, 0}};
    m = match_to_truth(est, truth);
    CHECK(m[0] == 1u);
    CHECK(m[1] == 0u);
    // Fewer estimates than tones leaves a gap.
    est = {{109, 1, 0}};
    m = match_to_truth(est, truth);
    CHECK_FALSE(m[0]);
    CHECK(m[1] == 0u);
}

TEST_CASE("noiseless gea trial is exact") {
    ExperimentConfig c;
    for (std::size_t len : {108u, 216u}) {
        const auto rec = run_trial(c, kNoiseless, len, 0, Method::Gea);
        REQUIRE(rec.ok());
        REQUIRE(rec.errors.size() == 10);
        for (const auto& e : rec.errors) {
            CHECK(e.freq_abs_hz < 1e-6);
            CHECK(e.amp_rel < 1e-6);
            CHECK(e.phase_rad < 1e-6);
        }
    }
}

TEST_CASE("noiseless cs trial on an on-grid spec is exact") {
    ExperimentConfig c;
    c.spec = on_grid_spec();
    const auto rec = run_trial(c, kNoiseless, 216, 0, Method::Cs);
    REQUIRE(rec.ok());
    for (const auto& e : rec.errors) {
        CHECK(e.freq_abs_hz == 0.0);
        CHECK(e.amp_rel < 1e-6);
        CHECK(e.phase_rad < 1e-6);
    }
}

TEST_CASE("trials are deterministic") {
    ExperimentConfig c;
    for (auto m : {Method::Gea, Method::Cs}) {
        const auto a = run_trial(c, 10.0, 108, 3, m);
        const auto b = run_trial(c, 10.0, 108, 3, m);
        CHECK(a == b);
    }
    CHECK(run_trial(c, 10.0, 108, 3, Method::Gea) != run_trial(c, 10.0, 108, 4, Method::Gea));
}

TEST_CASE("sweep grid shape and cell lookup") {
    ExperimentConfig c;
    c.trials = 1;
    c.snr_grid_db = {0, 10, 20, 30, 40, 50};
    const auto r = run_sweep(c);
    CHECK(r.cells.size() == 36);
    const auto& cell = r.at(Method::Cs, 216, 20);
    CHECK(cell.method == Method::Cs);
    CHECK(cell.sample_length == 216);
    CHECK(cell.snr_db == 20);
    CHECK(r.cells.front().method == Method::Gea);
    CHECK(r.cells.front().sample_length == 108);
    CHECK(r.cells.front().snr_db == 0);
    CHECK_THROWS_AS(r.at(Method::Cs, 217, 20), Error);
}

TEST_CASE("noiseless sweep gives sub-micro gea rmse") {
    ExperimentConfig c;
    c.methods = {Method::Gea};
    c.trials = 3;
    c.snr_grid_db = {kNoiseless};
    const auto r = run_sweep(c);
    for (const auto& cell : r.cells) {
        CHECK(cell.failure_count == 0);
        REQUIRE(cell.rmse_freq_hz);
        CHECK(*cell.rmse_freq_hz < 1e-6);
        CHECK(*cell.rmse_amp_rel < 1e-6);
        CHECK(*cell.rmse_phase_rad < 1e-6);
    }
}

TEST_CASE("serial and parallel sweeps are bit-identical") {
    auto c = micro();
    c.threads = 1;
    const auto serial = run_sweep(c);
    c.threads = 4;
    const auto parallel = run_sweep(c);
    CHECK(serial == parallel);
}

TEST_CASE("cells where every trial fails report no rmse") {
    auto c = micro({Method::Gea});
    c.max_fold_index_n = 1;  // no tone is reachable
    const auto r = run_sweep(c);
    for (const auto& cell : r.cells) {
        CHECK(cell.failure_count == c.trials);
        CHECK_FALSE(cell.rmse_freq_hz);
        CHECK_FALSE(cell.rmse_amp_rel);
        CHECK_FALSE(cell.rmse_phase_rad);
    }
}

TEST_CASE("gea frequency rmse falls with snr, at most one inversion per curve") {
    ExperimentConfig c;
    c.methods = {Method::Gea};
    c.trials = 100;
    c.sample_lengths = {108, 216};
    const auto r = run_sweep(c);
    for (std::size_t len : c.sample_lengths) {
        int inversions = 0;
        for (std::size_t s = 1; s < c.snr_grid_db.size(); ++s) {
            const auto& lo = r.at(Method::Gea, len, c.snr_grid_db[s - 1]);
            const auto& hi = r.at(Method::Gea, len, c.snr_grid_db[s]);
            REQUIRE(lo.rmse_freq_hz);
            REQUIRE(hi.rmse_freq_hz);
            inversions += *hi.rmse_freq_hz > *lo.rmse_freq_hz ? 1 : 0;
        }
        CAPTURE(len);
        CHECK(inversions <= 1);
    }
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    c.snr_grid_db = {10, 0};
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.sample_lengths = {};
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.methods = {};
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.rate2_hz = c.rate1_hz;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("thread count honours the environment") {
    ::setenv("PENCILCRT_THREADS", "1", 1);
    CHECK(default_thread_count() == 1);
    ::setenv("PENCILCRT_THREADS", "3", 1);
    CHECK(default_thread_count() <= 3);
    ::unsetenv("PENCILCRT_THREADS");
    CHECK(default_thread_count() >= 1);
}

}
