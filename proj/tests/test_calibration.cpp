#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gvar/calibration.hpp"
#include "gvar/math/rng.hpp"

using namespace gvar;

namespace {

std::vector<double> iid_gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

} // namespace

TEST_CASE("default W0 grid") {
    const auto grid = default_w0_grid(100, 0.05);
    REQUIRE(!grid.empty());
    CHECK(grid.front() == 5);
    CHECK(grid.back() == 100);
    const auto strict = default_w0_grid(100, 0.01);
    CHECK(strict.front() == 20); // floor for small alpha
    const auto odd = default_w0_grid(98, 0.05);
    CHECK(odd.back() == 98);
}

TEST_CASE("iid Gaussian: calibrated W0 hits the nominal level within 0.01") {
    const auto x = iid_gaussian(12000, 2024);
    CalibrationConfig cfg;
    cfg.w = 500;
    cfg.alpha = 0.05;
    const CalibrationResult res = calibrate_w0(x, cfg);
    CHECK(res.deviation <= 0.01);
    CHECK(res.grid.size() == default_w0_grid(500, 0.05).size());
    // With no volatility regimes the widest sub-window (the classical
    // variance) is the best fit.
    CHECK(res.w0_star == 500);
    CHECK(res.alpha_target == 0.05);
    CHECK(res.span_end - res.span_begin == 12000 - 500);
}

TEST_CASE("calibration is deterministic") {
    const auto x = iid_gaussian(4000, 99);
    CalibrationConfig cfg;
    cfg.w = 250;
    cfg.alpha = 0.05;
    const CalibrationResult a = calibrate_w0(x, cfg);
    const CalibrationResult b = calibrate_w0(x, cfg);
    CHECK(a.w0_star == b.w0_star);
    CHECK(a.deviation == b.deviation);
    REQUIRE(a.grid.size() == b.grid.size());
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        CHECK(a.grid[i].first == b.grid[i].first);
        CHECK(a.grid[i].second == b.grid[i].second);
    }
}

TEST_CASE("deterministic trend series: no candidate can reach the band") {
    std::vector<double> x(3000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 1e-4 * static_cast<double>(i);
    CalibrationConfig cfg;
    cfg.w = 250;
    cfg.alpha = 0.05;
    CHECK_THROWS_AS(calibrate_w0(x, cfg), CalibrationError);
}

TEST_CASE("configuration guards") {
    const auto x = iid_gaussian(1200, 5);
    CalibrationConfig cfg;
    cfg.w = 250;
    cfg.alpha = 0.05;

    SECTION("span floor") {
        cfg.min_span = 2000;
        CHECK_THROWS_AS(calibrate_w0(x, cfg), ConfigError);
    }
    SECTION("candidate outside [1, W]") {
        cfg.candidates = {100, 300};
        CHECK_THROWS_AS(calibrate_w0(x, cfg), ConfigError);
    }
    SECTION("alpha domain") {
        cfg.alpha = 0.0;
        CHECK_THROWS_AS(calibrate_w0(x, cfg), std::domain_error);
    }
    SECTION("series shorter than W+2") {
        cfg.w = 1200;
        CHECK_THROWS_AS(calibrate_w0(x, cfg), ConfigError);
    }
}

TEST_CASE("explicit candidate grid and tie-breaking") {
    const auto x = iid_gaussian(3000, 314);
    CalibrationConfig cfg;
    cfg.w = 200;
    cfg.alpha = 0.05;
    cfg.candidates = {50, 100, 150, 200};
    cfg.acceptance_band = 1.0; // never fail; we only inspect the selection
    const CalibrationResult res = calibrate_w0(x, cfg);
    REQUIRE(res.grid.size() == 4);
    double best = 1e9;
    int best_w0 = 0;
    for (const auto& [w0, rate] : res.grid) {
        const double dev = std::fabs(rate - cfg.alpha);
        if (dev < best) { // ties keep the smaller W0, matching the library rule
            best = dev;
            best_w0 = w0;
        }
    }
    CHECK(res.w0_star == best_w0);
    CHECK(res.deviation == Catch::Approx(best).margin(1e-15));
}

TEST_CASE("custom forecaster hook drives the violation accounting") {
    const auto x = iid_gaussian(2000, 8);
    CalibrationConfig cfg;
    cfg.w = 100;
    cfg.alpha = 0.05;
    cfg.candidates = {10, 20};
    cfg.acceptance_band = 1.0;
    // A huge constant VaR yields a zero violation rate for every candidate.
    const ForecastHook hook = [](std::span<const double> returns, int w, int, double) {
        return std::vector<double>(returns.size() - static_cast<std::size_t>(w), 1e6);
    };
    const CalibrationResult res = calibrate_w0(x, cfg, hook);
    for (const auto& [w0, rate] : res.grid) CHECK(rate == 0.0);
    CHECK(res.w0_star == 10); // tie on deviation -> smallest W0
}

TEST_CASE("adaptive window grows with the risk level on regime-switching data") {
    // Lower alpha means a wider worst-case interval is needed, hence a
    // smaller W0; the calibrated windows must be ordered accordingly.
    Rng rng(7);
    std::vector<double> x(12000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = ((i / 250) % 2 == 0 ? 0.5 : 1.0) * rng.normal();
    CalibrationConfig cfg;
    cfg.w = 500;
    cfg.alpha = 0.01;
    const int w0_low = calibrate_w0(x, cfg).w0_star;
    cfg.alpha = 0.05;
    const int w0_high = calibrate_w0(x, cfg).w0_star;
    CHECK(w0_low < w0_high);
}

TEST_CASE("thread count does not change the calibration result") {
    const auto x = iid_gaussian(5000, 61);
    CalibrationConfig cfg;
    cfg.w = 250;
    cfg.alpha = 0.05;

    setenv("GVAR_THREADS", "1", 1);
    const CalibrationResult serial = calibrate_w0(x, cfg);
    setenv("GVAR_THREADS", "4", 1);
    const CalibrationResult parallel = calibrate_w0(x, cfg);
    unsetenv("GVAR_THREADS");

    CHECK(serial.w0_star == parallel.w0_star);
    REQUIRE(serial.grid.size() == parallel.grid.size());
    for (std::size_t i = 0; i < serial.grid.size(); ++i)
        CHECK(serial.grid[i].second == parallel.grid[i].second);
}

TEST_CASE("ar1 mode rejects W0 = W (residual history is one shorter)") {
    const auto x = iid_gaussian(2000, 21);
    CalibrationConfig cfg;
    cfg.w = 100;
    cfg.alpha = 0.05;
    cfg.mode = GVarMode::ar1;
    cfg.candidates = {100};
    CHECK_THROWS_AS(calibrate_w0(x, cfg), ConfigError);
    cfg.candidates = {40, 99};
    cfg.acceptance_band = 1.0;
    CHECK_NOTHROW(calibrate_w0(x, cfg));

    // the auto-generated grid respects the cap instead of erroring
    cfg.candidates.clear();
    const CalibrationResult res = calibrate_w0(x, cfg);
    for (const auto& [w0, rate] : res.grid) CHECK(w0 <= 99);
}
