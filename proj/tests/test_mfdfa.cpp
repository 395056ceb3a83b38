#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mfhurst/mfdfa.hpp"
#include "test_util.hpp"

using namespace mfhurst;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> values(n);
  for (double& v : values) v = gauss(rng);
  return values;
}

// independent reference: cumulative sum in extended precision
std::vector<double> oracle_profile(const std::vector<double>& values) {
  long double mean = 0.0L;
  for (double v : values) mean += v;
  mean /= static_cast<long double>(values.size());
  std::vector<double> prof(values.size());
  long double acc = 0.0L;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += static_cast<long double>(values[i]) - mean;
    prof[i] = static_cast<double>(acc);
  }
  return prof;
}

// independent reference: straight-line fit over x = 1..s by normal equations
double oracle_line_msr(const double* y, int s) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < s; ++i) {
    const double x = i + 1;
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double denom = s * sxx - sx * sx;
  const double slope = (s * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / s;
  double ss = 0;
  for (int i = 0; i < s; ++i) {
    const double e = y[i] - (intercept + slope * (i + 1));
    ss += e * e;
  }
  return ss / s;
}

// independent reference: full order-2 fluctuation analysis with linear
// detrending and bidirectional segmentation, coded from scratch
double oracle_dfa_h2(const std::vector<double>& values,
                     const std::vector<int>& scales) {
  const std::vector<double> prof = oracle_profile(values);
  const std::size_t n = prof.size();
  std::vector<double> log_s, log_f;
  for (int s : scales) {
    const std::size_t scale = static_cast<std::size_t>(s);
    const std::size_t ns = n / scale;
    double sum = 0.0;
    for (std::size_t v = 0; v < ns; ++v) {
      sum += oracle_line_msr(prof.data() + v * scale, s);
      sum += oracle_line_msr(prof.data() + (n - (v + 1) * scale), s);
    }
    const double f2 = std::sqrt(sum / static_cast<double>(2 * ns));
    log_s.push_back(std::log(static_cast<double>(s)));
    log_f.push_back(std::log(f2));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    mx += log_s[i];
    my += log_f[i];
  }
  mx /= static_cast<double>(log_s.size());
  my /= static_cast<double>(log_s.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_s.size(); ++i) {
    sxx += (log_s[i] - mx) * (log_s[i] - mx);
    sxy += (log_s[i] - mx) * (log_f[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("q grid construction", "[mfdfa][config]") {
  const std::vector<double> grid = MfdfaConfig::default_q_grid();
  REQUIRE(grid.size() == 41);
  for (int i = 0; i < 41; ++i)
    CHECK(grid[static_cast<std::size_t>(i)] == (i - 20) * 0.25);
  CHECK(MfdfaConfig::q_grid_from_range(-5, 5, 0.25) == grid);
  const std::vector<double> coarse = MfdfaConfig::q_grid_from_range(-2, 2, 1);
  CHECK(coarse == std::vector<double>{-2, -1, 0, 1, 2});
  REQUIRE_ERROR(MfdfaConfig::q_grid_from_range(1, 2, 0.3), ConfigInvalid);
  REQUIRE_ERROR(MfdfaConfig::q_grid_from_range(2, 1, 0.5), ConfigInvalid);
  REQUIRE_ERROR(MfdfaConfig::q_grid_from_range(-1, 1, 0), ConfigInvalid);
}

TEST_CASE("scale grid construction", "[mfdfa][config]") {
  const std::vector<int> scales = MfdfaConfig::log_spaced_scales(16, 64, 5);
  REQUIRE(scales.size() >= 2);
  CHECK(scales.front() == 16);
  CHECK(scales.back() == 64);
  CHECK(std::is_sorted(scales.begin(), scales.end()));
  CHECK(std::adjacent_find(scales.begin(), scales.end()) == scales.end());

  const std::vector<int> defaults = MfdfaConfig::default_scales(10000);
  CHECK(defaults.front() == 16);
  CHECK(defaults.back() == 2500);
  CHECK(defaults.size() >= 15);  // 20 requested, duplicates removed
  CHECK(defaults.size() <= 20);
  REQUIRE_ERROR(MfdfaConfig::default_scales(63), ConfigInvalid);
  REQUIRE_ERROR(MfdfaConfig::log_spaced_scales(1, 64, 5), ConfigInvalid);
}

TEST_CASE("config validation", "[mfdfa][config]") {
  MfdfaConfig config;
  config.scales = {16, 32, 64};
  CHECK_NOTHROW(config.validate(256));

  MfdfaConfig asym = config;
  asym.q_grid = {-1, 0, 2};
  REQUIRE_ERROR(asym.validate(256), ConfigInvalid);

  MfdfaConfig tiny = config;
  tiny.scales = {4, 16};
  REQUIRE_ERROR(tiny.validate(256), ScaleTooSmall);

  MfdfaConfig huge = config;
  huge.scales = {16, 128};
  REQUIRE_ERROR(huge.validate(256), ScaleTooLarge);

  MfdfaConfig unsorted = config;
  unsorted.scales = {32, 16, 64};
  REQUIRE_ERROR(unsorted.validate(256), ConfigInvalid);

  MfdfaConfig order = config;
  order.detrend_order = 9;
  REQUIRE_ERROR(order.validate(256), ConfigInvalid);

  MfdfaConfig range = config;
  range.fit_range = {{64, 16}};
  REQUIRE_ERROR(range.validate(256), ConfigInvalid);
}

TEST_CASE("profile subtracts the mean and accumulates", "[mfdfa]") {
  const std::vector<double> r = {1, 2, 3};
  CHECK(profile(r) == std::vector<double>{-1, -1, 0});

  const std::vector<double> noise = white_noise(1000, 5);
  const std::vector<double> prof = profile(noise);
  const std::vector<double> expected = oracle_profile(noise);
  double max_abs = 0.0;
  for (double v : noise) max_abs = std::max(max_abs, std::abs(v));
  REQUIRE(prof.size() == expected.size());
  for (std::size_t i = 0; i < prof.size(); ++i)
    CHECK(prof[i] == Catch::Approx(expected[i]).margin(1e-12));
  // the full-sample deviation sum telescopes to ~0
  CHECK(std::abs(prof.back()) <= 1e-10 * 1000 * max_abs);

  const std::vector<double> one = {1.0};
  REQUIRE_ERROR(profile(one), SeriesTooShort);
}

TEST_CASE("bidirectional segmentation with exact division", "[mfdfa]") {
  // N = 8, s = 4: the backward pass retraces the forward segments
  const std::vector<double> prof =
      oracle_profile(white_noise(8, 11));
  const std::vector<double> vars = segment_variances(prof, 4, 1);
  REQUIRE(vars.size() == 4);
  CHECK(vars[2] == vars[1]);  // same memory window, same detrender
  CHECK(vars[3] == vars[0]);
}

TEST_CASE("bidirectional segmentation covers the tail", "[mfdfa]") {
  // N = 10, s = 4: forward covers 1-4 and 5-8 (1-based), backward 7-10 and
  // 3-6; checked against a from-scratch straight-line fit per window
  const std::vector<double> prof = oracle_profile(white_noise(10, 13));
  const std::vector<double> vars = segment_variances(prof, 4, 1);
  REQUIRE(vars.size() == 4);
  CHECK(vars[0] == Catch::Approx(oracle_line_msr(prof.data() + 0, 4)).epsilon(1e-12));
  CHECK(vars[1] == Catch::Approx(oracle_line_msr(prof.data() + 4, 4)).epsilon(1e-12));
  CHECK(vars[2] == Catch::Approx(oracle_line_msr(prof.data() + 6, 4)).epsilon(1e-12));
  CHECK(vars[3] == Catch::Approx(oracle_line_msr(prof.data() + 2, 4)).epsilon(1e-12));
}

TEST_CASE("segment variance errors", "[mfdfa]") {
  const std::vector<double> prof = oracle_profile(white_noise(32, 17));
  REQUIRE_ERROR(segment_variances(prof, 4, 3), ScaleTooSmall);
  REQUIRE_ERROR(segment_variances(prof, 64, 1), ScaleTooLarge);
  CHECK(segment_variances(prof, 5, 3).size() == 2 * (32 / 5));
}

TEST_CASE("cubic detrending wipes out cubic profiles", "[mfdfa]") {
  std::vector<double> prof(20);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double x = static_cast<double>(i) + 1.0;
    prof[i] = 0.5 * x * x * x - 2.0 * x * x + 3.0 * x - 1.0;
  }
  for (double v : segment_variances(prof, 10, 3)) CHECK(v <= 1e-18);
}

TEST_CASE("fluctuation function closed forms", "[mfdfa]") {
  const std::vector<double> flat = {4.0, 4.0, 4.0, 4.0};
  for (double q : {-3.0, -1.0, 0.0, 0.5, 2.0, 5.0})
    CHECK(fluctuation_function(flat, q).value ==
          Catch::Approx(2.0).epsilon(1e-14));

  const std::vector<double> pair = {1.0, 4.0};
  CHECK(fluctuation_function(pair, 2.0).value ==
        Catch::Approx(std::sqrt(2.5)).epsilon(1e-14));
  // q -> 0 limit: exp of the mean log, here (ln 1 + ln 4) / 4
  CHECK(fluctuation_function(pair, 0.0).value ==
        Catch::Approx(std::pow(4.0, 0.25)).epsilon(1e-14));
  // q = -2: harmonic-type mean, ((1 + 1/4)/2)^(-1/2)
  CHECK(fluctuation_function(pair, -2.0).value ==
        Catch::Approx(std::pow(0.625, -0.5)).epsilon(1e-14));
}

TEST_CASE("zero-variance segments are excluded only for q <= 0", "[mfdfa]") {
  const std::vector<double> with_zero = {0.0, 1.0};

  const FluctuationValue positive = fluctuation_function(with_zero, 2.0);
  CHECK(positive.value == Catch::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(positive.excluded_segments == 0);

  const FluctuationValue negative = fluctuation_function(with_zero, -2.0);
  CHECK(negative.value == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(negative.excluded_segments == 1);

  const FluctuationValue zero_q = fluctuation_function(with_zero, 0.0);
  CHECK(zero_q.value == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(zero_q.excluded_segments == 1);

  const std::vector<double> all_zero = {0.0, 0.0};
  REQUIRE_ERROR(fluctuation_function(all_zero, 2.0), AllZeroVariances);
  const std::vector<double> bad = {-1.0, 2.0};
  REQUIRE_ERROR(fluctuation_function(bad, 2.0), ConfigInvalid);
}

TEST_CASE("surface agrees with direct per-scale evaluation", "[mfdfa]") {
  const std::vector<double> values = white_noise(512, 23);
  MfdfaConfig config;
  config.scales = {8, 16, 32, 64, 128};
  config.q_grid = MfdfaConfig::q_grid_from_range(-3, 3, 1);
  config.detrend_order = 1;
  const FluctuationSurface surface =
      compute_fluctuation_surface(values, config);
  REQUIRE(surface.scales == config.scales);
  REQUIRE(surface.values.size() ==
          config.scales.size() * config.q_grid.size());

  const std::vector<double> prof = profile(values);
  for (std::size_t si = 0; si < surface.scales.size(); ++si) {
    const std::vector<double> vars =
        segment_variances(prof, surface.scales[si], 1);
    for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi)
      CHECK(surface.value(qi, si) ==
            fluctuation_function(vars, surface.q_grid[qi]).value);
  }
}

TEST_CASE("surface counts exactly-zero segments", "[mfdfa]") {
  // alternating +/-1 then a run of zeros: overall mean is exactly 0, so the
  // profile is constant across the zero run and fully-contained segments
  // have exactly zero detrended variance
  std::vector<double> values;
  for (int i = 0; i < 16; ++i) values.push_back(i % 2 == 0 ? 1.0 : -1.0);
  values.resize(64, 0.0);
  MfdfaConfig config;
  config.scales = {8, 16};
  config.q_grid = {-2, 0, 2};
  config.detrend_order = 1;
  const FluctuationSurface surface =
      compute_fluctuation_surface(values, config);
  for (std::size_t si = 0; si < surface.scales.size(); ++si) {
    int exact_zeros = 0;
    for (double v : surface.variances_per_scale[si])
      if (v == 0.0) ++exact_zeros;
    CHECK(surface.zero_segments_per_scale[si] == exact_zeros);
    CHECK(exact_zeros > 0);
  }
}

TEST_CASE("fluctuation order is monotone in q", "[mfdfa]") {
  const std::vector<double> values = white_noise(2048, 29);
  MfdfaConfig config;
  config.scales = {16, 32, 64, 128, 256, 512};
  const FluctuationSurface surface =
      compute_fluctuation_surface(values, config);
  CHECK(surface.max_q_order_violation <= 1e-9);
}

TEST_CASE("ghe_fit recovers a pure power law", "[mfdfa]") {
  FluctuationSurface surface;
  surface.scales = {8, 16, 32, 64, 128};
  surface.q_grid = {-2, 0, 2};
  surface.values.resize(15);
  for (std::size_t qi = 0; qi < 3; ++qi)
    for (std::size_t si = 0; si < 5; ++si)
      surface.values[qi * 5 + si] =
          0.37 * std::pow(static_cast<double>(surface.scales[si]), 0.5);

  const GhePoint point = ghe_fit(surface, 2.0);
  CHECK(point.h == Catch::Approx(0.5).margin(1e-12));
  CHECK(point.r_squared == Catch::Approx(1.0).margin(1e-12));
  CHECK(point.h_stderr <= 1e-12);
  CHECK(point.dropped_scales == 0);

  REQUIRE_ERROR(ghe_fit(surface, 1.0), QNotOnGrid);
  // narrowing the window below 4 scales is refused
  REQUIRE_ERROR(ghe_fit(surface, 2.0, {{16, 64}}), InsufficientScales);
  const GhePoint windowed = ghe_fit(surface, 2.0, {{8, 64}});
  CHECK(windowed.h == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("mfdfa rejects degenerate input", "[mfdfa]") {
  const std::vector<double> constant(256, 0.7);
  REQUIRE_ERROR(mfdfa(constant), DegenerateSeries);
  const std::vector<double> one = {1.0};
  REQUIRE_ERROR(mfdfa(one), SeriesTooShort);
}

TEST_CASE("mfdfa matches an independently coded order-2 analysis",
          "[mfdfa][oracle]") {
  const std::vector<double> values = white_noise(512, 37);
  MfdfaConfig config;
  config.scales = {8, 16, 32, 64, 128};
  config.q_grid = {-2, 0, 2};
  config.detrend_order = 1;
  const GheCurve curve = mfdfa(values, config);
  const double expected = oracle_dfa_h2(values, config.scales);
  CHECK(curve.h_at(2.0) == Catch::Approx(expected).margin(1e-10));
}

TEST_CASE("rescaling the input leaves h(q) unchanged", "[mfdfa]") {
  const std::vector<double> values = white_noise(2048, 41);
  MfdfaConfig config;
  config.scales = MfdfaConfig::log_spaced_scales(16, 512, 10);
  config.q_grid = MfdfaConfig::q_grid_from_range(-2, 2, 1);

  const GheCurve base = mfdfa(values, config);

  std::vector<double> scaled = values;
  for (double& v : scaled) v *= 4.0;  // power of two: exact rescaling
  const GheCurve by4 = mfdfa(scaled, config);
  for (std::size_t i = 0; i < base.points.size(); ++i)
    CHECK(by4.points[i].h == Catch::Approx(base.points[i].h).margin(1e-12));

  std::vector<double> odd = values;
  for (double& v : odd) v *= 3.7;
  const GheCurve by37 = mfdfa(odd, config);
  for (std::size_t i = 0; i < base.points.size(); ++i)
    CHECK(by37.points[i].h == Catch::Approx(base.points[i].h).margin(1e-9));

  // F itself scales linearly with the input
  const FluctuationSurface surface =
      compute_fluctuation_surface(values, config);
  const FluctuationSurface surface4 =
      compute_fluctuation_surface(scaled, config);
  for (std::size_t i = 0; i < surface.values.size(); ++i)
    CHECK(surface4.values[i] ==
          Catch::Approx(4.0 * surface.values[i]).epsilon(1e-12));
}

TEST_CASE("adding a constant leaves h(q) unchanged", "[mfdfa]") {
  const std::vector<double> values = white_noise(2048, 43);
  MfdfaConfig config;
  config.scales = MfdfaConfig::log_spaced_scales(16, 512, 10);
  config.q_grid = MfdfaConfig::q_grid_from_range(-2, 2, 1);
  const GheCurve base = mfdfa(values, config);

  std::vector<double> shifted = values;
  for (double& v : shifted) v += 7.25;
  const GheCurve moved = mfdfa(shifted, config);
  for (std::size_t i = 0; i < base.points.size(); ++i)
    CHECK(moved.points[i].h == Catch::Approx(base.points[i].h).margin(1e-9));
}

TEST_CASE("reversing the input barely moves the estimate", "[mfdfa]") {
  // the mirrored segmentation shifts each window by one profile sample
  // (the profile pins Y(N) = 0, not Y(0)), so equality is statistical
  const std::vector<double> values = white_noise(4096, 47);
  MfdfaConfig config;
  config.scales = MfdfaConfig::log_spaced_scales(16, 1024, 12);
  config.q_grid = MfdfaConfig::q_grid_from_range(-2, 2, 1);
  const GheCurve forward = mfdfa(values, config);

  std::vector<double> reversed(values.rbegin(), values.rend());
  const GheCurve backward = mfdfa(reversed, config);
  for (std::size_t i = 0; i < forward.points.size(); ++i)
    CHECK(backward.points[i].h ==
          Catch::Approx(forward.points[i].h).margin(0.02));
}

TEST_CASE("white noise closes on h(2) = 1/2", "[mfdfa]") {
  MfdfaConfig config;
  config.q_grid = MfdfaConfig::q_grid_from_range(-2, 2, 1);
  double sum = 0.0;
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    const GheCurve curve = mfdfa(white_noise(4096, seed), config);
    const double h2 = curve.h_at(2.0);
    CHECK(h2 > 0.42);
    CHECK(h2 < 0.58);
    CHECK(curve.at_q(2.0).r_squared > 0.98);
    sum += h2;
  }
  CHECK(sum / 3.0 == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("curve lookup and config snapshot", "[mfdfa]") {
  const std::vector<double> values = white_noise(1024, 53);
  MfdfaConfig config;  // empty scales: derived from the length
  config.q_grid = MfdfaConfig::q_grid_from_range(-1, 1, 0.5);
  const GheCurve curve = mfdfa(values, config);
  REQUIRE(curve.points.size() == 5);
  CHECK(curve.has_q(0.5));
  CHECK_FALSE(curve.has_q(0.3));
  CHECK(curve.at_q(-1.0).q == -1.0);
  REQUIRE_ERROR(curve.at_q(3.0), QNotOnGrid);
  // the snapshot records the actual grid, not the empty request
  CHECK_FALSE(curve.config.scales.empty());
  CHECK(curve.config.scales == MfdfaConfig::default_scales(1024));
  CHECK(curve.max_monotonicity_violation >= 0.0);
}

TEST_CASE("too few scales is refused end to end", "[mfdfa]") {
  const std::vector<double> values = white_noise(512, 59);
  MfdfaConfig config;
  config.scales = {16, 32, 64};
  REQUIRE_ERROR(mfdfa(values, config), InsufficientScales);
}
