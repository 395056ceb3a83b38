#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mfhurst/errors.hpp"
#include "mfhurst/series.hpp"

namespace mfhurst {

/// Log returns r(i) = ln(P(i+1) / P(i)), dated at the later observation.
inline DerivedSeries log_returns(const PriceSeries& series) {
  series.validate();
  DerivedSeries out;
  out.kind = SeriesKind::Returns;
  out.source = series.instrument;
  out.dates.reserve(series.size() - 1);
  out.values.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    out.dates.push_back(series.observations[i].date);
    out.values.push_back(std::log(series.observations[i].close /
                                  series.observations[i - 1].close));
  }
  return out;
}

inline DerivedSeries absolute_returns(const DerivedSeries& returns) {
  if (returns.kind != SeriesKind::Returns)
    raise(ErrorCode::WrongKind, "absolute_returns expects a returns series");
  returns.validate();
  DerivedSeries out;
  out.kind = SeriesKind::AbsoluteReturns;
  out.source = returns.source;
  out.dates = returns.dates;
  out.values.reserve(returns.values.size());
  for (double v : returns.values) out.values.push_back(std::abs(v));
  return out;
}

/// Log-volatility increments C(i) = ln|r(i+1)| - ln|r(i)|. Zero absolute
/// returns have no logarithm, so they are removed first and the increment is
/// taken between surviving neighbours; the count is kept for reporting.
inline DerivedSeries volatility_increments(const DerivedSeries& abs_returns) {
  if (abs_returns.kind != SeriesKind::AbsoluteReturns)
    raise(ErrorCode::WrongKind,
          "volatility_increments expects an absolute-returns series");
  abs_returns.validate();
  std::vector<Date> kept_dates;
  std::vector<double> log_vol;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < abs_returns.values.size(); ++i) {
    if (abs_returns.values[i] > 0.0) {
      kept_dates.push_back(abs_returns.dates[i]);
      log_vol.push_back(std::log(abs_returns.values[i]));
    } else {
      ++dropped;
    }
  }
  if (log_vol.size() < 2)
    raise(ErrorCode::TooFewNonZero,
          "need at least 2 non-zero absolute returns, have " +
              std::to_string(log_vol.size()));
  DerivedSeries out;
  out.kind = SeriesKind::VolatilityIncrements;
  out.source = abs_returns.source;
  out.dropped_zeros = dropped;
  out.dates.reserve(log_vol.size() - 1);
  out.values.reserve(log_vol.size() - 1);
  for (std::size_t i = 1; i < log_vol.size(); ++i) {
    out.dates.push_back(kept_dates[i]);
    out.values.push_back(log_vol[i] - log_vol[i - 1]);
  }
  return out;
}

struct StatValue {
  double value = 0.0;
  double stderr_jackknife = 0.0;
  bool defined = true;
};

struct StatsReport {
  SeriesKind kind = SeriesKind::Returns;
  std::string source;
  std::size_t n = 0;
  int blocks = 0;
  StatValue mean;
  StatValue variance;  // unbiased (n - 1 denominator)
  StatValue skewness;  // m3 / m2^(3/2); undefined when variance is 0
  StatValue kurtosis;  // m4 / m2^2, 3 for a Gaussian; undefined when variance is 0
};

namespace detail {

struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  bool shape_defined = true;  // false when the sample variance is zero
};

/// Four moment statistics over `values` with [skip_begin, skip_end) removed.
inline MomentSet moments_excluding(const std::vector<double>& values,
                                   std::size_t skip_begin,
                                   std::size_t skip_end) {
  const std::size_t n = values.size() - (skip_end - skip_begin);
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i >= skip_begin && i < skip_end) continue;
    sum += values[i];
  }
  const double mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i >= skip_begin && i < skip_end) continue;
    const double d = values[i] - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double dn = static_cast<double>(n);
  MomentSet out;
  out.mean = mean;
  out.variance = m2 / (dn - 1.0);
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  if (m2 <= 0.0) {
    out.shape_defined = false;
    out.skewness = std::numeric_limits<double>::quiet_NaN();
    out.kurtosis = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

}  // namespace detail

/// Sample moments with delete-one-block jackknife standard errors. Blocks
/// are contiguous so the error bars stay honest under serial dependence;
/// the remainder of n / blocks goes to the last block.
inline StatsReport descriptive_stats(const DerivedSeries& series,
                                     int blocks = 20) {
  series.validate();
  if (blocks < 2)
    raise(ErrorCode::ConfigInvalid, "jackknife needs at least 2 blocks");
  const std::size_t n = series.values.size();
  if (n < 2 * static_cast<std::size_t>(blocks))
    raise(ErrorCode::SeriesTooShort,
          "need at least 2 values per jackknife block");

  StatsReport report;
  report.kind = series.kind;
  report.source = series.source;
  report.n = n;
  report.blocks = blocks;

  const detail::MomentSet full = detail::moments_excluding(series.values, 0, 0);
  report.mean.value = full.mean;
  report.variance.value = full.variance;
  report.skewness.value = full.skewness;
  report.kurtosis.value = full.kurtosis;

  const std::size_t g = static_cast<std::size_t>(blocks);
  const std::size_t base = n / g;
  std::vector<detail::MomentSet> leave_out;
  leave_out.reserve(g);
  bool replicates_defined = full.shape_defined;
  for (std::size_t b = 0; b < g; ++b) {
    const std::size_t begin = b * base;
    const std::size_t end = (b + 1 == g) ? n : begin + base;
    leave_out.push_back(detail::moments_excluding(series.values, begin, end));
    replicates_defined = replicates_defined && leave_out.back().shape_defined;
  }

  const auto jackknife_se = [&](auto pick) {
    double mean = 0.0;
    for (const detail::MomentSet& m : leave_out) mean += pick(m);
    mean /= static_cast<double>(g);
    double ss = 0.0;
    for (const detail::MomentSet& m : leave_out) {
      const double d = pick(m) - mean;
      ss += d * d;
    }
    return std::sqrt(ss * static_cast<double>(g - 1) / static_cast<double>(g));
  };

  report.mean.stderr_jackknife =
      jackknife_se([](const detail::MomentSet& m) { return m.mean; });
  report.variance.stderr_jackknife =
      jackknife_se([](const detail::MomentSet& m) { return m.variance; });
  if (replicates_defined) {
    report.skewness.stderr_jackknife =
        jackknife_se([](const detail::MomentSet& m) { return m.skewness; });
    report.kurtosis.stderr_jackknife =
        jackknife_se([](const detail::MomentSet& m) { return m.kurtosis; });
  }
  report.skewness.defined = replicates_defined;
  report.kurtosis.defined = replicates_defined;
  if (!report.skewness.defined) {
    report.skewness.stderr_jackknife = std::numeric_limits<double>::quiet_NaN();
    report.kurtosis.stderr_jackknife = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace mfhurst
