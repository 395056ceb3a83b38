#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfhurst/csv.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/hurst_scaling.hpp"
#include "mfhurst/mfdfa.hpp"
#include "mfhurst/spectrum.hpp"
#include "mfhurst/transform.hpp"

namespace mfhurst {

/// stats.csv: one row per (series kind, statistic) with jackknife errors.
inline std::string serialize_stats(std::span<const StatsReport> reports) {
  std::string out = "kind,statistic,value,stderr\n";
  const auto row = [&out](const char* kind, const char* stat,
                          const StatValue& v) {
    out += kind;
    out += ',';
    out += stat;
    out += ',';
    out += format_double(v.value);
    out += ',';
    out += format_double(v.stderr_jackknife);
    out += '\n';
  };
  for (const StatsReport& report : reports) {
    const char* kind = kind_name(report.kind);
    row(kind, "mean", report.mean);
    row(kind, "variance", report.variance);
    row(kind, "skewness", report.skewness);
    row(kind, "kurtosis", report.kurtosis);
  }
  return out;
}

/// ghe.csv: q, h, stderr, r2.
inline std::string serialize_ghe(const GheCurve& curve) {
  std::string out = "q,h,stderr,r2\n";
  for (const GhePoint& p : curve.points) {
    out += format_double(p.q);
    out += ',';
    out += format_double(p.h);
    out += ',';
    out += format_double(p.h_stderr);
    out += ',';
    out += format_double(p.r_squared);
    out += '\n';
  }
  return out;
}

/// fluctuation.csv: q, s, F (q outer, s inner).
inline std::string serialize_fluctuation(const FluctuationSurface& surface) {
  std::string out = "q,s,F\n";
  for (std::size_t qi = 0; qi < surface.q_grid.size(); ++qi)
    for (std::size_t si = 0; si < surface.scales.size(); ++si) {
      out += format_double(surface.q_grid[qi]);
      out += ',';
      out += std::to_string(surface.scales[si]);
      out += ',';
      out += format_double(surface.value(qi, si));
      out += '\n';
    }
  return out;
}

/// alpha.csv: q, alpha, f.
inline std::string serialize_alpha(const AlphaCurve& curve) {
  std::string out = "q,alpha,f\n";
  for (const AlphaPoint& p : curve.points) {
    out += format_double(p.q);
    out += ',';
    out += format_double(p.alpha);
    out += ',';
    out += format_double(p.f);
    out += '\n';
  }
  return out;
}

/// strength.csv: q, delta_h, delta_alpha, mdm for the positive grid orders.
inline std::string serialize_strength(std::span<const StrengthRow> rows) {
  std::string out = "q,delta_h,delta_alpha,mdm\n";
  for (const StrengthRow& r : rows) {
    out += format_double(r.q);
    out += ',';
    out += format_double(r.delta_h);
    out += ',';
    out += format_double(r.delta_alpha);
    out += ',';
    out += format_double(r.mdm);
    out += '\n';
  }
  return out;
}

/// ghe.csv reader (round trip of serialize_ghe); used by the spectrum
/// subcommand so it can consume a previous mfdfa run.
inline GheCurve load_ghe_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) raise(ErrorCode::ParseError, path + ": empty file");
  const std::vector<std::string> header = split_csv_line(lines.front().second);
  if (header.size() < 4 || trim(header[0]) != "q" || trim(header[1]) != "h")
    raise(ErrorCode::ParseError, path + ": expected header 'q,h,stderr,r2'");
  GheCurve curve;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i].second);
    if (fields.size() < 4)
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(lines[i].first) + ": too few columns");
    GhePoint p;
    if (!try_parse_double(trim(fields[0]), p.q) ||
        !try_parse_double(trim(fields[1]), p.h) ||
        !try_parse_double(trim(fields[2]), p.h_stderr) ||
        !try_parse_double(trim(fields[3]), p.r_squared))
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(lines[i].first) + ": bad number");
    curve.points.push_back(p);
  }
  if (curve.points.size() < 2)
    raise(ErrorCode::ParseError, path + ": need at least 2 grid rows");
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (!(curve.points[i].q > curve.points[i - 1].q))
      raise(ErrorCode::ParseError, path + ": q rows must be increasing");
  return curve;
}

/// points CSV for the finite-sample fit: columns `n,h2`.
inline std::vector<ScalingPoint> load_scaling_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) raise(ErrorCode::ParseError, path + ": empty file");
  const std::vector<std::string> header = split_csv_line(lines.front().second);
  if (header.size() < 2 || trim(header[0]) != "n" || trim(header[1]) != "h2")
    raise(ErrorCode::ParseError, path + ": expected header 'n,h2'");
  std::vector<ScalingPoint> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i].second);
    if (fields.size() < 2)
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(lines[i].first) + ": too few columns");
    ScalingPoint p;
    if (!try_parse_double(trim(fields[0]), p.n) ||
        !try_parse_double(trim(fields[1]), p.h2))
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(lines[i].first) + ": bad number");
    points.push_back(p);
  }
  return points;
}

}  // namespace mfhurst
