#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mfhurst/csv.hpp"
#include "mfhurst/dates.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/series.hpp"

namespace mfhurst {

struct ColumnSpec {
  std::string date_column = "date";
  std::string price_column = "close";
  std::string date_format = "%Y-%m-%d";
  std::string instrument;  // empty: derived from the file name
  /// Skip rows with unparseable dates or missing/non-positive closes instead
  /// of failing; every skip is still recorded in the load report.
  bool skip_bad_rows = false;
};

struct SkippedRow {
  std::size_t line = 0;
  std::string reason;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::vector<SkippedRow> skipped;
  bool reordered = false;  // input rows were not date-sorted
};

struct LoadedPrices {
  PriceSeries series;
  LoadReport report;
};

namespace detail {

inline std::string file_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

}  // namespace detail

/// Reads one instrument's daily closes. The first non-comment line must be a
/// header containing the mapped column names. Rows already in date order are
/// never reordered; unsorted input is stably sorted by date.
inline LoadedPrices load_price_csv(const std::string& path,
                                   const ColumnSpec& spec = {}) {
  const std::vector<std::pair<std::size_t, std::string>> lines =
      read_lines(path);
  if (lines.empty())
    raise(ErrorCode::EmptySeries, path + ": no data rows");

  const std::vector<std::string> header = split_csv_line(lines.front().second);
  std::size_t date_idx = header.size();
  std::size_t price_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == spec.date_column) date_idx = i;
    if (name == spec.price_column) price_idx = i;
  }
  if (date_idx == header.size())
    raise(ErrorCode::ParseError, path + ": header has no column '" +
                                     spec.date_column + "'");
  if (price_idx == header.size())
    raise(ErrorCode::ParseError, path + ": header has no column '" +
                                     spec.price_column + "'");

  LoadedPrices out;
  out.series.instrument =
      spec.instrument.empty() ? detail::file_stem(path) : spec.instrument;

  const auto bad_row = [&](std::size_t line, const std::string& reason,
                           ErrorCode code) {
    if (spec.skip_bad_rows) {
      out.report.skipped.push_back({line, reason});
      return;
    }
    raise(code, path + ":" + std::to_string(line) + ": " + reason);
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = lines[li].first;
    ++out.report.rows_read;
    const std::vector<std::string> fields = split_csv_line(lines[li].second);
    if (fields.size() <= std::max(date_idx, price_idx)) {
      bad_row(line_no, "too few columns", ErrorCode::ParseError);
      continue;
    }
    Date date;
    if (!try_parse_date(trim(fields[date_idx]), spec.date_format, date)) {
      bad_row(line_no,
              "unparseable date '" + trim(fields[date_idx]) + "' (format " +
                  spec.date_format + ")",
              ErrorCode::ParseError);
      continue;
    }
    const std::string raw_price = trim(fields[price_idx]);
    double close = 0.0;
    if (raw_price.empty() || !try_parse_double(raw_price, close)) {
      bad_row(line_no, "missing or unparseable close '" + raw_price + "'",
              ErrorCode::ParseError);
      continue;
    }
    if (!(close > 0.0)) {
      bad_row(line_no, "non-positive close " + raw_price,
              ErrorCode::NonPositivePrice);
      continue;
    }
    out.series.observations.push_back({date, close});
  }

  auto& obs = out.series.observations;
  if (!std::is_sorted(obs.begin(), obs.end(),
                      [](const PriceObservation& a, const PriceObservation& b) {
                        return a.date < b.date;
                      })) {
    out.report.reordered = true;
    std::stable_sort(obs.begin(), obs.end(),
                     [](const PriceObservation& a, const PriceObservation& b) {
                       return a.date < b.date;
                     });
  }
  for (std::size_t i = 1; i < obs.size(); ++i)
    if (obs[i].date == obs[i - 1].date)
      raise(ErrorCode::DuplicateDate,
            path + ": duplicate date " + obs[i].date.to_string());

  if (obs.empty()) raise(ErrorCode::EmptySeries, path + ": no valid rows");
  out.series.validate();
  return out;
}

enum class CoverageStatus { Covered, TruncatedHead, TruncatedTail, TruncatedBoth };

inline const char* coverage_status_name(CoverageStatus status) {
  switch (status) {
    case CoverageStatus::Covered: return "covered";
    case CoverageStatus::TruncatedHead: return "truncated-head";
    case CoverageStatus::TruncatedTail: return "truncated-tail";
    case CoverageStatus::TruncatedBoth: return "truncated-both";
  }
  return "unknown";
}

struct CoverageReport {
  CoverageStatus status = CoverageStatus::Covered;
  Date first;
  Date last;
  std::size_t observations = 0;
  long largest_gap_days = 0;  // calendar days between consecutive observations
  Date gap_start;
  Date gap_end;
};

/// Report-only check that the loaded sample spans the requested analysis
/// window, plus the largest calendar gap between consecutive observations.
inline CoverageReport validate_span(const PriceSeries& series,
                                    Date expected_start, Date expected_end) {
  if (!(expected_start < expected_end))
    raise(ErrorCode::ConfigInvalid, "expected_start must precede expected_end");
  series.validate();
  CoverageReport report;
  report.first = series.observations.front().date;
  report.last = series.observations.back().date;
  report.observations = series.size();
  for (std::size_t i = 1; i < series.size(); ++i) {
    const long gap = days_between(series.observations[i - 1].date,
                                  series.observations[i].date);
    if (gap > report.largest_gap_days) {
      report.largest_gap_days = gap;
      report.gap_start = series.observations[i - 1].date;
      report.gap_end = series.observations[i].date;
    }
  }
  const bool head = expected_start < report.first;
  const bool tail = report.last < expected_end;
  report.status = head ? (tail ? CoverageStatus::TruncatedBoth
                               : CoverageStatus::TruncatedHead)
                       : (tail ? CoverageStatus::TruncatedTail
                               : CoverageStatus::Covered);
  return report;
}

/// Canonical price CSV: header `date,close`, ISO dates, shortest
/// round-trippable decimals. Loading this output reproduces the series
/// byte-for-byte on re-serialization.
inline std::string serialize_prices(const PriceSeries& series) {
  std::string out = "date,close\n";
  for (const PriceObservation& obs : series.observations) {
    out += obs.date.to_string();
    out += ',';
    out += format_double(obs.close);
    out += '\n';
  }
  return out;
}

/// Canonical derived-series CSV: optional `# key: value` metadata comments,
/// then `date,value` rows.
inline std::string serialize_series(
    const DerivedSeries& series,
    const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  std::string out;
  out += "# kind: ";
  out += kind_name(series.kind);
  out += '\n';
  if (!series.source.empty()) {
    out += "# source: ";
    out += series.source;
    out += '\n';
  }
  for (const auto& [key, value] : metadata) {
    out += "# ";
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  out += "date,value\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out += series.dates[i].to_string();
    out += ',';
    out += format_double(series.values[i]);
    out += '\n';
  }
  return out;
}

/// Loads a canonical derived-series CSV (as written by serialize_series).
inline DerivedSeries load_series_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  DerivedSeries series;
  bool kind_seen = false;
  bool header_seen = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) {
        const std::string key = trim(line.substr(1, colon - 1));
        const std::string value = trim(line.substr(colon + 1));
        if (key == "kind") {
          series.kind = parse_kind(value);
          kind_seen = true;
        } else if (key == "source") {
          series.source = value;
        }
      }
      continue;
    }
    if (!header_seen) {
      const std::vector<std::string> header = split_csv_line(line);
      if (header.size() < 2 || trim(header[0]) != "date" ||
          trim(header[1]) != "value")
        raise(ErrorCode::ParseError,
              path + ": expected header 'date,value', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 2)
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(line_no) + ": too few columns");
    Date date;
    if (!try_parse_date(trim(fields[0]), "%Y-%m-%d", date))
      raise(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                       ": unparseable date '" + fields[0] +
                                       "'");
    double value = 0.0;
    if (!try_parse_double(trim(fields[1]), value))
      raise(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                       ": unparseable value '" + fields[1] +
                                       "'");
    series.dates.push_back(date);
    series.values.push_back(value);
  }
  if (!header_seen)
    raise(ErrorCode::ParseError, path + ": missing 'date,value' header");
  if (series.values.empty())
    raise(ErrorCode::EmptySeries, path + ": no data rows");
  if (!kind_seen) series.kind = SeriesKind::Returns;
  return series;
}

}  // namespace mfhurst
