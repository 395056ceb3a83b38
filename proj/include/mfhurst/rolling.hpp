#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mfhurst/csv.hpp"
#include "mfhurst/dates.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/mfdfa.hpp"
#include "mfhurst/series.hpp"
#include "mfhurst/spectrum.hpp"

namespace mfhurst {

/// Picks the conventional 3-year window: 1095 observations when the series
/// runs on a 7-day calendar (nearly all gaps are 1 day), 750 when it skips
/// weekends and holidays.
inline bool infer_seven_day_calendar(const std::vector<Date>& dates) {
  if (dates.size() < 2) return true;
  std::size_t one_day = 0;
  for (std::size_t i = 1; i < dates.size(); ++i)
    if (days_between(dates[i - 1], dates[i]) == 1) ++one_day;
  return static_cast<double>(one_day) >=
         0.9 * static_cast<double>(dates.size() - 1);
}

inline std::size_t default_window(const std::vector<Date>& dates) {
  return infer_seven_day_calendar(dates) ? 1095u : 750u;
}

struct RollingConfig {
  std::size_t window = 0;  // 0: choose 1095/750 from the date calendar
  std::size_t step = 1;
  MfdfaConfig mfdfa;
  double strength_q = 5.0;  // order used for the per-window strength columns

  std::size_t effective_window(const std::vector<Date>& dates) const {
    return window == 0 ? default_window(dates) : window;
  }
};

struct RollingPoint {
  Date end_date;  // final observation inside the window
  double h2 = 0.0;
  double h2_stderr = 0.0;
  double dh = 0.0;   // delta_h at strength_q
  double da = 0.0;   // delta_alpha at strength_q
  double mdm = 0.0;  // market deficiency measure at strength_q
  bool suspect = false;
};

struct RollingResult {
  std::size_t window = 0;
  std::size_t step = 1;
  double strength_q = 5.0;
  std::vector<RollingPoint> points;
};

namespace detail {

inline RollingPoint evaluate_window(std::span<const double> values,
                                    Date end_date, const MfdfaConfig& config,
                                    double strength_q) {
  const GheCurve curve = mfdfa(values, config);
  const AlphaCurve alpha = singularity_spectrum(curve);
  RollingPoint point;
  point.end_date = end_date;
  const GhePoint& at2 = curve.at_q(2.0);
  point.h2 = at2.h;
  point.h2_stderr = at2.h_stderr;
  point.dh = delta_h(curve, strength_q);
  point.da = delta_alpha(alpha, strength_q);
  point.mdm = mdm(curve, strength_q).value;
  point.suspect = curve.suspect;
  return point;
}

}  // namespace detail

/// Slides a fixed-length window over the series and summarizes each
/// position's estimate. Window slots are computed independently and written
/// into a preallocated result vector, so the output is bit-identical no
/// matter how many worker threads run (threads = 0 picks the hardware
/// count).
inline RollingResult rolling_ghe(const DerivedSeries& series,
                                 const RollingConfig& config,
                                 unsigned threads = 1) {
  series.validate();
  const std::size_t n = series.size();
  const std::size_t window = config.effective_window(series.dates);
  if (config.step < 1)
    raise(ErrorCode::ConfigInvalid, "rolling step must be at least 1");
  if (window > n)
    raise(ErrorCode::WindowTooLarge,
          "window " + std::to_string(window) + " exceeds series length " +
              std::to_string(n));
  config.mfdfa.validate(window);
  for (const double needed : {2.0, config.strength_q, -config.strength_q}) {
    const auto on_grid = [&](double q) { return std::abs(q - needed) <= 1e-9; };
    if (std::none_of(config.mfdfa.q_grid.begin(), config.mfdfa.q_grid.end(),
                     on_grid))
      raise(ErrorCode::QNotOnGrid,
            "rolling columns need q = " + format_double(needed) +
                " on the estimation grid");
  }

  const std::size_t count = (n - window) / config.step + 1;
  RollingResult result;
  result.window = window;
  result.step = config.step;
  result.strength_q = config.strength_q;
  result.points.resize(count);

  const auto run_slot = [&](std::size_t slot) {
    const std::size_t begin = slot * config.step;
    result.points[slot] = detail::evaluate_window(
        std::span<const double>(series.values).subspan(begin, window),
        series.dates[begin + window - 1], config.mfdfa, config.strength_q);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || count <= 1) {
    for (std::size_t slot = 0; slot < count; ++slot) run_slot(slot);
    return result;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= count) return;
      try {
        run_slot(slot);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(threads, count));
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

struct Period {
  std::string name;
  Date start;
  Date end;
};

struct PeriodResult {
  std::string name;
  Date start;
  Date end;
  std::size_t observations = 0;
  double h2 = 0.0;
  double h2_stderr = 0.0;
  double r_squared = 0.0;
  bool suspect = false;
};

/// Whole-sample estimate restricted to each named date range.
inline std::vector<PeriodResult> period_summary(
    const DerivedSeries& series, const std::vector<Period>& periods,
    const MfdfaConfig& config = {}) {
  series.validate();
  std::vector<PeriodResult> results;
  results.reserve(periods.size());
  for (const Period& period : periods) {
    if (!(period.start < period.end) && !(period.start == period.end))
      raise(ErrorCode::ConfigInvalid,
            "period '" + period.name + "' has start after end");
    const auto begin = std::lower_bound(series.dates.begin(),
                                        series.dates.end(), period.start);
    auto end = std::upper_bound(series.dates.begin(), series.dates.end(),
                                period.end);
    if (begin == series.dates.end() || begin >= end)
      raise(ErrorCode::PeriodOutsideData,
            "period '" + period.name + "' contains no observations");
    const std::size_t offset =
        static_cast<std::size_t>(begin - series.dates.begin());
    const std::size_t count = static_cast<std::size_t>(end - begin);
    const std::vector<int> scales = config.effective_scales(count);
    const std::size_t min_scale = static_cast<std::size_t>(scales.front());
    if (count < 4 * min_scale)
      raise(ErrorCode::PeriodTooShort,
            "period '" + period.name + "' has " + std::to_string(count) +
                " observations; need at least " +
                std::to_string(4 * min_scale));
    const GheCurve curve = mfdfa(
        std::span<const double>(series.values).subspan(offset, count), config);
    PeriodResult r;
    r.name = period.name;
    r.start = period.start;
    r.end = period.end;
    r.observations = count;
    const GhePoint& at2 = curve.at_q(2.0);
    r.h2 = at2.h;
    r.h2_stderr = at2.h_stderr;
    r.r_squared = at2.r_squared;
    r.suspect = curve.suspect;
    results.push_back(std::move(r));
  }
  return results;
}

struct Event {
  std::string name;
  Date date;
};

struct EventSet {
  std::vector<Event> events;

  /// Lehman Brothers bankruptcy, WHO pandemic declaration, WHO end of the
  /// public-health emergency.
  static EventSet defaults() {
    EventSet set;
    set.events = {{"lehman_bankruptcy", Date{2008, 9, 15}},
                  {"who_pandemic_declaration", Date{2020, 3, 11}},
                  {"who_pandemic_end", Date{2023, 5, 5}}};
    return set;
  }

  void validate() const {
    std::set<std::string> names;
    for (const Event& e : events) {
      if (!e.date.valid())
        raise(ErrorCode::ConfigInvalid, "invalid event date for " + e.name);
      if (!names.insert(e.name).second)
        raise(ErrorCode::ConfigInvalid, "duplicate event name " + e.name);
    }
  }

  std::vector<Event> sorted() const {
    std::vector<Event> out = events;
    std::stable_sort(out.begin(), out.end(),
                     [](const Event& a, const Event& b) {
                       return a.date < b.date;
                     });
    return out;
  }
};

/// Events CSV: header `name,date`, ISO dates.
inline EventSet load_events_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty())
    raise(ErrorCode::ParseError, path + ": empty events file");
  const std::vector<std::string> header = split_csv_line(lines.front().second);
  if (header.size() < 2 || trim(header[0]) != "name" ||
      trim(header[1]) != "date")
    raise(ErrorCode::ParseError, path + ": expected header 'name,date'");
  EventSet set;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_csv_line(lines[i].second);
    if (fields.size() < 2)
      raise(ErrorCode::ParseError,
            path + ":" + std::to_string(lines[i].first) + ": too few columns");
    Event event;
    event.name = trim(fields[0]);
    if (!try_parse_date(trim(fields[1]), "%Y-%m-%d", event.date))
      raise(ErrorCode::ParseError, path + ":" + std::to_string(lines[i].first) +
                                       ": unparseable date '" + fields[1] +
                                       "'");
    set.events.push_back(std::move(event));
  }
  set.validate();
  return set;
}

struct SegmentSummary {
  std::string segment;
  std::size_t rows = 0;
  double mean_h2 = 0.0;
  double mean_dh = 0.0;
};

struct AnnotatedRolling {
  RollingResult rolling;
  std::vector<std::string> segment_per_row;  // most recent event, "pre" before any
  std::vector<SegmentSummary> summaries;     // temporal order
};

/// Labels every window row with the most recent event on or before its end
/// date and summarizes mean h(2) and mean strength per inter-event segment.
inline AnnotatedRolling annotate_events(const RollingResult& result,
                                        const EventSet& events) {
  events.validate();
  const std::vector<Event> sorted = events.sorted();
  AnnotatedRolling out;
  out.rolling = result;
  out.segment_per_row.reserve(result.points.size());
  for (const RollingPoint& point : result.points) {
    std::string label = "pre";
    for (const Event& e : sorted) {
      if (e.date < point.end_date || e.date == point.end_date) label = e.name;
      else break;
    }
    out.segment_per_row.push_back(std::move(label));
  }
  std::vector<std::string> order;
  for (const std::string& label : out.segment_per_row)
    if (order.empty() || order.back() != label) order.push_back(label);
  for (const std::string& label : order) {
    SegmentSummary summary;
    summary.segment = label;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      if (out.segment_per_row[i] != label) continue;
      ++summary.rows;
      summary.mean_h2 += result.points[i].h2;
      summary.mean_dh += result.points[i].dh;
    }
    if (summary.rows > 0) {
      summary.mean_h2 /= static_cast<double>(summary.rows);
      summary.mean_dh /= static_cast<double>(summary.rows);
    }
    out.summaries.push_back(std::move(summary));
  }
  return out;
}

/// rolling.csv column contract shared by the CLI and the pipeline.
inline std::string serialize_rolling(const AnnotatedRolling& annotated) {
  std::string out = "end_date,h2,h2_err,dh5,da5,mdm5,quality,segment\n";
  const RollingResult& rolling = annotated.rolling;
  for (std::size_t i = 0; i < rolling.points.size(); ++i) {
    const RollingPoint& p = rolling.points[i];
    out += p.end_date.to_string();
    out += ',';
    out += format_double(p.h2);
    out += ',';
    out += format_double(p.h2_stderr);
    out += ',';
    out += format_double(p.dh);
    out += ',';
    out += format_double(p.da);
    out += ',';
    out += format_double(p.mdm);
    out += ',';
    out += p.suspect ? "suspect" : "ok";
    out += ',';
    out += annotated.segment_per_row[i];
    out += '\n';
  }
  return out;
}

}  // namespace mfhurst
