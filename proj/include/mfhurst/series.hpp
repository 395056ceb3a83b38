#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mfhurst/dates.hpp"
#include "mfhurst/errors.hpp"

namespace mfhurst {

// Date-indexed positive daily closing prices for one instrument.
// Invariants: dates strictly increasing, every close > 0, length >= 2.
struct PriceObservation {
  Date date;
  double close = 0.0;
};

struct PriceSeries {
  std::string instrument;
  std::vector<PriceObservation> observations;

  std::size_t size() const { return observations.size(); }

  void validate() const {
    if (observations.size() < 2)
      raise(ErrorCode::EmptySeries,
            "price series '" + instrument + "' has fewer than 2 observations");
    for (std::size_t i = 0; i < observations.size(); ++i) {
      if (!(observations[i].close > 0.0))
        raise(ErrorCode::NonPositivePrice,
              "non-positive close at " + observations[i].date.to_string());
      if (i > 0 && !(observations[i - 1].date < observations[i].date))
        raise(ErrorCode::DuplicateDate,
              "dates not strictly increasing at " +
                  observations[i].date.to_string());
    }
  }
};

enum class SeriesKind { Returns, AbsoluteReturns, VolatilityIncrements };

inline const char* kind_name(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Returns:
      return "returns";
    case SeriesKind::AbsoluteReturns:
      return "abs_returns";
    case SeriesKind::VolatilityIncrements:
      return "vol_increments";
  }
  return "unknown";
}

inline SeriesKind parse_kind(const std::string& name) {
  if (name == "returns") return SeriesKind::Returns;
  if (name == "abs_returns") return SeriesKind::AbsoluteReturns;
  if (name == "vol_increments") return SeriesKind::VolatilityIncrements;
  raise(ErrorCode::ConfigInvalid, "unknown series kind '" + name + "'");
}

// A real-valued analysis series tagged with its transform kind, with one
// date per value. dropped_zeros is only populated by the volatility
// increment transform (count of zero absolute returns compacted away).
struct DerivedSeries {
  SeriesKind kind = SeriesKind::Returns;
  std::string source;
  std::vector<Date> dates;
  std::vector<double> values;
  std::size_t dropped_zeros = 0;

  std::size_t size() const { return values.size(); }

  void validate() const {
    if (dates.size() != values.size())
      raise(ErrorCode::ConfigInvalid, "dates/values length mismatch");
    for (double v : values) {
      if (!std::isfinite(v))
        raise(ErrorCode::ConfigInvalid,
              "non-finite value in derived series '" + source + "'");
      if (kind == SeriesKind::AbsoluteReturns && v < 0.0)
        raise(ErrorCode::ConfigInvalid, "negative absolute return");
    }
  }
};

}  // namespace mfhurst
