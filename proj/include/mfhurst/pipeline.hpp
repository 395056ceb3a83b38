#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mfhurst/csv.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/exports.hpp"
#include "mfhurst/ingest.hpp"
#include "mfhurst/rolling.hpp"
#include "mfhurst/series.hpp"
#include "mfhurst/transform.hpp"
#include "mfhurst/version.hpp"

namespace mfhurst {

/// Declarative description of one full run: ingest, derive the three series,
/// descriptive stats, rolling estimation per requested kind, exports.
struct PipelineConfig {
  std::string input_path;
  ColumnSpec columns;
  std::string out_dir;
  std::vector<SeriesKind> roll_kinds = {SeriesKind::Returns};
  RollingConfig rolling;
  EventSet events = EventSet::defaults();
  int stats_blocks = 20;
  unsigned threads = 1;
  std::uint64_t seed = 0;  // recorded for synthetic-input provenance

  void validate() const {
    if (input_path.empty())
      raise(ErrorCode::ConfigInvalid, "pipeline needs an input path");
    if (out_dir.empty())
      raise(ErrorCode::ConfigInvalid, "pipeline needs an output directory");
    if (roll_kinds.empty())
      raise(ErrorCode::ConfigInvalid, "pipeline needs at least one roll kind");
    for (std::size_t i = 0; i < roll_kinds.size(); ++i)
      for (std::size_t j = i + 1; j < roll_kinds.size(); ++j)
        if (roll_kinds[i] == roll_kinds[j])
          raise(ErrorCode::ConfigInvalid, "duplicate roll kind");
    if (rolling.step < 1)
      raise(ErrorCode::ConfigInvalid, "rolling step must be at least 1");
    if (stats_blocks < 2)
      raise(ErrorCode::ConfigInvalid, "stats blocks must be at least 2");
    if (!(rolling.strength_q > 0.0))
      raise(ErrorCode::ConfigInvalid, "strength q must be positive");
    events.validate();
  }

  /// Canonical JSON form; its digest identifies the run configuration.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["input"] = input_path;
    j["instrument"] = columns.instrument;
    j["date_column"] = columns.date_column;
    j["price_column"] = columns.price_column;
    j["date_format"] = columns.date_format;
    j["skip_bad_rows"] = columns.skip_bad_rows;
    j["out_dir"] = out_dir;
    nlohmann::json kinds = nlohmann::json::array();
    for (SeriesKind kind : roll_kinds) kinds.push_back(kind_name(kind));
    j["roll_kinds"] = kinds;
    j["rolling"] = {{"window", rolling.window},
                    {"step", rolling.step},
                    {"strength_q", rolling.strength_q}};
    const MfdfaConfig& m = rolling.mfdfa;
    nlohmann::json mfdfa_json;
    mfdfa_json["scales"] = m.scales;
    mfdfa_json["q_grid"] = m.q_grid;
    mfdfa_json["detrend_order"] = m.detrend_order;
    if (m.fit_range) {
      mfdfa_json["fit_min"] = m.fit_range->first;
      mfdfa_json["fit_max"] = m.fit_range->second;
    }
    j["mfdfa"] = mfdfa_json;
    nlohmann::json event_json = nlohmann::json::array();
    for (const Event& e : events.sorted())
      event_json.push_back({{"name", e.name}, {"date", e.date.to_string()}});
    j["events"] = event_json;
    j["stats_blocks"] = stats_blocks;
    j["seed"] = seed;
    return j;
  }

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig config;
    if (j.contains("input")) config.input_path = j.at("input").get<std::string>();
    if (j.contains("instrument"))
      config.columns.instrument = j.at("instrument").get<std::string>();
    if (j.contains("date_column"))
      config.columns.date_column = j.at("date_column").get<std::string>();
    if (j.contains("price_column"))
      config.columns.price_column = j.at("price_column").get<std::string>();
    if (j.contains("date_format"))
      config.columns.date_format = j.at("date_format").get<std::string>();
    if (j.contains("skip_bad_rows"))
      config.columns.skip_bad_rows = j.at("skip_bad_rows").get<bool>();
    if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("roll_kinds")) {
      config.roll_kinds.clear();
      for (const auto& k : j.at("roll_kinds"))
        config.roll_kinds.push_back(parse_kind(k.get<std::string>()));
    }
    if (j.contains("rolling")) {
      const auto& r = j.at("rolling");
      if (r.contains("window"))
        config.rolling.window = r.at("window").get<std::size_t>();
      if (r.contains("step")) config.rolling.step = r.at("step").get<std::size_t>();
      if (r.contains("strength_q"))
        config.rolling.strength_q = r.at("strength_q").get<double>();
    }
    if (j.contains("mfdfa")) {
      const auto& m = j.at("mfdfa");
      if (m.contains("scales"))
        config.rolling.mfdfa.scales = m.at("scales").get<std::vector<int>>();
      if (m.contains("q_grid"))
        config.rolling.mfdfa.q_grid =
            m.at("q_grid").get<std::vector<double>>();
      else if (m.contains("q_min") && m.contains("q_max") &&
               m.contains("q_step"))
        config.rolling.mfdfa.q_grid = MfdfaConfig::q_grid_from_range(
            m.at("q_min").get<double>(), m.at("q_max").get<double>(),
            m.at("q_step").get<double>());
      if (m.contains("detrend_order"))
        config.rolling.mfdfa.detrend_order = m.at("detrend_order").get<int>();
      if (m.contains("fit_min") && m.contains("fit_max"))
        config.rolling.mfdfa.fit_range = {m.at("fit_min").get<int>(),
                                          m.at("fit_max").get<int>()};
    }
    if (j.contains("events")) {
      config.events.events.clear();
      for (const auto& e : j.at("events")) {
        Event event;
        event.name = e.at("name").get<std::string>();
        event.date = parse_date(e.at("date").get<std::string>(), "%Y-%m-%d");
        config.events.events.push_back(std::move(event));
      }
    }
    if (j.contains("stats_blocks"))
      config.stats_blocks = j.at("stats_blocks").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    return config;
  }
};

struct ManifestEntry {
  std::string name;
  std::string checksum;
  std::size_t bytes = 0;
};

struct PipelineRun {
  std::string out_dir;
  std::string config_hash;
  std::vector<ManifestEntry> outputs;  // CSVs, excluding the manifest itself
  nlohmann::json manifest;
};

inline std::string rolling_file_name(SeriesKind kind) {
  return std::string("rolling_") + kind_name(kind) + ".csv";
}

/// Runs ingest -> transforms -> stats -> rolling -> exports. Every output is
/// assembled in memory first and written only after the whole run succeeds,
/// so a failed run leaves no partial files; a write failure rolls back the
/// files already flushed. Outputs are byte-deterministic for fixed config,
/// inputs, and seeds at any thread count.
inline PipelineRun run_pipeline(const PipelineConfig& config) {
  config.validate();

  const std::string input_text = read_text_file(config.input_path);
  const LoadedPrices loaded = load_price_csv(config.input_path, config.columns);

  const DerivedSeries returns = log_returns(loaded.series);
  const DerivedSeries abs_ret = absolute_returns(returns);
  const DerivedSeries vol_inc = volatility_increments(abs_ret);
  const DerivedSeries* by_kind[3] = {&returns, &abs_ret, &vol_inc};
  const auto series_of = [&](SeriesKind kind) -> const DerivedSeries& {
    switch (kind) {
      case SeriesKind::Returns: return *by_kind[0];
      case SeriesKind::AbsoluteReturns: return *by_kind[1];
      case SeriesKind::VolatilityIncrements: return *by_kind[2];
    }
    raise(ErrorCode::ConfigInvalid, "unknown series kind");
  };

  // validate every nested config against real lengths before computing
  for (SeriesKind kind : config.roll_kinds) {
    const DerivedSeries& series = series_of(kind);
    const std::size_t window = config.rolling.effective_window(series.dates);
    if (window > series.size())
      raise(ErrorCode::WindowTooLarge,
            std::string("window ") + std::to_string(window) + " exceeds " +
                kind_name(kind) + " length " + std::to_string(series.size()));
    config.rolling.mfdfa.validate(window);
  }
  for (const DerivedSeries* series : by_kind)
    if (series->size() < 2 * static_cast<std::size_t>(config.stats_blocks))
      raise(ErrorCode::SeriesTooShort,
            std::string(kind_name(series->kind)) +
                " series too short for jackknife stats");

  std::vector<StatsReport> stats;
  stats.reserve(3);
  for (const DerivedSeries* series : by_kind)
    stats.push_back(descriptive_stats(*series, config.stats_blocks));

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("returns.csv", serialize_series(returns));
  files.emplace_back("abs_returns.csv", serialize_series(abs_ret));
  files.emplace_back(
      "vol_increments.csv",
      serialize_series(vol_inc, {{"dropped_zeros",
                                  std::to_string(vol_inc.dropped_zeros)}}));
  files.emplace_back("stats.csv", serialize_stats(stats));

  for (SeriesKind kind : config.roll_kinds) {
    const RollingResult rolled =
        rolling_ghe(series_of(kind), config.rolling, config.threads);
    const AnnotatedRolling annotated = annotate_events(rolled, config.events);
    files.emplace_back(rolling_file_name(kind), serialize_rolling(annotated));
  }

  PipelineRun run;
  run.out_dir = config.out_dir;
  const nlohmann::json config_json = config.to_json();
  run.config_hash = fnv1a64_hex(config_json.dump());

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["rng"] = kRngId;
  manifest["config"] = config_json;
  manifest["config_hash"] = run.config_hash;
  manifest["input"] = {{"path", config.input_path},
                       {"checksum", fnv1a64_hex(input_text)},
                       {"bytes", input_text.size()}};
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& [name, content] : files) {
    ManifestEntry entry{name, fnv1a64_hex(content), content.size()};
    outputs.push_back({{"name", entry.name},
                       {"checksum", entry.checksum},
                       {"bytes", entry.bytes}});
    run.outputs.push_back(std::move(entry));
  }
  manifest["outputs"] = outputs;
  run.manifest = manifest;

  std::filesystem::create_directories(config.out_dir);
  std::vector<std::string> written;
  try {
    for (const auto& [name, content] : files) {
      const std::string path = config.out_dir + "/" + name;
      write_text_file(path, content);
      written.push_back(path);
    }
    const std::string manifest_path = config.out_dir + "/manifest.json";
    write_text_file(manifest_path, manifest.dump(2) + "\n");
    written.push_back(manifest_path);
  } catch (...) {
    std::error_code ignore;
    for (const std::string& path : written)
      std::filesystem::remove(path, ignore);
    throw;
  }
  return run;
}

}  // namespace mfhurst
