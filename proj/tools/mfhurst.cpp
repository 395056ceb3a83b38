#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mfhurst/mfhurst.hpp"

namespace {

using namespace mfhurst;

struct GlobalOptions {
  std::string out_dir = ".";
  unsigned threads = 1;
  std::uint64_t seed = 42;
  std::string config_path;
};

Date parse_flag_date(const std::string& text, const std::string& flag) {
  Date date;
  if (!try_parse_date(text, "%Y-%m-%d", date))
    raise(ErrorCode::ConfigInvalid,
          flag + " expects an ISO date, got '" + text + "'");
  return date;
}

void emit(const std::string& out_dir, const std::string& name,
          const std::string& content) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + name;
  write_text_file(path, content);
  std::cerr << "wrote " << path << "\n";
}

/// "-" sends content to stdout, anything else is a file path.
void emit_to(const std::string& target, const std::string& content) {
  if (target == "-") {
    std::cout << content;
    return;
  }
  const auto parent = std::filesystem::path(target).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_text_file(target, content);
  std::cerr << "wrote " << target << "\n";
}

struct IngestFlags {
  ColumnSpec columns;
  std::string expect_start;
  std::string expect_end;

  void attach(CLI::App* cmd, bool with_span = true) {
    cmd->add_option("--date-col", columns.date_column,
                    "CSV column holding the date");
    cmd->add_option("--price-col", columns.price_column,
                    "CSV column holding the close");
    cmd->add_option("--date-format", columns.date_format,
                    "date format, e.g. %Y-%m-%d or %d-%b-%y");
    cmd->add_option("--instrument", columns.instrument,
                    "instrument label (default: file name)");
    cmd->add_flag("--skip-bad-rows", columns.skip_bad_rows,
                  "skip unparseable/non-positive rows instead of failing");
    if (with_span) {
      cmd->add_option("--expect-start", expect_start,
                      "report coverage against this span start (ISO date)");
      cmd->add_option("--expect-end", expect_end,
                      "report coverage against this span end (ISO date)");
    }
  }
};

struct MfdfaFlags {
  double q_min = -5.0;
  double q_max = 5.0;
  double q_step = 0.25;
  int s_min = 16;
  int s_max = 0;  // 0: length/4
  int n_scales = 20;
  int detrend_order = 3;
  int fit_min = 0;
  int fit_max = 0;
  CLI::Option* s_min_opt = nullptr;
  CLI::Option* s_max_opt = nullptr;
  CLI::Option* n_scales_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--q-min", q_min, "lowest moment order");
    cmd->add_option("--q-max", q_max, "highest moment order");
    cmd->add_option("--q-step", q_step, "moment order step");
    s_min_opt = cmd->add_option("--s-min", s_min, "smallest scale");
    s_max_opt = cmd->add_option("--s-max", s_max,
                                "largest scale (default: length/4)");
    n_scales_opt =
        cmd->add_option("--n-scales", n_scales, "number of log-spaced scales");
    cmd->add_option("--detrend-order", detrend_order,
                    "polynomial detrending order");
    cmd->add_option("--fit-min", fit_min,
                    "lower scale bound of the regression");
    cmd->add_option("--fit-max", fit_max,
                    "upper scale bound of the regression");
  }

  MfdfaConfig build(std::size_t series_length) const {
    MfdfaConfig config;
    config.q_grid = MfdfaConfig::q_grid_from_range(q_min, q_max, q_step);
    config.detrend_order = detrend_order;
    const bool explicit_scales = (s_min_opt && s_min_opt->count() > 0) ||
                                 (s_max_opt && s_max_opt->count() > 0) ||
                                 (n_scales_opt && n_scales_opt->count() > 0);
    if (explicit_scales) {
      const int hi =
          s_max > 0 ? s_max : static_cast<int>(series_length / 4);
      config.scales = MfdfaConfig::log_spaced_scales(s_min, hi, n_scales);
    }
    if (fit_min > 0 || fit_max > 0) {
      if (!(fit_min > 0 && fit_max > 0))
        raise(ErrorCode::ConfigInvalid,
              "--fit-min and --fit-max must be given together");
      config.fit_range = {fit_min, fit_max};
    }
    return config;
  }
};

void print_load_report(const std::string& path, const LoadedPrices& loaded) {
  std::cerr << path << ": " << loaded.report.rows_read << " rows read, "
            << loaded.series.size() << " kept";
  if (!loaded.report.skipped.empty())
    std::cerr << ", " << loaded.report.skipped.size() << " skipped";
  if (loaded.report.reordered) std::cerr << " (input was not date-sorted)";
  std::cerr << "\n";
  std::size_t shown = 0;
  for (const SkippedRow& row : loaded.report.skipped) {
    if (++shown > 20) {
      std::cerr << "  ... " << (loaded.report.skipped.size() - 20)
                << " more\n";
      break;
    }
    std::cerr << "  line " << row.line << ": " << row.reason << "\n";
  }
}

void cmd_ingest(const std::string& input, const IngestFlags& flags,
                const std::string& output) {
  const LoadedPrices loaded = load_price_csv(input, flags.columns);
  print_load_report(input, loaded);
  if (!flags.expect_start.empty() || !flags.expect_end.empty()) {
    if (flags.expect_start.empty() || flags.expect_end.empty())
      raise(ErrorCode::ConfigInvalid,
            "--expect-start and --expect-end must be given together");
    const CoverageReport coverage = validate_span(
        loaded.series, parse_flag_date(flags.expect_start, "--expect-start"),
        parse_flag_date(flags.expect_end, "--expect-end"));
    std::cerr << "coverage: " << coverage_status_name(coverage.status)
              << ", first " << coverage.first.to_string() << ", last "
              << coverage.last.to_string() << ", " << coverage.observations
              << " observations, largest gap " << coverage.largest_gap_days
              << " days";
    if (coverage.largest_gap_days > 0)
      std::cerr << " (" << coverage.gap_start.to_string() << " to "
                << coverage.gap_end.to_string() << ")";
    std::cerr << "\n";
  }
  emit_to(output, serialize_prices(loaded.series));
}

void cmd_stats(const std::string& input, const IngestFlags& flags, int blocks,
               const std::string& output) {
  const LoadedPrices loaded = load_price_csv(input, flags.columns);
  const DerivedSeries returns = log_returns(loaded.series);
  const DerivedSeries abs_ret = absolute_returns(returns);
  const DerivedSeries vol_inc = volatility_increments(abs_ret);
  if (vol_inc.dropped_zeros > 0)
    std::cerr << "note: dropped " << vol_inc.dropped_zeros
              << " zero absolute returns before differencing\n";
  std::vector<StatsReport> reports;
  reports.push_back(descriptive_stats(returns, blocks));
  reports.push_back(descriptive_stats(abs_ret, blocks));
  reports.push_back(descriptive_stats(vol_inc, blocks));
  emit_to(output, serialize_stats(reports));
}

void cmd_mfdfa(const std::string& input, const MfdfaFlags& flags,
               bool with_fluctuation, const GlobalOptions& global) {
  const DerivedSeries series = load_series_csv(input);
  const MfdfaConfig config = flags.build(series.size());
  const FluctuationSurface surface =
      compute_fluctuation_surface(series.values, config);
  GheCurve curve = mfdfa(series.values, config);
  if (curve.suspect)
    std::cerr << "warning: h(q) not monotone (max rise "
              << format_double(curve.max_monotonicity_violation)
              << "); estimate flagged suspect\n";
  emit(global.out_dir, "ghe.csv", serialize_ghe(curve));
  if (with_fluctuation)
    emit(global.out_dir, "fluctuation.csv", serialize_fluctuation(surface));
}

void cmd_spectrum(const std::string& input, const GlobalOptions& global) {
  const GheCurve curve = load_ghe_csv(input);
  const AlphaCurve alpha = singularity_spectrum(curve);
  emit(global.out_dir, "alpha.csv", serialize_alpha(alpha));
  const std::vector<StrengthRow> rows = strength_table(curve, alpha);
  emit(global.out_dir, "strength.csv", serialize_strength(rows));
}

void cmd_roll(const std::string& input, const MfdfaFlags& mfdfa_flags,
              std::size_t window, std::size_t step, double strength_q,
              const std::string& events_path, bool no_events,
              const GlobalOptions& global) {
  const DerivedSeries series = load_series_csv(input);
  RollingConfig config;
  config.window = window;
  config.step = step;
  config.strength_q = strength_q;
  const std::size_t effective = config.effective_window(series.dates);
  config.mfdfa = mfdfa_flags.build(effective);
  EventSet events = EventSet::defaults();
  if (no_events) events.events.clear();
  if (!events_path.empty()) events = load_events_csv(events_path);
  const RollingResult result = rolling_ghe(series, config, global.threads);
  const AnnotatedRolling annotated = annotate_events(result, events);
  emit(global.out_dir, "rolling.csv", serialize_rolling(annotated));
  for (const SegmentSummary& segment : annotated.summaries)
    std::cerr << "segment " << segment.segment << ": " << segment.rows
              << " windows, mean h2 " << format_double(segment.mean_h2)
              << ", mean dh " << format_double(segment.mean_dh) << "\n";
}

struct SynthFlags {
  std::string kind;
  std::size_t n = 10000;
  double h = 0.5;
  double p = 0.75;
  int levels = 16;
  bool shuffle_series_flag = false;
  bool shuffle_weights = false;
  bool as_prices = false;
  double price_scale = 0.01;
  double start_price = 100.0;
  std::string output = "-";
};

void cmd_synth(const SynthFlags& flags, const GlobalOptions& global) {
  std::vector<double> values;
  std::string generator;
  if (flags.kind == "noise") {
    values = gaussian_noise(flags.n, global.seed);
    generator = "noise n=" + std::to_string(flags.n) +
                " seed=" + std::to_string(global.seed);
  } else if (flags.kind == "fgn") {
    FgnResult result = fgn(flags.n, flags.h, global.seed);
    if (result.diagnostics.clipped)
      std::cerr << "warning: covariance embedding not nonnegative definite; "
                   "negative eigenvalues clipped (min "
                << format_double(result.diagnostics.min_eigenvalue)
                << "), output covariance is approximate\n";
    values = std::move(result.values);
    generator = "fgn n=" + std::to_string(flags.n) + " h=" +
                format_double(flags.h) + " seed=" + std::to_string(global.seed);
  } else if (flags.kind == "cascade") {
    CascadeSpec spec;
    spec.levels = flags.levels;
    spec.p = flags.p;
    spec.shuffle = flags.shuffle_weights;
    spec.seed = global.seed;
    values = binomial_cascade(spec);
    generator = "cascade levels=" + std::to_string(flags.levels) + " p=" +
                format_double(flags.p) + " seed=" + std::to_string(global.seed);
    if (flags.shuffle_weights) generator += " shuffled-weights";
  } else {
    raise(ErrorCode::ConfigInvalid,
          "--kind must be one of noise, fgn, cascade");
  }
  if (flags.shuffle_series_flag) {
    shuffle_values(values, global.seed + 1);
    generator += " shuffled-series";
  }

  if (flags.as_prices) {
    PriceSeries prices;
    prices.instrument = "synthetic";
    double log_price = std::log(flags.start_price);
    Date date{2000, 1, 1};
    prices.observations.reserve(values.size() + 1);
    prices.observations.push_back({date, std::exp(log_price)});
    for (double v : values) {
      log_price += flags.price_scale * v;
      date = date.plus_days(1);
      prices.observations.push_back({date, std::exp(log_price)});
    }
    std::string out = "# generator: " + generator + "\n";
    out += "# rng: " + std::string(kRngId) + "\n";
    out += serialize_prices(prices);
    emit_to(flags.output, out);
    return;
  }
  const DerivedSeries series = synthetic_series(std::move(values), "synthetic");
  emit_to(flags.output,
          serialize_series(series, {{"generator", generator},
                                    {"rng", std::string(kRngId)}}));
}

void cmd_hurst_correct(double h2, long n, double a1, const std::string& fit_path,
                       bool apply_mode) {
  if (!fit_path.empty()) {
    const std::vector<ScalingPoint> points = load_scaling_csv(fit_path);
    const ScalingFit fit = fit_scaling(points);
    std::string out = "h2_inf,a1,residual_norm,iterations\n";
    out += format_double(fit.h2_inf);
    out += ',';
    out += format_double(fit.a1);
    out += ',';
    out += format_double(fit.residual_norm);
    out += ',';
    out += std::to_string(fit.iterations);
    out += '\n';
    std::cout << out;
    return;
  }
  if (!apply_mode)
    raise(ErrorCode::ConfigInvalid, "need either --h2 with --n, or --fit");
  std::cout << format_double(apply_correction(h2, n, a1)) << "\n";
}

void cmd_run(const GlobalOptions& global, CLI::Option* out_dir_opt,
             CLI::Option* threads_opt, CLI::Option* seed_opt,
             const std::string& input_override, const IngestFlags& ingest_flags,
             CLI::App* run_cmd, std::size_t window, std::size_t step,
             const std::vector<std::string>& roll_kinds) {
  PipelineConfig config;
  if (!global.config_path.empty()) {
    std::ifstream in(global.config_path);
    if (!in)
      raise(ErrorCode::FileNotFound,
            "cannot open config: " + global.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::ConfigInvalid,
            global.config_path + ": " + std::string(e.what()));
    }
    config = PipelineConfig::from_json(j);
  }
  if (!input_override.empty()) config.input_path = input_override;
  if (out_dir_opt->count() > 0 || config.out_dir.empty())
    config.out_dir = global.out_dir;
  if (threads_opt->count() > 0) config.threads = global.threads;
  if (seed_opt->count() > 0) config.seed = global.seed;
  if (run_cmd->count("--window") > 0) config.rolling.window = window;
  if (run_cmd->count("--step") > 0) config.rolling.step = step;
  if (run_cmd->count("--date-col") > 0)
    config.columns.date_column = ingest_flags.columns.date_column;
  if (run_cmd->count("--price-col") > 0)
    config.columns.price_column = ingest_flags.columns.price_column;
  if (run_cmd->count("--date-format") > 0)
    config.columns.date_format = ingest_flags.columns.date_format;
  if (run_cmd->count("--instrument") > 0)
    config.columns.instrument = ingest_flags.columns.instrument;
  if (run_cmd->count("--skip-bad-rows") > 0)
    config.columns.skip_bad_rows = ingest_flags.columns.skip_bad_rows;
  if (!roll_kinds.empty()) {
    config.roll_kinds.clear();
    for (const std::string& kind : roll_kinds)
      config.roll_kinds.push_back(parse_kind(kind));
  }

  const PipelineRun run = run_pipeline(config);
  std::cerr << "config hash " << run.config_hash << "\n";
  for (const ManifestEntry& entry : run.outputs)
    std::cerr << "wrote " << run.out_dir << "/" << entry.name << " ("
              << entry.bytes << " bytes, " << entry.checksum << ")\n";
  std::cerr << "wrote " << run.out_dir << "/manifest.json\n";
}

int run_cli(int argc, char** argv) {
  CLI::App app{"multifractal Hurst analysis of daily price series"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  GlobalOptions global;
  CLI::Option* out_dir_opt =
      app.add_option("--out-dir", global.out_dir, "directory for outputs");
  CLI::Option* threads_opt = app.add_option(
      "--threads", global.threads, "worker threads (0: hardware count)");
  CLI::Option* seed_opt =
      app.add_option("--seed", global.seed, "seed for synthetic generators");
  app.add_option("--config", global.config_path,
                 "pipeline config JSON (run subcommand)");

  // ingest
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "load a price CSV, report problems, write the canonical form");
  std::string ingest_input;
  IngestFlags ingest_flags;
  std::string ingest_output = "-";
  ingest_cmd->add_option("input", ingest_input, "price CSV")->required();
  ingest_flags.attach(ingest_cmd);
  ingest_cmd->add_option("-o,--output", ingest_output,
                         "canonical CSV destination ('-' = stdout)");
  ingest_cmd->callback(
      [&] { cmd_ingest(ingest_input, ingest_flags, ingest_output); });

  // stats
  auto* stats_cmd = app.add_subcommand(
      "stats", "descriptive statistics of returns, absolute returns and "
               "volatility increments");
  std::string stats_input;
  IngestFlags stats_flags;
  int stats_blocks = 20;
  std::string stats_output = "-";
  stats_cmd->add_option("input", stats_input, "price CSV")->required();
  stats_flags.attach(stats_cmd, false);
  stats_cmd->add_option("--blocks", stats_blocks, "jackknife blocks");
  stats_cmd->add_option("-o,--output", stats_output,
                        "stats CSV destination ('-' = stdout)");
  stats_cmd->callback(
      [&] { cmd_stats(stats_input, stats_flags, stats_blocks, stats_output); });

  // mfdfa
  auto* mfdfa_cmd =
      app.add_subcommand("mfdfa", "estimate h(q) from a series CSV");
  std::string mfdfa_input;
  MfdfaFlags mfdfa_flags;
  bool mfdfa_fluct = false;
  mfdfa_cmd->add_option("input", mfdfa_input, "series CSV (date,value)")
      ->required();
  mfdfa_flags.attach(mfdfa_cmd);
  mfdfa_cmd->add_flag("--fluctuation", mfdfa_fluct,
                      "also write fluctuation.csv (q,s,F)");
  mfdfa_cmd->callback(
      [&] { cmd_mfdfa(mfdfa_input, mfdfa_flags, mfdfa_fluct, global); });

  // spectrum
  auto* spectrum_cmd = app.add_subcommand(
      "spectrum", "singularity spectrum and strength measures from ghe.csv");
  std::string spectrum_input;
  spectrum_cmd->add_option("input", spectrum_input, "ghe.csv from mfdfa")
      ->required();
  spectrum_cmd->callback([&] { cmd_spectrum(spectrum_input, global); });

  // roll
  auto* roll_cmd = app.add_subcommand(
      "roll", "rolling-window h(2) and strength measures over a series CSV");
  std::string roll_input;
  MfdfaFlags roll_mfdfa_flags;
  std::size_t roll_window = 0;
  std::size_t roll_step = 1;
  double roll_strength_q = 5.0;
  std::string roll_events;
  bool roll_no_events = false;
  roll_cmd->add_option("input", roll_input, "series CSV (date,value)")
      ->required();
  roll_cmd->add_option("--window", roll_window,
                       "window length in observations (default: 1095 for "
                       "7-day calendars, 750 for trading-day)");
  roll_cmd->add_option("--step", roll_step, "window step");
  roll_cmd->add_option("--strength-q", roll_strength_q,
                       "order for the strength columns");
  roll_cmd->add_option("--events", roll_events, "events CSV (name,date)");
  roll_cmd->add_flag("--no-events", roll_no_events,
                     "drop the default event annotations");
  roll_mfdfa_flags.attach(roll_cmd);
  roll_cmd->callback([&] {
    cmd_roll(roll_input, roll_mfdfa_flags, roll_window, roll_step,
             roll_strength_q, roll_events, roll_no_events, global);
  });

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "generate validation series with known "
                                  "scaling (noise, fgn, cascade)");
  // long-only help here so --h can mean the target exponent
  synth_cmd->set_help_flag("--help", "print help and exit");
  SynthFlags synth_flags;
  synth_cmd
      ->add_option("--kind", synth_flags.kind, "noise, fgn, or cascade")
      ->required();
  synth_cmd->add_option("--n", synth_flags.n, "series length (noise, fgn)");
  synth_cmd->add_option("--h", synth_flags.h, "target exponent (fgn)");
  synth_cmd->add_option("--p", synth_flags.p, "cascade weight in (0.5, 1)");
  synth_cmd->add_option("--levels", synth_flags.levels,
                        "cascade levels (length 2^levels)");
  synth_cmd->add_flag("--shuffle", synth_flags.shuffle_series_flag,
                      "shuffle the final series (destroys correlations)");
  synth_cmd->add_flag("--shuffle-weights", synth_flags.shuffle_weights,
                      "randomize cascade weight order per node");
  synth_cmd->add_flag("--as-prices", synth_flags.as_prices,
                      "integrate into a positive price CSV (date,close)");
  synth_cmd->add_option("--price-scale", synth_flags.price_scale,
                        "per-step log-price increment scale with --as-prices");
  synth_cmd->add_option("--start-price", synth_flags.start_price,
                        "initial price with --as-prices");
  synth_cmd->add_option("-o,--output", synth_flags.output,
                        "destination ('-' = stdout)");
  synth_cmd->callback([&] { cmd_synth(synth_flags, global); });

  // hurst-correct
  auto* correct_cmd = app.add_subcommand(
      "hurst-correct", "finite-sample correction: apply or fit "
                       "H2(n) = H2 n / (n + a1)");
  double correct_h2 = 0.0;
  long correct_n = 1;
  double correct_a1 = 3.0;
  std::string correct_fit;
  CLI::Option* h2_opt = correct_cmd->add_option(
      "--h2", correct_h2, "measured exponent to correct");
  correct_cmd->add_option("--n", correct_n, "sample size of the measurement");
  correct_cmd->add_option("--a1", correct_a1, "correction parameter");
  correct_cmd->add_option("--fit", correct_fit,
                          "fit (h2_inf, a1) to a points CSV (n,h2)");
  correct_cmd->callback([&] {
    cmd_hurst_correct(correct_h2, correct_n, correct_a1, correct_fit,
                      h2_opt->count() > 0);
  });

  // run
  auto* run_cmd = app.add_subcommand(
      "run", "full pipeline: ingest, transforms, stats, rolling, manifest");
  std::string run_input;
  IngestFlags run_ingest_flags;
  std::size_t run_window = 0;
  std::size_t run_step = 1;
  std::vector<std::string> run_roll_kinds;
  run_cmd->add_option("input", run_input, "price CSV (overrides config)");
  run_ingest_flags.attach(run_cmd, false);
  run_cmd->add_option("--window", run_window, "rolling window override");
  run_cmd->add_option("--step", run_step, "rolling step override");
  run_cmd->add_option("--roll-kind", run_roll_kinds,
                      "series kinds to roll (returns, abs_returns, "
                      "vol_increments)");
  run_cmd->callback([&] {
    cmd_run(global, out_dir_opt, threads_opt, seed_opt, run_input,
            run_ingest_flags, run_cmd, run_window, run_step, run_roll_kinds);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const mfhurst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.category()) {
      case mfhurst::ErrorCategory::Usage: return 1;
      case mfhurst::ErrorCategory::Data: return 2;
      case mfhurst::ErrorCategory::Numerical: return 3;
    }
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
