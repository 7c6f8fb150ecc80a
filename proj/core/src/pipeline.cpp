#include "bandsleep/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <utility>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"
#include "bandsleep/metrics.hpp"
#include "bandsleep/planner.hpp"
#include "bandsleep/sim.hpp"
#include "sha256.hpp"
#include "text_io.hpp"

namespace bandsleep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr std::uint64_t kMsPerDay = 86'400'000;

struct GranularityRow {
  Granularity g;
  const char* label;
  std::uint64_t ms;
};

constexpr GranularityRow kGranularities[] = {
    {Granularity::ms20, "20ms", 20},      {Granularity::s1, "1s", 1'000},
    {Granularity::m1, "1m", 60'000},      {Granularity::m3, "3m", 180'000},
    {Granularity::m10, "10m", 600'000},   {Granularity::m30, "30m", 1'800'000},
    {Granularity::h1, "1h", 3'600'000}};

const GranularityRow& row_of(Granularity g) {
  for (const GranularityRow& row : kGranularities) {
    if (row.g == g) return row;
  }
  throw ConfigError("unknown granularity value");
}

}  // namespace

std::uint64_t granularity_ms(Granularity g) { return row_of(g).ms; }

std::string granularity_label(Granularity g) { return row_of(g).label; }

Granularity parse_granularity(const std::string& label) {
  for (const GranularityRow& row : kGranularities) {
    if (label == row.label) return row.g;
  }
  throw ConfigError("unknown granularity '" + label +
                    "' (expected one of 20ms, 1s, 1m, 3m, 10m, 30m, 1h)");
}

bool granularity_is_indicative(Granularity g) {
  return g == Granularity::ms20 || g == Granularity::s1;
}

std::vector<Granularity> trainable_granularities() {
  return {Granularity::m1, Granularity::m3, Granularity::m10, Granularity::m30,
          Granularity::h1};
}

Hyperparams preset_hyperparams(Granularity g) {
  Hyperparams hp;  // learning rate 1e-4, 6 layers x 256, epochs 100
  switch (g) {
    case Granularity::m1:
      hp.batch_size = 72;
      break;
    case Granularity::m3:
      hp.batch_size = 16;
      break;
    case Granularity::m10:
      hp.batch_size = 16;
      break;
    case Granularity::m30:
      hp.batch_size = 2;
      break;
    case Granularity::h1:
      hp.batch_size = 2;
      hp.epochs = 150;
      break;
    default:
      throw ConfigError("no training preset for granularity '" + granularity_label(g) +
                        "' (training supports 1m, 3m, 10m, 30m, 1h)");
  }
  return hp;
}

DayRange parse_day_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.find(':', colon + 1) != std::string::npos) {
    throw ParseError("day range '" + text + "' must be first:last (last exclusive)");
  }
  DayRange range;
  if (!detail::parse_u32(text.substr(0, colon), range.first) ||
      !detail::parse_u32(std::string_view(text).substr(colon + 1), range.last)) {
    throw ParseError("day range '" + text + "' must be two whole numbers first:last");
  }
  if (range.first >= range.last) {
    throw ValidationError("day range '" + text + "' is empty (first must be < last)");
  }
  return range;
}

bool is_weekend_day(std::uint32_t day) {
  const std::uint32_t dow = day % 7;  // day 0 is a Monday
  return dow == 5 || dow == 6;
}

std::uint64_t periods_per_day(std::uint64_t activation_ms) {
  if (activation_ms == 0 || kMsPerDay % activation_ms != 0) {
    throw ConfigError("activation period " + std::to_string(activation_ms) +
                      " ms does not divide a day");
  }
  return kMsPerDay / activation_ms;
}

std::vector<SweepRow> granularity_sweep(const SynthParams& params,
                                        const CellConfig& cell) {
  const SynthProfile base = synth_profile(params, cell);
  const int band_count = cell.band_count();
  const std::vector<EnergyModel> models = energy_model_presets(cell);

  std::vector<SweepRow> rows;
  for (Granularity g : trainable_granularities()) {
    const std::uint64_t ms = granularity_ms(g);
    const CellConfig swept = cell.with_activation_ms(ms);
    SynthProfile profile(swept, base.seconds());
    const BandPlan plan = plan_reference(profile);
    const DelayReport delay = simulate(profile, 0, profile.tti_count(), plan);

    SweepRow row;
    row.granularity = granularity_label(g);
    row.activation_ms = ms;
    row.sleep_pct = sleep_percentages(plan, band_count);
    double sum = 0.0;
    for (double pct : row.sleep_pct) sum += pct;
    row.avg_sleep_pct = sum / static_cast<double>(band_count);
    std::vector<double> beta = row.sleep_pct;
    for (double& b : beta) b /= 100.0;
    for (const EnergyModel& m : models) {
      row.rho_per_model.emplace_back(m.name, energy_saving(beta, m));
    }
    row.avg_extra_delay_us = delay.avg_extra_delay_us;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> period_segments(
    const DayRange& range, std::uint64_t activation_ms, bool include_weekends) {
  const std::uint64_t ppd = periods_per_day(activation_ms);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> segments;
  for (std::uint32_t day = range.first; day < range.last; ++day) {
    if (!include_weekends && is_weekend_day(day)) continue;
    const std::uint64_t first = static_cast<std::uint64_t>(day) * ppd;
    if (!segments.empty() &&
        segments.back().first + segments.back().second == first) {
      segments.back().second += ppd;
    } else {
      segments.emplace_back(first, ppd);
    }
  }
  return segments;
}

std::string sha256_hex(std::string_view data) {
  detail::Sha256 h;
  h.update(data.data(), data.size());
  return h.hex_digest();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for hashing");
  detail::Sha256 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex_digest();
}

namespace {

// Artifacts are written to <path>.partial and renamed on success, so an
// aborted stage never leaves a truncated file under the final name.
void write_artifact(const std::string& path,
                    const std::function<void(std::ostream&)>& writer) {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary);
    if (!out) throw Error("cannot write '" + partial + "'");
    writer(out);
    out.flush();
    if (!out) throw Error("write to '" + partial + "' failed");
  }
  fs::rename(partial, path);
}

template <typename F>
decltype(auto) stage(const char* name, F&& fn) {
  try {
    return std::forward<F>(fn)();
  } catch (const std::exception& e) {
    throw Error("stage '" + std::string(name) + "': " + e.what());
  }
}

DelayReport merge_reports(std::vector<DelayReport> parts, const BandPlan& plan,
                          int band_count) {
  DelayReport merged;
  double weighted_delay_ms = 0.0;
  for (DelayReport& part : parts) {
    merged.total_prbs += part.total_prbs;
    merged.delayed_prbs += part.delayed_prbs;
    merged.residual_backlog += part.residual_backlog;
    merged.max_delay_ms = std::max(merged.max_delay_ms, part.max_delay_ms);
    for (const auto& [delay, prbs] : part.delay_histogram) {
      merged.delay_histogram[delay] += prbs;
      weighted_delay_ms += static_cast<double>(delay) * static_cast<double>(prbs);
    }
  }
  merged.avg_extra_delay_us =
      merged.total_prbs == 0
          ? 0.0
          : 1000.0 * weighted_delay_ms / static_cast<double>(merged.total_prbs);
  merged.sleep_pct = sleep_percentages(plan, band_count);
  return merged;
}

std::vector<double> sleep_fractions(const BandPlan& plan, int band_count) {
  std::vector<double> beta = sleep_percentages(plan, band_count);
  for (double& b : beta) b /= 100.0;
  return beta;
}

json config_json(const RunConfig& config, const CellConfig& cell,
                 const Hyperparams& hp) {
  json j;
  j["cell"] = json::parse(cell_config_to_json(cell));
  j["synth"] = json::parse(synth_params_to_json(config.synth));
  j["granularity"] = granularity_label(config.granularity);
  j["activation_ms"] = cell.activation_ms();
  j["window_k"] = hp.window_k;
  j["train_days"] = {config.train_days.first, config.train_days.last};
  j["test_days"] = {config.test_days.first, config.test_days.last};
  j["include_weekends"] = config.include_weekends;
  j["emit_trace_csv"] = config.emit_trace_csv;
  j["run_sweep"] = config.run_sweep;
  j["seed"] = config.seed;
  j["hyperparams"] = json::parse(R"({})");
  j["hyperparams"]["learning_rate"] = hp.learning_rate;
  j["hyperparams"]["epochs"] = hp.epochs;
  j["hyperparams"]["hidden_size"] = hp.hidden_size;
  j["hyperparams"]["num_layers"] = hp.num_layers;
  j["hyperparams"]["batch_size"] = hp.batch_size;
  j["hyperparams"]["window_k"] = hp.window_k;
  j["hyperparams"]["val_fraction"] = hp.val_fraction;
  j["hyperparams"]["seed"] = hp.seed;
  return j;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  if (granularity_is_indicative(config.granularity)) {
    throw ConfigError("pipeline requires a trainable granularity (1m, 3m, 10m, 30m, 1h)");
  }
  const std::uint64_t activation = granularity_ms(config.granularity);
  const CellConfig cell = config.cell.with_activation_ms(activation);
  const int band_count = cell.band_count();

  Hyperparams hp;
  if (config.hyper_override) {
    hp = *config.hyper_override;
  } else {
    hp = preset_hyperparams(config.granularity);
    hp.window_k = config.window_k;
    hp.seed = config.seed;
  }

  if (config.out_dir.empty()) throw ConfigError("pipeline: output directory not set");
  if (config.synth.days == 0) throw ValidationError("pipeline: synth days must be >= 1");
  const auto days = config.synth.days;
  if (config.train_days.first >= config.train_days.last ||
      config.test_days.first >= config.test_days.last) {
    throw ValidationError("pipeline: empty day range");
  }
  if (config.train_days.last > config.test_days.first) {
    throw ValidationError("pipeline: train days must end before test days begin");
  }
  if (config.test_days.last > days) {
    throw ValidationError("pipeline: test days extend past the synthetic trace (" +
                          std::to_string(days) + " days)");
  }

  fs::create_directories(config.out_dir);
  auto path_of = [&config](const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
  };
  std::vector<std::string> artifact_names;
  auto emit = [&](const std::string& name,
                  const std::function<void(std::ostream&)>& writer) {
    write_artifact(path_of(name), writer);
    artifact_names.push_back(name);
  };

  // synth: the per-second demand profile all later stages read from.
  SynthProfile profile = stage("synth", [&] {
    SynthProfile p = synth_profile(config.synth, cell);
    emit("cell.json", [&](std::ostream& out) { out << cell_config_to_json(cell); });
    emit("synth_params.json",
         [&](std::ostream& out) { out << synth_params_to_json(config.synth); });
    if (config.emit_trace_csv) {
      emit("trace.csv", [&](std::ostream& out) { write_synth_trace_csv(p, out); });
    }
    return p;
  });

  // plan: reference band counts for the whole trace.
  BandPlan plan_full = stage("plan", [&] {
    BandPlan plan = plan_reference(profile);
    emit("plan_reference.csv", [&](std::ostream& out) { write_plan_csv(plan, out); });
    return plan;
  });

  // train: sliding windows from the training day segments only.
  TrainResult trained = stage("train", [&] {
    Dataset dataset;
    for (const auto& [first, count] :
         period_segments(config.train_days, activation, config.include_weekends)) {
      if (count <= static_cast<std::uint64_t>(hp.window_k)) continue;
      std::span<const int> counts(plan_full.counts.data() + first,
                                  static_cast<std::size_t>(count));
      Dataset part = make_windows(counts, hp.window_k, band_count);
      std::move(part.inputs.begin(), part.inputs.end(), std::back_inserter(dataset.inputs));
      dataset.targets.insert(dataset.targets.end(), part.targets.begin(),
                             part.targets.end());
    }
    if (dataset.size() == 0) {
      throw ValidationError("training day range yields no samples");
    }
    TrainResult result = train(dataset, hp, band_count);
    emit("checkpoint.json",
         [&](std::ostream& out) { out << checkpoint_to_json(result.model, hp); });
    emit("loss_curve.csv", [&](std::ostream& out) {
      out << "epoch,train_rmse,val_rmse\n";
      for (std::size_t e = 0; e < result.curve.size(); ++e) {
        out << e << ',' << detail::format_double(result.curve[e].train_rmse) << ',';
        if (result.curve[e].val_rmse) {
          out << detail::format_double(*result.curve[e].val_rmse);
        }
        out << '\n';
      }
    });
    return result;
  });

  // predict: teacher-forced one-step forecasts for every test period, each
  // window reading true counts from the full reference plan (windows may
  // start before the test range; the model never trained on test targets).
  const auto test_segments =
      period_segments(config.test_days, activation, config.include_weekends);
  PredictionSeries predictions;
  BandPlan test_actual;
  test_actual.activation_ms = activation;
  stage("predict", [&] {
    for (const auto& [first, count] : test_segments) {
      if (first < static_cast<std::uint64_t>(hp.window_k)) {
        throw ValidationError("test periods start before one full window of history");
      }
      for (std::uint64_t t = first; t < first + count; ++t) {
        std::span<const int> window(
            plan_full.counts.data() + (t - static_cast<std::uint64_t>(hp.window_k)),
            static_cast<std::size_t>(hp.window_k) + 1);
        // predict_series with horizon 1 forecasts the value after `window`,
        // which is exactly position t when the span ends at t.
        PredictionSeries one =
            predict_series(trained.model, window.subspan(0, window.size() - 1), 1);
        predictions.counts.push_back(one.counts.front());
        predictions.raw.push_back(one.raw.front());
        test_actual.counts.push_back(plan_full.counts[static_cast<std::size_t>(t)]);
      }
    }
    emit("predictions.csv", [&](std::ostream& out) {
      out << "period_index,predicted,actual,raw\n";
      std::size_t i = 0;
      for (const auto& [first, count] : test_segments) {
        for (std::uint64_t t = first; t < first + count; ++t, ++i) {
          out << t << ',' << predictions.counts[i] << ',' << test_actual.counts[i]
              << ',' << detail::format_double(predictions.raw[i]) << '\n';
        }
      }
    });
    emit("plan_predicted.csv", [&](std::ostream& out) {
      BandPlan predicted_plan;
      predicted_plan.activation_ms = activation;
      predicted_plan.counts = predictions.counts;
      write_plan_csv(predicted_plan, out);
    });
    return 0;
  });

  // simulate: serve the test-range demand under both plans.
  BandPlan predicted_plan;
  predicted_plan.activation_ms = activation;
  predicted_plan.counts = predictions.counts;
  DelayReport delay_ref;
  DelayReport delay_pred;
  stage("simulate", [&] {
    std::vector<DelayReport> ref_parts;
    std::vector<DelayReport> pred_parts;
    std::size_t offset = 0;
    for (const auto& [first, count] : test_segments) {
      BandPlan ref_seg;
      ref_seg.activation_ms = activation;
      ref_seg.counts.assign(test_actual.counts.begin() + static_cast<std::ptrdiff_t>(offset),
                            test_actual.counts.begin() +
                                static_cast<std::ptrdiff_t>(offset + count));
      BandPlan pred_seg;
      pred_seg.activation_ms = activation;
      pred_seg.counts.assign(
          predictions.counts.begin() + static_cast<std::ptrdiff_t>(offset),
          predictions.counts.begin() + static_cast<std::ptrdiff_t>(offset + count));
      const std::uint64_t first_tti = first * activation;
      const std::uint64_t len = count * activation;
      ref_parts.push_back(simulate(profile, first_tti, len, ref_seg));
      pred_parts.push_back(simulate(profile, first_tti, len, pred_seg));
      offset += count;
    }
    delay_ref = merge_reports(std::move(ref_parts), test_actual, band_count);
    delay_pred = merge_reports(std::move(pred_parts), predicted_plan, band_count);
    emit("delay_reference.json",
         [&](std::ostream& out) { out << delay_report_to_json(delay_ref); });
    emit("delay_predicted.json",
         [&](std::ostream& out) { out << delay_report_to_json(delay_pred); });
    return 0;
  });

  // evaluate: forecast metrics plus energy/delay for both plans.
  const std::vector<EnergyModel> models = energy_model_presets(cell);
  stage("evaluate", [&] {
    CombinedReport report =
        build_report(test_actual, predictions, delay_ref, delay_pred, models);
    emit("report.json",
         [&](std::ostream& out) { out << combined_report_to_json(report); });
    const std::string csv_path = path_of("report.csv");
    save_combined_report_csv(report, csv_path + ".partial");
    fs::rename(csv_path + ".partial", csv_path);
    artifact_names.push_back("report.csv");
    return 0;
  });

  // report: the activation-period sweep over the whole trace.
  if (config.run_sweep) {
    stage("report", [&] {
      const std::vector<SweepRow> rows = granularity_sweep(config.synth, cell);
      emit("sweep.csv", [&](std::ostream& out) { write_sweep_csv(rows, cell, out); });
      for (const EnergyModel& m : models) {
        emit("saving_" + m.name + ".dat",
             [&](std::ostream& out) { write_saving_dat(rows, m.name, out); });
        emit("tradeoff_" + m.name + ".dat",
             [&](std::ostream& out) { write_tradeoff_dat(rows, m.name, out); });
      }
      return 0;
    });
  }

  PipelineResult result;
  const std::vector<double> beta_full = sleep_fractions(plan_full, band_count);
  result.rho_reference_model1 = energy_saving(beta_full, models.at(0));
  result.rho_reference_model2 = energy_saving(beta_full, models.at(1));

  stage("manifest", [&] {
    json manifest;
    manifest["format"] = "bandsleep-manifest";
    manifest["version"] = 1;
    manifest["tool_version"] = kToolVersion;
    const json cfg = config_json(config, cell, hp);
    manifest["config"] = cfg;
    manifest["config_sha256"] = sha256_hex(cfg.dump());
    manifest["rho_reference"] = {{"model1", result.rho_reference_model1},
                                 {"model2", result.rho_reference_model2}};
    json artifacts = json::object();
    for (const std::string& name : artifact_names) {
      artifacts[name] = sha256_file(path_of(name));
    }
    manifest["artifacts"] = artifacts;
    write_artifact(path_of("manifest.json"),
                   [&](std::ostream& out) { out << manifest.dump(2) << "\n"; });
    return 0;
  });

  result.manifest_path = path_of("manifest.json");
  for (const std::string& name : artifact_names) {
    result.artifacts.push_back(path_of(name));
  }
  return result;
}

}  // namespace bandsleep
