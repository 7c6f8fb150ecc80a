// Command-line front end for the band-sleep toolkit. Subcommands mirror the
// pipeline stages so each artifact can be produced or inspected in isolation.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bandsleep/cell.hpp"
#include "bandsleep/errors.hpp"
#include "bandsleep/lstm.hpp"
#include "bandsleep/metrics.hpp"
#include "bandsleep/pipeline.hpp"
#include "bandsleep/planner.hpp"
#include "bandsleep/sim.hpp"
#include "bandsleep/synth.hpp"
#include "bandsleep/trace.hpp"

namespace {

using namespace bandsleep;

// Seed precedence: explicit --seed flag, then BANDSLEEP_SEED, then 1.
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  const char* env = std::getenv("BANDSLEEP_SEED");
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t value = 0;
  const char* end = env + std::string_view(env).size();
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("BANDSLEEP_SEED must be an unsigned integer, got '" + std::string(env) + "'");
  }
  return value;
}

CellConfig load_cell(const std::string& path) {
  if (path.empty()) return default_cell();
  return load_cell_config(path);
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// "-" selects the standard stream; anything else opens a file in binary mode
// so output bytes are identical across platforms.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path) : path_(path) {
    if (path == "-") {
      out_ = &std::cout;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw Error("cannot open '" + path + "' for writing");
    out_ = &file_;
  }

  std::ostream& stream() { return *out_; }

  void finish() {
    out_->flush();
    if (!*out_) throw Error("failed writing '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

class InputFile {
 public:
  explicit InputFile(const std::string& path) {
    if (path == "-") {
      in_ = &std::cin;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw Error("cannot open '" + path + "' for reading");
    in_ = &file_;
  }

  std::istream& stream() { return *in_; }
  static std::string display_name(const std::string& path) { return path == "-" ? "<stdin>" : path; }

 private:
  std::ifstream file_;
  std::istream* in_ = nullptr;
};

void warn_if_indicative(Granularity g) {
  if (granularity_is_indicative(g)) {
    std::cerr << "bandsleep: warning: granularity '" << granularity_label(g)
              << "' is below the forecasting horizon; plans at this period are"
                 " indicative only and cannot be trained on\n";
  }
}

struct SynthSource {
  std::string params_path;  // JSON file with generator parameters
  std::string trace_path;   // CSV trace, "-" for stdin

  void add_options(CLI::App* cmd, CLI::Option** trace_opt, CLI::Option** synth_opt) {
    *trace_opt = cmd->add_option("--trace", trace_path, "Demand trace CSV (tti,band,prbs); '-' reads stdin");
    *synth_opt = cmd->add_option("--synth", params_path, "Synthetic generator parameters JSON")
                     ->check(CLI::ExistingFile);
    (*trace_opt)->excludes(*synth_opt);
    (*synth_opt)->excludes(*trace_opt);
  }
};

struct HyperFlags {
  double learning_rate = 0.0;
  std::uint32_t epochs = 0;
  int hidden = 0;
  int layers = 0;
  std::uint32_t batch = 0;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* hidden_opt = nullptr;
  CLI::Option* layers_opt = nullptr;
  CLI::Option* batch_opt = nullptr;

  void add_options(CLI::App* cmd) {
    lr_opt = cmd->add_option("--learning-rate", learning_rate, "Adam learning rate (default: per-granularity preset)");
    epochs_opt = cmd->add_option("--epochs", epochs, "Training epochs (default: per-granularity preset)");
    hidden_opt = cmd->add_option("--hidden-size", hidden, "LSTM hidden units per layer");
    layers_opt = cmd->add_option("--num-layers", layers, "Stacked LSTM layers");
    batch_opt = cmd->add_option("--batch-size", batch, "Windows per optimizer step");
  }

  void apply(Hyperparams& hp) const {
    if (lr_opt->count() > 0) hp.learning_rate = learning_rate;
    if (epochs_opt->count() > 0) hp.epochs = epochs;
    if (hidden_opt->count() > 0) hp.hidden_size = hidden;
    if (layers_opt->count() > 0) hp.num_layers = layers;
    if (batch_opt->count() > 0) hp.batch_size = batch;
  }
};

// Keep only periods whose day index passes the weekend filter, split into
// contiguous runs so windows never straddle removed days.
Dataset day_filtered_windows(const BandPlan& plan, const DayRange& days, bool include_weekends,
                             int window_k, int band_count) {
  Dataset merged;
  for (const auto& [first, count] : period_segments(days, plan.activation_ms, include_weekends)) {
    if (first + count > plan.counts.size()) {
      throw ValidationError("day range extends past the end of the plan (" +
                            std::to_string(plan.counts.size()) + " periods)");
    }
    if (count <= static_cast<std::uint64_t>(window_k)) continue;
    std::span<const int> seg(plan.counts.data() + first, count);
    Dataset part = make_windows(seg, window_k, band_count);
    std::move(part.inputs.begin(), part.inputs.end(), std::back_inserter(merged.inputs));
    merged.targets.insert(merged.targets.end(), part.targets.begin(), part.targets.end());
  }
  if (merged.size() == 0) {
    throw ValidationError("selected day range leaves no training windows (need more than " +
                          std::to_string(window_k) + " periods per contiguous segment)");
  }
  return merged;
}

void write_loss_curve(const std::string& path, const std::vector<EpochLoss>& curve) {
  OutputFile out(path);
  out.stream() << "epoch,train_rmse,val_rmse\n";
  for (std::size_t e = 0; e < curve.size(); ++e) {
    out.stream() << e << ',' << format_double(curve[e].train_rmse) << ',';
    if (curve[e].val_rmse) out.stream() << format_double(*curve[e].val_rmse);
    out.stream() << '\n';
  }
  out.finish();
}

int run_app(int argc, char** argv) {
  CLI::App app{"Multi-band base-station sleep planning: synthetic traces, reference plans,\n"
               "FIFO delay simulation, LSTM demand forecasting, and energy reporting."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("bandsleep ") + BANDSLEEP_VERSION);

  // --- synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic demand trace CSV");
  auto synth_params = std::make_shared<SynthParams>();
  auto synth_seconds = std::make_shared<std::uint64_t>(0);
  auto synth_cell_path = std::make_shared<std::string>();
  auto synth_out = std::make_shared<std::string>("-");
  auto synth_params_out = std::make_shared<std::string>();
  synth_cmd->add_option("--days", synth_params->days, "Days of traffic to generate")->capture_default_str();
  auto* seconds_opt =
      synth_cmd->add_option("--seconds", *synth_seconds, "Generate this many seconds instead of whole days");
  synth_cmd->add_option("--peak", synth_params->peak_load, "Peak load fraction of cell capacity")
      ->capture_default_str();
  synth_cmd->add_option("--trough", synth_params->trough_load, "Trough load fraction of cell capacity")
      ->capture_default_str();
  synth_cmd->add_option("--burst-rate", synth_params->burst_rate, "Expected traffic bursts per hour")
      ->capture_default_str();
  synth_cmd->add_option("--burst-scale", synth_params->burst_scale, "Load multiplier while a burst is active")
      ->capture_default_str();
  auto synth_seed = std::make_shared<std::uint64_t>(1);
  auto* synth_seed_opt = synth_cmd->add_option("--seed", *synth_seed, "Generator seed (default: $BANDSLEEP_SEED or 1)");
  synth_cmd->add_option("--cell", *synth_cell_path, "Cell configuration JSON (default: built-in 4-band cell)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", *synth_out, "Output trace CSV path; '-' writes stdout")->capture_default_str();
  synth_cmd->add_option("--params-out", *synth_params_out, "Also write the resolved generator parameters JSON here");
  synth_cmd->callback([=]() {
    SynthParams params = *synth_params;
    params.seed = resolve_seed(synth_seed_opt->count() > 0, *synth_seed);
    CellConfig cell = load_cell(*synth_cell_path);
    SynthProfile profile = seconds_opt->count() > 0 ? synth_profile(params, cell, *synth_seconds)
                                                    : synth_profile(params, cell);
    if (!synth_params_out->empty()) save_synth_params(params, *synth_params_out);
    OutputFile out(*synth_out);
    write_synth_trace_csv(profile, out.stream());
    out.finish();
  });

  // --- plan ----------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "Compute the reference (hindsight-optimal) band plan");
  auto plan_source = std::make_shared<SynthSource>();
  CLI::Option* plan_trace_opt = nullptr;
  CLI::Option* plan_synth_opt = nullptr;
  plan_source->add_options(plan_cmd, &plan_trace_opt, &plan_synth_opt);
  auto plan_cell_path = std::make_shared<std::string>();
  auto plan_gran = std::make_shared<std::string>("10m");
  auto plan_out = std::make_shared<std::string>("-");
  plan_cmd->add_option("--cell", *plan_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  plan_cmd->add_option("--granularity", *plan_gran, "Reallocation period: 20ms, 1s, 1m, 3m, 10m, 30m, 1h")
      ->capture_default_str();
  plan_cmd->add_option("--out", *plan_out, "Output plan CSV path; '-' writes stdout")->capture_default_str();
  plan_cmd->callback([=]() {
    if (plan_trace_opt->count() == 0 && plan_synth_opt->count() == 0) {
      throw ConfigError("plan requires --trace or --synth");
    }
    Granularity g = parse_granularity(*plan_gran);
    warn_if_indicative(g);
    CellConfig cell = load_cell(*plan_cell_path).with_activation_ms(granularity_ms(g));
    BandPlan plan;
    if (plan_trace_opt->count() > 0) {
      InputFile in(plan_source->trace_path);
      plan = plan_from_trace_csv(in.stream(), cell, InputFile::display_name(plan_source->trace_path));
    } else {
      plan = plan_reference(synth_profile(load_synth_params(plan_source->params_path), cell));
    }
    OutputFile out(*plan_out);
    write_plan_csv(plan, out.stream());
    out.finish();
  });

  // --- simulate --------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Replay a trace against a plan and report queueing delay");
  auto sim_source = std::make_shared<SynthSource>();
  CLI::Option* sim_trace_opt = nullptr;
  CLI::Option* sim_synth_opt = nullptr;
  sim_source->add_options(sim_cmd, &sim_trace_opt, &sim_synth_opt);
  auto sim_plan_path = std::make_shared<std::string>();
  auto sim_cell_path = std::make_shared<std::string>();
  auto sim_gran = std::make_shared<std::string>("10m");
  auto sim_out = std::make_shared<std::string>("-");
  sim_cmd->add_option("--plan", *sim_plan_path, "Plan CSV to replay")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--cell", *sim_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--granularity", *sim_gran, "Reallocation period the plan was computed at")
      ->capture_default_str();
  sim_cmd->add_option("--out", *sim_out, "Output delay report JSON; '-' writes stdout")->capture_default_str();
  sim_cmd->callback([=]() {
    if (sim_trace_opt->count() == 0 && sim_synth_opt->count() == 0) {
      throw ConfigError("simulate requires --trace or --synth");
    }
    Granularity g = parse_granularity(*sim_gran);
    CellConfig cell = load_cell(*sim_cell_path).with_activation_ms(granularity_ms(g));
    BandPlan plan = load_plan_csv(*sim_plan_path, cell.activation_ms(), cell.band_count());
    DelayReport report;
    if (sim_synth_opt->count() > 0) {
      SynthProfile profile = synth_profile(load_synth_params(sim_source->params_path), cell);
      report = simulate(profile, 0, profile.tti_count(), plan);
    } else {
      InputFile in(sim_source->trace_path);
      TraceSeries trace = parse_trace(in.stream(), cell, InputFile::display_name(sim_source->trace_path));
      report = simulate(total_demand_per_tti(trace), plan, cell);
    }
    OutputFile out(*sim_out);
    out.stream() << delay_report_to_json(report) << '\n';
    out.finish();
  });

  // --- train -----------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Fit the LSTM forecaster on a plan's band-count series");
  auto train_plan_path = std::make_shared<std::string>();
  auto train_cell_path = std::make_shared<std::string>();
  auto train_gran = std::make_shared<std::string>();
  auto train_window = std::make_shared<int>(12);
  auto train_seed = std::make_shared<std::uint64_t>(1);
  auto train_range = std::make_shared<std::string>();
  auto train_include_weekends = std::make_shared<bool>(false);
  auto train_val_split = std::make_shared<double>(0.2);
  auto train_out = std::make_shared<std::string>();
  auto train_curve_out = std::make_shared<std::string>();
  auto train_hyper = std::make_shared<HyperFlags>();
  train_cmd->add_option("--plan", *train_plan_path, "Reference plan CSV to learn from")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--cell", *train_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  train_cmd->add_option("--granularity", *train_gran, "Plan period: 1m, 3m, 10m, 30m, 1h")->required();
  train_cmd->add_option("--window-k", *train_window, "History periods per input window")->capture_default_str();
  auto* train_seed_opt =
      train_cmd->add_option("--seed", *train_seed, "Init/shuffle seed (default: $BANDSLEEP_SEED or 1)");
  train_cmd->add_option("--train-range", *train_range,
                        "Day range 'first:last' (end-exclusive, day 0 is a Monday); default: whole plan");
  train_cmd->add_flag("--include-weekends", *train_include_weekends,
                      "Keep Saturdays/Sundays when --train-range is set");
  train_cmd->add_option("--val-split", *train_val_split, "Fraction of windows held out for validation")
      ->capture_default_str();
  train_cmd->add_option("--out", *train_out, "Output checkpoint JSON path")->required();
  train_cmd->add_option("--curve-out", *train_curve_out, "Optional per-epoch loss CSV");
  train_hyper->add_options(train_cmd);
  train_cmd->callback([=]() {
    Granularity g = parse_granularity(*train_gran);
    Hyperparams hp = preset_hyperparams(g);  // rejects indicative granularities
    hp.window_k = *train_window;
    hp.seed = resolve_seed(train_seed_opt->count() > 0, *train_seed);
    hp.val_fraction = *train_val_split;
    train_hyper->apply(hp);

    CellConfig cell = load_cell(*train_cell_path).with_activation_ms(granularity_ms(g));
    BandPlan plan = load_plan_csv(*train_plan_path, cell.activation_ms(), cell.band_count());

    Dataset data;
    if (!train_range->empty()) {
      data = day_filtered_windows(plan, parse_day_range(*train_range), *train_include_weekends,
                                  hp.window_k, cell.band_count());
    } else {
      data = make_windows(plan, hp.window_k, cell.band_count());
    }

    TrainResult result = train(data, hp, cell.band_count());
    save_checkpoint(result.model, hp, *train_out);
    if (!train_curve_out->empty()) write_loss_curve(*train_curve_out, result.curve);
    std::cerr << "bandsleep: trained " << result.curve.size() << " epochs on " << data.size()
              << " windows; checkpoint written to " << *train_out << '\n';
  });

  // --- predict ---------------------------------------------------------------
  auto* predict_cmd = app.add_subcommand("predict", "Forecast band counts from a trained checkpoint");
  auto predict_ckpt = std::make_shared<std::string>();
  auto predict_plan_path = std::make_shared<std::string>();
  auto predict_cell_path = std::make_shared<std::string>();
  auto predict_gran = std::make_shared<std::string>("10m");
  auto predict_horizon = std::make_shared<int>(1);
  auto predict_out = std::make_shared<std::string>("-");
  predict_cmd->add_option("--checkpoint", *predict_ckpt, "Trained model checkpoint JSON")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--plan", *predict_plan_path, "History plan CSV to forecast from")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--cell", *predict_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  predict_cmd->add_option("--granularity", *predict_gran, "Plan period label")->capture_default_str();
  predict_cmd->add_option("--horizon", *predict_horizon, "Steps ahead per prediction")->capture_default_str();
  predict_cmd->add_option("--out", *predict_out, "Output predicted plan CSV; '-' writes stdout")
      ->capture_default_str();
  predict_cmd->callback([=]() {
    Granularity g = parse_granularity(*predict_gran);
    CellConfig cell = load_cell(*predict_cell_path).with_activation_ms(granularity_ms(g));
    Checkpoint ckpt = load_checkpoint(*predict_ckpt);
    if (ckpt.model.band_count() != cell.band_count()) {
      throw ConfigError("checkpoint was trained for " + std::to_string(ckpt.model.band_count()) +
                        " bands but the cell has " + std::to_string(cell.band_count()));
    }
    BandPlan history = load_plan_csv(*predict_plan_path, cell.activation_ms(), cell.band_count());
    PredictionSeries series = predict_series(ckpt.model, history, *predict_horizon);
    BandPlan predicted;
    predicted.activation_ms = cell.activation_ms();
    predicted.counts = series.counts;
    OutputFile out(*predict_out);
    write_plan_csv(predicted, out.stream());
    out.finish();
  });

  // --- evaluate ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a predicted plan against the reference plan");
  auto eval_ref = std::make_shared<std::string>();
  auto eval_pred = std::make_shared<std::string>();
  auto eval_cell_path = std::make_shared<std::string>();
  auto eval_gran = std::make_shared<std::string>("10m");
  auto eval_delay_ref = std::make_shared<std::string>();
  auto eval_delay_pred = std::make_shared<std::string>();
  auto eval_out_json = std::make_shared<std::string>("-");
  auto eval_out_csv = std::make_shared<std::string>();
  eval_cmd->add_option("--reference", *eval_ref, "Reference plan CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--predicted", *eval_pred,
                       "Predicted plan CSV; if shorter than the reference it is scored "
                       "against the reference tail (the final forecast targets the period "
                       "after the history and is dropped)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--cell", *eval_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  eval_cmd->add_option("--granularity", *eval_gran, "Plan period label")->capture_default_str();
  eval_cmd->add_option("--delay-reference", *eval_delay_ref, "Delay report JSON for the reference plan")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--delay-predicted", *eval_delay_pred, "Delay report JSON for the predicted plan")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out-json", *eval_out_json, "Combined report JSON; '-' writes stdout")
      ->capture_default_str();
  eval_cmd->add_option("--out-csv", *eval_out_csv, "Optional flat key,value CSV of the same report");
  eval_cmd->callback([=]() {
    Granularity g = parse_granularity(*eval_gran);
    CellConfig cell = load_cell(*eval_cell_path).with_activation_ms(granularity_ms(g));
    BandPlan reference = load_plan_csv(*eval_ref, cell.activation_ms(), cell.band_count());
    BandPlan predicted_plan = load_plan_csv(*eval_pred, cell.activation_ms(), cell.band_count());
    if (predicted_plan.counts.size() > reference.counts.size()) {
      throw ConfigError("evaluate: predicted plan has " +
                        std::to_string(predicted_plan.counts.size()) +
                        " periods but the reference has only " +
                        std::to_string(reference.counts.size()));
    }
    if (predicted_plan.counts.size() < reference.counts.size()) {
      // Forecasts align to the end of the history they were made from; the
      // final one targets the period just past it, so there is no reference
      // value for it.  Drop it and score the rest against the reference tail.
      if (predicted_plan.counts.size() < 2) {
        throw ConfigError(
            "evaluate: a predicted plan shorter than the reference needs at "
            "least 2 periods (the final forecast has no reference value)");
      }
      predicted_plan.counts.pop_back();
      const std::size_t n = predicted_plan.counts.size();
      reference.counts.erase(reference.counts.begin(),
                             reference.counts.end() - static_cast<std::ptrdiff_t>(n));
    }
    PredictionSeries predicted;
    predicted.counts = predicted_plan.counts;
    predicted.raw.assign(predicted_plan.counts.begin(), predicted_plan.counts.end());

    auto load_delay = [&](const std::string& path, const BandPlan& plan) {
      if (!path.empty()) {
        InputFile in(path);
        return delay_report_from_json(in.stream(), path);
      }
      DelayReport r;  // no trace available: report sleep shares only
      r.sleep_pct = sleep_percentages(plan, cell.band_count());
      return r;
    };
    DelayReport delay_ref = load_delay(*eval_delay_ref, reference);
    DelayReport delay_pred = load_delay(*eval_delay_pred, predicted_plan);

    CombinedReport report =
        build_report(reference, predicted, delay_ref, delay_pred, energy_model_presets(cell));
    OutputFile out(*eval_out_json);
    out.stream() << combined_report_to_json(report) << '\n';
    out.finish();
    if (!eval_out_csv->empty()) save_combined_report_csv(report, *eval_out_csv);
  });

  // --- report --------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Sweep reallocation periods and emit sleep/energy tables");
  auto report_synth = std::make_shared<std::string>();
  auto report_cell_path = std::make_shared<std::string>();
  auto report_out_dir = std::make_shared<std::string>();
  report_cmd->add_option("--synth", *report_synth, "Synthetic generator parameters JSON")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--cell", *report_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  report_cmd->add_option("--out-dir", *report_out_dir, "Directory for sweep.csv and plot .dat files")->required();
  report_cmd->callback([=]() {
    SynthParams params = load_synth_params(*report_synth);
    CellConfig cell = load_cell(*report_cell_path);
    std::vector<SweepRow> rows = granularity_sweep(params, cell);
    std::filesystem::create_directories(*report_out_dir);
    const auto dir = std::filesystem::path(*report_out_dir);
    {
      OutputFile out((dir / "sweep.csv").string());
      write_sweep_csv(rows, cell, out.stream());
      out.finish();
    }
    for (const auto& model : energy_model_presets(cell)) {
      OutputFile saving((dir / ("saving_" + model.name + ".dat")).string());
      write_saving_dat(rows, model.name, saving.stream());
      saving.finish();
      OutputFile tradeoff((dir / ("tradeoff_" + model.name + ".dat")).string());
      write_tradeoff_dat(rows, model.name, tradeoff.stream());
      tradeoff.finish();
    }
    std::cerr << "bandsleep: wrote sweep tables for " << rows.size() << " granularities to " << *report_out_dir
              << '\n';
  });

  // --- pipeline --------------------------------------------------------------
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run synth -> plan -> train -> predict -> simulate -> report");
  auto pipe_cfg = std::make_shared<RunConfig>();
  auto pipe_synth_json = std::make_shared<std::string>();
  auto pipe_cell_path = std::make_shared<std::string>();
  auto pipe_gran = std::make_shared<std::string>("10m");
  auto pipe_train_range = std::make_shared<std::string>("0:5");
  auto pipe_test_range = std::make_shared<std::string>("7:9");
  auto pipe_seed = std::make_shared<std::uint64_t>(1);
  auto pipe_val_split = std::make_shared<double>(0.2);
  auto pipe_no_sweep = std::make_shared<bool>(false);
  auto pipe_hyper = std::make_shared<HyperFlags>();
  pipe_cmd->add_option("--out-dir", pipe_cfg->out_dir, "Directory for all pipeline artifacts")->required();
  auto* pipe_synth_opt =
      pipe_cmd->add_option("--synth", *pipe_synth_json, "Synthetic generator parameters JSON")
          ->check(CLI::ExistingFile);
  pipe_cmd->add_option("--cell", *pipe_cell_path, "Cell configuration JSON")->check(CLI::ExistingFile);
  pipe_cmd->add_option("--days", pipe_cfg->synth.days, "Days of traffic to generate")->capture_default_str();
  pipe_cmd->add_option("--peak", pipe_cfg->synth.peak_load, "Peak load fraction")->capture_default_str();
  pipe_cmd->add_option("--trough", pipe_cfg->synth.trough_load, "Trough load fraction")->capture_default_str();
  pipe_cmd->add_option("--burst-rate", pipe_cfg->synth.burst_rate, "Expected bursts per hour")
      ->capture_default_str();
  pipe_cmd->add_option("--burst-scale", pipe_cfg->synth.burst_scale, "Burst load multiplier")
      ->capture_default_str();
  pipe_cmd->add_option("--granularity", *pipe_gran, "Reallocation period: 1m, 3m, 10m, 30m, 1h")
      ->capture_default_str();
  pipe_cmd->add_option("--window-k", pipe_cfg->window_k, "History periods per input window")->capture_default_str();
  auto* pipe_seed_opt = pipe_cmd->add_option("--seed", *pipe_seed, "Seed (default: $BANDSLEEP_SEED or 1)");
  pipe_cmd->add_option("--train-range", *pipe_train_range, "Training day range 'first:last' (end-exclusive)")
      ->capture_default_str();
  pipe_cmd->add_option("--test-range", *pipe_test_range, "Test day range 'first:last' (end-exclusive)")
      ->capture_default_str();
  pipe_cmd->add_flag("--include-weekends", pipe_cfg->include_weekends, "Keep Saturdays/Sundays in both ranges");
  pipe_cmd->add_flag("--emit-trace", pipe_cfg->emit_trace_csv, "Also materialize the full trace.csv (large)");
  pipe_cmd->add_flag("--no-sweep", *pipe_no_sweep, "Skip the granularity sweep stage");
  pipe_cmd->add_option("--val-split", *pipe_val_split, "Validation fraction of training windows")
      ->capture_default_str();
  pipe_hyper->add_options(pipe_cmd);
  pipe_cmd->callback([=]() {
    RunConfig config = *pipe_cfg;
    config.granularity = parse_granularity(*pipe_gran);
    if (granularity_is_indicative(config.granularity)) {
      throw ConfigError("pipeline requires a trainable granularity: 1m, 3m, 10m, 30m or 1h");
    }
    config.cell = load_cell(*pipe_cell_path);
    if (pipe_synth_opt->count() > 0) {
      config.synth = load_synth_params(*pipe_synth_json);
    }
    config.seed = resolve_seed(pipe_seed_opt->count() > 0, *pipe_seed);
    if (pipe_seed_opt->count() > 0 || pipe_synth_opt->count() == 0) {
      config.synth.seed = config.seed;
    }
    config.train_days = parse_day_range(*pipe_train_range);
    config.test_days = parse_day_range(*pipe_test_range);
    config.run_sweep = !*pipe_no_sweep;

    Hyperparams hp = preset_hyperparams(config.granularity);
    hp.window_k = config.window_k;
    hp.seed = config.seed;
    hp.val_fraction = *pipe_val_split;
    pipe_hyper->apply(hp);
    config.hyper_override = hp;

    PipelineResult result = run_pipeline(config);
    std::cout << "manifest: " << result.manifest_path << '\n';
    for (const auto& name : result.artifacts) {
      std::cout << "  " << name << '\n';
    }
    std::cout << "reference sleep fraction (uniform power): " << result.rho_reference_model1 << '\n';
    std::cout << "reference sleep fraction (weighted power): " << result.rho_reference_model2 << '\n';
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "bandsleep: " << e.what() << '\n';
    return 1;
  }
}
