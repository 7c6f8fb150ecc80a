#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bandsleep/cell.hpp"
#include "bandsleep/lstm.hpp"
#include "bandsleep/metrics.hpp"
#include "bandsleep/synth.hpp"

namespace bandsleep {

/// Supported activation-period granularities. The sub-minute entries exist
/// for analysis only; SIB signaling and switch transients rule them out on
/// live hardware, so the tools tag them as indicative.
enum class Granularity { ms20, s1, m1, m3, m10, m30, h1 };

std::uint64_t granularity_ms(Granularity g);
std::string granularity_label(Granularity g);
Granularity parse_granularity(const std::string& label);
bool granularity_is_indicative(Granularity g);

/// The five granularities the trainer accepts.
std::vector<Granularity> trainable_granularities();

/// Preset hyperparameters per trainable granularity (lr 1e-4, 6 layers of
/// 256 units, RMSE loss; epochs 100 except 150 at 1 h; batch 72/16/16/2/2).
Hyperparams preset_hyperparams(Granularity g);

/// Day-range [first, last) in whole days. Weekends are days 5 and 6 of each
/// week (day 0 is a Monday by convention).
struct DayRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;
};
DayRange parse_day_range(const std::string& text);
bool is_weekend_day(std::uint32_t day);

/// Full-pipeline configuration. The trace comes from the seeded synthetic
/// generator; stage outputs land in out_dir and are recorded in
/// manifest.json with their checksums.
struct RunConfig {
  CellConfig cell = default_cell();
  SynthParams synth;
  Granularity granularity = Granularity::m10;
  std::optional<Hyperparams> hyper_override;  // defaults to the preset
  int window_k = 12;
  DayRange train_days{0, 5};
  DayRange test_days{7, 9};
  bool include_weekends = false;
  bool emit_trace_csv = false;  // per-TTI CSV; large for multi-day runs
  bool run_sweep = true;
  std::string out_dir;
  std::uint64_t seed = 1;
};

struct PipelineResult {
  std::string manifest_path;
  std::vector<std::string> artifacts;
  double rho_reference_model1 = 0.0;
  double rho_reference_model2 = 0.0;
};

/// Run synth -> plan -> simulate -> train -> predict -> evaluate -> report.
/// All outputs are deterministic for a fixed config; failed stages leave
/// their outputs with a .partial suffix and rethrow with the stage name.
PipelineResult run_pipeline(const RunConfig& config);

/// Reference-plan sweep over the trainable granularities: per granularity
/// the full-trace sleep percentages, energy saving under the preset models
/// and the average extra delay of the reference plan.
std::vector<SweepRow> granularity_sweep(const SynthParams& params,
                                        const CellConfig& cell);

/// Periods per day for an activation period (throws if it does not divide
/// 24 h) and the day-filtered period index ranges used by train/predict.
std::uint64_t periods_per_day(std::uint64_t activation_ms);

/// Indices of plan periods whose day lies in `range` (optionally skipping
/// weekends), grouped into contiguous runs.
std::vector<std::pair<std::uint64_t, std::uint64_t>> period_segments(
    const DayRange& range, std::uint64_t activation_ms, bool include_weekends);

/// SHA-256 (hex) of a file or a string, used for manifest checksums.
std::string sha256_file(const std::string& path);
std::string sha256_hex(std::string_view data);

}  // namespace bandsleep
