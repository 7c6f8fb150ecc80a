#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandsleep/planner.hpp"

namespace bandsleep {

/// Training configuration. Epochs may be zero (returns the initialized
/// model untouched). val_fraction takes the chronological tail of the
/// dataset for validation; 0 disables the split.
struct Hyperparams {
  double learning_rate = 1e-4;
  std::uint32_t epochs = 100;
  int hidden_size = 256;
  int num_layers = 6;
  std::uint32_t batch_size = 16;
  int window_k = 12;
  double val_fraction = 0.2;
  std::uint64_t seed = 1;
};

/// Sliding-window regression samples over normalized band counts.
struct Dataset {
  std::vector<std::vector<double>> inputs;  // each of length window_k
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
};

/// Stacked LSTM (input width 1, `num_layers` layers of `hidden_size` units)
/// with a scalar dense head. Parameters live in one flat vector; per layer
/// the order is Wx, Wh, b with gate rows stacked input/forget/candidate/
/// output, each matrix row-major; the head weights and bias follow.
class LstmModel {
public:
  LstmModel() = default;
  LstmModel(int num_layers, int hidden_size, int window_k, int band_count);

  int num_layers() const { return num_layers_; }
  int hidden_size() const { return hidden_size_; }
  int window_k() const { return window_k_; }
  int band_count() const { return band_count_; }

  /// Input normalization: count n -> (n - offset) / scale.
  double norm_offset() const { return norm_offset_; }
  double norm_scale() const { return norm_scale_; }
  double normalize(double count) const { return (count - norm_offset_) / norm_scale_; }
  double denormalize(double raw) const { return raw * norm_scale_ + norm_offset_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  // Offsets into the flat parameter vector.
  std::size_t wx_offset(int layer) const;
  std::size_t wh_offset(int layer) const;
  std::size_t bias_offset(int layer) const;
  std::size_t head_w_offset() const;
  std::size_t head_b_offset() const;
  int layer_input_size(int layer) const { return layer == 0 ? 1 : hidden_size_; }

  /// Seeded uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per tensor.
  void init_params(std::uint64_t seed);

private:
  int num_layers_ = 0;
  int hidden_size_ = 0;
  int window_k_ = 0;
  int band_count_ = 0;
  double norm_offset_ = 1.0;
  double norm_scale_ = 1.0;
  std::vector<double> params_;
};

/// Integer forecasts plus the raw regression outputs they were rounded from.
struct PredictionSeries {
  std::vector<int> counts;
  std::vector<double> raw;

  std::size_t size() const { return counts.size(); }
};

/// Per-epoch loss curve entry (RMSE in normalized units).
struct EpochLoss {
  double train_rmse = 0.0;
  std::optional<double> val_rmse;
};

struct TrainResult {
  LstmModel model;
  std::vector<EpochLoss> curve;
};

/// Sliding windows over a plan: sample i has input counts[i..i+k) and target
/// counts[i+k], all normalized by n -> (n-1)/(band_count-1). Throws if the
/// plan has no more than k entries.
Dataset make_windows(const BandPlan& plan, int window_k, int band_count);
Dataset make_windows(std::span<const int> counts, int window_k, int band_count);

/// Forward pass over one normalized window; returns the raw head output.
double forward(const LstmModel& model, std::span<const double> window);

/// Mini-batch BPTT with Adam (0.9/0.999, eps 1e-8), batch loss RMSE,
/// seeded init and per-epoch shuffle. Deterministic for a fixed seed.
TrainResult train(const Dataset& dataset, const Hyperparams& hp, int band_count);

/// Max over parameters of the relative difference between the BPTT gradient
/// of the squared error on one sample and a central finite difference.
double gradient_check(const LstmModel& model, std::span<const double> window,
                      double target, double step = 1e-5);

/// Denormalize, round half up, clamp to [1, band_count].
int to_band_count(double raw_output, const LstmModel& model);

/// Teacher-forced one-step-ahead forecasts. Prediction i targets position
/// |history| - horizon + 1 + i, reading its window from the true history;
/// the final prediction is the forecast of the value just past the end.
PredictionSeries predict_series(const LstmModel& model,
                                const BandPlan& history, int horizon);
PredictionSeries predict_series(const LstmModel& model,
                                std::span<const int> history, int horizon);

/// Persistence baseline under the same alignment: each prediction repeats
/// the value preceding its target.
PredictionSeries baseline_persistence(const BandPlan& history, int horizon);
PredictionSeries baseline_persistence(std::span<const int> history, int horizon);

/// Versioned JSON checkpoint holding hyperparameters, normalization
/// constants and the flat parameter vector (layout documented on LstmModel).
void save_checkpoint(const LstmModel& model, const Hyperparams& hp,
                     const std::string& path);
std::string checkpoint_to_json(const LstmModel& model, const Hyperparams& hp);
struct Checkpoint {
  LstmModel model;
  Hyperparams hp;
};
Checkpoint load_checkpoint(const std::string& path);
Checkpoint read_checkpoint(std::istream& in, const std::string& name = "<stream>");

}  // namespace bandsleep
