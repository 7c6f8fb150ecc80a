#include "bandsleep/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"

namespace bandsleep {

namespace {

using nlohmann::json;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Activations and states of one forward pass, kept for backpropagation.
// gates holds post-activation (i, f, g, o) rows; indices run [t][layer].
struct ForwardCache {
  std::vector<double> gates;   // k * L * 4H
  std::vector<double> cells;   // k * L * H
  std::vector<double> hidden;  // k * L * H
  double output = 0.0;

  void resize(int k, int layers, int hidden_size) {
    const std::size_t kl = static_cast<std::size_t>(k) * static_cast<std::size_t>(layers);
    gates.assign(kl * 4 * static_cast<std::size_t>(hidden_size), 0.0);
    cells.assign(kl * static_cast<std::size_t>(hidden_size), 0.0);
    hidden.assign(kl * static_cast<std::size_t>(hidden_size), 0.0);
  }
};

void check_window(const LstmModel& model, std::span<const double> window) {
  if (static_cast<int>(window.size()) != model.window_k()) {
    throw ContractError("window has " + std::to_string(window.size()) +
                        " entries, model expects " + std::to_string(model.window_k()));
  }
}

double forward_cached(const LstmModel& model, std::span<const double> window,
                      ForwardCache& cache) {
  check_window(model, window);
  const int L = model.num_layers();
  const int H = model.hidden_size();
  const int k = model.window_k();
  cache.resize(k, L, H);

  const double* params = model.params().data();
  for (int t = 0; t < k; ++t) {
    for (int l = 0; l < L; ++l) {
      const int in_size = model.layer_input_size(l);
      const double* wx = params + model.wx_offset(l);
      const double* wh = params + model.wh_offset(l);
      const double* b = params + model.bias_offset(l);
      const double* x =
          l == 0 ? &window[static_cast<std::size_t>(t)]
                 : &cache.hidden[(static_cast<std::size_t>(t) * L + (l - 1)) *
                                 static_cast<std::size_t>(H)];
      const double* h_prev =
          t == 0 ? nullptr
                 : &cache.hidden[(static_cast<std::size_t>(t - 1) * L + l) *
                                 static_cast<std::size_t>(H)];
      const double* c_prev =
          t == 0 ? nullptr
                 : &cache.cells[(static_cast<std::size_t>(t - 1) * L + l) *
                                static_cast<std::size_t>(H)];
      double* gates =
          &cache.gates[(static_cast<std::size_t>(t) * L + l) * 4 *
                       static_cast<std::size_t>(H)];
      double* c = &cache.cells[(static_cast<std::size_t>(t) * L + l) *
                               static_cast<std::size_t>(H)];
      double* h = &cache.hidden[(static_cast<std::size_t>(t) * L + l) *
                                static_cast<std::size_t>(H)];

      // Pre-activations a_r = b_r + Wx[r,:] x + Wh[r,:] h_prev.
      for (int r = 0; r < 4 * H; ++r) {
        double a = b[r];
        const double* wx_row = wx + static_cast<std::size_t>(r) * in_size;
        for (int col = 0; col < in_size; ++col) a += wx_row[col] * x[col];
        if (h_prev != nullptr) {
          const double* wh_row = wh + static_cast<std::size_t>(r) * H;
          for (int col = 0; col < H; ++col) a += wh_row[col] * h_prev[col];
        }
        gates[r] = a;
      }
      for (int j = 0; j < H; ++j) {
        const double i = sigmoid(gates[j]);
        const double f = sigmoid(gates[H + j]);
        const double g = std::tanh(gates[2 * H + j]);
        const double o = sigmoid(gates[3 * H + j]);
        gates[j] = i;
        gates[H + j] = f;
        gates[2 * H + j] = g;
        gates[3 * H + j] = o;
        const double cp = c_prev == nullptr ? 0.0 : c_prev[j];
        c[j] = f * cp + i * g;
        h[j] = o * std::tanh(c[j]);
      }
    }
  }

  const double* head_w = params + model.head_w_offset();
  const double* h_top = &cache.hidden[(static_cast<std::size_t>(k - 1) * L + (L - 1)) *
                                      static_cast<std::size_t>(H)];
  double y = params[model.head_b_offset()];
  for (int j = 0; j < H; ++j) y += head_w[j] * h_top[j];
  if (!std::isfinite(y)) throw NumericError("non-finite forward output");
  cache.output = y;
  return y;
}

// Accumulates d(loss)/d(params) into `grad` for one sample, given
// dy = d(loss)/d(output). Layers unroll top to bottom over the full window.
void backward(const LstmModel& model, std::span<const double> window,
              const ForwardCache& cache, double dy, std::vector<double>& grad,
              std::vector<double>& dh_acc) {
  const int L = model.num_layers();
  const int H = model.hidden_size();
  const int k = model.window_k();
  const double* params = model.params().data();

  dh_acc.assign(static_cast<std::size_t>(k) * L * H, 0.0);
  auto dh_at = [&](int t, int l) {
    return &dh_acc[(static_cast<std::size_t>(t) * L + l) * static_cast<std::size_t>(H)];
  };
  auto hidden_at = [&](int t, int l) {
    return &cache.hidden[(static_cast<std::size_t>(t) * L + l) *
                         static_cast<std::size_t>(H)];
  };
  auto cells_at = [&](int t, int l) {
    return &cache.cells[(static_cast<std::size_t>(t) * L + l) *
                        static_cast<std::size_t>(H)];
  };

  // Dense head.
  {
    const double* h_top = hidden_at(k - 1, L - 1);
    double* dhead_w = grad.data() + model.head_w_offset();
    const double* head_w = params + model.head_w_offset();
    double* dh = dh_at(k - 1, L - 1);
    for (int j = 0; j < H; ++j) {
      dhead_w[j] += dy * h_top[j];
      dh[j] += dy * head_w[j];
    }
    grad[model.head_b_offset()] += dy;
  }

  std::vector<double> dc(static_cast<std::size_t>(H));
  std::vector<double> da(static_cast<std::size_t>(4) * H);
  for (int l = L - 1; l >= 0; --l) {
    const int in_size = model.layer_input_size(l);
    const double* wx = params + model.wx_offset(l);
    const double* wh = params + model.wh_offset(l);
    double* dwx = grad.data() + model.wx_offset(l);
    double* dwh = grad.data() + model.wh_offset(l);
    double* db = grad.data() + model.bias_offset(l);
    std::fill(dc.begin(), dc.end(), 0.0);

    for (int t = k - 1; t >= 0; --t) {
      const double* gates = &cache.gates[(static_cast<std::size_t>(t) * L + l) * 4 *
                                         static_cast<std::size_t>(H)];
      const double* c = cells_at(t, l);
      const double* c_prev = t == 0 ? nullptr : cells_at(t - 1, l);
      const double* h_prev = t == 0 ? nullptr : hidden_at(t - 1, l);
      const double* x = l == 0 ? &window[static_cast<std::size_t>(t)]
                               : hidden_at(t, l - 1);
      const double* dh = dh_at(t, l);

      for (int j = 0; j < H; ++j) {
        const double i = gates[j];
        const double f = gates[H + j];
        const double g = gates[2 * H + j];
        const double o = gates[3 * H + j];
        const double tc = std::tanh(c[j]);
        const double cp = c_prev == nullptr ? 0.0 : c_prev[j];

        const double dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
        da[j] = dcj * g * i * (1.0 - i);                       // input gate
        da[H + j] = dcj * cp * f * (1.0 - f);                  // forget gate
        da[2 * H + j] = dcj * i * (1.0 - g * g);               // candidate
        da[3 * H + j] = dh[j] * tc * o * (1.0 - o);            // output gate
        dc[j] = dcj * f;                                       // flows to t-1
      }

      for (int r = 0; r < 4 * H; ++r) {
        const double dar = da[r];
        if (dar == 0.0) continue;
        double* dwx_row = dwx + static_cast<std::size_t>(r) * in_size;
        for (int col = 0; col < in_size; ++col) dwx_row[col] += dar * x[col];
        if (h_prev != nullptr) {
          double* dwh_row = dwh + static_cast<std::size_t>(r) * H;
          for (int col = 0; col < H; ++col) dwh_row[col] += dar * h_prev[col];
        }
        db[r] += dar;
      }

      if (l > 0) {
        double* dx = dh_at(t, l - 1);
        for (int r = 0; r < 4 * H; ++r) {
          const double dar = da[r];
          if (dar == 0.0) continue;
          const double* wx_row = wx + static_cast<std::size_t>(r) * in_size;
          for (int col = 0; col < in_size; ++col) dx[col] += dar * wx_row[col];
        }
      }
      if (t > 0) {
        double* dhp = dh_at(t - 1, l);
        for (int r = 0; r < 4 * H; ++r) {
          const double dar = da[r];
          if (dar == 0.0) continue;
          const double* wh_row = wh + static_cast<std::size_t>(r) * H;
          for (int col = 0; col < H; ++col) dhp[col] += dar * wh_row[col];
        }
      }
    }
  }
}

int round_clamp(double denormalized, int band_count) {
  const double rounded = std::floor(denormalized + 0.5);  // half up, also for negatives
  if (rounded < 1.0) return 1;
  if (rounded > static_cast<double>(band_count)) return band_count;
  return static_cast<int>(rounded);
}

void validate_hyperparams(const Hyperparams& hp) {
  if (!(hp.learning_rate > 0.0) || !std::isfinite(hp.learning_rate)) {
    throw ValidationError("hyperparams: learning_rate must be positive and finite");
  }
  if (hp.hidden_size < 1) throw ValidationError("hyperparams: hidden_size must be >= 1");
  if (hp.num_layers < 1) throw ValidationError("hyperparams: num_layers must be >= 1");
  if (hp.batch_size < 1) throw ValidationError("hyperparams: batch_size must be >= 1");
  if (hp.window_k < 1) throw ValidationError("hyperparams: window_k must be >= 1");
  if (!(hp.val_fraction >= 0.0 && hp.val_fraction < 1.0)) {
    throw ValidationError("hyperparams: val_fraction must be in [0,1)");
  }
}

}  // namespace

LstmModel::LstmModel(int num_layers, int hidden_size, int window_k, int band_count)
    : num_layers_(num_layers),
      hidden_size_(hidden_size),
      window_k_(window_k),
      band_count_(band_count) {
  if (num_layers < 1) throw ValidationError("model: num_layers must be >= 1");
  if (hidden_size < 1) throw ValidationError("model: hidden_size must be >= 1");
  if (window_k < 1) throw ValidationError("model: window_k must be >= 1");
  if (band_count < 1) throw ValidationError("model: band_count must be >= 1");
  norm_offset_ = 1.0;
  norm_scale_ = std::max(band_count - 1, 1);
  params_.assign(head_b_offset() + 1, 0.0);
}

std::size_t LstmModel::wx_offset(int layer) const {
  std::size_t off = 0;
  const auto h = static_cast<std::size_t>(hidden_size_);
  for (int l = 0; l < layer; ++l) {
    off += 4 * h * static_cast<std::size_t>(layer_input_size(l)) + 4 * h * h + 4 * h;
  }
  return off;
}

std::size_t LstmModel::wh_offset(int layer) const {
  return wx_offset(layer) + 4 * static_cast<std::size_t>(hidden_size_) *
                                static_cast<std::size_t>(layer_input_size(layer));
}

std::size_t LstmModel::bias_offset(int layer) const {
  const auto h = static_cast<std::size_t>(hidden_size_);
  return wh_offset(layer) + 4 * h * h;
}

std::size_t LstmModel::head_w_offset() const {
  return wx_offset(num_layers_);  // one past the last layer block
}

std::size_t LstmModel::head_b_offset() const {
  return head_w_offset() + static_cast<std::size_t>(hidden_size_);
}

void LstmModel::init_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill = [&rng, this](std::size_t offset, std::size_t count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < count; ++i) {
      params_[offset + i] = (2.0 * next_unit(rng) - 1.0) * bound;
    }
  };
  const auto h = static_cast<std::size_t>(hidden_size_);
  for (int l = 0; l < num_layers_; ++l) {
    const int in_size = layer_input_size(l);
    fill(wx_offset(l), 4 * h * static_cast<std::size_t>(in_size), in_size);
    fill(wh_offset(l), 4 * h * h, hidden_size_);
    fill(bias_offset(l), 4 * h, hidden_size_);
  }
  fill(head_w_offset(), h, hidden_size_);
  fill(head_b_offset(), 1, hidden_size_);
}

Dataset make_windows(const BandPlan& plan, int window_k, int band_count) {
  return make_windows(std::span<const int>(plan.counts), window_k, band_count);
}

Dataset make_windows(std::span<const int> counts, int window_k, int band_count) {
  if (window_k < 1) throw ValidationError("make_windows: window_k must be >= 1");
  if (band_count < 1) throw ValidationError("make_windows: band_count must be >= 1");
  if (counts.size() <= static_cast<std::size_t>(window_k)) {
    throw ValidationError("insufficient history: " + std::to_string(counts.size()) +
                          " counts for window_k " + std::to_string(window_k));
  }
  const double scale = std::max(band_count - 1, 1);
  auto norm = [scale](int n) { return (static_cast<double>(n) - 1.0) / scale; };
  for (int n : counts) {
    if (n < 1 || n > band_count) {
      throw ValidationError("make_windows: count " + std::to_string(n) +
                            " outside [1, " + std::to_string(band_count) + "]");
    }
  }

  Dataset ds;
  const std::size_t samples = counts.size() - static_cast<std::size_t>(window_k);
  ds.inputs.reserve(samples);
  ds.targets.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> window(static_cast<std::size_t>(window_k));
    for (int j = 0; j < window_k; ++j) {
      window[static_cast<std::size_t>(j)] = norm(counts[i + static_cast<std::size_t>(j)]);
    }
    ds.inputs.push_back(std::move(window));
    ds.targets.push_back(norm(counts[i + static_cast<std::size_t>(window_k)]));
  }
  return ds;
}

double forward(const LstmModel& model, std::span<const double> window) {
  ForwardCache cache;
  return forward_cached(model, window, cache);
}

TrainResult train(const Dataset& dataset, const Hyperparams& hp, int band_count) {
  validate_hyperparams(hp);
  if (dataset.size() == 0) throw ValidationError("train: empty dataset");
  if (dataset.inputs.size() != dataset.targets.size()) {
    throw ContractError("train: inputs/targets size mismatch");
  }
  for (const auto& window : dataset.inputs) {
    if (static_cast<int>(window.size()) != hp.window_k) {
      throw ContractError("train: window length differs from hyperparams window_k");
    }
  }

  TrainResult result;
  result.model = LstmModel(hp.num_layers, hp.hidden_size, hp.window_k, band_count);
  result.model.init_params(hp.seed);
  LstmModel& model = result.model;

  const std::size_t n = dataset.size();
  const auto n_val = static_cast<std::size_t>(static_cast<double>(n) * hp.val_fraction);
  const std::size_t n_train = n - n_val;
  if (n_train == 0) {
    throw ValidationError("train: validation split leaves no training samples");
  }

  const std::size_t p = model.param_count();
  std::vector<double> grad(p, 0.0);
  std::vector<double> m(p, 0.0);
  std::vector<double> v(p, 0.0);
  std::vector<double> dh_acc;
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::uint64_t step = 0;

  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Hand-rolled Fisher-Yates: std::shuffle's draw pattern is
  // implementation-defined, which would break cross-platform determinism.
  std::mt19937_64 shuffle_rng(hp.seed ^ 0x9E3779B97F4A7C15ull);

  std::vector<ForwardCache> caches(std::min<std::size_t>(hp.batch_size, n_train));
  std::vector<double> residuals(caches.size());

  result.curve.reserve(hp.epochs);
  for (std::uint32_t epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const std::size_t j = shuffle_rng() % (i + 1);
      std::swap(order[i], order[j]);
    }

    double epoch_sq = 0.0;
    for (std::size_t start = 0; start < n_train; start += hp.batch_size) {
      const std::size_t batch = std::min<std::size_t>(hp.batch_size, n_train - start);
      double batch_sq = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = order[start + b];
        double y = 0.0;
        try {
          y = forward_cached(model, dataset.inputs[idx], caches[b]);
        } catch (const NumericError&) {
          throw TrainingError("training diverged at epoch " + std::to_string(epoch));
        }
        residuals[b] = y - dataset.targets[idx];
        batch_sq += residuals[b] * residuals[b];
      }
      epoch_sq += batch_sq;
      const double batch_rmse = std::sqrt(batch_sq / static_cast<double>(batch));
      if (!std::isfinite(batch_rmse)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch));
      }

      std::fill(grad.begin(), grad.end(), 0.0);
      const double denom =
          static_cast<double>(batch) * std::max(batch_rmse, 1e-12);
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = order[start + b];
        backward(model, dataset.inputs[idx], caches[b], residuals[b] / denom, grad,
                 dh_acc);
      }

      ++step;
      const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      double* params = model.params().data();
      for (std::size_t i = 0; i < p; ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        params[i] -= hp.learning_rate * (m[i] / corr1) / (std::sqrt(v[i] / corr2) + kEps);
      }
    }

    EpochLoss loss;
    loss.train_rmse = std::sqrt(epoch_sq / static_cast<double>(n_train));
    if (n_val > 0) {
      double val_sq = 0.0;
      try {
        for (std::size_t i = n_train; i < n; ++i) {
          const double y = forward(model, dataset.inputs[i]);
          const double r = y - dataset.targets[i];
          val_sq += r * r;
        }
      } catch (const NumericError&) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch));
      }
      loss.val_rmse = std::sqrt(val_sq / static_cast<double>(n_val));
    }
    if (!std::isfinite(loss.train_rmse) ||
        (loss.val_rmse && !std::isfinite(*loss.val_rmse))) {
      throw TrainingError("training diverged at epoch " + std::to_string(epoch));
    }
    result.curve.push_back(loss);
  }
  return result;
}

double gradient_check(const LstmModel& model, std::span<const double> window,
                      double target, double step) {
  LstmModel probe = model;
  ForwardCache cache;
  const double y = forward_cached(probe, window, cache);

  std::vector<double> grad(probe.param_count(), 0.0);
  std::vector<double> dh_acc;
  backward(probe, window, cache, 2.0 * (y - target), grad, dh_acc);

  auto loss_at = [&probe, &window, &cache, target]() {
    const double out = forward_cached(probe, window, cache);
    return (out - target) * (out - target);
  };

  double worst = 0.0;
  double* params = probe.params().data();
  for (std::size_t i = 0; i < probe.param_count(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const double up = loss_at();
    params[i] = saved - step;
    const double down = loss_at();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(grad[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(grad[i] - numeric) / denom);
  }
  return worst;
}

int to_band_count(double raw_output, const LstmModel& model) {
  return round_clamp(model.denormalize(raw_output), model.band_count());
}

PredictionSeries predict_series(const LstmModel& model, const BandPlan& history,
                                int horizon) {
  return predict_series(model, std::span<const int>(history.counts), horizon);
}

PredictionSeries predict_series(const LstmModel& model, std::span<const int> history,
                                int horizon) {
  if (horizon < 1) throw ValidationError("predict_series: horizon must be >= 1");
  const int k = model.window_k();
  const auto len = static_cast<std::size_t>(history.size());
  if (len + 1 < static_cast<std::size_t>(k) + static_cast<std::size_t>(horizon)) {
    throw ValidationError("insufficient history: need at least window_k + horizon - 1 = " +
                          std::to_string(k + horizon - 1) + " values, got " +
                          std::to_string(len));
  }

  PredictionSeries series;
  series.counts.reserve(static_cast<std::size_t>(horizon));
  series.raw.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> window(static_cast<std::size_t>(k));
  ForwardCache cache;
  // Prediction i targets position len - horizon + 1 + i; its window is the
  // k true values preceding the target.
  for (int i = 0; i < horizon; ++i) {
    const std::size_t target = len - static_cast<std::size_t>(horizon) + 1 +
                               static_cast<std::size_t>(i);
    for (int j = 0; j < k; ++j) {
      const int count = history[target - static_cast<std::size_t>(k) +
                                static_cast<std::size_t>(j)];
      window[static_cast<std::size_t>(j)] = model.normalize(count);
    }
    const double denormalized = model.denormalize(forward_cached(model, window, cache));
    series.raw.push_back(denormalized);
    series.counts.push_back(round_clamp(denormalized, model.band_count()));
  }
  return series;
}

PredictionSeries baseline_persistence(const BandPlan& history, int horizon) {
  return baseline_persistence(std::span<const int>(history.counts), horizon);
}

PredictionSeries baseline_persistence(std::span<const int> history, int horizon) {
  if (horizon < 1) throw ValidationError("baseline_persistence: horizon must be >= 1");
  const auto len = static_cast<std::size_t>(history.size());
  if (len < static_cast<std::size_t>(horizon)) {
    throw ValidationError("insufficient history: need at least horizon = " +
                          std::to_string(horizon) + " values, got " +
                          std::to_string(len));
  }
  PredictionSeries series;
  series.counts.reserve(static_cast<std::size_t>(horizon));
  series.raw.reserve(static_cast<std::size_t>(horizon));
  for (int i = 0; i < horizon; ++i) {
    const std::size_t target = len - static_cast<std::size_t>(horizon) + 1 +
                               static_cast<std::size_t>(i);
    const int value = history[target - 1];
    series.counts.push_back(value);
    series.raw.push_back(static_cast<double>(value));
  }
  return series;
}

namespace {

json hyperparams_to_json(const Hyperparams& hp) {
  return json{{"learning_rate", hp.learning_rate},
              {"epochs", hp.epochs},
              {"hidden_size", hp.hidden_size},
              {"num_layers", hp.num_layers},
              {"batch_size", hp.batch_size},
              {"window_k", hp.window_k},
              {"val_fraction", hp.val_fraction},
              {"seed", hp.seed}};
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams hp;
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.epochs = j.at("epochs").get<std::uint32_t>();
  hp.hidden_size = j.at("hidden_size").get<int>();
  hp.num_layers = j.at("num_layers").get<int>();
  hp.batch_size = j.at("batch_size").get<std::uint32_t>();
  hp.window_k = j.at("window_k").get<int>();
  hp.val_fraction = j.at("val_fraction").get<double>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

constexpr const char* kCheckpointFormat = "bandsleep-checkpoint";
constexpr int kCheckpointVersion = 1;

}  // namespace

std::string checkpoint_to_json(const LstmModel& model, const Hyperparams& hp) {
  json j{{"format", kCheckpointFormat},
         {"version", kCheckpointVersion},
         {"num_layers", model.num_layers()},
         {"hidden_size", model.hidden_size()},
         {"window_k", model.window_k()},
         {"band_count", model.band_count()},
         {"norm_offset", model.norm_offset()},
         {"norm_scale", model.norm_scale()},
         {"hyperparams", hyperparams_to_json(hp)},
         {"params", std::vector<double>(model.params().begin(), model.params().end())}};
  return j.dump(2) + "\n";
}

void save_checkpoint(const LstmModel& model, const Hyperparams& hp,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_json(model, hp);
}

Checkpoint read_checkpoint(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(name + ": invalid checkpoint JSON: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw ParseError(name + ": not a model checkpoint");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError(name + ": unsupported checkpoint version " +
                       j.at("version").dump());
    }
    Checkpoint ck;
    ck.hp = hyperparams_from_json(j.at("hyperparams"));
    ck.model = LstmModel(j.at("num_layers").get<int>(), j.at("hidden_size").get<int>(),
                         j.at("window_k").get<int>(), j.at("band_count").get<int>());
    if (j.at("norm_offset").get<double>() != ck.model.norm_offset() ||
        j.at("norm_scale").get<double>() != ck.model.norm_scale()) {
      throw ParseError(name + ": normalization constants do not match band_count");
    }
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != ck.model.param_count()) {
      throw ParseError(name + ": checkpoint has " + std::to_string(params.size()) +
                       " parameters, model needs " +
                       std::to_string(ck.model.param_count()));
    }
    std::copy(params.begin(), params.end(), ck.model.params().begin());
    for (double value : ck.model.params()) {
      if (!std::isfinite(value)) {
        throw ParseError(name + ": checkpoint contains non-finite parameters");
      }
    }
    return ck;
  } catch (const json::exception& e) {
    throw ParseError(name + ": checkpoint missing or mistyped field: " + e.what());
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in, path);
}

}  // namespace bandsleep
