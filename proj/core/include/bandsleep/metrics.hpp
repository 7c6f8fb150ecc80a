#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bandsleep/lstm.hpp"
#include "bandsleep/planner.hpp"
#include "bandsleep/sim.hpp"

namespace bandsleep {

/// Forecast quality on integer band counts. rmse_raw is the same error
/// measured on the pre-rounding regression outputs.
struct MetricReport {
  double rmse = 0.0;
  double rmse_raw = 0.0;
  double accuracy = 0.0;           // fraction of exact matches
  double qos_preservation = 0.0;   // fraction with predicted >= required
  std::size_t n = 0;
};

/// Named per-band energy weights. Two presets ship for four-band cells:
/// "model1" (uniform) and "model2" (bandwidth-proportional 1/2/1.5/1.5).
struct EnergyModel {
  std::string name;
  std::vector<double> weights;
};

/// Sleep fractions and the weighted energy saving per model.
struct EnergyReport {
  std::vector<double> beta;  // per-band sleep fraction in [0,1]
  std::vector<std::pair<std::string, double>> rho_per_model;
};

/// Root mean squared error between predicted and actual band counts.
double rmse(std::span<const int> predicted, std::span<const int> actual);
double rmse(const PredictionSeries& predicted, const BandPlan& actual);

/// Fraction of exact matches.
double accuracy(std::span<const int> predicted, std::span<const int> actual);
double accuracy(const PredictionSeries& predicted, const BandPlan& actual);

/// Fraction of positions where the prediction covers the requirement.
double qos_preservation(std::span<const int> predicted, std::span<const int> actual);
double qos_preservation(const PredictionSeries& predicted, const BandPlan& actual);

/// Weighted sleep fraction: sum(beta_f * P_f) / sum(P_f).
double energy_saving(std::span<const double> beta, const EnergyModel& model);

/// The two standard consumption models for a 4-band cell; for other sizes
/// model1 stays uniform and model2 falls back to the cell's power weights.
std::vector<EnergyModel> energy_model_presets(const CellConfig& cell);

/// One (energy, delay) point of the energy-versus-delay trade-off.
struct TradeoffPoint {
  std::string strategy;  // "reference" or "predicted"
  std::string model;
  double relative_energy = 1.0;  // 1 - rho
  double avg_extra_delay_us = 0.0;
};

/// Everything the evaluation stage emits for one granularity: forecast
/// metrics, per-plan energy reports and the trade-off points.
struct CombinedReport {
  MetricReport metrics;
  EnergyReport reference_energy;
  EnergyReport predicted_energy;
  DelayReport reference_delay;
  DelayReport predicted_delay;
  std::vector<TradeoffPoint> tradeoff;
};

CombinedReport build_report(const BandPlan& ref_plan, const PredictionSeries& pred,
                            const DelayReport& delay_ref, const DelayReport& delay_pred,
                            const std::vector<EnergyModel>& models);

std::string combined_report_to_json(const CombinedReport& report);
void save_combined_report_json(const CombinedReport& report, const std::string& path);
void save_combined_report_csv(const CombinedReport& report, const std::string& path);

/// One row of the granularity sweep.
struct SweepRow {
  std::string granularity;
  std::uint64_t activation_ms = 0;
  std::vector<double> sleep_pct;  // reference plan, per band, percent
  double avg_sleep_pct = 0.0;
  std::vector<std::pair<std::string, double>> rho_per_model;
  double avg_extra_delay_us = 0.0;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, const CellConfig& cell,
                     std::ostream& out);

/// gnuplot-ready two-column data files: saving per granularity (bar chart)
/// and relative energy versus delay (scatter), one file per series.
void write_saving_dat(const std::vector<SweepRow>& rows, const std::string& model,
                      std::ostream& out);
void write_tradeoff_dat(const std::vector<SweepRow>& rows, const std::string& model,
                        std::ostream& out);

}  // namespace bandsleep
