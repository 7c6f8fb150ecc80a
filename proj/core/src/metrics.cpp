#include "bandsleep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"
#include "text_io.hpp"

namespace bandsleep {

namespace {

using nlohmann::json;

void check_pair(std::size_t predicted, std::size_t actual, const char* what) {
  if (predicted != actual) {
    throw ContractError(std::string(what) + ": predicted has " +
                        std::to_string(predicted) + " entries, actual has " +
                        std::to_string(actual));
  }
  if (actual == 0) {
    throw ValidationError(std::string(what) + ": empty series");
  }
}

double rmse_of_raw(std::span<const double> predicted, std::span<const int> actual) {
  check_pair(predicted.size(), actual.size(), "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = predicted[i] - static_cast<double>(actual[i]);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(actual.size()));
}

std::vector<double> sleep_beta(std::span<const int> counts, int band_count) {
  std::vector<double> beta(static_cast<std::size_t>(band_count), 0.0);
  if (counts.empty()) return beta;
  for (int n : counts) {
    for (int f = n + 1; f <= band_count; ++f) beta[static_cast<std::size_t>(f - 1)] += 1.0;
  }
  for (double& b : beta) b /= static_cast<double>(counts.size());
  return beta;
}

EnergyReport energy_report(std::span<const int> counts,
                           const std::vector<EnergyModel>& models, int band_count) {
  EnergyReport report;
  report.beta = sleep_beta(counts, band_count);
  report.rho_per_model.reserve(models.size());
  for (const EnergyModel& m : models) {
    report.rho_per_model.emplace_back(m.name, energy_saving(report.beta, m));
  }
  return report;
}

json energy_report_json(const EnergyReport& report) {
  json rho = json::object();
  for (const auto& [name, value] : report.rho_per_model) rho[name] = value;
  return json{{"beta", report.beta}, {"rho", rho}};
}

}  // namespace

double rmse(std::span<const int> predicted, std::span<const int> actual) {
  check_pair(predicted.size(), actual.size(), "rmse");
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = static_cast<double>(predicted[i]) - static_cast<double>(actual[i]);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(actual.size()));
}

double rmse(const PredictionSeries& predicted, const BandPlan& actual) {
  return rmse(std::span<const int>(predicted.counts), std::span<const int>(actual.counts));
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  check_pair(predicted.size(), actual.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i] == actual[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

double accuracy(const PredictionSeries& predicted, const BandPlan& actual) {
  return accuracy(std::span<const int>(predicted.counts),
                  std::span<const int>(actual.counts));
}

double qos_preservation(std::span<const int> predicted, std::span<const int> actual) {
  check_pair(predicted.size(), actual.size(), "qos_preservation");
  std::size_t covered = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i] >= actual[i]) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(actual.size());
}

double qos_preservation(const PredictionSeries& predicted, const BandPlan& actual) {
  return qos_preservation(std::span<const int>(predicted.counts),
                          std::span<const int>(actual.counts));
}

double energy_saving(std::span<const double> beta, const EnergyModel& model) {
  if (beta.size() != model.weights.size()) {
    throw ContractError("energy model '" + model.name + "' has " +
                        std::to_string(model.weights.size()) + " weights, beta has " +
                        std::to_string(beta.size()));
  }
  if (beta.empty()) throw ValidationError("energy_saving: empty beta");
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t f = 0; f < beta.size(); ++f) {
    if (!(beta[f] >= 0.0 && beta[f] <= 1.0)) {
      throw ValidationError("energy_saving: beta outside [0,1]");
    }
    if (!(model.weights[f] > 0.0)) {
      throw ValidationError("energy model '" + model.name + "': weights must be positive");
    }
    weighted += beta[f] * model.weights[f];
    total += model.weights[f];
  }
  return weighted / total;
}

std::vector<EnergyModel> energy_model_presets(const CellConfig& cell) {
  const auto bands = static_cast<std::size_t>(cell.band_count());
  std::vector<EnergyModel> models;
  models.push_back({"model1", std::vector<double>(bands, 1.0)});
  if (bands == 4) {
    models.push_back({"model2", {1.0, 2.0, 1.5, 1.5}});
  } else {
    std::vector<double> weights;
    weights.reserve(bands);
    for (const BandConfig& b : cell.bands()) weights.push_back(b.power_weight);
    models.push_back({"model2", std::move(weights)});
  }
  return models;
}

CombinedReport build_report(const BandPlan& ref_plan, const PredictionSeries& pred,
                            const DelayReport& delay_ref, const DelayReport& delay_pred,
                            const std::vector<EnergyModel>& models) {
  if (models.empty()) throw ContractError("build_report: no energy models");
  const auto band_count = static_cast<int>(models.front().weights.size());
  for (const EnergyModel& m : models) {
    if (static_cast<int>(m.weights.size()) != band_count) {
      throw ContractError("energy models disagree on band count");
    }
  }
  check_pair(pred.size(), ref_plan.counts.size(), "build_report");

  CombinedReport report;
  report.metrics.rmse = rmse(pred, ref_plan);
  report.metrics.rmse_raw =
      rmse_of_raw(std::span<const double>(pred.raw), std::span<const int>(ref_plan.counts));
  report.metrics.accuracy = accuracy(pred, ref_plan);
  report.metrics.qos_preservation = qos_preservation(pred, ref_plan);
  report.metrics.n = ref_plan.counts.size();

  report.reference_energy =
      energy_report(std::span<const int>(ref_plan.counts), models, band_count);
  report.predicted_energy =
      energy_report(std::span<const int>(pred.counts), models, band_count);
  report.reference_delay = delay_ref;
  report.predicted_delay = delay_pred;

  for (const auto& [strategy, energy, delay] :
       {std::tuple{"reference", &report.reference_energy, &report.reference_delay},
        std::tuple{"predicted", &report.predicted_energy, &report.predicted_delay}}) {
    for (const auto& [name, rho] : energy->rho_per_model) {
      report.tradeoff.push_back({strategy, name, 1.0 - rho, delay->avg_extra_delay_us});
    }
  }
  return report;
}

std::string combined_report_to_json(const CombinedReport& report) {
  json metrics{{"rmse", report.metrics.rmse},
               {"rmse_raw", report.metrics.rmse_raw},
               {"accuracy", report.metrics.accuracy},
               {"qos_preservation", report.metrics.qos_preservation},
               {"n", report.metrics.n}};
  json tradeoff = json::array();
  for (const TradeoffPoint& p : report.tradeoff) {
    tradeoff.push_back({{"strategy", p.strategy},
                        {"model", p.model},
                        {"relative_energy", p.relative_energy},
                        {"avg_extra_delay_us", p.avg_extra_delay_us}});
  }
  json j{{"metrics", metrics},
         {"reference_energy", energy_report_json(report.reference_energy)},
         {"predicted_energy", energy_report_json(report.predicted_energy)},
         {"reference_delay", json::parse(delay_report_to_json(report.reference_delay))},
         {"predicted_delay", json::parse(delay_report_to_json(report.predicted_delay))},
         {"tradeoff", tradeoff}};
  return j.dump(2) + "\n";
}

void save_combined_report_json(const CombinedReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report '" + path + "'");
  out << combined_report_to_json(report);
}

void save_combined_report_csv(const CombinedReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report '" + path + "'");
  out << "key,value\n";
  auto row = [&out](const std::string& key, double value) {
    out << key << ',' << detail::format_double(value) << '\n';
  };
  row("rmse", report.metrics.rmse);
  row("rmse_raw", report.metrics.rmse_raw);
  row("accuracy", report.metrics.accuracy);
  row("qos_preservation", report.metrics.qos_preservation);
  out << "n," << report.metrics.n << '\n';
  for (const auto& [name, rho] : report.reference_energy.rho_per_model) {
    row("rho_reference_" + name, rho);
  }
  for (const auto& [name, rho] : report.predicted_energy.rho_per_model) {
    row("rho_predicted_" + name, rho);
  }
  row("avg_extra_delay_us_reference", report.reference_delay.avg_extra_delay_us);
  row("avg_extra_delay_us_predicted", report.predicted_delay.avg_extra_delay_us);
  out << "delayed_prbs_reference," << report.reference_delay.delayed_prbs << '\n';
  out << "delayed_prbs_predicted," << report.predicted_delay.delayed_prbs << '\n';
  out << "max_delay_ms_reference," << report.reference_delay.max_delay_ms << '\n';
  out << "max_delay_ms_predicted," << report.predicted_delay.max_delay_ms << '\n';
  out << "residual_backlog_reference," << report.reference_delay.residual_backlog << '\n';
  out << "residual_backlog_predicted," << report.predicted_delay.residual_backlog << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const CellConfig& cell,
                     std::ostream& out) {
  out << "granularity,activation_ms";
  for (const BandConfig& b : cell.bands()) out << ",sleep_pct_" << b.label;
  out << ",avg_sleep_pct";
  if (!rows.empty()) {
    for (const auto& [name, rho] : rows.front().rho_per_model) out << ",rho_" << name;
  } else {
    for (const EnergyModel& m : energy_model_presets(cell)) out << ",rho_" << m.name;
  }
  out << ",avg_extra_delay_us\n";

  const auto bands = static_cast<std::size_t>(cell.band_count());
  for (const SweepRow& row : rows) {
    if (row.sleep_pct.size() != bands) {
      throw ContractError("sweep row '" + row.granularity + "' has " +
                          std::to_string(row.sleep_pct.size()) + " sleep entries for a " +
                          std::to_string(bands) + "-band cell");
    }
    out << row.granularity << ',' << row.activation_ms;
    for (double pct : row.sleep_pct) out << ',' << detail::format_double(pct);
    out << ',' << detail::format_double(row.avg_sleep_pct);
    for (const auto& [name, rho] : row.rho_per_model) {
      (void)name;
      out << ',' << detail::format_double(rho);
    }
    out << ',' << detail::format_double(row.avg_extra_delay_us) << '\n';
  }
}

namespace {

double rho_of(const SweepRow& row, const std::string& model) {
  for (const auto& [name, rho] : row.rho_per_model) {
    if (name == model) return rho;
  }
  throw ContractError("sweep row '" + row.granularity + "' has no energy model '" +
                      model + "'");
}

}  // namespace

void write_saving_dat(const std::vector<SweepRow>& rows, const std::string& model,
                      std::ostream& out) {
  out << "# granularity relative_energy\n";
  for (const SweepRow& row : rows) {
    out << row.granularity << ' ' << detail::format_double(1.0 - rho_of(row, model))
        << '\n';
  }
}

void write_tradeoff_dat(const std::vector<SweepRow>& rows, const std::string& model,
                        std::ostream& out) {
  out << "# avg_extra_delay_us relative_energy\n";
  for (const SweepRow& row : rows) {
    out << detail::format_double(row.avg_extra_delay_us) << ' '
        << detail::format_double(1.0 - rho_of(row, model)) << '\n';
  }
}

}  // namespace bandsleep
