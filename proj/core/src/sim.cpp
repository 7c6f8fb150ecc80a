#include "bandsleep/sim.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"

namespace bandsleep {

namespace {

using nlohmann::json;

// FIFO backlog and delay bookkeeping shared by both simulate() overloads.
struct SimState {
  std::deque<std::pair<std::uint64_t, std::uint64_t>> backlog;  // (arrival_tti, prbs)
  std::uint64_t backlog_size = 0;
  DelayReport report;
  double weighted_delay_ms = 0.0;

  void record_served(std::uint64_t delay_ms, std::uint64_t prbs) {
    report.delay_histogram[delay_ms] += prbs;
    if (delay_ms > 0) {
      report.delayed_prbs += prbs;
      weighted_delay_ms += static_cast<double>(delay_ms) * static_cast<double>(prbs);
      report.max_delay_ms = std::max(report.max_delay_ms, delay_ms);
    }
  }

  // One TTI: serve backlog oldest-first, then the TTI's own arrivals.
  void step(std::uint64_t t, std::uint32_t arrivals, std::uint64_t capacity) {
    std::uint64_t remaining = capacity;
    while (remaining > 0 && !backlog.empty()) {
      auto& [arrival, prbs] = backlog.front();
      const std::uint64_t served = std::min(remaining, prbs);
      record_served(t - arrival, served);
      remaining -= served;
      prbs -= served;
      backlog_size -= served;
      if (prbs == 0) backlog.pop_front();
    }
    std::uint64_t fresh = arrivals;
    if (remaining > 0 && fresh > 0) {
      const std::uint64_t served = std::min(remaining, fresh);
      record_served(0, served);
      fresh -= served;
    }
    if (fresh > 0) {
      backlog.emplace_back(t, fresh);
      backlog_size += fresh;
    }
  }

  DelayReport finish(const BandPlan& plan, int band_count) {
    report.residual_backlog = backlog_size;
    report.avg_extra_delay_us =
        report.total_prbs == 0
            ? 0.0
            : 1000.0 * weighted_delay_ms / static_cast<double>(report.total_prbs);
    report.sleep_pct = sleep_percentages(plan, band_count);
    return std::move(report);
  }
};

void check_plan_covers(std::uint64_t len, const BandPlan& plan) {
  const std::uint64_t activation = plan.activation_ms;
  if (activation == 0) throw ContractError("plan has zero activation period");
  const std::uint64_t needed = (len + activation - 1) / activation;
  if (needed != plan.counts.size()) {
    throw ContractError("plan has " + std::to_string(plan.counts.size()) +
                        " periods but the demand spans " + std::to_string(needed));
  }
}

std::uint64_t capacity_of(const BandPlan& plan, std::uint64_t period,
                          const CellConfig& cell) {
  const int n = plan.counts[static_cast<std::size_t>(period)];
  if (n < 1 || n > cell.band_count()) {
    throw ContractError("plan period " + std::to_string(period) +
                        " requests " + std::to_string(n) + " bands");
  }
  return cell.prefix_capacity(n);
}

}  // namespace

DelayReport simulate(std::span<const std::uint32_t> demand, const BandPlan& plan,
                     const CellConfig& cell) {
  check_plan_covers(demand.size(), plan);
  SimState state;
  const std::uint64_t activation = plan.activation_ms;
  std::uint64_t capacity = 0;
  for (std::uint64_t t = 0; t < demand.size(); ++t) {
    if (t % activation == 0) capacity = capacity_of(plan, t / activation, cell);
    state.report.total_prbs += demand[t];
    state.step(t, demand[t], capacity);
  }
  return state.finish(plan, cell.band_count());
}

DelayReport simulate(const SynthProfile& profile, std::uint64_t first_tti,
                     std::uint64_t len, const BandPlan& plan) {
  const CellConfig& cell = profile.cell();
  if (first_tti + len > profile.tti_count()) {
    throw ContractError("simulation range extends past the profile");
  }
  check_plan_covers(len, plan);
  const std::uint64_t activation = plan.activation_ms;

  SimState state;
  std::uint64_t t = first_tti;
  const std::uint64_t end = first_tti + len;
  while (t < end) {
    const std::uint64_t sec = t / 1000;
    const std::uint64_t sec_end = std::min(end, (sec + 1) * 1000);
    const SynthProfile::Second& s = profile.seconds()[sec];
    const std::uint32_t q = s.prbs_total / 1000;
    const std::uint32_t r = s.prbs_total % 1000;

    // Whole in-range second with an empty queue: if the worst-case TTI fits
    // the smallest capacity it touches, every PRB is served on arrival.
    if (state.backlog_size == 0 && t % 1000 == 0 && sec_end - t == 1000) {
      const std::uint64_t first_period = (t - first_tti) / activation;
      const std::uint64_t last_period = (sec_end - 1 - first_tti) / activation;
      std::uint64_t min_capacity = capacity_of(plan, first_period, cell);
      for (std::uint64_t p = first_period + 1; p <= last_period; ++p) {
        min_capacity = std::min(min_capacity, capacity_of(plan, p, cell));
      }
      if (q + (r > 0 ? 1 : 0) <= min_capacity) {
        state.report.total_prbs += s.prbs_total;
        state.report.delay_histogram[0] += s.prbs_total;
        t = sec_end;
        continue;
      }
    }

    for (; t < sec_end; ++t) {
      const std::uint32_t arrivals = profile.demand_at(t);
      const std::uint64_t capacity = capacity_of(plan, (t - first_tti) / activation, cell);
      state.report.total_prbs += arrivals;
      state.step(t - first_tti, arrivals, capacity);
    }
  }
  return state.finish(plan, cell.band_count());
}

std::vector<double> sleep_percentages(const BandPlan& plan, int band_count) {
  std::vector<double> pct(static_cast<std::size_t>(band_count), 0.0);
  if (plan.counts.empty()) return pct;
  std::vector<std::uint64_t> asleep(static_cast<std::size_t>(band_count), 0);
  for (int n : plan.counts) {
    for (int f = n + 1; f <= band_count; ++f) ++asleep[static_cast<std::size_t>(f - 1)];
  }
  for (int f = 0; f < band_count; ++f) {
    pct[static_cast<std::size_t>(f)] = 100.0 * static_cast<double>(asleep[static_cast<std::size_t>(f)]) /
                                       static_cast<double>(plan.counts.size());
  }
  return pct;
}

std::string delay_report_to_json(const DelayReport& report) {
  json hist = json::object();
  for (const auto& [delay_ms, prbs] : report.delay_histogram) {
    hist[std::to_string(delay_ms)] = prbs;
  }
  json j{{"sleep_pct", report.sleep_pct},
         {"avg_extra_delay_us", report.avg_extra_delay_us},
         {"total_prbs", report.total_prbs},
         {"delayed_prbs", report.delayed_prbs},
         {"max_delay_ms", report.max_delay_ms},
         {"histogram", hist},
         {"residual_backlog", report.residual_backlog}};
  return j.dump(2) + "\n";
}

DelayReport delay_report_from_json(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(name + ": invalid delay report JSON: " + e.what());
  }
  try {
    DelayReport report;
    report.sleep_pct = j.at("sleep_pct").get<std::vector<double>>();
    report.avg_extra_delay_us = j.at("avg_extra_delay_us").get<double>();
    report.total_prbs = j.at("total_prbs").get<std::uint64_t>();
    report.delayed_prbs = j.at("delayed_prbs").get<std::uint64_t>();
    report.max_delay_ms = j.at("max_delay_ms").get<std::uint64_t>();
    report.residual_backlog = j.at("residual_backlog").get<std::uint64_t>();
    for (const auto& [key, value] : j.at("histogram").items()) {
      report.delay_histogram[std::stoull(key)] = value.get<std::uint64_t>();
    }
    return report;
  } catch (const json::exception& e) {
    throw ParseError(name + ": delay report missing or mistyped field: " + e.what());
  } catch (const std::exception& e) {
    throw ParseError(name + ": delay report histogram key: " + e.what());
  }
}

void save_delay_report(const DelayReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write delay report '" + path + "'");
  out << delay_report_to_json(report);
}

}  // namespace bandsleep
