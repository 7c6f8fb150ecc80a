#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bandsleep/cell.hpp"
#include "bandsleep/planner.hpp"
#include "bandsleep/synth.hpp"

namespace bandsleep {

/// Outcome of serving a demand trace with only the planned bands active.
struct DelayReport {
  std::vector<double> sleep_pct;        // per band, percent of time asleep
  double avg_extra_delay_us = 0.0;      // total delay / total demand, in us
  std::uint64_t total_prbs = 0;         // all PRBs that arrived
  std::uint64_t delayed_prbs = 0;       // served PRBs with delay >= 1 ms
  std::uint64_t max_delay_ms = 0;
  std::map<std::uint64_t, std::uint64_t> delay_histogram;  // delay_ms -> PRBs
  std::uint64_t residual_backlog = 0;   // PRBs unserved when the horizon ends
};

/// FIFO reallocation simulation. At each TTI the capacity is the prefix
/// capacity of the planned band count; backlog is served oldest-first before
/// current arrivals and carries across every period boundary. Each served
/// PRB contributes (service TTI - arrival TTI) ms of delay; PRBs still queued
/// at the horizon end are reported as residual backlog and contribute none.
/// The plan must cover the demand exactly: ceil(len / activation) periods.
DelayReport simulate(std::span<const std::uint32_t> demand, const BandPlan& plan,
                     const CellConfig& cell);

/// Same simulation over a synthetic profile slice [first_tti, first_tti+len),
/// with an O(1) fast path for seconds whose demand fits the active capacity.
DelayReport simulate(const SynthProfile& profile, std::uint64_t first_tti,
                     std::uint64_t len, const BandPlan& plan);

/// Percent of activation periods in which band f (1-based) is off, i.e. the
/// planned count is below f. Band 1 is never off. Empty plan gives zeros.
std::vector<double> sleep_percentages(const BandPlan& plan, int band_count);

/// Report JSON: {"sleep_pct":[...],"avg_extra_delay_us":...,"total_prbs":...,
/// "delayed_prbs":...,"max_delay_ms":...,"histogram":{"0":...,...},
/// "residual_backlog":...}
std::string delay_report_to_json(const DelayReport& report);
DelayReport delay_report_from_json(std::istream& in,
                                   const std::string& name = "<stream>");
void save_delay_report(const DelayReport& report, const std::string& path);

}  // namespace bandsleep
