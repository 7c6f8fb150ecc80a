#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bandsleep/cell.hpp"
#include "bandsleep/synth.hpp"
#include "bandsleep/trace.hpp"

namespace bandsleep {

/// Activation thresholds: entry j-1 is the window capacity of the lowest j
/// bands (realloc_ms * sum of their per-TTI PRBs), for j = 1..F-1. A window
/// total at or below entry j-1 fits in j bands.
struct Thresholds {
  std::vector<std::uint64_t> values;
};

/// Required-band counts, one per activation period.
struct BandPlan {
  std::uint64_t activation_ms = 0;
  std::vector<int> counts;
  bool tail_padded = false;  // true if the input did not fill the last period

  std::size_t size() const { return counts.size(); }
};

/// Window capacities of the band prefixes (empty list for a 1-band cell).
Thresholds thresholds(const CellConfig& cell);

/// Bands needed to carry `window_total` PRBs in one reallocation window:
/// 1 if it fits the lowest band, j if it fits the lowest j but not j-1
/// (upper bounds inclusive), F otherwise. Throws ContractError if the total
/// exceeds full-cell window capacity.
int bands_required(std::uint64_t window_total, const Thresholds& th,
                   const CellConfig& cell);

/// Reference plan: per activation period, the max of bands_required over the
/// period's reallocation windows. A trailing partial period is planned from
/// its available windows and flagged.
BandPlan plan_reference(const WindowTotals& totals, const CellConfig& cell);

/// Same, computed directly from a synthetic profile without materializing
/// window totals (used for multi-day runs).
BandPlan plan_reference(const SynthProfile& profile);

/// Single-pass reference plan over a trace CSV stream. Rows must be sorted
/// by non-decreasing tti (the trace writers emit them that way); memory use
/// is independent of the trace length, so piped multi-day traces work.
BandPlan plan_from_trace_csv(std::istream& in, const CellConfig& cell,
                             const std::string& name = "<stream>");

/// Plan CSV, header `period_index,n_bands`.
void write_plan_csv(const BandPlan& plan, std::ostream& out);
BandPlan read_plan_csv(std::istream& in, std::uint64_t activation_ms, int band_count,
                       const std::string& name = "<stream>");
BandPlan load_plan_csv(const std::string& path, std::uint64_t activation_ms,
                       int band_count);
void save_plan_csv(const BandPlan& plan, const std::string& path);

}  // namespace bandsleep
