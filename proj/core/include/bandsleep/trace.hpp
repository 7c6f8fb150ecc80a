#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bandsleep/cell.hpp"

namespace bandsleep {

/// Per-band PRB allocation of a single 1 ms TTI.
struct TtiLoad {
  std::uint64_t tti_index = 0;
  std::vector<std::uint32_t> allocated;  // one entry per band
};

/// A contiguous per-TTI allocation trace for one cell. TTIs run 0..size()-1
/// with no gaps; construction validates the per-band capacity caps.
/// Storage is flat (size() x F) to keep day-scale traces affordable.
class TraceSeries {
public:
  explicit TraceSeries(CellConfig cell);
  TraceSeries(CellConfig cell, std::vector<std::uint16_t> flat_allocated);

  const CellConfig& cell() const { return cell_; }
  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Allocation of band f (0-based) at TTI t.
  std::uint32_t allocated(std::uint64_t t, int f) const {
    return flat_[t * static_cast<std::uint64_t>(bands_) + static_cast<std::uint64_t>(f)];
  }
  /// All band allocations of TTI t.
  std::span<const std::uint16_t> tti(std::uint64_t t) const {
    return {flat_.data() + t * static_cast<std::uint64_t>(bands_),
            static_cast<std::size_t>(bands_)};
  }
  TtiLoad tti_load(std::uint64_t t) const;

  bool operator==(const TraceSeries& other) const {
    return size_ == other.size_ && flat_ == other.flat_;
  }

private:
  CellConfig cell_;
  int bands_ = 0;
  std::uint64_t size_ = 0;
  std::vector<std::uint16_t> flat_;
};

/// Total PRBs allocated across all bands per reallocation window.
struct WindowTotals {
  std::uint32_t window_ms = 0;        // window length in TTIs (= ms)
  std::vector<std::uint64_t> values;  // one total per window
  bool tail_padded = false;           // true if the trace did not fill the last window

  std::size_t size() const { return values.size(); }
};

/// Parse a trace CSV (header exactly `tti,band,prbs`) against a cell config.
/// Missing TTIs are materialized as all-zero rows; rows may appear in any
/// order. Errors carry the 1-based line number where applicable.
TraceSeries parse_trace(const std::string& path, const CellConfig& cell);
TraceSeries parse_trace(std::istream& in, const CellConfig& cell,
                        const std::string& name = "<stream>");

/// Write the trace as CSV. Canonical form (include_zero_rows = true) emits
/// every (tti, band) pair sorted by tti then band. Sparse form skips zero
/// allocations but always emits a band-1 row for the final TTI so the trace
/// length survives a round trip.
void write_trace_csv(const TraceSeries& trace, std::ostream& out,
                     bool include_zero_rows = true);

/// Sum allocations into reallocation-window totals (window = cell.realloc_ms()
/// TTIs). A trailing partial window is zero-padded and flagged.
WindowTotals aggregate_theta(const TraceSeries& trace);

/// Cell-wide allocation total per TTI.
std::vector<std::uint32_t> total_demand_per_tti(const TraceSeries& trace);

}  // namespace bandsleep
