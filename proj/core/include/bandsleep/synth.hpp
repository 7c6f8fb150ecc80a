#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bandsleep/cell.hpp"
#include "bandsleep/trace.hpp"

namespace bandsleep {

/// Parameters of the seeded synthetic trace generator. Loads are fractions
/// of total cell capacity; the diurnal shape is
///   trough + (peak - trough)/2 * (1 - cos(2*pi*hour/24))
/// with Poisson-arrival bursts multiplying demand by burst_scale.
struct SynthParams {
  std::uint32_t days = 1;
  double peak_load = 0.9;
  double trough_load = 0.05;
  double burst_rate = 2.0;   // expected bursts per hour
  double burst_scale = 1.5;  // demand multiplier while a burst is active
  std::uint64_t seed = 1;
};

/// Compact synthetic demand: one entry per wall-clock second. Within a
/// second the total is spread evenly over the 1000 TTIs (each gets
/// total/1000, the remainder lands on evenly spaced TTIs chosen by a
/// seeded offset), so window sums and per-TTI values are O(1) queries.
class SynthProfile {
public:
  struct Second {
    std::uint32_t prbs_total = 0;  // PRBs allocated across the whole second
    std::uint16_t spread_offset = 0;
  };

  SynthProfile(CellConfig cell, std::vector<Second> seconds);

  const CellConfig& cell() const { return cell_; }
  std::uint64_t tti_count() const { return seconds_.size() * 1000ull; }
  const std::vector<Second>& seconds() const { return seconds_; }

  /// Cell-wide demand at one TTI.
  std::uint32_t demand_at(std::uint64_t tti) const;

  /// Sum of per-TTI demand over [first_tti, first_tti + len). O(seconds touched).
  std::uint64_t demand_sum(std::uint64_t first_tti, std::uint64_t len) const;

  /// Per-TTI demand for a range, appended to `out`.
  void demand_slice(std::uint64_t first_tti, std::uint64_t len,
                    std::vector<std::uint32_t>& out) const;

private:
  CellConfig cell_;
  std::vector<Second> seconds_;
};

/// Build the per-second demand profile for the given parameters. This is the
/// single source of truth for synthetic demand; everything else (trace
/// materialization, CSV emission, planning, simulation) derives from it.
SynthProfile synth_profile(const SynthParams& params, const CellConfig& cell);

/// Same generator cut to an explicit number of seconds instead of whole
/// days (params.days is ignored). Sub-day traces keep tests affordable.
SynthProfile synth_profile(const SynthParams& params, const CellConfig& cell,
                           std::uint64_t n_seconds);

/// Split a cell-wide total onto bands, filling the lowest band first.
std::vector<std::uint32_t> split_lowest_first(std::uint32_t total,
                                              const CellConfig& cell);

/// Materialize the full per-TTI trace. Identical (params, cell) give a
/// bit-identical result. Memory is size * F * 2 bytes; for multi-day traces
/// prefer synth_profile() plus the streaming consumers.
TraceSeries generate_trace(const SynthParams& params, const CellConfig& cell);

/// Stream the profile as trace CSV without materializing the trace.
/// Zero rows are skipped except for the final TTI (length pin).
void write_synth_trace_csv(const SynthProfile& profile, std::ostream& out);

/// SynthParams JSON ({"days":...,"peak_load":...,...}) for reproducible runs.
SynthParams load_synth_params(const std::string& path);
SynthParams read_synth_params(std::istream& in, const std::string& name = "<stream>");
std::string synth_params_to_json(const SynthParams& params);
void save_synth_params(const SynthParams& params, const std::string& path);

}  // namespace bandsleep
