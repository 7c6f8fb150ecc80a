#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bandsleep {

/// One carrier frequency of the cell. Bands are ordered ascending by
/// frequency; band 1 is the lowest and is never switched off.
struct BandConfig {
  int band_id = 0;             // ordinal 1..F, 1 = lowest frequency
  std::string label;           // e.g. "800MHz", used in trace files
  std::uint32_t prbs_per_tti = 0;  // PRBs schedulable per 1 ms TTI
  double power_weight = 1.0;   // relative energy draw, unitless
};

/// Static description of a multi-band cell plus the two planning periods:
/// the reallocation period (ms) bounding how far displaced PRBs may slide,
/// and the activation period (ms) at which bands switch on/off.
class CellConfig {
public:
  CellConfig() = default;
  CellConfig(std::vector<BandConfig> bands, std::uint32_t realloc_ms,
             std::uint64_t activation_ms);

  const std::vector<BandConfig>& bands() const { return bands_; }
  int band_count() const { return static_cast<int>(bands_.size()); }
  std::uint32_t realloc_ms() const { return realloc_ms_; }
  std::uint64_t activation_ms() const { return activation_ms_; }

  /// Windows per activation period (activation_ms / realloc_ms).
  std::uint64_t windows_per_period() const { return activation_ms_ / realloc_ms_; }

  /// Total cell capacity in PRBs per TTI with all bands on.
  std::uint32_t total_prbs_per_tti() const { return total_prbs_; }

  /// Capacity in PRBs per TTI with the lowest `n` bands on.
  std::uint32_t prefix_capacity(int n) const;

  /// Index of the band with the given label, or -1 if unknown.
  int band_index(const std::string& label) const;

  /// Returns a copy with a different activation period (same bands and
  /// reallocation period). Throws ConfigError if not a multiple of realloc_ms.
  CellConfig with_activation_ms(std::uint64_t activation_ms) const;

private:
  std::vector<BandConfig> bands_;
  std::uint32_t realloc_ms_ = 20;
  std::uint64_t activation_ms_ = 600000;
  std::uint32_t total_prbs_ = 0;
};

/// The shipped default: a four-band cell (800/1800/2100/2600 MHz at
/// 10/20/15/15 MHz, i.e. 50/100/75/75 PRBs per TTI), 20 ms reallocation,
/// 10 min activation. Power weights are bandwidth-proportional.
CellConfig default_cell();

/// Load / save the cell config JSON:
///   {"bands":[{"label":"800MHz","prbs_per_tti":50,"power_weight":1.0},...],
///    "realloc_ms":20,"activation_ms":600000}
CellConfig load_cell_config(const std::string& path);
CellConfig read_cell_config(std::istream& in, const std::string& name = "<stream>");
void save_cell_config(const CellConfig& cell, const std::string& path);
std::string cell_config_to_json(const CellConfig& cell);

}  // namespace bandsleep
