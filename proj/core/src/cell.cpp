#include "bandsleep/cell.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"

namespace bandsleep {

namespace {

using nlohmann::json;

// Per-band allocations are stored as uint16 and cell totals as uint32; keep
// configs comfortably inside those bounds.
constexpr std::uint32_t kMaxBandPrbs = 65535;
constexpr std::uint32_t kMaxCellPrbs = 1000000;

}  // namespace

CellConfig::CellConfig(std::vector<BandConfig> bands, std::uint32_t realloc_ms,
                       std::uint64_t activation_ms)
    : bands_(std::move(bands)), realloc_ms_(realloc_ms), activation_ms_(activation_ms) {
  if (bands_.empty()) throw ConfigError("cell config: no bands defined");
  if (realloc_ms_ < 1) throw ConfigError("cell config: realloc_ms must be >= 1");
  if (activation_ms_ < 1 || activation_ms_ % realloc_ms_ != 0) {
    throw ConfigError("cell config: activation_ms must be a positive multiple of realloc_ms");
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    BandConfig& b = bands_[i];
    b.band_id = static_cast<int>(i) + 1;
    if (b.label.empty()) throw ConfigError("cell config: band label must not be empty");
    if (b.prbs_per_tti < 1 || b.prbs_per_tti > kMaxBandPrbs) {
      throw ConfigError("cell config: band '" + b.label + "' prbs_per_tti out of range 1.." +
                        std::to_string(kMaxBandPrbs));
    }
    if (!(b.power_weight > 0.0)) {
      throw ConfigError("cell config: band '" + b.label + "' power_weight must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (bands_[j].label == b.label) {
        throw ConfigError("cell config: duplicate band label '" + b.label + "'");
      }
    }
    total += b.prbs_per_tti;
  }
  if (total > kMaxCellPrbs) {
    throw ConfigError("cell config: total cell capacity exceeds " + std::to_string(kMaxCellPrbs) +
                      " PRBs per TTI");
  }
  total_prbs_ = static_cast<std::uint32_t>(total);
}

std::uint32_t CellConfig::prefix_capacity(int n) const {
  if (n < 0) n = 0;
  if (n > band_count()) n = band_count();
  std::uint32_t sum = 0;
  for (int f = 0; f < n; ++f) sum += bands_[static_cast<std::size_t>(f)].prbs_per_tti;
  return sum;
}

int CellConfig::band_index(const std::string& label) const {
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (bands_[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

CellConfig CellConfig::with_activation_ms(std::uint64_t activation_ms) const {
  return CellConfig(bands_, realloc_ms_, activation_ms);
}

CellConfig default_cell() {
  return CellConfig(
      {
          {1, "800MHz", 50, 1.0},
          {2, "1800MHz", 100, 2.0},
          {3, "2100MHz", 75, 1.5},
          {4, "2600MHz", 75, 1.5},
      },
      20, 600000);
}

CellConfig read_cell_config(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(name + ": invalid cell config JSON: " + e.what());
  }
  try {
    std::vector<BandConfig> bands;
    for (const auto& jb : j.at("bands")) {
      BandConfig b;
      b.label = jb.at("label").get<std::string>();
      b.prbs_per_tti = jb.at("prbs_per_tti").get<std::uint32_t>();
      b.power_weight = jb.value("power_weight", 1.0);
      bands.push_back(std::move(b));
    }
    return CellConfig(std::move(bands), j.at("realloc_ms").get<std::uint32_t>(),
                      j.at("activation_ms").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw ParseError(name + ": cell config missing or mistyped field: " + e.what());
  }
}

CellConfig load_cell_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open cell config '" + path + "'");
  return read_cell_config(in, path);
}

std::string cell_config_to_json(const CellConfig& cell) {
  json bands = json::array();
  for (const auto& b : cell.bands()) {
    bands.push_back({{"label", b.label},
                     {"prbs_per_tti", b.prbs_per_tti},
                     {"power_weight", b.power_weight}});
  }
  json j{{"bands", bands},
         {"realloc_ms", cell.realloc_ms()},
         {"activation_ms", cell.activation_ms()}};
  return j.dump(2) + "\n";
}

void save_cell_config(const CellConfig& cell, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write cell config '" + path + "'");
  out << cell_config_to_json(cell);
}

}  // namespace bandsleep
