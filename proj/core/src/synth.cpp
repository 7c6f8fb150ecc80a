#include "bandsleep/synth.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bandsleep/errors.hpp"

namespace bandsleep {

namespace {

using nlohmann::json;

constexpr std::uint32_t kTtisPerSecond = 1000;
constexpr std::uint32_t kSecondsPerDay = 86400;
constexpr double kPi = 3.14159265358979323846;

// mt19937_64 output mapped to [0,1); the engine is fully specified by the
// standard, so traces are bit-identical across platforms.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void validate(const SynthParams& p) {
  if (!(p.peak_load >= 0.0 && p.peak_load <= 1.0)) {
    throw ValidationError("synth params: peak_load must be in [0,1]");
  }
  if (!(p.trough_load >= 0.0 && p.trough_load <= p.peak_load)) {
    throw ValidationError("synth params: trough_load must be in [0, peak_load]");
  }
  if (!(p.burst_rate >= 0.0)) throw ValidationError("synth params: burst_rate must be >= 0");
  if (!(p.burst_scale >= 1.0)) throw ValidationError("synth params: burst_scale must be >= 1");
}

// Count of remainder slots falling in TTI range [a, b) of one second, for a
// remainder r spread evenly with phase `off` (Bresenham spacing).
inline std::uint32_t spread_count(std::uint32_t a, std::uint32_t b, std::uint32_t r,
                                  std::uint32_t off) {
  auto marks_before = [r, off](std::uint32_t j) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(j) + off) * r / kTtisPerSecond);
  };
  return marks_before(b) - marks_before(a);
}

}  // namespace

SynthProfile::SynthProfile(CellConfig cell, std::vector<Second> seconds)
    : cell_(std::move(cell)), seconds_(std::move(seconds)) {
  const std::uint64_t cap =
      static_cast<std::uint64_t>(cell_.total_prbs_per_tti()) * kTtisPerSecond;
  for (const Second& s : seconds_) {
    if (s.prbs_total > cap) {
      throw ContractError("synthetic profile second exceeds cell capacity");
    }
  }
}

std::uint32_t SynthProfile::demand_at(std::uint64_t tti) const {
  const Second& s = seconds_[tti / kTtisPerSecond];
  const auto j = static_cast<std::uint32_t>(tti % kTtisPerSecond);
  std::uint32_t q = s.prbs_total / kTtisPerSecond;
  std::uint32_t r = s.prbs_total % kTtisPerSecond;
  return q + spread_count(j, j + 1, r, s.spread_offset);
}

std::uint64_t SynthProfile::demand_sum(std::uint64_t first_tti, std::uint64_t len) const {
  std::uint64_t sum = 0;
  std::uint64_t t = first_tti;
  const std::uint64_t end = first_tti + len;
  while (t < end) {
    const std::uint64_t sec = t / kTtisPerSecond;
    const auto a = static_cast<std::uint32_t>(t % kTtisPerSecond);
    const auto b = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(kTtisPerSecond, a + (end - t)));
    const Second& s = seconds_[sec];
    std::uint32_t q = s.prbs_total / kTtisPerSecond;
    std::uint32_t r = s.prbs_total % kTtisPerSecond;
    sum += static_cast<std::uint64_t>(q) * (b - a) + spread_count(a, b, r, s.spread_offset);
    t += b - a;
  }
  return sum;
}

void SynthProfile::demand_slice(std::uint64_t first_tti, std::uint64_t len,
                                std::vector<std::uint32_t>& out) const {
  out.reserve(out.size() + len);
  for (std::uint64_t t = first_tti; t < first_tti + len; ++t) {
    out.push_back(demand_at(t));
  }
}

SynthProfile synth_profile(const SynthParams& params, const CellConfig& cell) {
  return synth_profile(params, cell,
                       static_cast<std::uint64_t>(params.days) * kSecondsPerDay);
}

SynthProfile synth_profile(const SynthParams& params, const CellConfig& cell,
                           std::uint64_t n_seconds) {
  validate(params);
  const double capacity = static_cast<double>(cell.total_prbs_per_tti());
  const std::uint64_t second_cap =
      static_cast<std::uint64_t>(cell.total_prbs_per_tti()) * kTtisPerSecond;

  std::mt19937_64 rng(params.seed);
  const double burst_prob = params.burst_rate / 3600.0;

  std::vector<SynthProfile::Second> seconds;
  seconds.reserve(n_seconds);
  std::uint32_t burst_remaining = 0;
  for (std::uint64_t s = 0; s < n_seconds; ++s) {
    const double hour = static_cast<double>(s % kSecondsPerDay) / 3600.0;
    double frac = params.trough_load +
                  (params.peak_load - params.trough_load) / 2.0 *
                      (1.0 - std::cos(2.0 * kPi * hour / 24.0));
    const double u = next_unit(rng);
    if (burst_remaining == 0 && u < burst_prob) {
      burst_remaining = 5 + static_cast<std::uint32_t>(rng() % 56);  // 5..60 s
    }
    if (burst_remaining > 0) {
      frac *= params.burst_scale;
      --burst_remaining;
    }
    if (frac > 1.0) frac = 1.0;
    auto total = static_cast<std::uint64_t>(
        std::llround(frac * capacity * static_cast<double>(kTtisPerSecond)));
    if (total > second_cap) total = second_cap;
    const auto off = static_cast<std::uint16_t>(rng() % kTtisPerSecond);
    seconds.push_back({static_cast<std::uint32_t>(total), off});
  }
  return SynthProfile(cell, std::move(seconds));
}

std::vector<std::uint32_t> split_lowest_first(std::uint32_t total, const CellConfig& cell) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(cell.band_count()), 0);
  for (int f = 0; f < cell.band_count() && total > 0; ++f) {
    const std::uint32_t cap = cell.bands()[static_cast<std::size_t>(f)].prbs_per_tti;
    const std::uint32_t take = std::min(total, cap);
    out[static_cast<std::size_t>(f)] = take;
    total -= take;
  }
  if (total > 0) throw ContractError("demand exceeds total cell capacity");
  return out;
}

TraceSeries generate_trace(const SynthParams& params, const CellConfig& cell) {
  SynthProfile profile = synth_profile(params, cell);
  const std::uint64_t n = profile.tti_count();
  const int bands = cell.band_count();
  std::vector<std::uint16_t> flat(n * static_cast<std::uint64_t>(bands), 0);
  for (std::uint64_t t = 0; t < n; ++t) {
    std::uint32_t remaining = profile.demand_at(t);
    for (int f = 0; f < bands && remaining > 0; ++f) {
      const std::uint32_t cap = cell.bands()[static_cast<std::size_t>(f)].prbs_per_tti;
      const std::uint32_t take = std::min(remaining, cap);
      flat[t * static_cast<std::uint64_t>(bands) + static_cast<std::uint64_t>(f)] =
          static_cast<std::uint16_t>(take);
      remaining -= take;
    }
  }
  return TraceSeries(cell, std::move(flat));
}

void write_synth_trace_csv(const SynthProfile& profile, std::ostream& out) {
  out << "tti,band,prbs\n";
  const CellConfig& cell = profile.cell();
  const int bands = cell.band_count();
  const std::uint64_t n = profile.tti_count();
  std::string buf;
  buf.reserve(1 << 16);
  for (std::uint64_t t = 0; t < n; ++t) {
    std::uint32_t remaining = profile.demand_at(t);
    bool wrote_row = false;
    for (int f = 0; f < bands && remaining > 0; ++f) {
      const std::uint32_t cap = cell.bands()[static_cast<std::size_t>(f)].prbs_per_tti;
      const std::uint32_t take = std::min(remaining, cap);
      remaining -= take;
      if (take == 0) continue;
      buf += std::to_string(t);
      buf += ',';
      buf += cell.bands()[static_cast<std::size_t>(f)].label;
      buf += ',';
      buf += std::to_string(take);
      buf += '\n';
      wrote_row = true;
    }
    if (!wrote_row && t + 1 == n) {
      buf += std::to_string(t);
      buf += ',';
      buf += cell.bands()[0].label;
      buf += ",0\n";
    }
    if (buf.size() > (1 << 15)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SynthParams read_synth_params(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(name + ": invalid synth params JSON: " + e.what());
  }
  try {
    SynthParams p;
    p.days = j.at("days").get<std::uint32_t>();
    p.peak_load = j.at("peak_load").get<double>();
    p.trough_load = j.at("trough_load").get<double>();
    p.burst_rate = j.value("burst_rate", 0.0);
    p.burst_scale = j.value("burst_scale", 1.0);
    p.seed = j.at("seed").get<std::uint64_t>();
    validate(p);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(name + ": synth params missing or mistyped field: " + e.what());
  }
}

SynthParams load_synth_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open synth params '" + path + "'");
  return read_synth_params(in, path);
}

std::string synth_params_to_json(const SynthParams& p) {
  json j{{"days", p.days},          {"peak_load", p.peak_load},
         {"trough_load", p.trough_load}, {"burst_rate", p.burst_rate},
         {"burst_scale", p.burst_scale}, {"seed", p.seed}};
  return j.dump(2) + "\n";
}

void save_synth_params(const SynthParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write synth params '" + path + "'");
  out << synth_params_to_json(params);
}

}  // namespace bandsleep
