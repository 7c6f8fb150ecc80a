#include "bandsleep/planner.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "bandsleep/errors.hpp"
#include "text_io.hpp"

namespace bandsleep {

Thresholds thresholds(const CellConfig& cell) {
  Thresholds th;
  const int bands = cell.band_count();
  th.values.reserve(static_cast<std::size_t>(bands > 0 ? bands - 1 : 0));
  std::uint64_t prefix = 0;
  for (int f = 0; f + 1 < bands; ++f) {
    prefix += cell.bands()[static_cast<std::size_t>(f)].prbs_per_tti;
    th.values.push_back(prefix * cell.realloc_ms());
  }
  return th;
}

int bands_required(std::uint64_t window_total, const Thresholds& th,
                   const CellConfig& cell) {
  for (std::size_t j = 0; j < th.values.size(); ++j) {
    if (window_total <= th.values[j]) return static_cast<int>(j) + 1;
  }
  const std::uint64_t full =
      static_cast<std::uint64_t>(cell.total_prbs_per_tti()) * cell.realloc_ms();
  if (window_total > full) {
    throw ContractError("window total " + std::to_string(window_total) +
                        " exceeds full-cell window capacity " + std::to_string(full));
  }
  return cell.band_count();
}

BandPlan plan_reference(const WindowTotals& totals, const CellConfig& cell) {
  if (totals.window_ms != cell.realloc_ms()) {
    throw ContractError("window totals were aggregated at " +
                        std::to_string(totals.window_ms) + " ms, cell reallocates every " +
                        std::to_string(cell.realloc_ms()) + " ms");
  }
  const Thresholds th = thresholds(cell);
  const std::uint64_t per_period = cell.windows_per_period();

  BandPlan plan;
  plan.activation_ms = cell.activation_ms();
  if (totals.values.empty()) return plan;

  const std::uint64_t n = totals.values.size();
  plan.counts.reserve(static_cast<std::size_t>((n + per_period - 1) / per_period));
  int current = 0;
  std::uint64_t in_period = 0;
  for (std::uint64_t w = 0; w < n; ++w) {
    current = std::max(current, bands_required(totals.values[w], th, cell));
    if (++in_period == per_period) {
      plan.counts.push_back(current);
      current = 0;
      in_period = 0;
    }
  }
  if (in_period > 0) {
    plan.counts.push_back(current);
    plan.tail_padded = true;
  }
  plan.tail_padded = plan.tail_padded || totals.tail_padded;
  return plan;
}

BandPlan plan_reference(const SynthProfile& profile) {
  const CellConfig& cell = profile.cell();
  const Thresholds th = thresholds(cell);
  const std::uint64_t window = cell.realloc_ms();
  const std::uint64_t per_period = cell.windows_per_period();
  const std::uint64_t n_ttis = profile.tti_count();

  BandPlan plan;
  plan.activation_ms = cell.activation_ms();
  if (n_ttis == 0) return plan;

  const std::uint64_t n_windows = (n_ttis + window - 1) / window;
  plan.counts.reserve(static_cast<std::size_t>((n_windows + per_period - 1) / per_period));
  int current = 0;
  std::uint64_t in_period = 0;
  for (std::uint64_t w = 0; w < n_windows; ++w) {
    const std::uint64_t first = w * window;
    const std::uint64_t len = std::min(window, n_ttis - first);
    const std::uint64_t total = profile.demand_sum(first, len);
    current = std::max(current, bands_required(total, th, cell));
    if (++in_period == per_period) {
      plan.counts.push_back(current);
      current = 0;
      in_period = 0;
    }
  }
  if (in_period > 0) {
    plan.counts.push_back(current);
    plan.tail_padded = true;
  }
  plan.tail_padded = plan.tail_padded || (n_ttis % window) != 0;
  return plan;
}

BandPlan plan_from_trace_csv(std::istream& in, const CellConfig& cell,
                             const std::string& name) {
  constexpr std::string_view kTraceHeader = "tti,band,prbs";
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(name + ": empty file, expected header '" + std::string(kTraceHeader) +
                     "'");
  }
  if (detail::strip_cr(line) != kTraceHeader) {
    throw ParseError(name + ":1: bad header, expected '" + std::string(kTraceHeader) + "'");
  }

  const Thresholds th = thresholds(cell);
  const std::uint64_t window = cell.realloc_ms();
  const std::uint64_t per_period = cell.windows_per_period();

  BandPlan plan;
  plan.activation_ms = cell.activation_ms();
  int period_max = 0;
  std::uint64_t windows_in_period = 0;
  auto close_window = [&](std::uint64_t theta) {
    period_max = std::max(period_max, bands_required(theta, th, cell));
    if (++windows_in_period == per_period) {
      plan.counts.push_back(period_max);
      period_max = 0;
      windows_in_period = 0;
    }
  };

  std::vector<bool> seen(static_cast<std::size_t>(cell.band_count()), false);
  bool any = false;
  std::uint64_t cur_tti = 0;
  std::uint64_t cur_window = 0;
  std::uint64_t tti_sum = 0;
  std::uint64_t window_theta = 0;
  std::uint64_t line_no = 1;

  auto start_tti = [&](std::uint64_t tti) {
    // Windows between the previous TTI and this one hold only zeros.
    const std::uint64_t target_window = tti / window;
    while (cur_window < target_window) {
      close_window(window_theta);
      window_theta = 0;
      ++cur_window;
    }
    std::fill(seen.begin(), seen.end(), false);
    cur_tti = tti;
    tti_sum = 0;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = detail::strip_cr(line);
    if (v.empty()) continue;
    std::size_t c1 = v.find(',');
    std::size_t c2 =
        (c1 == std::string_view::npos) ? std::string_view::npos : v.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        v.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    std::uint64_t tti = 0;
    if (!detail::parse_u64(v.substr(0, c1), tti)) {
      throw ParseError(name + ":" + std::to_string(line_no) +
                       ": tti is not a non-negative integer");
    }
    const std::string label(v.substr(c1 + 1, c2 - c1 - 1));
    const int band = cell.band_index(label);
    if (band < 0) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": unknown band label '" +
                        label + "' (not in cell config)");
    }
    std::uint32_t prbs = 0;
    if (!detail::parse_u32(v.substr(c2 + 1), prbs)) {
      throw ParseError(name + ":" + std::to_string(line_no) +
                       ": prbs is not a non-negative integer");
    }
    const std::uint32_t cap = cell.bands()[static_cast<std::size_t>(band)].prbs_per_tti;
    if (prbs > cap) {
      throw ValidationError(name + ":" + std::to_string(line_no) +
                            ": allocated exceeds band capacity at tti " +
                            std::to_string(tti) + ", band '" + label + "' (" +
                            std::to_string(prbs) + " > " + std::to_string(cap) + ")");
    }

    if (!any) {
      any = true;
      start_tti(tti);
    } else if (tti != cur_tti) {
      if (tti < cur_tti) {
        throw ParseError(name + ":" + std::to_string(line_no) +
                         ": rows must be sorted by tti for streamed planning (tti " +
                         std::to_string(tti) + " after " + std::to_string(cur_tti) + ")");
      }
      window_theta += tti_sum;
      start_tti(tti);
    }
    if (seen[static_cast<std::size_t>(band)]) {
      throw ValidationError(name + ": duplicate row for tti " + std::to_string(tti) +
                            ", band '" + label + "'");
    }
    seen[static_cast<std::size_t>(band)] = true;
    tti_sum += prbs;
  }
  if (in.bad()) throw ParseError(name + ": read failure");
  if (!any) return plan;

  window_theta += tti_sum;
  close_window(window_theta);
  if (windows_in_period > 0) {
    plan.counts.push_back(period_max);
    plan.tail_padded = true;
  }
  plan.tail_padded = plan.tail_padded || ((cur_tti + 1) % window) != 0;
  return plan;
}

namespace {
constexpr const char* kPlanHeader = "period_index,n_bands";
}

void write_plan_csv(const BandPlan& plan, std::ostream& out) {
  out << kPlanHeader << '\n';
  std::string buf;
  buf.reserve(1 << 14);
  for (std::size_t i = 0; i < plan.counts.size(); ++i) {
    buf += std::to_string(i);
    buf += ',';
    buf += std::to_string(plan.counts[i]);
    buf += '\n';
    if (buf.size() > (1 << 13)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

BandPlan read_plan_csv(std::istream& in, std::uint64_t activation_ms, int band_count,
                       const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty plan file");
  if (detail::strip_cr(line) != kPlanHeader) {
    throw ParseError(name + ": expected header '" + std::string(kPlanHeader) + "', got '" +
                     line + "'");
  }

  BandPlan plan;
  plan.activation_ms = activation_ms;
  std::uint64_t line_no = 1;
  std::uint64_t expected_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view v = detail::strip_cr(line);
    if (v.empty()) continue;
    const auto comma = v.find(',');
    if (comma == std::string_view::npos ||
        v.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    std::uint64_t index = 0;
    if (!detail::parse_u64(v.substr(0, comma), index)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": invalid period_index '" +
                       std::string(v.substr(0, comma)) + "'");
    }
    std::uint64_t n = 0;
    if (!detail::parse_u64(v.substr(comma + 1), n)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": invalid n_bands '" +
                       std::string(v.substr(comma + 1)) + "'");
    }
    if (index != expected_index) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": period_index " +
                       std::to_string(index) + " out of order (expected " +
                       std::to_string(expected_index) + ")");
    }
    if (n < 1 || n > static_cast<std::uint64_t>(band_count)) {
      throw ValidationError(name + ":" + std::to_string(line_no) + ": n_bands " +
                            std::to_string(n) + " outside [1, " +
                            std::to_string(band_count) + "]");
    }
    plan.counts.push_back(static_cast<int>(n));
    ++expected_index;
  }
  return plan;
}

BandPlan load_plan_csv(const std::string& path, std::uint64_t activation_ms,
                       int band_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open plan '" + path + "'");
  return read_plan_csv(in, activation_ms, band_count, path);
}

void save_plan_csv(const BandPlan& plan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write plan '" + path + "'");
  write_plan_csv(plan, out);
}

}  // namespace bandsleep
