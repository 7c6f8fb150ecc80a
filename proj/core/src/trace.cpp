#include "bandsleep/trace.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bandsleep/errors.hpp"
#include "text_io.hpp"

namespace bandsleep {

namespace {

constexpr std::string_view kHeader = "tti,band,prbs";

}  // namespace

TraceSeries::TraceSeries(CellConfig cell) : cell_(std::move(cell)) {
  bands_ = cell_.band_count();
}

TraceSeries::TraceSeries(CellConfig cell, std::vector<std::uint16_t> flat_allocated)
    : cell_(std::move(cell)), flat_(std::move(flat_allocated)) {
  bands_ = cell_.band_count();
  if (flat_.size() % static_cast<std::size_t>(bands_) != 0) {
    throw ContractError("trace storage size is not a multiple of the band count");
  }
  size_ = flat_.size() / static_cast<std::size_t>(bands_);
  for (std::uint64_t t = 0; t < size_; ++t) {
    for (int f = 0; f < bands_; ++f) {
      if (allocated(t, f) > cell_.bands()[static_cast<std::size_t>(f)].prbs_per_tti) {
        throw ValidationError("allocated exceeds band capacity at tti " + std::to_string(t) +
                              ", band '" + cell_.bands()[static_cast<std::size_t>(f)].label + "'");
      }
    }
  }
}

TtiLoad TraceSeries::tti_load(std::uint64_t t) const {
  TtiLoad load;
  load.tti_index = t;
  load.allocated.reserve(static_cast<std::size_t>(bands_));
  for (int f = 0; f < bands_; ++f) load.allocated.push_back(allocated(t, f));
  return load;
}

TraceSeries parse_trace(std::istream& in, const CellConfig& cell, const std::string& name) {
  const int bands = cell.band_count();
  std::string line;
  std::uint64_t line_no = 1;
  if (!std::getline(in, line)) {
    throw ParseError(name + ": empty file, expected header '" + std::string(kHeader) + "'");
  }
  if (detail::strip_cr(line) != kHeader) {
    throw ParseError(name + ":1: bad header, expected '" + std::string(kHeader) + "'");
  }

  struct Row {
    std::uint64_t tti;
    std::uint32_t band;
    std::uint32_t prbs;
  };
  std::vector<Row> rows;
  std::uint64_t max_tti = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = detail::strip_cr(line);
    if (v.empty()) continue;
    std::size_t c1 = v.find(',');
    std::size_t c2 = (c1 == std::string_view::npos) ? std::string_view::npos : v.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        v.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    Row row{};
    if (!detail::parse_u64(v.substr(0, c1), row.tti)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": tti is not a non-negative integer");
    }
    std::string label(v.substr(c1 + 1, c2 - c1 - 1));
    int band = cell.band_index(label);
    if (band < 0) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": unknown band label '" + label +
                        "' (not in cell config)");
    }
    if (!detail::parse_u32(v.substr(c2 + 1), row.prbs)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": prbs is not a non-negative integer");
    }
    std::uint32_t cap = cell.bands()[static_cast<std::size_t>(band)].prbs_per_tti;
    if (row.prbs > cap) {
      throw ValidationError(name + ":" + std::to_string(line_no) +
                            ": allocated exceeds band capacity at tti " + std::to_string(row.tti) +
                            ", band '" + label + "' (" + std::to_string(row.prbs) + " > " +
                            std::to_string(cap) + ")");
    }
    row.band = static_cast<std::uint32_t>(band);
    max_tti = std::max(max_tti, row.tti);
    any = true;
    rows.push_back(row);
  }
  if (in.bad()) throw ParseError(name + ": read failure");

  if (!any) return TraceSeries(cell);

  const std::uint64_t n = max_tti + 1;
  std::vector<std::uint16_t> flat(n * static_cast<std::uint64_t>(bands), 0);
  std::vector<bool> seen(flat.size(), false);
  for (const Row& row : rows) {
    std::uint64_t idx = row.tti * static_cast<std::uint64_t>(bands) + row.band;
    if (seen[idx]) {
      throw ValidationError(name + ": duplicate row for tti " + std::to_string(row.tti) +
                            ", band '" + cell.bands()[row.band].label + "'");
    }
    seen[idx] = true;
    flat[idx] = static_cast<std::uint16_t>(row.prbs);
  }
  return TraceSeries(cell, std::move(flat));
}

TraceSeries parse_trace(const std::string& path, const CellConfig& cell) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open trace '" + path + "'");
  return parse_trace(in, cell, path);
}

void write_trace_csv(const TraceSeries& trace, std::ostream& out, bool include_zero_rows) {
  out << kHeader << '\n';
  const CellConfig& cell = trace.cell();
  const int bands = cell.band_count();
  std::string buf;
  buf.reserve(1 << 16);
  for (std::uint64_t t = 0; t < trace.size(); ++t) {
    bool wrote_row = false;
    for (int f = 0; f < bands; ++f) {
      std::uint32_t prbs = trace.allocated(t, f);
      if (prbs == 0 && !include_zero_rows) continue;
      buf += std::to_string(t);
      buf += ',';
      buf += cell.bands()[static_cast<std::size_t>(f)].label;
      buf += ',';
      buf += std::to_string(prbs);
      buf += '\n';
      wrote_row = true;
    }
    // Length pin: sparse output still marks the final TTI.
    if (!wrote_row && t + 1 == trace.size()) {
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

WindowTotals aggregate_theta(const TraceSeries& trace) {
  const std::uint32_t window = trace.cell().realloc_ms();
  WindowTotals result;
  result.window_ms = window;
  if (trace.empty()) return result;

  const std::uint64_t n = trace.size();
  const std::uint64_t windows = (n + window - 1) / window;
  result.tail_padded = (n % window) != 0;
  result.values.reserve(windows);
  const int bands = trace.cell().band_count();
  std::uint64_t acc = 0;
  std::uint32_t in_window = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    std::uint64_t row = 0;
    for (int f = 0; f < bands; ++f) row += trace.allocated(t, f);
    acc += row;
    if (++in_window == window) {
      result.values.push_back(acc);
      acc = 0;
      in_window = 0;
    }
  }
  if (in_window > 0) result.values.push_back(acc);  // zero-padded tail
  return result;
}

std::vector<std::uint32_t> total_demand_per_tti(const TraceSeries& trace) {
  std::vector<std::uint32_t> out;
  out.reserve(trace.size());
  const int bands = trace.cell().band_count();
  for (std::uint64_t t = 0; t < trace.size(); ++t) {
    std::uint32_t row = 0;
    for (int f = 0; f < bands; ++f) row += trace.allocated(t, f);
    out.push_back(row);
  }
  return out;
}

}  // namespace bandsleep
