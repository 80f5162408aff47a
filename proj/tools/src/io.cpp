#include "io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gin::cli {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path.string()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  std::ofstream out(path_);
  out << buffer_;
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_double(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::row_with_label(const std::string& label, const std::vector<double>& values) {
  buffer_ += label;
  for (double v : values) {
    buffer_ += ',';
    buffer_ += format_double(v);
  }
  buffer_ += '\n';
}

void write_plot_data(const std::filesystem::path& dir, const std::string& name,
                     const std::vector<std::vector<double>>& columns,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::string& title) {
  if (columns.empty()) return;
  const std::size_t rows = columns.front().size();
  std::ofstream dat(dir / (name + ".dat"));
  dat.precision(12);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) dat << ' ';
      dat << columns[c][r];
    }
    dat << '\n';
  }
  nlohmann::json meta;
  meta["title"] = title;
  meta["xlabel"] = xlabel;
  meta["ylabel"] = ylabel;
  meta["columns"] = columns.size();
  meta["rows"] = rows;
  write_json(dir / (name + ".meta.json"), meta);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

std::vector<std::array<double, 2>> histogram_density(const std::vector<double>& samples,
                                                     double lo, double hi, int bins) {
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  long inside = 0;
  for (double s : samples) {
    if (s < lo || s >= hi) continue;
    ++counts[static_cast<std::size_t>((s - lo) / width)];
    ++inside;
  }
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)][0] = lo + (b + 0.5) * width;
    out[static_cast<std::size_t>(b)][1] =
        inside > 0 ? counts[static_cast<std::size_t>(b)] / (inside * width) : 0.0;
  }
  return out;
}

}  // namespace gin::cli
