#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gin::cli {

/// Minimal CSV writer: header row plus numeric rows at full precision.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void row_with_label(const std::string& label, const std::vector<double>& values);

 private:
  std::string path_;
  std::string buffer_;
};

/// Two/three-column plot series plus a sidecar meta file describing axes.
void write_plot_data(const std::filesystem::path& dir, const std::string& name,
                     const std::vector<std::vector<double>>& columns,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::string& title);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Equal-width histogram over [lo, hi]; returns (center, density) pairs.
std::vector<std::array<double, 2>> histogram_density(const std::vector<double>& samples,
                                                     double lo, double hi, int bins);

}  // namespace gin::cli
