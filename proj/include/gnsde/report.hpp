#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gnsde {

/// Empty optionals print as an empty field.
using CsvCell = std::variant<std::string, double, std::int64_t, std::optional<double>>;

/// Numbers print with 10 significant digits; infinity prints as "inf".
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Throws InvalidArgument when the row width differs from the header.
  void add_row(std::vector<CsvCell> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Optional band around the line; both empty or both sized like x.
  std::vector<double> lower;
  std::vector<double> upper;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Static line plot with shaded bands. Non-finite x values are drawn one tick
/// past the largest finite x and labelled "inf"; non-finite y values are skipped.
std::string render_svg(const PlotSpec& plot);
void write_svg(const std::filesystem::path& path, const PlotSpec& plot);

}  // namespace gnsde
