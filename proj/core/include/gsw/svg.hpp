#pragma once

#include <string>
#include <vector>

namespace gsw::svg {

enum class Style { line, scatter };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  Style style = Style::line;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series{};
  double width = 640.0;
  double height = 420.0;

  std::string render() const;
  void save(const std::string& path) const;
};

}  // namespace gsw::svg
