#pragma once

#include <string>
#include <vector>

namespace franson {

// Minimal deterministic line plot. Output is plain text with fixed number
// formatting so identical inputs give identical bytes.
struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // empty or same length as y
  std::string label;
  std::string color = "#1f77b4";
  bool line = false;    // connect points
  bool marker = true;   // draw circles
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;

  void add(PlotSeries s) { series.push_back(std::move(s)); }
  std::string render() const;
};

}  // namespace franson
