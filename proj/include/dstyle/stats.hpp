#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dstyle {

struct DescriptiveSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by n)
  double min = 0.0;
  double max = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
};

// Quantile by linear interpolation between order statistics at rank
// (n - 1) * p. Values need not be sorted.
double quantile(std::span<const double> values, double p);

// Summary of a series; requires at least one value, all finite.
DescriptiveSummary describe(std::span<const double> values);

// Per-class, per-column summaries of a sample matrix (row-major, uniform row
// length). Classes absent from `labels` still get a row with n = 0.
struct ClassSummary {
  std::string label;
  std::vector<DescriptiveSummary> columns;  // empty summaries (n = 0) when the class is empty
};

std::vector<ClassSummary> describe_by_class(std::span<const std::vector<double>> rows,
                                            std::span<const std::string> labels,
                                            std::span<const std::string> class_order);

}  // namespace dstyle
