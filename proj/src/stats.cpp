#include "dstyle/stats.hpp"

#include <algorithm>
#include <cmath>

#include "dstyle/errors.hpp"

namespace dstyle {

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("EmptySeries", "quantile of an empty series");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("InvalidQuantile", "quantile level outside [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double rank = p * (static_cast<double>(v.size()) - 1.0);
  std::size_t i = static_cast<std::size_t>(rank);
  if (i + 1 >= v.size()) return v.back();
  double frac = rank - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

DescriptiveSummary describe(std::span<const double> values) {
  if (values.empty()) throw DataError("EmptySeries", "describe of an empty series");
  for (double x : values)
    if (!std::isfinite(x)) throw DataError("NonFiniteInput", "describe requires finite values");

  DescriptiveSummary s;
  s.n = values.size();
  double sum = 0.0;
  for (double x : values) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : values) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.n));
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  s.min = *mn;
  s.max = *mx;
  s.q25 = quantile(values, 0.25);
  s.q50 = quantile(values, 0.50);
  s.q75 = quantile(values, 0.75);
  s.iqr = s.q75 - s.q25;
  return s;
}

std::vector<ClassSummary> describe_by_class(std::span<const std::vector<double>> rows,
                                            std::span<const std::string> labels,
                                            std::span<const std::string> class_order) {
  if (rows.size() != labels.size())
    throw DataError("LengthMismatch", "sample and label counts differ");
  std::size_t width = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows)
    if (r.size() != width) throw DataError("LengthMismatch", "ragged sample matrix");

  std::vector<ClassSummary> out;
  out.reserve(class_order.size());
  for (const auto& cls : class_order) {
    ClassSummary cs;
    cs.label = cls;
    std::vector<std::vector<double>> cols(width);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (labels[i] != cls) continue;
      for (std::size_t j = 0; j < width; ++j) cols[j].push_back(rows[i][j]);
    }
    cs.columns.resize(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (!cols[j].empty()) cs.columns[j] = describe(cols[j]);
    }
    out.push_back(std::move(cs));
  }
  return out;
}

}  // namespace dstyle
