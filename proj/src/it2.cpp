#include "dstyle/it2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dstyle/errors.hpp"

namespace dstyle {
namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(n);
  double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = lo + i * step;
  xs.back() = hi;
  return xs;
}

}  // namespace

TrapezoidParams::TrapezoidParams(double a1_, double a2_, double a3_, double a4_, double height_)
    : a1(a1_), a2(a2_), a3(a3_), a4(a4_), height(height_) {
  if (!all_finite({a1, a2, a3, a4, height}))
    throw ConfigError("InvalidTrapezoid", "trapezoid parameters must be finite");
  if (!(a1 <= a2 && a2 <= a3 && a3 <= a4))
    throw ConfigError("InvalidTrapezoid", "trapezoid abscissae must satisfy a1 <= a2 <= a3 <= a4");
  if (!(height > 0.0 && height <= 1.0))
    throw ConfigError("InvalidTrapezoid", "trapezoid height must lie in (0, 1]");
}

double eval_trapezoid(const TrapezoidParams& p, double x) {
  if (x < p.a1 || x > p.a4) return 0.0;
  if (x < p.a2) return p.height * (x - p.a1) / (p.a2 - p.a1);
  if (x <= p.a3) return p.height;
  if (x < p.a4) return p.height * (p.a4 - x) / (p.a4 - p.a3);
  // x == a4; also reached when a3 == a4 (vertical edge).
  return p.a3 == p.a4 ? p.height : 0.0;
}

It2TrapezoidSet::It2TrapezoidSet(std::string name_, TrapezoidParams upper_, TrapezoidParams lower_)
    : name(std::move(name_)), upper(upper_), lower(lower_) {
  if (name.empty()) throw ConfigError("InvalidSet", "fuzzy set needs a name");
  if (lower.height > upper.height)
    throw ConfigError("InvalidSet", "lower height exceeds upper height in set " + name);
  if (lower.a1 < upper.a1 || lower.a4 > upper.a4)
    throw ConfigError("InvalidSet", "lower support extends beyond upper support in set " + name);
  double lo = std::min(upper.a1, lower.a1);
  double hi = std::max(upper.a4, lower.a4);
  if (hi > lo) {
    for (double x : linspace(lo, hi, 1001)) {
      if (eval_trapezoid(lower, x) > eval_trapezoid(upper, x) + 1e-12)
        throw ConfigError("InvalidSet", "lower membership exceeds upper membership in set " + name);
    }
  }
}

MembershipInterval membership_interval(const It2TrapezoidSet& s, double x) {
  if (!std::isfinite(x)) throw DataError("NonFiniteInput", "membership query must be finite");
  return {eval_trapezoid(s.lower, x), eval_trapezoid(s.upper, x)};
}

LinguisticVariable::LinguisticVariable(std::string name_, std::string unit_, double lo_, double hi_,
                                       std::vector<It2TrapezoidSet> subsets_)
    : name(std::move(name_)), unit(std::move(unit_)), lo(lo_), hi(hi_), subsets(std::move(subsets_)) {
  if (!all_finite({lo, hi}) || !(lo < hi))
    throw ConfigError("InvalidVariable", "variable " + name + " needs a finite universe with lo < hi");
  if (subsets.empty())
    throw ConfigError("InvalidVariable", "variable " + name + " needs at least one subset");
  for (const auto& s : subsets) {
    if (s.upper.a1 < lo - 1e-12 || s.upper.a4 > hi + 1e-12)
      throw ConfigError("InvalidVariable",
                        "subset " + s.name + " of " + name + " leaves the universe [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (double x : linspace(lo, hi, 1001)) {
    double best = 0.0;
    for (const auto& s : subsets) best = std::max(best, eval_trapezoid(s.upper, x));
    if (best <= 0.0)
      throw ConfigError("InvalidVariable",
                        "partition of " + name + " leaves a gap near x = " + std::to_string(x));
  }
}

double LinguisticVariable::clamp(double x) const { return std::clamp(x, lo, hi); }

int LinguisticVariable::subset_index(const std::string& subset_name) const {
  for (std::size_t i = 0; i < subsets.size(); ++i)
    if (subsets[i].name == subset_name) return static_cast<int>(i);
  return -1;
}

namespace {

struct KmPoint {
  double x;
  double wlo;
  double whi;
};

// Classic switch-point iteration. `left` selects the y_l variant (upper
// weights up to and including the switch index, lower weights after it);
// the y_r variant mirrors the weight choice. Points must be sorted by x.
double km_endpoint(const std::vector<KmPoint>& pts, bool left) {
  const int n = static_cast<int>(pts.size());
  if (n == 1) return pts[0].x;

  double num = 0.0, den = 0.0;
  for (const auto& p : pts) {
    double th = 0.5 * (p.wlo + p.whi);
    num += p.x * th;
    den += th;
  }
  double y = num / den;

  int prev_k = -2;
  for (int iter = 0; iter < n + 2; ++iter) {
    int k = 0;
    while (k + 1 < n - 1 && pts[k + 1].x <= y) ++k;
    if (k == prev_k) break;
    num = den = 0.0;
    for (int i = 0; i < n; ++i) {
      double th = ((i <= k) == left) ? pts[i].whi : pts[i].wlo;
      num += pts[i].x * th;
      den += th;
    }
    if (den <= 0.0) break;
    y = num / den;
    prev_k = k;
  }
  return y;
}

}  // namespace

Interval km_centroid(const It2TrapezoidSet& s, int resolution) {
  if (resolution < 2) throw ConfigError("InvalidResolution", "centroid resolution must be >= 2");
  double lo = s.upper.a1, hi = s.upper.a4;
  if (!(hi > lo)) throw NumericError("EmptySet", "set " + s.name + " has a degenerate support");

  std::vector<KmPoint> pts(resolution);
  double step = (hi - lo) / (resolution - 1);
  double max_upper = 0.0;
  for (int i = 0; i < resolution; ++i) {
    double x = (i == resolution - 1) ? hi : lo + i * step;
    pts[i] = {x, eval_trapezoid(s.lower, x), eval_trapezoid(s.upper, x)};
    max_upper = std::max(max_upper, pts[i].whi);
  }
  if (max_upper <= 0.0)
    throw NumericError("EmptySet", "set " + s.name + " has zero upper membership everywhere");

  return {km_endpoint(pts, true), km_endpoint(pts, false)};
}

Interval km_weighted_average(std::span<const Interval> endpoints,
                             std::span<const MembershipInterval> firings) {
  if (endpoints.size() != firings.size())
    throw DataError("LengthMismatch", "endpoint and firing counts differ");
  if (endpoints.empty()) throw DataError("LengthMismatch", "weighted average of nothing");

  double max_hi = 0.0;
  for (const auto& f : firings) max_hi = std::max(max_hi, f.hi);
  if (max_hi <= 0.0) throw NumericError("NoRuleFired", "all firing intervals are zero");

  const std::size_t n = endpoints.size();
  std::vector<KmPoint> pts(n);

  for (std::size_t i = 0; i < n; ++i) pts[i] = {endpoints[i].lo, firings[i].lo, firings[i].hi};
  std::stable_sort(pts.begin(), pts.end(), [](const KmPoint& a, const KmPoint& b) { return a.x < b.x; });
  double yl = km_endpoint(pts, true);

  for (std::size_t i = 0; i < n; ++i) pts[i] = {endpoints[i].hi, firings[i].lo, firings[i].hi};
  std::stable_sort(pts.begin(), pts.end(), [](const KmPoint& a, const KmPoint& b) { return a.x < b.x; });
  double yr = km_endpoint(pts, false);

  return {yl, yr};
}

}  // namespace dstyle
