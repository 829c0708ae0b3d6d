#pragma once

#include <span>
#include <string>
#include <vector>

namespace dstyle {

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

// Primary-membership interval at a point; both ends stay in [0, 1].
struct MembershipInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Trapezoid through (a1,0), (a2,h), (a3,h), (a4,0). Edges of zero width step
// straight to h, so (a,a,a,b,...) and rectangular shapes are legal.
struct TrapezoidParams {
  double a1, a2, a3, a4;
  double height;

  TrapezoidParams(double a1, double a2, double a3, double a4, double height);
};

// Membership of x. Scales with the plateau height: the rising edge is
// height * (x - a1) / (a2 - a1), mirrored on the way down.
double eval_trapezoid(const TrapezoidParams& p, double x);

// Interval type-2 set as an upper/lower trapezoid pair. Construction checks
// that the lower function stays under the upper one across both supports.
struct It2TrapezoidSet {
  std::string name;
  TrapezoidParams upper;
  TrapezoidParams lower;

  It2TrapezoidSet(std::string name, TrapezoidParams upper, TrapezoidParams lower);
};

MembershipInterval membership_interval(const It2TrapezoidSet& s, double x);

// A named variable with its universe of discourse and fuzzy partition.
// Construction verifies every subset support lies inside [lo, hi] and that
// the partition covers the universe (max upper membership > 0 everywhere).
struct LinguisticVariable {
  std::string name;
  std::string unit;
  double lo;
  double hi;
  std::vector<It2TrapezoidSet> subsets;

  LinguisticVariable(std::string name, std::string unit, double lo, double hi,
                     std::vector<It2TrapezoidSet> subsets);

  double clamp(double x) const;
  int subset_index(const std::string& subset_name) const;  // -1 when absent
};

inline constexpr int kDefaultResolution = 1000;

// Karnik-Mendel centroid of one set, sampled on a uniform grid over the
// upper support. Returns [y_l, y_r].
Interval km_centroid(const It2TrapezoidSet& s, int resolution = kDefaultResolution);

// Karnik-Mendel bounds of the weighted average: y = sum(theta_i * x_i) /
// sum(theta_i) with x_i ranging over endpoints[i] and theta_i over
// firings[i]. Left bound uses the lower ends of endpoints, right bound the
// upper ends, each with its own switch-point iteration.
Interval km_weighted_average(std::span<const Interval> endpoints,
                             std::span<const MembershipInterval> firings);

}  // namespace dstyle
