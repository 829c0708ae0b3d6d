#pragma once

#include <span>
#include <string>
#include <vector>

#include "dstyle/features.hpp"
#include "dstyle/it2.hpp"

namespace dstyle {

// One rule: a subset index per input variable plus an output subset index.
struct Rule {
  std::vector<int> antecedent;
  int consequent = 0;
};

// Decode combination index r into per-variable subset indices under the
// canonical enumeration: lexicographic, first variable slowest, subset
// indices ascending.
std::vector<int> decode_combination(std::size_t r, std::span<const LinguisticVariable> inputs);
std::size_t combination_count(std::span<const LinguisticVariable> inputs);

// Complete rule base: exactly one rule per antecedent combination, stored in
// canonical order regardless of the order supplied.
struct RuleBase {
  std::vector<LinguisticVariable> inputs;
  LinguisticVariable output;
  std::vector<Rule> rules;

  RuleBase(std::vector<LinguisticVariable> inputs, LinguisticVariable output,
           std::vector<Rule> rules);
};

// Membership intervals of x in every subset of every input variable. Inputs
// are clamped to each universe; non-finite values raise NonFiniteInput.
std::vector<std::vector<MembershipInterval>> fuzzify(const FeatureVector& x,
                                                     std::span<const LinguisticVariable> inputs);

// Min t-norm across the rule's antecedents.
MembershipInterval firing_strength(const Rule& rule,
                                   const std::vector<std::vector<MembershipInterval>>& fuzzified);

struct InferenceResult {
  std::vector<std::vector<MembershipInterval>> fuzzified;
  std::vector<MembershipInterval> firings;  // per rule, canonical order
  Interval reduced;                         // [y_l, y_r] (equal ends for type-1)
  double crisp = 0.0;
  int label = 0;  // output subset index
};

// Crisp output to label: the output subset with the greatest upper
// membership; mathematical ties go to the higher index.
int label_output(double crisp, const LinguisticVariable& output);

class InferenceEngine {
 public:
  explicit InferenceEngine(RuleBase rulebase, int resolution = kDefaultResolution);

  const RuleBase& rulebase() const { return rulebase_; }
  const std::vector<Interval>& consequent_centroids() const { return centroids_; }

  // Interval type-2 path: Karnik-Mendel center-of-sets type reduction over
  // the fired rules, crisp value at the interval midpoint.
  InferenceResult infer_t2(const FeatureVector& x) const;

  // Type-1 baseline on the upper membership functions: min implication, max
  // aggregation, centroid defuzzification on a uniform output grid.
  InferenceResult infer_t1(const FeatureVector& x) const;

 private:
  RuleBase rulebase_;
  int resolution_;
  std::vector<Interval> centroids_;  // per output subset
};

// Rule base CSV: header with the input variable names plus "consequent",
// then one row of subset names per combination in canonical order.
std::string rulebase_to_csv(const RuleBase& rb);
void save_rulebase_csv(const RuleBase& rb, const std::string& path);
RuleBase load_rulebase_csv(const std::string& path, std::vector<LinguisticVariable> inputs,
                           LinguisticVariable output);

}  // namespace dstyle
