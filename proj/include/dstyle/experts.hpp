#pragma once

#include <span>
#include <string>
#include <vector>

#include "dstyle/it2.hpp"
#include "dstyle/mamdani.hpp"

namespace dstyle {

// One expert opinion on a 1..9 scale (1 = calmest, 9 = most aggressive).
struct ExpertTerm {
  int value;

  explicit ExpertTerm(int v);
};

// Map an opinion to the unit interval: value / 9.
double map_term(ExpertTerm t);

// Weights of the ordered weighted averaging operator induced by the
// piecewise-linear quantifier Q with parameters 0 <= a < b <= 1:
//   w_i = Q(i/n) - Q((i-1)/n),  Q(r) = clamp((r - a) / (b - a), 0, 1).
struct OwaWeights {
  double a;
  double b;
  std::vector<double> w;
};

OwaWeights owa_weights(int n, double a, double b);

// OWA aggregate of the mapped opinions: sort descending, inner product with
// the weights. Requires opinions.size() == weights.w.size().
double aggregate_opinions(std::span<const ExpertTerm> opinions, const OwaWeights& weights);

// Output subset with the greatest upper membership at v; ties go to the
// higher (more aggressive) index.
int consequent_from_value(double v, const LinguisticVariable& output);

// Expert judgments for every antecedent combination, canonical row order.
struct JudgmentTable {
  std::size_t expert_count = 0;
  std::vector<std::vector<ExpertTerm>> rows;  // rows[combination][expert]
};

// Judgment CSV: one column of subset names per input variable, then one
// integer column per expert. Rows may arrive in any order; every combination
// must appear exactly once (IncompleteJudgments / DuplicateJudgment).
JudgmentTable load_judgments_csv(const std::string& path,
                                 std::span<const LinguisticVariable> inputs);

struct RuleProvenance {
  double aggregated = 0.0;  // OWA value in [0, 1]
  int consequent = 0;
};

// OWA-aggregate each judgment row and pick the consequent subset nearest the
// aggregate. Quantifier parameters (a, b) follow the config.
RuleBase build_rulebase(const JudgmentTable& judgments, double a, double b,
                        std::vector<LinguisticVariable> inputs, LinguisticVariable output,
                        std::vector<RuleProvenance>* provenance = nullptr);

// Provenance JSON: maps each rule's antecedent key "Name1|Name2|..." to its
// aggregated value and chosen consequent.
std::string provenance_to_json(const RuleBase& rb, std::span<const RuleProvenance> provenance);
void save_provenance_json(const RuleBase& rb, std::span<const RuleProvenance> provenance,
                          const std::string& path);

}  // namespace dstyle
