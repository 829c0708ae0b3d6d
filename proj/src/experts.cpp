#include "dstyle/experts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "dstyle/csv.hpp"
#include "dstyle/errors.hpp"

namespace dstyle {

ExpertTerm::ExpertTerm(int v) : value(v) {
  if (v < 1 || v > 9)
    throw DataError("InvalidTerm", "expert term " + std::to_string(v) + " outside 1..9");
}

double map_term(ExpertTerm t) { return t.value / 9.0; }

OwaWeights owa_weights(int n, double a, double b) {
  if (n < 2) throw ConfigError("InvalidQuantifier", "OWA needs at least two opinions");
  if (!(std::isfinite(a) && std::isfinite(b)) || !(0.0 <= a && a < b && b <= 1.0))
    throw ConfigError("InvalidQuantifier", "quantifier parameters need 0 <= a < b <= 1");

  auto Q = [a, b](double r) {
    if (r < a) return 0.0;
    if (r > b) return 1.0;
    return (r - a) / (b - a);
  };
  OwaWeights w{a, b, std::vector<double>(n)};
  for (int i = 1; i <= n; ++i)
    w.w[i - 1] = Q(static_cast<double>(i) / n) - Q(static_cast<double>(i - 1) / n);
  return w;
}

double aggregate_opinions(std::span<const ExpertTerm> opinions, const OwaWeights& weights) {
  if (opinions.size() != weights.w.size())
    throw DataError("LengthMismatch", "opinion count does not match weight count");
  std::vector<double> v(opinions.size());
  for (std::size_t i = 0; i < opinions.size(); ++i) v[i] = map_term(opinions[i]);
  std::stable_sort(v.begin(), v.end(), std::greater<double>());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += weights.w[i] * v[i];
  return s;
}

int consequent_from_value(double v, const LinguisticVariable& output) {
  return label_output(v, output);
}

JudgmentTable load_judgments_csv(const std::string& path,
                                 std::span<const LinguisticVariable> inputs) {
  CsvTable t = read_csv(path);
  if (t.header.size() < inputs.size() + 2)
    throw DataError("IncompleteJudgments",
                    path + ": need the antecedent columns plus at least two expert columns");
  for (std::size_t v = 0; v < inputs.size(); ++v)
    if (t.header[v] != inputs[v].name)
      throw DataError("MalformedCsv", path + ": column '" + t.header[v] +
                                          "' does not match variable '" + inputs[v].name + "'");

  const std::size_t experts = t.header.size() - inputs.size();
  const std::size_t combos = combination_count(inputs);

  JudgmentTable table;
  table.expert_count = experts;
  table.rows.resize(combos);
  std::vector<bool> seen(combos, false);

  for (const auto& row : t.rows) {
    std::size_t r = 0;
    for (std::size_t v = 0; v < inputs.size(); ++v) {
      int idx = inputs[v].subset_index(row[v]);
      if (idx < 0)
        throw DataError("UnknownSubset",
                        path + ": '" + row[v] + "' is not a subset of " + inputs[v].name);
      r = r * inputs[v].subsets.size() + static_cast<std::size_t>(idx);
    }
    if (seen[r]) throw DataError("DuplicateJudgment", path + ": combination repeated");
    seen[r] = true;
    auto& terms = table.rows[r];
    terms.reserve(experts);
    for (std::size_t e = 0; e < experts; ++e) {
      long v = parse_long(row[inputs.size() + e], path);
      if (v < 1 || v > 9)
        throw DataError("InvalidTerm", path + ": expert term " + std::to_string(v) +
                                           " outside 1..9");
      terms.push_back(ExpertTerm(static_cast<int>(v)));
    }
  }

  std::size_t missing = 0;
  std::string example;
  for (std::size_t r = 0; r < combos; ++r) {
    if (seen[r]) continue;
    ++missing;
    if (example.empty()) {
      auto idx = decode_combination(r, inputs);
      for (std::size_t v = 0; v < inputs.size(); ++v) {
        if (v) example += "|";
        example += inputs[v].subsets[idx[v]].name;
      }
    }
  }
  if (missing)
    throw DataError("IncompleteJudgments", path + ": " + std::to_string(missing) +
                                               " combinations missing, first: " + example);
  return table;
}

RuleBase build_rulebase(const JudgmentTable& judgments, double a, double b,
                        std::vector<LinguisticVariable> inputs, LinguisticVariable output,
                        std::vector<RuleProvenance>* provenance) {
  const std::size_t combos = combination_count(inputs);
  if (judgments.rows.size() != combos)
    throw DataError("IncompleteJudgments", "judgment table does not cover every combination");
  if (judgments.expert_count < 2)
    throw DataError("IncompleteJudgments", "need at least two experts");

  OwaWeights w = owa_weights(static_cast<int>(judgments.expert_count), a, b);

  if (provenance) provenance->assign(combos, {});
  std::vector<Rule> rules(combos);
  for (std::size_t r = 0; r < combos; ++r) {
    if (judgments.rows[r].size() != judgments.expert_count)
      throw DataError("IncompleteJudgments", "ragged judgment table");
    double agg = aggregate_opinions(judgments.rows[r], w);
    int consequent = consequent_from_value(agg, output);
    rules[r].antecedent = decode_combination(r, inputs);
    rules[r].consequent = consequent;
    if (provenance) (*provenance)[r] = {agg, consequent};
  }
  return RuleBase(std::move(inputs), std::move(output), std::move(rules));
}

std::string provenance_to_json(const RuleBase& rb, std::span<const RuleProvenance> provenance) {
  if (provenance.size() != rb.rules.size())
    throw DataError("LengthMismatch", "provenance does not cover every rule");
  nlohmann::ordered_json doc;
  for (std::size_t r = 0; r < rb.rules.size(); ++r) {
    std::string key;
    for (std::size_t v = 0; v < rb.inputs.size(); ++v) {
      if (v) key += "|";
      key += rb.inputs[v].subsets[rb.rules[r].antecedent[v]].name;
    }
    doc[key] = {{"aggregated", provenance[r].aggregated},
                {"consequent", rb.output.subsets[provenance[r].consequent].name}};
  }
  return doc.dump(2) + "\n";
}

void save_provenance_json(const RuleBase& rb, std::span<const RuleProvenance> provenance,
                          const std::string& path) {
  write_text_file(path, provenance_to_json(rb, provenance));
}

}  // namespace dstyle
