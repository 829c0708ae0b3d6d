#include "dstyle/mamdani.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dstyle/csv.hpp"
#include "dstyle/errors.hpp"

namespace dstyle {

std::size_t combination_count(std::span<const LinguisticVariable> inputs) {
  std::size_t n = 1;
  for (const auto& v : inputs) n *= v.subsets.size();
  return n;
}

std::vector<int> decode_combination(std::size_t r, std::span<const LinguisticVariable> inputs) {
  std::vector<int> idx(inputs.size(), 0);
  for (std::size_t v = inputs.size(); v-- > 0;) {
    std::size_t m = inputs[v].subsets.size();
    idx[v] = static_cast<int>(r % m);
    r /= m;
  }
  return idx;
}

RuleBase::RuleBase(std::vector<LinguisticVariable> inputs_, LinguisticVariable output_,
                   std::vector<Rule> rules_)
    : inputs(std::move(inputs_)), output(std::move(output_)), rules(std::move(rules_)) {
  if (inputs.empty()) throw ConfigError("InvalidRuleBase", "rule base needs input variables");
  const std::size_t expected = combination_count(inputs);

  for (const auto& r : rules) {
    if (r.antecedent.size() != inputs.size())
      throw ConfigError("InvalidRuleBase", "rule antecedent arity mismatch");
    for (std::size_t v = 0; v < inputs.size(); ++v)
      if (r.antecedent[v] < 0 ||
          r.antecedent[v] >= static_cast<int>(inputs[v].subsets.size()))
        throw ConfigError("InvalidRuleBase", "rule antecedent index out of range");
    if (r.consequent < 0 || r.consequent >= static_cast<int>(output.subsets.size()))
      throw ConfigError("InvalidRuleBase", "rule consequent index out of range");
  }
  if (rules.size() != expected)
    throw ConfigError("InvalidRuleBase",
                      "expected " + std::to_string(expected) + " rules, got " +
                          std::to_string(rules.size()));

  std::stable_sort(rules.begin(), rules.end(),
                   [](const Rule& a, const Rule& b) { return a.antecedent < b.antecedent; });
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (rules[r].antecedent != decode_combination(r, inputs)) {
      // Sorted position not matching the enumeration means a duplicate
      // displaced some combination.
      throw ConfigError("InvalidRuleBase", "duplicate or missing antecedent combination");
    }
  }
}

std::vector<std::vector<MembershipInterval>> fuzzify(const FeatureVector& x,
                                                     std::span<const LinguisticVariable> inputs) {
  if (inputs.size() != 4)
    throw ConfigError("InvalidRuleBase", "expected 4 input variables, got " +
                                             std::to_string(inputs.size()));
  const auto values = x.to_array();
  for (double v : values)
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "feature vector has a non-finite entry");

  std::vector<std::vector<MembershipInterval>> out(inputs.size());
  for (std::size_t v = 0; v < inputs.size(); ++v) {
    double xv = inputs[v].clamp(values[v]);
    out[v].reserve(inputs[v].subsets.size());
    for (const auto& s : inputs[v].subsets) out[v].push_back(membership_interval(s, xv));
  }
  return out;
}

MembershipInterval firing_strength(const Rule& rule,
                                   const std::vector<std::vector<MembershipInterval>>& fuzzified) {
  if (rule.antecedent.size() != fuzzified.size())
    throw DataError("LengthMismatch", "rule arity does not match fuzzified input");
  MembershipInterval f{1.0, 1.0};
  for (std::size_t v = 0; v < fuzzified.size(); ++v) {
    const auto& m = fuzzified[v][rule.antecedent[v]];
    f.lo = std::min(f.lo, m.lo);
    f.hi = std::min(f.hi, m.hi);
  }
  return f;
}

int label_output(double crisp, const LinguisticVariable& output) {
  if (!std::isfinite(crisp)) throw DataError("NonFiniteInput", "crisp value is not finite");
  double x = output.clamp(crisp);
  std::vector<double> ms(output.subsets.size());
  double best = 0.0;
  for (std::size_t i = 0; i < output.subsets.size(); ++i) {
    ms[i] = eval_trapezoid(output.subsets[i].upper, x);
    best = std::max(best, ms[i]);
  }
  int winner = 0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i] >= best - 1e-9) winner = static_cast<int>(i);
  return winner;
}

InferenceEngine::InferenceEngine(RuleBase rulebase, int resolution)
    : rulebase_(std::move(rulebase)), resolution_(resolution) {
  if (resolution_ < 2) throw ConfigError("InvalidResolution", "resolution must be >= 2");
  centroids_.reserve(rulebase_.output.subsets.size());
  for (const auto& s : rulebase_.output.subsets) centroids_.push_back(km_centroid(s, resolution_));
}

InferenceResult InferenceEngine::infer_t2(const FeatureVector& x) const {
  InferenceResult res;
  res.fuzzified = fuzzify(x, rulebase_.inputs);
  res.firings.reserve(rulebase_.rules.size());

  std::vector<Interval> endpoints;
  std::vector<MembershipInterval> fired;
  for (const auto& rule : rulebase_.rules) {
    MembershipInterval f = firing_strength(rule, res.fuzzified);
    res.firings.push_back(f);
    if (f.hi > 0.0) {
      endpoints.push_back(centroids_[rule.consequent]);
      fired.push_back(f);
    }
  }
  if (fired.empty()) throw NumericError("NoRuleFired", "no rule fired for the given input");

  res.reduced = km_weighted_average(endpoints, fired);
  res.crisp = res.reduced.mid();
  res.label = label_output(res.crisp, rulebase_.output);
  return res;
}

InferenceResult InferenceEngine::infer_t1(const FeatureVector& x) const {
  InferenceResult res;
  res.fuzzified = fuzzify(x, rulebase_.inputs);
  res.firings.reserve(rulebase_.rules.size());

  std::vector<double> strength(rulebase_.rules.size());
  double max_strength = 0.0;
  for (std::size_t r = 0; r < rulebase_.rules.size(); ++r) {
    double f = 1.0;
    for (std::size_t v = 0; v < rulebase_.inputs.size(); ++v)
      f = std::min(f, res.fuzzified[v][rulebase_.rules[r].antecedent[v]].hi);
    strength[r] = f;
    max_strength = std::max(max_strength, f);
    res.firings.push_back({f, f});
  }
  if (max_strength <= 0.0) throw NumericError("NoRuleFired", "no rule fired for the given input");

  // Clip each consequent's upper membership function at the rule strength,
  // aggregate by max, then take the centroid by the trapezoid quadrature.
  const auto& out = rulebase_.output;
  const int n = resolution_;
  const double step = (out.hi - out.lo) / (n - 1);
  double num = 0.0, den = 0.0;
  double prev_x = 0.0, prev_m = 0.0;
  for (int i = 0; i < n; ++i) {
    double xg = (i == n - 1) ? out.hi : out.lo + i * step;
    double m = 0.0;
    for (std::size_t r = 0; r < rulebase_.rules.size(); ++r) {
      if (strength[r] <= 0.0) continue;
      double mu = eval_trapezoid(out.subsets[rulebase_.rules[r].consequent].upper, xg);
      m = std::max(m, std::min(strength[r], mu));
    }
    if (i > 0) {
      num += 0.5 * (prev_x * prev_m + xg * m) * (xg - prev_x);
      den += 0.5 * (prev_m + m) * (xg - prev_x);
    }
    prev_x = xg;
    prev_m = m;
  }
  if (den <= 0.0) throw NumericError("NoRuleFired", "aggregated output has zero area");

  res.crisp = num / den;
  res.reduced = {res.crisp, res.crisp};
  res.label = label_output(res.crisp, rulebase_.output);
  return res;
}

std::string rulebase_to_csv(const RuleBase& rb) {
  std::string text;
  std::vector<std::string> header;
  for (const auto& v : rb.inputs) header.push_back(v.name);
  header.push_back("consequent");
  text += csv_join(header) + "\n";
  for (const auto& rule : rb.rules) {
    std::vector<std::string> row;
    for (std::size_t v = 0; v < rb.inputs.size(); ++v)
      row.push_back(rb.inputs[v].subsets[rule.antecedent[v]].name);
    row.push_back(rb.output.subsets[rule.consequent].name);
    text += csv_join(row) + "\n";
  }
  return text;
}

void save_rulebase_csv(const RuleBase& rb, const std::string& path) {
  write_text_file(path, rulebase_to_csv(rb));
}

RuleBase load_rulebase_csv(const std::string& path, std::vector<LinguisticVariable> inputs,
                           LinguisticVariable output) {
  CsvTable t = read_csv(path);
  if (t.header.size() != inputs.size() + 1)
    throw DataError("MalformedCsv", path + ": expected " + std::to_string(inputs.size() + 1) +
                                        " columns");
  for (std::size_t v = 0; v < inputs.size(); ++v)
    if (t.header[v] != inputs[v].name)
      throw DataError("MalformedCsv", path + ": column '" + t.header[v] +
                                          "' does not match variable '" + inputs[v].name + "'");

  std::vector<Rule> rules;
  rules.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    Rule r;
    r.antecedent.resize(inputs.size());
    for (std::size_t v = 0; v < inputs.size(); ++v) {
      int idx = inputs[v].subset_index(row[v]);
      if (idx < 0)
        throw DataError("UnknownSubset",
                        path + ": '" + row[v] + "' is not a subset of " + inputs[v].name);
      r.antecedent[v] = idx;
    }
    int c = output.subset_index(row.back());
    if (c < 0)
      throw DataError("UnknownSubset", path + ": '" + row.back() + "' is not an output subset");
    r.consequent = c;
    rules.push_back(std::move(r));
  }
  try {
    return RuleBase(std::move(inputs), std::move(output), std::move(rules));
  } catch (const ConfigError& e) {
    throw DataError("InvalidRuleBase", path + ": " + e.what());
  }
}

}  // namespace dstyle
