// SPDX-License-Identifier: Apache-2.0

#include "subckt/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace subckt {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double precision, double recall) {
  double den = precision + recall;
  return den > 0.0 ? 2.0 * precision * recall / den : 0.0;
}

void check_level(const AnnotationSet& set, HierarchyLevel level,
                 const char* which) {
  for (const auto& inst : set.level(level))
    if (inst.label.level != level)
      throw LevelMismatchError(std::string(which) +
                               " instances disagree with the requested level");
}

/// Multiset of (device, label) pairs at one level.
std::map<std::pair<std::string, std::string>, long> pair_multiset(
    const AnnotationSet& set, HierarchyLevel level) {
  std::map<std::pair<std::string, std::string>, long> pairs;
  for (const auto& inst : set.level(level))
    for (const auto& comp : inst.components)
      ++pairs[{comp, inst.label.name}];
  return pairs;
}

void check_universe(const AnnotationSet& set, HierarchyLevel level,
                    const std::set<std::string>& universe, const char* which) {
  for (const auto& dev : set.devices_at(level))
    if (universe.count(dev) == 0)
      throw MetricsError(std::string(which) + " references device '" + dev +
                         "' outside the universe");
}

}  // namespace

Scores ScoreCounts::ratios() const {
  Scores s;
  s.precision = ratio(matched_pred, total_pred);
  s.recall = ratio(matched_truth, total_truth);
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

ScoreCounts& ScoreCounts::operator+=(const ScoreCounts& other) {
  matched_pred += other.matched_pred;
  total_pred += other.total_pred;
  matched_truth += other.matched_truth;
  total_truth += other.total_truth;
  return *this;
}

ScoreCounts strict_counts(const AnnotationSet& pred, const AnnotationSet& truth,
                          HierarchyLevel level) {
  check_level(pred, level, "pred");
  check_level(truth, level, "truth");

  // Instances are unique per (label, components) within a set, so exact
  // matching is one-to-one by construction.
  std::set<SubcircuitInstance> truth_set(truth.level(level).begin(),
                                         truth.level(level).end());
  ScoreCounts counts;
  for (const auto& inst : pred.level(level)) {
    double weight = static_cast<double>(inst.components.size());
    counts.total_pred += weight;
    auto it = truth_set.find(inst);
    if (it != truth_set.end()) {
      counts.matched_pred += weight;
      counts.matched_truth += static_cast<double>(it->components.size());
      truth_set.erase(it);
    }
  }
  for (const auto& inst : truth.level(level))
    counts.total_truth += static_cast<double>(inst.components.size());
  return counts;
}

Scores strict_scores(const AnnotationSet& pred, const AnnotationSet& truth,
                     HierarchyLevel level) {
  return strict_counts(pred, truth, level).ratios();
}

ScoreCounts node_counts(const AnnotationSet& pred, const AnnotationSet& truth,
                        HierarchyLevel level,
                        const std::set<std::string>& universe) {
  check_level(pred, level, "pred");
  check_level(truth, level, "truth");
  check_universe(pred, level, universe, "pred");
  check_universe(truth, level, universe, "truth");

  auto pred_pairs = pair_multiset(pred, level);
  auto truth_pairs = pair_multiset(truth, level);

  ScoreCounts counts;
  for (const auto& [pair, n] : pred_pairs) {
    counts.total_pred += static_cast<double>(n);
    auto it = truth_pairs.find(pair);
    if (it != truth_pairs.end())
      counts.matched_pred += static_cast<double>(std::min(n, it->second));
  }
  for (const auto& [pair, n] : truth_pairs) counts.total_truth += static_cast<double>(n);
  counts.matched_truth = counts.matched_pred;
  return counts;
}

Scores node_scores(const AnnotationSet& pred, const AnnotationSet& truth,
                   HierarchyLevel level,
                   const std::set<std::string>& universe) {
  return node_counts(pred, truth, level, universe).ratios();
}

long ConfusionMatrix::at(const std::string& truth_label,
                         const std::string& pred_label) const {
  auto row = std::find(labels.begin(), labels.end(), truth_label);
  auto col = std::find(labels.begin(), labels.end(), pred_label);
  if (row == labels.end() || col == labels.end())
    throw MetricsError("unknown confusion label");
  return counts[static_cast<std::size_t>(row - labels.begin())]
               [static_cast<std::size_t>(col - labels.begin())];
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (labels.empty()) {
    *this = other;
    return *this;
  }
  if (labels != other.labels)
    throw MetricsError("confusion matrices have different label sets");
  for (std::size_t r = 0; r < counts.size(); ++r)
    for (std::size_t c = 0; c < counts[r].size(); ++c)
      counts[r][c] += other.counts[r][c];
  return *this;
}

ConfusionMatrix confusion(const AnnotationSet& pred, const AnnotationSet& truth,
                          HierarchyLevel level,
                          const std::set<std::string>& universe) {
  check_level(pred, level, "pred");
  check_level(truth, level, "truth");
  check_universe(pred, level, universe, "pred");
  check_universe(truth, level, universe, "truth");

  ConfusionMatrix cm;
  cm.labels = canonical_labels(level);
  // Non-canonical labels present in either set get their own rows/columns.
  auto admit = [&](const std::string& name) {
    if (std::find(cm.labels.begin(), cm.labels.end(), name) == cm.labels.end())
      cm.labels.push_back(name);
  };
  for (const auto& inst : truth.level(level)) admit(inst.label.name);
  for (const auto& inst : pred.level(level)) admit(inst.label.name);
  cm.labels.push_back(kNoneLabel);

  std::size_t n = cm.labels.size();
  cm.counts.assign(n, std::vector<long>(n, 0));
  auto index = [&](const std::string& name) {
    return static_cast<std::size_t>(
        std::find(cm.labels.begin(), cm.labels.end(), name) -
        cm.labels.begin());
  };

  // Distinct labels per device on each side.
  std::map<std::string, std::set<std::string>> truth_labels, pred_labels;
  for (const auto& inst : truth.level(level))
    for (const auto& comp : inst.components)
      truth_labels[comp].insert(inst.label.name);
  for (const auto& inst : pred.level(level))
    for (const auto& comp : inst.components)
      pred_labels[comp].insert(inst.label.name);

  for (const auto& [dev, tl] : truth_labels) {
    auto pit = pred_labels.find(dev);
    for (const auto& lbl : tl) {
      std::size_t row = index(lbl);
      if (pit == pred_labels.end() || pit->second.empty()) {
        ++cm.counts[row][index(kNoneLabel)];
      } else if (pit->second.count(lbl) != 0) {
        ++cm.counts[row][row];
      } else {
        for (const auto& other : pit->second) ++cm.counts[row][index(other)];
      }
    }
  }
  // Predicted labels on devices the ground truth never mentions.
  for (const auto& [dev, pl] : pred_labels) {
    if (truth_labels.count(dev) != 0) continue;
    for (const auto& lbl : pl) ++cm.counts[index(kNoneLabel)][index(lbl)];
  }
  return cm;
}

EvalReport aggregate(const std::vector<NetlistEval>& per_netlist) {
  if (per_netlist.empty()) throw EmptyCorpusError();

  EvalReport report;
  report.breakdown = per_netlist;
  std::map<HierarchyLevel, ScoreCounts> strict_sum, node_sum;
  std::map<HierarchyLevel, std::vector<double>> strict_f1s, node_f1s;
  for (const auto& eval : per_netlist) {
    strict_sum[eval.level] += eval.strict;
    node_sum[eval.level] += eval.node;
    strict_f1s[eval.level].push_back(eval.strict.ratios().f1);
    node_f1s[eval.level].push_back(eval.node.ratios().f1);
  }
  auto mean = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
  };
  for (const auto& [level, counts] : strict_sum) {
    LevelSummary summary;
    summary.strict_micro = counts.ratios();
    summary.node_micro = node_sum[level].ratios();
    summary.strict_f1_mean = mean(strict_f1s[level]);
    summary.node_f1_mean = mean(node_f1s[level]);
    summary.netlists = strict_f1s[level].size();
    report.levels[level] = summary;
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(7) << "level" << std::right << std::setw(7)
      << "count" << std::setw(11) << "PR_strict" << std::setw(11)
      << "RC_strict" << std::setw(11) << "F1_strict" << std::setw(8) << "PR"
      << std::setw(8) << "RC" << std::setw(8) << "F1" << std::setw(11)
      << "F1s_mean" << std::setw(11) << "F1n_mean" << "\n";
  for (const auto& [level, s] : report.levels) {
    out << std::left << std::setw(7) << to_string(level) << std::right
        << std::setw(7) << s.netlists << std::setw(11) << s.strict_micro.precision
        << std::setw(11) << s.strict_micro.recall << std::setw(11)
        << s.strict_micro.f1 << std::setw(8) << s.node_micro.precision
        << std::setw(8) << s.node_micro.recall << std::setw(8)
        << s.node_micro.f1 << std::setw(11) << s.strict_f1_mean
        << std::setw(11) << s.node_f1_mean << "\n";
  }
  for (const auto& [level, cm] : report.confusions) {
    out << "\nconfusion " << to_string(level) << " (rows = truth)\n";
    std::size_t width = 12;
    out << std::left << std::setw(static_cast<int>(width)) << "";
    for (const auto& lbl : cm.labels)
      out << std::right << std::setw(static_cast<int>(width)) << lbl;
    out << "\n";
    for (std::size_t r = 0; r < cm.labels.size(); ++r) {
      out << std::left << std::setw(static_cast<int>(width)) << cm.labels[r];
      for (std::size_t c = 0; c < cm.labels.size(); ++c)
        out << std::right << std::setw(static_cast<int>(width))
            << cm.counts[r][c];
      out << "\n";
    }
  }
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json doc;
  for (const auto& [level, s] : report.levels) {
    nlohmann::json entry;
    entry["netlists"] = s.netlists;
    entry["strict"] = {{"precision", s.strict_micro.precision},
                       {"recall", s.strict_micro.recall},
                       {"f1", s.strict_micro.f1},
                       {"f1_mean", s.strict_f1_mean}};
    entry["node"] = {{"precision", s.node_micro.precision},
                     {"recall", s.node_micro.recall},
                     {"f1", s.node_micro.f1},
                     {"f1_mean", s.node_f1_mean}};
    doc[to_string(level)] = entry;
  }
  for (const auto& [level, cm] : report.confusions) {
    nlohmann::json entry;
    entry["labels"] = cm.labels;
    entry["counts"] = cm.counts;
    doc[to_string(level)]["confusion"] = entry;
  }
  nlohmann::json breakdown = nlohmann::json::array();
  for (const auto& eval : report.breakdown) {
    auto strict = eval.strict.ratios();
    auto node = eval.node.ratios();
    breakdown.push_back({{"id", eval.id},
                         {"level", to_string(eval.level)},
                         {"strict_f1", strict.f1},
                         {"node_f1", node.f1}});
  }
  doc["breakdown"] = breakdown;
  return doc.dump(2) + "\n";
}

}  // namespace subckt
