// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics for subcircuit predictions: strict cluster-level and
// node-level precision/recall/F1, confusion matrices with a <none>
// sentinel, and corpus aggregation.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subckt/annotation.hpp"

namespace subckt {

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LevelMismatchError : MetricsError {
  explicit LevelMismatchError(const std::string& what) : MetricsError(what) {}
};

struct EmptyCorpusError : MetricsError {
  EmptyCorpusError() : MetricsError("empty corpus") {}
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Raw match counts behind a Scores triple, kept so that per-netlist
/// results can be micro-aggregated before ratios are formed. Weights are
/// device counts for the strict metric and (device, label) pair counts for
/// the node metric; 0/0 ratios are defined as 0.
struct ScoreCounts {
  double matched_pred = 0.0;
  double total_pred = 0.0;
  double matched_truth = 0.0;
  double total_truth = 0.0;

  Scores ratios() const;
  ScoreCounts& operator+=(const ScoreCounts& other);
};

/// Strict cluster-level counts: a predicted instance is a true positive
/// only when some ground-truth instance matches its label and component
/// set exactly; weights are component counts.
ScoreCounts strict_counts(const AnnotationSet& pred, const AnnotationSet& truth,
                          HierarchyLevel level);
Scores strict_scores(const AnnotationSet& pred, const AnnotationSet& truth,
                     HierarchyLevel level);

/// Node-level counts over (device, label) pair multisets, micro-averaged
/// across the labels of the level. `universe` must cover every referenced
/// device.
ScoreCounts node_counts(const AnnotationSet& pred, const AnnotationSet& truth,
                        HierarchyLevel level,
                        const std::set<std::string>& universe);
Scores node_scores(const AnnotationSet& pred, const AnnotationSet& truth,
                   HierarchyLevel level, const std::set<std::string>& universe);

inline const char* kNoneLabel = "<none>";

/// Rows are ground-truth labels, columns predicted labels; both carry the
/// trailing <none> sentinel for unlabeled devices.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> counts;

  long at(const std::string& truth_label, const std::string& pred_label) const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

ConfusionMatrix confusion(const AnnotationSet& pred, const AnnotationSet& truth,
                          HierarchyLevel level,
                          const std::set<std::string>& universe);

struct NetlistEval {
  std::string id;
  HierarchyLevel level = HierarchyLevel::HL1;
  ScoreCounts strict;
  ScoreCounts node;
};

struct LevelSummary {
  Scores strict_micro;
  Scores node_micro;
  double strict_f1_mean = 0.0;  // unweighted mean of per-netlist F1
  double node_f1_mean = 0.0;
  std::size_t netlists = 0;
};

struct EvalReport {
  std::map<HierarchyLevel, LevelSummary> levels;
  std::map<HierarchyLevel, ConfusionMatrix> confusions;
  std::vector<NetlistEval> breakdown;
};

/// Micro-aggregate per-netlist counts per level and also report the
/// unweighted mean of per-netlist F1. Throws EmptyCorpusError on empty
/// input.
EvalReport aggregate(const std::vector<NetlistEval>& per_netlist);

/// Aligned text table with strict and node columns per level.
std::string format_report(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace subckt
