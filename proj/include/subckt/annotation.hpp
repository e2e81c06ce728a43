// SPDX-License-Identifier: Apache-2.0
//
// Subcircuit labels and instance annotations shared by detectors, metrics,
// and the benchmark corpus. Annotation documents use the JSON schema
// [{"sub_circuit_name": <label>, "components": [<device names>]}, ...].

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace subckt {

enum class HierarchyLevel { HL1, HL2, HL3 };

std::string to_string(HierarchyLevel level);
HierarchyLevel level_from_string(const std::string& s);

/// Canonical label names per level.
const std::vector<std::string>& canonical_labels(HierarchyLevel level);
bool is_canonical_label(HierarchyLevel level, const std::string& name);

struct Label {
  HierarchyLevel level;
  std::string name;

  bool operator==(const Label& other) const {
    return level == other.level && name == other.name;
  }
  bool operator<(const Label& other) const {
    return level != other.level ? level < other.level : name < other.name;
  }
};

/// One subcircuit occurrence: a label plus the exact component set.
/// Components are kept sorted and unique.
struct SubcircuitInstance {
  Label label;
  std::vector<std::string> components;

  SubcircuitInstance() = default;
  SubcircuitInstance(Label lbl, std::vector<std::string> comps);

  bool operator==(const SubcircuitInstance& other) const {
    return label == other.label && components == other.components;
  }
  bool operator<(const SubcircuitInstance& other) const {
    return label != other.label ? label < other.label
                                : components < other.components;
  }
};

struct AnnotationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-level collection of subcircuit instances, used for both ground truth
/// and predictions. Within a level no two instances share (label, components);
/// adding a duplicate is a no-op.
class AnnotationSet {
 public:
  AnnotationSet() = default;

  void add(SubcircuitInstance instance);
  void add_all(const std::vector<SubcircuitInstance>& instances);

  const std::vector<SubcircuitInstance>& level(HierarchyLevel lvl) const;
  std::vector<HierarchyLevel> levels_present() const;
  bool empty() const;
  std::size_t instance_count() const;

  /// All device names referenced at one level.
  std::set<std::string> devices_at(HierarchyLevel lvl) const;

  /// Order-insensitive: two sets are equal when they hold the same
  /// instances per level.
  bool operator==(const AnnotationSet& other) const;

 private:
  std::map<HierarchyLevel, std::vector<SubcircuitInstance>> levels_;
};

/// Serialize one level as an annotation document (pretty-printed JSON).
std::string serialize_annotations(const AnnotationSet& set,
                                  HierarchyLevel level);

/// Parse an annotation document into instances for `level`. Label names are
/// preserved verbatim (variant names survive until canonicalization).
/// Throws AnnotationError on malformed documents.
AnnotationSet parse_annotations(const std::string& text, HierarchyLevel level);

}  // namespace subckt
