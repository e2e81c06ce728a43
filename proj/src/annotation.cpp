// SPDX-License-Identifier: Apache-2.0

#include "subckt/annotation.hpp"

#include <algorithm>

#include <json.hpp>

namespace subckt {

std::string to_string(HierarchyLevel level) {
  switch (level) {
    case HierarchyLevel::HL1: return "hl1";
    case HierarchyLevel::HL2: return "hl2";
    case HierarchyLevel::HL3: return "hl3";
  }
  return "?";
}

HierarchyLevel level_from_string(const std::string& s) {
  std::string n;
  for (char c : s) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "hl1" || n == "1") return HierarchyLevel::HL1;
  if (n == "hl2" || n == "2") return HierarchyLevel::HL2;
  if (n == "hl3" || n == "3") return HierarchyLevel::HL3;
  throw AnnotationError("unknown hierarchy level '" + s + "'");
}

const std::vector<std::string>& canonical_labels(HierarchyLevel level) {
  static const std::vector<std::string> hl1 = {"MosfetDiode", "load_cap",
                                               "compensation_cap"};
  static const std::vector<std::string> hl2 = {"CM", "DiffPair", "Inverter"};
  static const std::vector<std::string> hl3 = {"firstStage", "secondStage",
                                               "thirdStage", "feedBack",
                                               "loadPart",   "biasPart"};
  switch (level) {
    case HierarchyLevel::HL1: return hl1;
    case HierarchyLevel::HL2: return hl2;
    case HierarchyLevel::HL3: return hl3;
  }
  return hl1;
}

bool is_canonical_label(HierarchyLevel level, const std::string& name) {
  const auto& names = canonical_labels(level);
  return std::find(names.begin(), names.end(), name) != names.end();
}

SubcircuitInstance::SubcircuitInstance(Label lbl, std::vector<std::string> comps)
    : label(std::move(lbl)), components(std::move(comps)) {
  if (components.empty())
    throw AnnotationError("instance of '" + label.name +
                          "' has no components");
  std::sort(components.begin(), components.end());
  components.erase(std::unique(components.begin(), components.end()),
                   components.end());
}

void AnnotationSet::add(SubcircuitInstance instance) {
  auto& bucket = levels_[instance.label.level];
  if (std::find(bucket.begin(), bucket.end(), instance) != bucket.end())
    return;
  bucket.push_back(std::move(instance));
}

void AnnotationSet::add_all(const std::vector<SubcircuitInstance>& instances) {
  for (const auto& inst : instances) add(inst);
}

const std::vector<SubcircuitInstance>& AnnotationSet::level(
    HierarchyLevel lvl) const {
  static const std::vector<SubcircuitInstance> empty;
  auto it = levels_.find(lvl);
  return it == levels_.end() ? empty : it->second;
}

std::vector<HierarchyLevel> AnnotationSet::levels_present() const {
  std::vector<HierarchyLevel> out;
  for (const auto& [lvl, insts] : levels_)
    if (!insts.empty()) out.push_back(lvl);
  return out;
}

bool AnnotationSet::empty() const {
  return levels_present().empty();
}

std::size_t AnnotationSet::instance_count() const {
  std::size_t n = 0;
  for (const auto& [lvl, insts] : levels_) n += insts.size();
  return n;
}

bool AnnotationSet::operator==(const AnnotationSet& other) const {
  for (auto lvl : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3}) {
    auto a = level(lvl);
    auto b = other.level(lvl);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  return true;
}

std::set<std::string> AnnotationSet::devices_at(HierarchyLevel lvl) const {
  std::set<std::string> out;
  for (const auto& inst : level(lvl))
    out.insert(inst.components.begin(), inst.components.end());
  return out;
}

std::string serialize_annotations(const AnnotationSet& set,
                                  HierarchyLevel level) {
  nlohmann::json doc = nlohmann::json::array();
  auto instances = set.level(level);
  std::sort(instances.begin(), instances.end());
  for (const auto& inst : instances) {
    nlohmann::json obj;
    obj["sub_circuit_name"] = inst.label.name;
    obj["components"] = inst.components;
    doc.push_back(obj);
  }
  return doc.dump(2) + "\n";
}

AnnotationSet parse_annotations(const std::string& text,
                                HierarchyLevel level) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw AnnotationError(std::string("malformed annotation document: ") +
                          e.what());
  }
  if (!doc.is_array())
    throw AnnotationError("annotation document must be a list of objects");

  AnnotationSet set;
  for (const auto& obj : doc) {
    if (!obj.is_object() || !obj.contains("sub_circuit_name") ||
        !obj.contains("components"))
      throw AnnotationError(
          "annotation entries need sub_circuit_name and components");
    const auto& comps_json = obj.at("components");
    if (!obj.at("sub_circuit_name").is_string() || !comps_json.is_array())
      throw AnnotationError("malformed annotation entry");
    std::vector<std::string> comps;
    for (const auto& c : comps_json) {
      if (!c.is_string())
        throw AnnotationError("component names must be strings");
      comps.push_back(c.get<std::string>());
    }
    set.add(SubcircuitInstance({level, obj.at("sub_circuit_name").get<std::string>()},
                               std::move(comps)));
  }
  return set;
}

}  // namespace subckt
