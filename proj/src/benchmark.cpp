// SPDX-License-Identifier: Apache-2.0

#include "subckt/benchmark.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "subckt/detectors.hpp"

namespace subckt {

namespace fs = std::filesystem;

void TaxonomyMap::add(const std::string& variant, Label canonical) {
  if (!is_canonical_label(canonical.level, canonical.name))
    throw BenchmarkError("taxonomy target '" + canonical.name +
                         "' is not a canonical label");
  map_[variant] = canonical;
}

bool TaxonomyMap::known(const std::string& name) const {
  if (map_.count(name) != 0) return true;
  for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3})
    if (is_canonical_label(level, name)) return true;
  return false;
}

Label TaxonomyMap::canonical(const std::string& name) const {
  auto it = map_.find(name);
  if (it != map_.end()) return it->second;
  for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3})
    if (is_canonical_label(level, name)) return {level, name};
  throw UnknownLabelError(name);
}

const TaxonomyMap& TaxonomyMap::standard() {
  static const TaxonomyMap taxonomy = [] {
    TaxonomyMap t;
    auto hl1 = [](const char* n) { return Label{HierarchyLevel::HL1, n}; };
    auto hl2 = [](const char* n) { return Label{HierarchyLevel::HL2, n}; };
    auto hl3 = [](const char* n) { return Label{HierarchyLevel::HL3, n}; };

    t.add("MosfetDiodeArray", hl1("MosfetDiode"));
    t.add("CapacitorArray(type=load)", hl1("load_cap"));
    t.add("CapacitorArray(type=compensation)", hl1("compensation_cap"));

    for (const char* v : {"MosfetSimpleCurrentMirror",
                          "MosfetCascodeCurrentMirror",
                          "MosfetWideSwingCascodeCurrentMirror",
                          "MosfetFourTransistorCurrentMirror",
                          "MosfetWilsonCurrentMirror",
                          "MosfetImprovedWilsonCurrentMirror"})
      t.add(v, hl2("CM"));

    for (const char* v : {"MosfetDifferentialPair",
                          "MosfetCascodedDifferentialPair",
                          "MosfetFoldedCascodeDifferentialPair"})
      t.add(v, hl2("DiffPair"));

    for (const char* v : {"MosfetAnalogInverter",
                          "MosfetCascodedAnalogInverter",
                          "MosfetCascodedPMOSAnalogInverter",
                          "MosfetCascodedNMOSAnalogInverter",
                          "MosfetCascodePMOSAnalogInverterOneDiodeTransistor",
                          "MosfetCascodeNMOSAnalogInverterOneDiodeTransistor",
                          "MosfetCascodeAnalogInverterNmosDiodeTransistor",
                          "MosfetCascodeAnalogInverterPmosDiodeTransistor",
                          "MosfetCascodeAnalogInverterNmosCurrentMirrorLoad"})
      t.add(v, hl2("Inverter"));

    for (const char* v : {"firstStage", "secondStage", "thirdStage",
                          "loadPart", "biasPart", "feedBack"})
      t.add(v, hl3(v));
    return t;
  }();
  return taxonomy;
}

std::string to_string(SizeBucket bucket) {
  switch (bucket) {
    case SizeBucket::Small: return "Small";
    case SizeBucket::Medium: return "Medium";
    case SizeBucket::Large: return "Large";
  }
  return "?";
}

SizeBucket size_bucket(const Netlist& netlist) {
  std::size_t n = netlist.mosfet_count();
  if (n < 20) return SizeBucket::Small;
  if (n <= 30) return SizeBucket::Medium;
  return SizeBucket::Large;
}

AnnotationSet canonicalize(const AnnotationSet& truth,
                           const TaxonomyMap& taxonomy) {
  AnnotationSet out;
  for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3})
    for (const auto& inst : truth.level(level))
      out.add(SubcircuitInstance(taxonomy.canonical(inst.label.name),
                                 inst.components));
  return out;
}

AnnotationSet merge_shared_diode_cms(const AnnotationSet& truth,
                                     const Netlist& netlist) {
  AnnotationSet out;
  for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3}) {
    if (level == HierarchyLevel::HL2) {
      out.add_all(merge_cm_instances(truth.level(level), netlist));
    } else {
      out.add_all(truth.level(level));
    }
  }
  return out;
}

BenchmarkEntry load_entry(const fs::path& sp_path) {
  BenchmarkEntry entry;
  entry.id = sp_path.stem().string();

  std::ifstream sp(sp_path);
  if (!sp) throw BenchmarkError("cannot read " + sp_path.string());
  std::stringstream buffer;
  buffer << sp.rdbuf();
  entry.netlist = parse_netlist(buffer.str());
  entry.transistor_count = entry.netlist.mosfet_count();
  entry.bucket = size_bucket(entry.netlist);

  const std::pair<const char*, HierarchyLevel> kLevels[] = {
      {".hl1", HierarchyLevel::HL1},
      {".hl2", HierarchyLevel::HL2},
      {".hl3", HierarchyLevel::HL3}};
  for (const auto& [ext, level] : kLevels) {
    fs::path doc = sp_path;
    doc.replace_extension(ext);
    if (!fs::exists(doc)) continue;
    std::ifstream in(doc);
    std::stringstream text;
    text << in.rdbuf();
    auto parsed = parse_annotations(text.str(), level);
    for (const auto& inst : parsed.level(level)) {
      for (const auto& comp : inst.components)
        if (!entry.netlist.has_device(comp))
          throw BenchmarkError("annotation for " + entry.id +
                               " references unknown device '" + comp + "'");
      entry.truth.add(inst);
    }
  }
  return entry;
}

std::vector<BenchmarkEntry> load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw BenchmarkError("corpus directory " + dir.string() + " not found");
  std::vector<fs::path> sp_files;
  for (const auto& item : fs::directory_iterator(dir))
    if (item.path().extension() == ".sp") sp_files.push_back(item.path());
  std::sort(sp_files.begin(), sp_files.end());

  std::vector<BenchmarkEntry> entries;
  entries.reserve(sp_files.size());
  for (const auto& path : sp_files) entries.push_back(load_entry(path));
  return entries;
}

CorpusStats corpus_stats(const std::vector<BenchmarkEntry>& entries) {
  if (entries.empty()) throw BenchmarkError("empty corpus");

  CorpusStats stats;
  stats.entries = entries.size();
  std::map<std::pair<HierarchyLevel, std::string>, std::pair<std::size_t, std::size_t>>
      rows;  // (instances, circuits)
  for (const auto& entry : entries) {
    ++stats.buckets[entry.bucket];
    std::map<std::pair<HierarchyLevel, std::string>, std::size_t> here;
    for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3})
      for (const auto& inst : entry.truth.level(level))
        ++here[{level, inst.label.name}];
    for (const auto& [key, n] : here) {
      rows[key].first += n;
      rows[key].second += 1;
    }
  }

  // Canonical labels first, in declaration order; any extras afterwards.
  for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3})
    for (const auto& name : canonical_labels(level)) {
      auto it = rows.find({level, name});
      stats.labels.push_back(
          {level, name, it == rows.end() ? 0 : it->second.first,
           it == rows.end() ? 0 : it->second.second});
      if (it != rows.end()) rows.erase(it);
    }
  for (const auto& [key, counts] : rows)
    stats.labels.push_back({key.first, key.second, counts.first, counts.second});
  return stats;
}

std::string format_stats(const CorpusStats& stats) {
  std::ostringstream out;
  out << std::left << std::setw(7) << "level" << std::setw(38) << "label"
      << std::right << std::setw(11) << "instances" << std::setw(10)
      << "circuits" << "\n";
  for (const auto& row : stats.labels)
    out << std::left << std::setw(7) << to_string(row.level) << std::setw(38)
        << row.label << std::right << std::setw(11) << row.instances
        << std::setw(10) << row.circuits << "\n";
  out << "\n" << std::left << std::setw(9) << "bucket" << std::right
      << std::setw(10) << "circuits" << "\n";
  for (const auto& [bucket, n] : stats.buckets)
    out << std::left << std::setw(9) << to_string(bucket) << std::right
        << std::setw(10) << n << "\n";
  out << "total circuits: " << stats.entries << "\n";
  return out.str();
}

}  // namespace subckt
