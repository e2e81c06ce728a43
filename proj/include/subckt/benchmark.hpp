// SPDX-License-Identifier: Apache-2.0
//
// Labeled corpus handling: annotation documents, variant-to-canonical
// label mapping, ground-truth normalization, size bucketing, and dataset
// statistics. Corpus layout: <id>.sp plus <id>.hl1/.hl2/.hl3 documents.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "subckt/annotation.hpp"
#include "subckt/netlist.hpp"

namespace subckt {

struct BenchmarkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownLabelError : BenchmarkError {
  explicit UnknownLabelError(const std::string& name)
      : BenchmarkError("label '" + name +
                       "' is neither canonical nor a known variant") {}
};

/// Variant name -> canonical label. Total over the structural variant
/// names of the benchmark taxonomy; canonical names map to themselves.
class TaxonomyMap {
 public:
  /// The full built-in taxonomy (27 variant names).
  static const TaxonomyMap& standard();

  TaxonomyMap() = default;
  void add(const std::string& variant, Label canonical);

  bool known(const std::string& name) const;
  /// Canonical label for a variant or canonical name; throws
  /// UnknownLabelError otherwise.
  Label canonical(const std::string& name) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, Label> map_;
};

enum class SizeBucket { Small, Medium, Large };

std::string to_string(SizeBucket bucket);

/// Mosfet-count bucketing: <20 Small, 20-30 Medium (inclusive), >30 Large.
SizeBucket size_bucket(const Netlist& netlist);

struct BenchmarkEntry {
  std::string id;
  Netlist netlist;
  AnnotationSet truth;
  SizeBucket bucket = SizeBucket::Small;
  std::size_t transistor_count = 0;
};

/// Replace variant labels by canonical ones; duplicates collapsing onto
/// the same (label, components) deduplicate. Throws UnknownLabelError.
AnnotationSet canonicalize(const AnnotationSet& truth,
                           const TaxonomyMap& taxonomy = TaxonomyMap::standard());

/// Union-find merge of CM instances sharing a diode-connected device;
/// other labels pass through. Idempotent.
AnnotationSet merge_shared_diode_cms(const AnnotationSet& truth,
                                     const Netlist& netlist);

/// Read one benchmark entry (netlist + any annotation documents next to
/// it). `sp_path` points at the .sp file.
BenchmarkEntry load_entry(const std::filesystem::path& sp_path);

/// All entries of a corpus directory, sorted by id.
std::vector<BenchmarkEntry> load_corpus(const std::filesystem::path& dir);

struct CorpusStats {
  struct LabelRow {
    HierarchyLevel level;
    std::string label;
    std::size_t instances = 0;
    std::size_t circuits = 0;
  };
  std::vector<LabelRow> labels;
  std::map<SizeBucket, std::size_t> buckets;
  std::size_t entries = 0;
};

/// Per-label instance/circuit counts plus per-bucket circuit counts.
/// Throws EmptyCorpusError-equivalent BenchmarkError on empty input.
CorpusStats corpus_stats(const std::vector<BenchmarkEntry>& entries);

std::string format_stats(const CorpusStats& stats);

}  // namespace subckt
