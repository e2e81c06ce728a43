// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "subckt/benchmark.hpp"
#include "subckt/detectors.hpp"
#include "subckt/metrics.hpp"
#include "support.hpp"

using namespace subckt;
using namespace subckt::test;

TEST_CASE("annotation documents round trip") {
  std::string doc = R"([{"sub_circuit_name":"CM","components":["m4","m19"]}])";
  AnnotationSet set = parse_annotations(doc, HierarchyLevel::HL2);
  REQUIRE(set.level(HierarchyLevel::HL2).size() == 1);
  CHECK(set.level(HierarchyLevel::HL2)[0].components ==
        std::vector<std::string>{"m19", "m4"});

  CHECK(parse_annotations("[]", HierarchyLevel::HL1).empty());
  CHECK_THROWS_AS(parse_annotations("{", HierarchyLevel::HL1),
                  AnnotationError);
  CHECK_THROWS_AS(parse_annotations(R"([{"components":["m1"]}])",
                                    HierarchyLevel::HL1),
                  AnnotationError);

  std::string serialized = serialize_annotations(set, HierarchyLevel::HL2);
  CHECK(parse_annotations(serialized, HierarchyLevel::HL2) == set);
}

TEST_CASE("taxonomy covers all variants") {
  const auto& taxonomy = TaxonomyMap::standard();
  CHECK(taxonomy.size() == 27);
  CHECK(taxonomy.canonical("MosfetWilsonCurrentMirror").name == "CM");
  CHECK(taxonomy.canonical("MosfetSimpleCurrentMirror").name == "CM");
  CHECK(taxonomy.canonical("MosfetFoldedCascodeDifferentialPair").name ==
        "DiffPair");
  CHECK(taxonomy.canonical("MosfetCascodedAnalogInverter").name == "Inverter");
  CHECK(taxonomy.canonical("MosfetDiodeArray").name == "MosfetDiode");
  CHECK(taxonomy.canonical("CM").name == "CM");  // canonical maps to itself
  CHECK_THROWS_AS(taxonomy.canonical("NotALabel"), UnknownLabelError);
}

TEST_CASE("canonicalize replaces variants and deduplicates") {
  AnnotationSet truth;
  truth.add(SubcircuitInstance({HierarchyLevel::HL2,
                                "MosfetSimpleCurrentMirror"},
                               {"m1", "m2"}));
  truth.add(SubcircuitInstance({HierarchyLevel::HL2,
                                "MosfetWilsonCurrentMirror"},
                               {"m1", "m2"}));
  truth.add(SubcircuitInstance({HierarchyLevel::HL2,
                                "MosfetDifferentialPair"},
                               {"m3", "m4"}));
  AnnotationSet canon = canonicalize(truth);
  CHECK(canon.level(HierarchyLevel::HL2).size() == 2);  // CMs deduplicated
  CHECK(component_sets(canon, HierarchyLevel::HL2, "CM") ==
        NameSets{{"m1", "m2"}});

  CHECK(canonicalize(canon) == canon);  // idempotent

  AnnotationSet bogus;
  bogus.add(SubcircuitInstance({HierarchyLevel::HL2, "Mystery"}, {"m1"}));
  CHECK_THROWS_AS(canonicalize(bogus), UnknownLabelError);
}

TEST_CASE("merge_shared_diode_cms") {
  Netlist n = parse_netlist(
      "m1 g g ground ground nmos\n"
      "m2 x g ground ground nmos\n"
      "m3 y g ground ground nmos\n");
  AnnotationSet truth;
  truth.add(SubcircuitInstance({HierarchyLevel::HL2, "CM"}, {"m1", "m2"}));
  truth.add(SubcircuitInstance({HierarchyLevel::HL2, "CM"}, {"m1", "m3"}));
  truth.add(SubcircuitInstance({HierarchyLevel::HL2, "DiffPair"},
                               {"m2", "m3"}));

  AnnotationSet merged = merge_shared_diode_cms(truth, n);
  CHECK(component_sets(merged, HierarchyLevel::HL2, "CM") ==
        NameSets{{"m1", "m2", "m3"}});
  CHECK(component_sets(merged, HierarchyLevel::HL2, "DiffPair") ==
        NameSets{{"m2", "m3"}});  // non-CM untouched
  CHECK(merge_shared_diode_cms(merged, n) == merged);  // idempotent

  // Device coverage never shrinks.
  std::set<std::string> before, after;
  for (const auto& inst : truth.level(HierarchyLevel::HL2))
    if (inst.label.name == "CM")
      before.insert(inst.components.begin(), inst.components.end());
  for (const auto& inst : merged.level(HierarchyLevel::HL2))
    if (inst.label.name == "CM")
      after.insert(inst.components.begin(), inst.components.end());
  CHECK(before == after);

  // Sharing only a non-diode device leaves instances apart.
  AnnotationSet apart;
  apart.add(SubcircuitInstance({HierarchyLevel::HL2, "CM"}, {"m2", "m1"}));
  apart.add(SubcircuitInstance({HierarchyLevel::HL2, "CM"}, {"m2", "m3"}));
  Netlist no_diode = parse_netlist(
      "m1 a g ground ground nmos\n"
      "m2 b g ground ground nmos\n"
      "m3 c g ground ground nmos\n");
  CHECK(merge_shared_diode_cms(apart, no_diode)
            .level(HierarchyLevel::HL2)
            .size() == 2);
}

TEST_CASE("size buckets") {
  auto netlist_with = [](int mosfets) {
    std::string text;
    for (int i = 0; i < mosfets; ++i)
      text += "m" + std::to_string(i + 1) + " a b ground ground nmos\n";
    return parse_netlist(text);
  };
  CHECK(size_bucket(netlist_with(15)) == SizeBucket::Small);
  CHECK(size_bucket(netlist_with(19)) == SizeBucket::Small);
  CHECK(size_bucket(netlist_with(20)) == SizeBucket::Medium);
  CHECK(size_bucket(netlist_with(30)) == SizeBucket::Medium);
  CHECK(size_bucket(netlist_with(31)) == SizeBucket::Large);

  // Capacitors do not count.
  Netlist mixed = parse_netlist(kAmpNetlist);
  CHECK(mixed.mosfet_count() == 15);
  CHECK(size_bucket(mixed) == SizeBucket::Small);
}

TEST_CASE("bundled corpus loads and matches the detectors") {
  auto entries = load_corpus(kDemoDir);
  REQUIRE(entries.size() == 6);

  std::vector<NetlistEval> evals;
  for (const auto& entry : entries) {
    CHECK(entry.bucket == size_bucket(entry.netlist));
    auto roles = classify_nets(entry.netlist);
    for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2,
                       HierarchyLevel::HL3}) {
      AnnotationSet detected = detect_level(entry.netlist, roles, level);
      AnnotationSet truth;
      truth.add_all(entry.truth.level(level));
      CHECK(detected == truth);
    }
  }
}

TEST_CASE("corpus stats cover every canonical label") {
  auto entries = load_corpus(kDemoDir);
  auto stats = corpus_stats(entries);
  CHECK(stats.entries == 6);
  for (const auto& row : stats.labels) {
    INFO("label ", row.label);
    CHECK(row.circuits >= 1);
    CHECK(row.instances >= row.circuits);
  }
  CHECK(stats.buckets.at(SizeBucket::Small) == 5);
  CHECK(stats.buckets.at(SizeBucket::Medium) == 1);

  // Duplicating the corpus doubles both counters.
  auto doubled = entries;
  for (auto entry : entries) {
    entry.id += "_copy";
    doubled.push_back(entry);
  }
  auto stats2 = corpus_stats(doubled);
  for (std::size_t i = 0; i < stats.labels.size(); ++i) {
    CHECK(stats2.labels[i].instances == 2 * stats.labels[i].instances);
    CHECK(stats2.labels[i].circuits == 2 * stats.labels[i].circuits);
  }

  CHECK_THROWS_AS(corpus_stats({}), BenchmarkError);
  CHECK(format_stats(stats).find("MosfetDiode") != std::string::npos);
}

TEST_CASE("single-entry stats") {
  auto entries = load_corpus(kDemoDir);
  auto stats = corpus_stats({entries[0]});
  for (const auto& row : stats.labels)
    if (row.label == "CM") {
      CHECK(row.instances == 3);
      CHECK(row.circuits == 1);
    }
}
