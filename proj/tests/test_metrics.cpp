// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "subckt/metrics.hpp"
#include "support.hpp"

using namespace subckt;
using namespace subckt::test;

namespace {

constexpr HierarchyLevel kHL2 = HierarchyLevel::HL2;

SubcircuitInstance inst(const char* label, std::vector<std::string> comps) {
  return SubcircuitInstance({kHL2, label}, std::move(comps));
}

AnnotationSet make_set(std::vector<SubcircuitInstance> instances) {
  AnnotationSet set;
  set.add_all(instances);
  return set;
}

// Cluster layout mirroring the worked example: truth spans 12 devices, the
// first prediction matches three clusters totaling 8 devices exactly, the
// second matches only a single-device cluster out of 8 predicted devices.
AnnotationSet fig_truth() {
  return make_set({
      inst("DiffPair", {"m5", "m6"}),
      inst("CM", {"m2", "m3"}),
      inst("CM", {"m8", "m9", "m11", "m12"}),
      inst("Inverter", {"m1", "m4", "m7"}),
      inst("CM", {"m10"}),
  });
}

AnnotationSet fig_prediction1() {
  return make_set({
      inst("DiffPair", {"m5", "m6"}),
      inst("CM", {"m2", "m3"}),
      inst("CM", {"m8", "m9", "m11", "m12"}),
  });
}

AnnotationSet fig_prediction2() {
  return make_set({
      inst("CM", {"m10"}),
      inst("DiffPair", {"m5", "m6", "m7"}),
      inst("CM", {"m1", "m2"}),
      inst("CM", {"m3", "m4"}),
  });
}

std::set<std::string> universe_of(const AnnotationSet& a,
                                  const AnnotationSet& b) {
  std::set<std::string> u = a.devices_at(kHL2);
  auto more = b.devices_at(kHL2);
  u.insert(more.begin(), more.end());
  return u;
}

}  // namespace

TEST_CASE("strict scores reproduce the worked cluster arithmetic") {
  auto truth = fig_truth();

  Scores one = strict_scores(fig_prediction1(), truth, kHL2);
  CHECK(one.precision == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.recall == doctest::Approx(8.0 / 12.0).epsilon(1e-12));

  Scores two = strict_scores(fig_prediction2(), truth, kHL2);
  CHECK(two.precision == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(two.recall == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("strict scores identity and degenerate cases") {
  auto truth = fig_truth();
  Scores identity = strict_scores(truth, truth, kHL2);
  CHECK(identity.precision == 1.0);
  CHECK(identity.recall == 1.0);
  CHECK(identity.f1 == 1.0);

  Scores nothing = strict_scores(AnnotationSet(), truth, kHL2);
  CHECK(nothing.precision == 0.0);
  CHECK(nothing.recall == 0.0);
  CHECK(nothing.f1 == 0.0);

  // Same components, wrong label: not a match.
  auto mislabeled = make_set({inst("CM", {"m5", "m6"})});
  auto pair_truth = make_set({inst("DiffPair", {"m5", "m6"})});
  CHECK(strict_scores(mislabeled, pair_truth, kHL2).precision == 0.0);
}

TEST_CASE("node scores count device-label pairs") {
  auto truth = fig_truth();
  auto u = universe_of(truth, truth);

  Scores identity = node_scores(truth, truth, kHL2, u);
  CHECK(identity.f1 == 1.0);

  Scores nothing = node_scores(AnnotationSet(), truth, kHL2, u);
  CHECK(nothing.precision == 0.0);
  CHECK(nothing.recall == 0.0);

  // All predicted clusters exact: node and strict coincide.
  auto pred = fig_prediction1();
  Scores node = node_scores(pred, truth, kHL2, universe_of(pred, truth));
  CHECK(node.precision == doctest::Approx(1.0));
  CHECK(node.recall == doctest::Approx(8.0 / 12.0));

  // Fragmented clusters keep pair-level credit.
  auto frag = make_set({inst("CM", {"m2"}), inst("CM", {"m3"})});
  auto frag_truth = make_set({inst("CM", {"m2", "m3"})});
  Scores fnode = node_scores(frag, frag_truth, kHL2,
                             universe_of(frag, frag_truth));
  CHECK(fnode.precision == doctest::Approx(1.0));
  CHECK(fnode.recall == doctest::Approx(1.0));
  CHECK(strict_scores(frag, frag_truth, kHL2).precision == 0.0);
}

TEST_CASE("node scores reject devices outside the universe") {
  auto truth = make_set({inst("CM", {"m1", "m2"})});
  CHECK_THROWS_AS(node_scores(truth, truth, kHL2, {"m1"}), MetricsError);
}

TEST_CASE("strict never beats node scores") {
  std::mt19937_64 rng(5);
  const char* labels[] = {"CM", "DiffPair", "Inverter"};
  for (int round = 0; round < 60; ++round) {
    auto random_set = [&](int max_insts) {
      AnnotationSet set;
      std::uniform_int_distribution<int> insts(0, max_insts);
      std::uniform_int_distribution<int> device(1, 9);
      std::uniform_int_distribution<int> size(1, 4);
      std::uniform_int_distribution<int> label(0, 2);
      int k = insts(rng);
      for (int i = 0; i < k; ++i) {
        std::vector<std::string> comps;
        int s = size(rng);
        for (int j = 0; j < s; ++j)
          comps.push_back("m" + std::to_string(device(rng)));
        set.add(SubcircuitInstance({kHL2, labels[label(rng)]}, comps));
      }
      return set;
    };
    auto pred = random_set(4);
    auto truth = random_set(4);
    auto u = universe_of(pred, truth);
    Scores strict = strict_scores(pred, truth, kHL2);
    Scores node = node_scores(pred, truth, kHL2, u);
    CHECK(strict.precision <= node.precision + 1e-12);
    CHECK(strict.recall <= node.recall + 1e-12);
    CHECK(strict.f1 <= node.f1 + 1e-12);
    for (double v : {strict.precision, strict.recall, strict.f1,
                     node.precision, node.recall, node.f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(strict.f1 <= 2.0 * std::min(strict.precision, strict.recall) + 1e-12);
  }
}

TEST_CASE("scores are permutation invariant") {
  auto a = make_set({inst("CM", {"m1", "m2"}), inst("DiffPair", {"m3", "m4"})});
  auto b = make_set({inst("DiffPair", {"m4", "m3"}), inst("CM", {"m2", "m1"})});
  auto truth = fig_truth();
  auto u = universe_of(a, truth);
  auto ub = universe_of(b, truth);
  CHECK(strict_scores(a, truth, kHL2).f1 == strict_scores(b, truth, kHL2).f1);
  CHECK(node_scores(a, truth, kHL2, u).f1 ==
        node_scores(b, truth, kHL2, ub).f1);
}

TEST_CASE("confusion matrix") {
  auto truth = make_set({inst("CM", {"d1"})});

  SUBCASE("diagonal on identical sets") {
    auto cm = confusion(truth, truth, kHL2, {"d1"});
    CHECK(cm.at("CM", "CM") == 1);
    CHECK(cm.at("CM", kNoneLabel) == 0);
  }

  SUBCASE("unpredicted devices fall into <none>") {
    auto cm = confusion(AnnotationSet(), truth, kHL2, {"d1"});
    CHECK(cm.at("CM", kNoneLabel) == 1);
  }

  SUBCASE("single misclassification") {
    auto truth_inv = make_set({inst("Inverter", {"d1"})});
    auto pred_cm = make_set({inst("CM", {"d1"})});
    auto cm = confusion(pred_cm, truth_inv, kHL2, {"d1"});
    CHECK(cm.at("Inverter", "CM") == 1);
    CHECK(cm.at("Inverter", "Inverter") == 0);
  }

  SUBCASE("predictions on unknown devices accrue to the <none> row") {
    auto pred = make_set({inst("CM", {"d1", "d2"})});
    auto cm = confusion(pred, truth, kHL2, {"d1", "d2"});
    CHECK(cm.at("CM", "CM") == 1);
    CHECK(cm.at(kNoneLabel, "CM") == 1);
  }

  SUBCASE("row sums track truth assignments for single-label predictions") {
    auto truth2 = make_set(
        {inst("CM", {"d1", "d2"}), inst("DiffPair", {"d3", "d4"})});
    auto pred2 = make_set(
        {inst("CM", {"d1"}), inst("Inverter", {"d2"}), inst("DiffPair", {"d3"})});
    auto cm = confusion(pred2, truth2, kHL2, {"d1", "d2", "d3", "d4"});
    long cm_row = 0, dp_row = 0;
    for (const auto& col : cm.labels) {
      cm_row += cm.at("CM", col);
      dp_row += cm.at("DiffPair", col);
    }
    CHECK(cm_row == 2);
    CHECK(dp_row == 2);
  }
}

TEST_CASE("aggregate micro counts and means") {
  NetlistEval a{"n1", kHL2, {4, 4, 4, 4}, {4, 4, 4, 4}};
  NetlistEval b{"n2", kHL2, {0, 4, 0, 4}, {0, 4, 0, 4}};
  auto report = aggregate({a, b});
  const auto& lvl = report.levels.at(kHL2);
  CHECK(lvl.strict_micro.precision == doctest::Approx(0.5));
  CHECK(lvl.strict_micro.recall == doctest::Approx(0.5));
  CHECK(lvl.strict_f1_mean == doctest::Approx(0.5));
  CHECK(lvl.netlists == 2);

  auto single = aggregate({a});
  CHECK(single.levels.at(kHL2).strict_micro.f1 == doctest::Approx(1.0));

  auto perfect = aggregate({a, a});
  CHECK(perfect.levels.at(kHL2).strict_micro.precision == 1.0);
  CHECK(perfect.levels.at(kHL2).node_micro.f1 == 1.0);

  CHECK_THROWS_AS(aggregate({}), EmptyCorpusError);
  CHECK(format_report(report).find("hl2") != std::string::npos);
  CHECK(report_to_json(report).find("breakdown") != std::string::npos);
}
