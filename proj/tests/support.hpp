// SPDX-License-Identifier: Apache-2.0
//
// Shared test fixtures: the demonstration netlists with printed ground
// truths, helpers for set comparisons, and a seeded netlist generator
// mixing mirror/pair/inverter motifs with noise devices.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "subckt/annotation.hpp"
#include "subckt/netlist.hpp"

namespace subckt::test {

inline const char* kDemoDir = SUBCKT_DATA_DIR "/demos";

// 15-mosfet single-output amplifier (demo1).
inline const char* kAmpNetlist = R"(m1 a ibias supply supply pmos
m2 b ibias supply supply pmos
m3 c a d d nmos
m4 d c ground ground nmos
m5 out a e e nmos
m6 e c ground ground nmos
m7 c ibias supply supply pmos
m8 out ibias supply supply pmos
m9 f a g g nmos
m10 g b ground ground nmos
m11 c in1 f f nmos
m12 out in2 f f nmos
c1 out ground
m13 a a ground ground nmos
m14 b b ground ground nmos
m15 ibias ibias supply supply pmos
)";

// Two-stage amplifier with compensation capacitor (demo2).
inline const char* kTwoStageNetlist = R"(c1 a out
m1 b c supply supply pmos
m2 d e ground ground nmos
m3 a d e e nmos
m4 e e ground ground nmos
m5 f ibias g g pmos
m6 g c supply supply pmos
m7 d in1 f f pmos
m8 a in2 f f pmos
c2 out ground
m9 out b h h nmos
m10 h h ground ground nmos
m11 out a supply supply pmos
m12 b b i i nmos
m13 i h ground ground nmos
m14 ibias ibias c c pmos
m15 c c supply supply pmos
)";

// Fully differential one-stage amplifier (demo3).
inline const char* kFullyDiffNetlist = R"(m1 a ibias ground ground nmos
m2 b b supply supply pmos
m3 c c supply supply pmos
m4 d ibias ground ground nmos
m5 e ibias ground ground nmos
m6 b out2 d d nmos
m7 c vref d d nmos
m8 b out1 e e nmos
m9 c vref e e nmos
m10 out1 a f f pmos
m11 f c supply supply pmos
m12 out2 a g g pmos
m13 g c supply supply pmos
m14 h ibias ground ground nmos
m15 out1 in1 h h nmos
m16 out2 in2 h h nmos
c1 out1 ground
c2 out2 ground
m17 ibias ibias ground ground nmos
m18 a a supply supply pmos
)";

// 22-mosfet folded topology with cascoded mirrors (demo4).
inline const char* kCascodedNetlist = R"(c1 a out
m1 b ibias ground ground nmos
m2 c ibias ground ground nmos
m3 d ibias ground ground nmos
m4 e b supply supply pmos
m5 f e g g nmos
m6 a e h h nmos
m7 f d i i pmos
m8 i f supply supply pmos
m9 a d j j pmos
m10 j f supply supply pmos
m11 k ibias ground ground nmos
m12 g in1 k k nmos
m13 h in2 k k nmos
c2 out ground
m14 out a ground ground nmos
m15 out c l l pmos
m16 l l supply supply pmos
m17 e e k k nmos
m18 ibias ibias ground ground nmos
m19 b b supply supply pmos
m20 c c m m pmos
m21 m l supply supply pmos
m22 d d supply supply pmos
)";

// Three-stage amplifier with a feedback capacitor (demo6).
inline const char* kThreeStageNetlist = R"(m1 x1 in1 t t nmos
m2 x2 in2 t t nmos
m3 t ibias ground ground nmos
m4 x1 x1 supply supply pmos
m5 x2 x1 supply supply pmos
m6 y x2 supply supply pmos
m7 y y ground ground nmos
m8 out y ground ground nmos
m9 out z supply supply pmos
m10 ibias ibias ground ground nmos
m11 z z supply supply pmos
m12 z ibias ground ground nmos
c1 out ground
c2 y out
c3 out in2
)";

// 13-mosfet mirror-loaded amplifier (demo5).
inline const char* kMirrorLoadedNetlist = R"(m1 a ibias supply supply pmos
m2 b b supply supply pmos
m3 out b supply supply pmos
m4 b a c c nmos
m5 c d ground ground nmos
m6 out a e e nmos
m7 e d ground ground nmos
m8 f ibias supply supply pmos
m9 b in1 f f pmos
m10 out in2 f f pmos
c1 out ground
m11 a a d d nmos
m12 d d ground ground nmos
m13 ibias ibias supply supply pmos
)";

using NameSet = std::set<std::string>;
using NameSets = std::set<std::set<std::string>>;

inline NameSets component_sets(const std::vector<SubcircuitInstance>& instances) {
  NameSets sets;
  for (const auto& inst : instances)
    sets.insert(NameSet(inst.components.begin(), inst.components.end()));
  return sets;
}

inline NameSets component_sets(const AnnotationSet& set, HierarchyLevel level,
                               const std::string& label) {
  NameSets sets;
  for (const auto& inst : set.level(level))
    if (inst.label.name == label)
      sets.insert(NameSet(inst.components.begin(), inst.components.end()));
  return sets;
}

inline NameSet grouped_components(const AnnotationSet& set,
                                  HierarchyLevel level,
                                  const std::string& label) {
  NameSet names;
  for (const auto& inst : set.level(level))
    if (inst.label.name == label)
      names.insert(inst.components.begin(), inst.components.end());
  return names;
}

/// Seeded generator: small netlists mixing simple/cascode mirror,
/// differential pair, and inverter motifs with random noise devices.
/// Device count stays <= max_devices.
class NetlistGenerator {
 public:
  explicit NetlistGenerator(std::uint64_t seed) : rng_(seed) {}

  Netlist generate(std::size_t max_devices = 14) {
    devices_.clear();
    counter_ = 0;
    nets_ = {"supply", "ground", "ibias", "in1", "in2", "out"};
    for (int i = 0; i < 4; ++i) nets_.push_back(fresh_net());

    std::size_t budget = max_devices;
    while (budget >= 2) {
      switch (pick(0, 4)) {
        case 0: budget -= add_simple_mirror(budget); break;
        case 1: budget -= add_cascode_mirror(budget); break;
        case 2: budget -= add_diff_pair(budget); break;
        case 3: budget -= add_inverter(budget); break;
        default: budget -= add_noise(budget); break;
      }
      if (pick(0, 3) == 0) break;
    }
    return Netlist(devices_);
  }

 private:
  std::mt19937_64 rng_;
  std::vector<Device> devices_;
  std::vector<std::string> nets_;
  int counter_ = 0;

  int pick(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  std::string fresh_net() {
    return "n" + std::to_string(counter_++);
  }
  const std::string& any_net() {
    return nets_[static_cast<std::size_t>(
        pick(0, static_cast<int>(nets_.size()) - 1))];
  }
  Channel any_channel() { return pick(0, 1) ? Channel::nmos : Channel::pmos; }

  void mosfet(Channel ch, std::string d, std::string g, std::string s,
              std::string b) {
    Device dev;
    dev.name = "m" + std::to_string(devices_.size() + 1);
    dev.kind = DeviceKind::mosfet;
    dev.channel = ch;
    dev.model = ch == Channel::nmos ? "nmos" : "pmos";
    dev.terminals = {{TerminalRole::drain, std::move(d)},
                     {TerminalRole::gate, std::move(g)},
                     {TerminalRole::source, std::move(s)},
                     {TerminalRole::bulk, std::move(b)}};
    devices_.push_back(std::move(dev));
  }

  std::size_t add_simple_mirror(std::size_t budget) {
    if (budget < 2) return 0;
    std::size_t want =
        std::min(budget, 2 + static_cast<std::size_t>(pick(0, 2)));
    Channel ch = any_channel();
    std::string rail = ch == Channel::nmos ? "ground" : "supply";
    std::string src = pick(0, 3) == 0 ? fresh_net() : rail;
    std::string gate = fresh_net();
    mosfet(ch, gate, gate, src, src);  // diode reference
    for (std::size_t i = 1; i < want; ++i) mosfet(ch, any_net(), gate, src, src);
    nets_.push_back(gate);
    return want;
  }

  std::size_t add_cascode_mirror(std::size_t budget) {
    if (budget < 4) return add_noise(budget);
    Channel ch = any_channel();
    std::string rail = ch == Channel::nmos ? "ground" : "supply";
    std::string cas_gate = fresh_net();
    std::string main_gate = fresh_net();
    std::string mid1 = fresh_net();
    std::string mid2 = fresh_net();
    mosfet(ch, mid1, cas_gate, rail, rail);
    mosfet(ch, mid2, cas_gate, rail, rail);
    mosfet(ch, any_net(), main_gate, mid1, mid1);
    mosfet(ch, any_net(), main_gate, mid2, mid2);
    nets_.push_back(cas_gate);
    nets_.push_back(main_gate);
    return 4;
  }

  std::size_t add_diff_pair(std::size_t budget) {
    if (budget < 2) return 0;
    Channel ch = any_channel();
    std::string tail = fresh_net();
    mosfet(ch, any_net(), "in1", tail, tail);
    mosfet(ch, any_net(), "in2", tail, tail);
    nets_.push_back(tail);
    if (budget >= 3 && pick(0, 1)) {
      mosfet(ch, tail, "ibias", ch == Channel::nmos ? "ground" : "supply",
             ch == Channel::nmos ? "ground" : "supply");
      return 3;
    }
    return 2;
  }

  std::size_t add_inverter(std::size_t budget) {
    if (budget < 2) return 0;
    std::string drive = fresh_net();
    std::string sig = fresh_net();
    nets_.push_back(sig);
    std::size_t used = 2;
    if (budget >= 3 && pick(0, 1)) {
      std::string mid = fresh_net();
      mosfet(Channel::pmos, drive, sig, mid, mid);
      mosfet(Channel::pmos, mid, any_net(), "supply", "supply");
      ++used;
    } else {
      mosfet(Channel::pmos, drive, sig, "supply", "supply");
    }
    mosfet(Channel::nmos, drive, sig, "ground", "ground");
    nets_.push_back(drive);
    return used;
  }

  std::size_t add_noise(std::size_t budget) {
    if (budget == 0) return 0;
    std::size_t want = std::min<std::size_t>(
        budget, 1 + static_cast<std::size_t>(pick(0, 1)));
    for (std::size_t i = 0; i < want; ++i) {
      if (pick(0, 5) == 0) {
        Device cap;
        cap.name = "c" + std::to_string(devices_.size() + 1);
        cap.kind = DeviceKind::capacitor;
        cap.channel = Channel::none;
        cap.terminals = {{TerminalRole::pos, any_net()},
                         {TerminalRole::neg, any_net()}};
        devices_.push_back(std::move(cap));
      } else {
        mosfet(any_channel(), any_net(), any_net(), any_net(), any_net());
      }
    }
    return want;
  }
};

}  // namespace subckt::test
