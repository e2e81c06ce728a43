// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive-enumeration reference for current-mirror detection. Kept
// deliberately separate from detectors.cpp: candidate mirrors come from
// subset enumeration over bitmasks and the diode-sharing merge is a
// repeat-until-fixpoint pairwise pass, so the production detector's
// grouping and union-find code is not on this path.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "subckt/detectors.hpp"

namespace subckt {

namespace {

using Mask = std::uint32_t;

int popcount(Mask m) {
  int n = 0;
  while (m) {
    n += m & 1u;
    m >>= 1;
  }
  return n;
}

std::set<std::string> mask_names(const std::vector<const Device*>& devs,
                                 Mask m) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < devs.size(); ++i)
    if (m & (Mask{1} << i)) names.insert(devs[i]->name);
  return names;
}

}  // namespace

std::vector<SubcircuitInstance> brute_force_cm_oracle(const Netlist& netlist) {
  if (netlist.devices().size() > 16)
    throw TooLargeError(netlist.devices().size());

  std::vector<std::set<std::string>> kept;

  for (Channel channel : {Channel::nmos, Channel::pmos}) {
    std::vector<const Device*> devs;
    for (const auto& d : netlist.devices())
      if (d.is_mosfet() && d.channel == channel) devs.push_back(&d);
    const std::size_t n = devs.size();

    // Complete (gate, source, bulk) cells as bitmasks.
    std::map<std::vector<std::string>, Mask> cell_masks;
    for (std::size_t i = 0; i < n; ++i)
      cell_masks[{devs[i]->gate(), devs[i]->source(), devs[i]->bulk()}] |=
          Mask{1} << i;

    // Cascode predicate per cell: every member maps (first match in source
    // order, outside the cell's gate group) to a main whose source is the
    // member's drain, and the mains share one gate.
    std::vector<Mask> cascode_sets;
    std::set<std::string> suppressed;
    for (const auto& [key, cell] : cell_masks) {
      if (popcount(cell) < 2) continue;
      const std::string& cell_gate = key[0];
      Mask mains = 0;
      std::set<std::string> main_gates;
      bool total = true;
      for (std::size_t i = 0; i < n && total; ++i) {
        if (!(cell & (Mask{1} << i))) continue;
        bool found = false;
        for (std::size_t k = 0; k < n; ++k) {
          if (devs[k]->gate() == cell_gate) continue;
          if (devs[k]->source() == devs[i]->drain()) {
            mains |= Mask{1} << k;
            main_gates.insert(devs[k]->gate());
            found = true;
            break;
          }
        }
        total = found;
      }
      if (!total || main_gates.size() != 1) continue;
      cascode_sets.push_back(cell | mains);
      suppressed.insert(cell_gate);
      suppressed.insert(*main_gates.begin());
    }

    // Simple-mirror predicate over every subset: common gate (not
    // suppressed), common source, common bulk, >= 2 members, >= 1
    // diode-connected member.
    std::vector<Mask> simple_sets;
    for (Mask m = 1; m < (Mask{1} << n); ++m) {
      if (popcount(m) < 2) continue;
      std::set<std::string> gates, sources, bulks;
      bool diode = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(m & (Mask{1} << i))) continue;
        gates.insert(devs[i]->gate());
        sources.insert(devs[i]->source());
        bulks.insert(devs[i]->bulk());
        diode = diode || devs[i]->diode_connected();
      }
      if (gates.size() != 1 || sources.size() != 1 || bulks.size() != 1)
        continue;
      if (!diode || suppressed.count(*gates.begin()) != 0) continue;
      simple_sets.push_back(m);
    }

    // Keep only maximal simple subsets (strict supersets may also be
    // cascode sets).
    for (Mask m : simple_sets) {
      bool dominated = false;
      for (Mask other : simple_sets)
        if (other != m && (other & m) == m) dominated = true;
      for (Mask casc : cascode_sets)
        if (casc != m && (casc & m) == m) dominated = true;
      if (!dominated) kept.push_back(mask_names(devs, m));
    }
    for (Mask casc : cascode_sets) kept.push_back(mask_names(devs, casc));
  }

  // Deduplicate, then merge sets sharing a diode-connected device until the
  // merge is a fixpoint.
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  auto is_diode = [&](const std::string& name) {
    return netlist.device(name).diode_connected();
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < kept.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < kept.size() && !changed; ++j) {
        bool share = false;
        for (const auto& name : kept[i])
          if (kept[j].count(name) != 0 && is_diode(name)) share = true;
        if (!share) continue;
        kept[i].insert(kept[j].begin(), kept[j].end());
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  std::vector<SubcircuitInstance> out;
  for (const auto& names : kept)
    out.emplace_back(Label{HierarchyLevel::HL2, "CM"},
                     std::vector<std::string>(names.begin(), names.end()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace subckt
