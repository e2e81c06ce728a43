// SPDX-License-Identifier: Apache-2.0

#include "subckt/detectors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace subckt {

namespace {

Label hl1(const char* name) { return {HierarchyLevel::HL1, name}; }
Label hl2(const char* name) { return {HierarchyLevel::HL2, name}; }
Label hl3(const char* name) { return {HierarchyLevel::HL3, name}; }

std::vector<const Device*> mosfets_of(const Netlist& netlist, Channel channel) {
  std::vector<const Device*> out;
  for (const auto& dev : netlist.devices())
    if (dev.is_mosfet() && dev.channel == channel) out.push_back(&dev);
  return out;
}

std::vector<std::string> names_of(const std::set<const Device*>& devs) {
  std::vector<std::string> names;
  names.reserve(devs.size());
  for (const Device* d : devs) names.push_back(d->name);
  return names;
}

/// Deterministic cell partition: same-channel devices grouped by
/// (gate, source, bulk), cells ordered by first member appearance.
struct Cell {
  std::string gate, source, bulk;
  std::vector<const Device*> members;
};

std::vector<Cell> cells_of(const std::vector<const Device*>& devs) {
  std::vector<Cell> cells;
  for (const Device* d : devs) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return c.gate == d->gate() && c.source == d->source() &&
             c.bulk == d->bulk();
    });
    if (it == cells.end())
      cells.push_back({d->gate(), d->source(), d->bulk(), {d}});
    else
      it->members.push_back(d);
  }
  return cells;
}

}  // namespace

std::vector<SubcircuitInstance> detect_diode_connected(const Netlist& netlist) {
  std::vector<std::string> names;
  for (const auto& dev : netlist.devices())
    if (dev.diode_connected()) names.push_back(dev.name);
  if (names.empty()) return {};
  return {SubcircuitInstance(hl1("MosfetDiode"), std::move(names))};
}

std::vector<SubcircuitInstance> detect_capacitor_roles(const Netlist& netlist,
                                               const NetRoles& roles) {
  std::vector<std::string> load, comp;
  for (const auto& dev : netlist.devices()) {
    if (!dev.is_capacitor()) continue;
    const std::string& a = dev.net(TerminalRole::pos);
    const std::string& b = dev.net(TerminalRole::neg);
    bool a_out = roles.is_output(a), b_out = roles.is_output(b);
    bool a_int = roles.is_internal(a), b_int = roles.is_internal(b);
    if ((a_out && roles.is_rail(b)) || (b_out && roles.is_rail(a)))
      load.push_back(dev.name);
    else if ((a_out && b_int) || (b_out && a_int) || (a_int && b_int))
      comp.push_back(dev.name);
  }
  std::vector<SubcircuitInstance> out;
  if (!load.empty())
    out.emplace_back(hl1("load_cap"), std::move(load));
  if (!comp.empty())
    out.emplace_back(hl1("compensation_cap"), std::move(comp));
  return out;
}

std::vector<SubcircuitInstance> detect_current_mirrors(const Netlist& netlist) {
  std::vector<std::set<const Device*>> mirrors;

  for (Channel channel : {Channel::nmos, Channel::pmos}) {
    auto devs = mosfets_of(netlist, channel);
    auto cells = cells_of(devs);
    std::set<std::string> suppressed;

    // Pass 1: cascoded mirrors.
    for (const Cell& cell : cells) {
      if (cell.members.size() < 2) continue;
      std::set<const Device*> mains;
      std::set<std::string> main_gates;
      bool total = true;
      for (const Device* cas : cell.members) {
        const Device* main = nullptr;
        for (const Device* cand : devs) {
          if (cand->gate() == cell.gate) continue;  // outside the gate group
          if (cand->source() == cas->drain()) {
            main = cand;
            break;
          }
        }
        if (main == nullptr) {
          total = false;
          break;
        }
        mains.insert(main);
        main_gates.insert(main->gate());
      }
      if (!total || main_gates.size() != 1) continue;
      std::set<const Device*> mirror(cell.members.begin(), cell.members.end());
      mirror.insert(mains.begin(), mains.end());
      mirrors.push_back(std::move(mirror));
      suppressed.insert(cell.gate);
      suppressed.insert(*main_gates.begin());
    }

    // Pass 2: simple mirrors on the remaining gates.
    for (const Cell& cell : cells) {
      if (cell.members.size() < 2 || suppressed.count(cell.gate) != 0)
        continue;
      bool has_diode = std::any_of(
          cell.members.begin(), cell.members.end(),
          [](const Device* d) { return d->diode_connected(); });
      if (!has_diode) continue;
      mirrors.emplace_back(cell.members.begin(), cell.members.end());
    }
  }

  std::vector<SubcircuitInstance> result;
  std::set<std::vector<std::string>> seen;
  for (const auto& mirror : mirrors) {
    auto names = names_of(mirror);
    std::sort(names.begin(), names.end());
    if (seen.insert(names).second)
      result.emplace_back(hl2("CM"), std::move(names));
  }
  return merge_cm_instances(result, netlist);
}

std::vector<SubcircuitInstance> merge_cm_instances(
    const std::vector<SubcircuitInstance>& instances, const Netlist& netlist) {
  std::vector<SubcircuitInstance> cms, rest;
  for (const auto& inst : instances)
    (inst.label.name == "CM" ? cms : rest).push_back(inst);

  // Union-find over CM instances; two join when they share a device that is
  // diode-connected in the netlist.
  std::vector<std::size_t> parent(cms.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  std::map<std::string, std::size_t> diode_owner;
  for (std::size_t i = 0; i < cms.size(); ++i) {
    for (const auto& name : cms[i].components) {
      if (!netlist.has_device(name) || !netlist.device(name).diode_connected())
        continue;
      auto [it, fresh] = diode_owner.emplace(name, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }

  std::map<std::size_t, std::vector<std::string>> merged;
  for (std::size_t i = 0; i < cms.size(); ++i) {
    auto& comps = merged[find(i)];
    comps.insert(comps.end(), cms[i].components.begin(),
                 cms[i].components.end());
  }

  std::vector<SubcircuitInstance> out;
  std::set<std::vector<std::string>> seen;
  for (auto& [root, comps] : merged) {
    SubcircuitInstance inst(hl2("CM"), std::move(comps));
    if (seen.insert(inst.components).second) out.push_back(std::move(inst));
  }
  std::sort(out.begin(), out.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<SubcircuitInstance> detect_diff_pairs(const Netlist& netlist,
                                                  const NetRoles& roles) {
  // The cascode extension requires the cascodes to rejoin on an internal
  // tail net; a shared rail would match independent tail sources instead
  // (common-mode sense pairs in fully differential netlists).
  std::vector<SubcircuitInstance> out;
  const auto& devices = netlist.devices();
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const Device& a = devices[i];
    if (!a.is_mosfet() || !roles.is_input(a.gate())) continue;
    for (std::size_t j = i + 1; j < devices.size(); ++j) {
      const Device& b = devices[j];
      if (!b.is_mosfet() || b.channel != a.channel) continue;
      if (!roles.is_input(b.gate()) || b.gate() == a.gate()) continue;

      if (a.source() == b.source() && a.bulk() == b.bulk()) {
        out.emplace_back(hl2("DiffPair"),
                         std::vector<std::string>{a.name, b.name});
        continue;
      }

      // Cascoded variant: distinct sources, each fed by its own cascode
      // device; the cascodes share gate, source, and bulk.
      if (a.source() == b.source()) continue;
      const Device *cas_a = nullptr, *cas_b = nullptr;
      for (const auto& c : devices) {
        if (!c.is_mosfet() || c.channel != a.channel || &c == &a || &c == &b)
          continue;
        if (cas_a == nullptr && c.drain() == a.source()) cas_a = &c;
        if (cas_b == nullptr && c.drain() == b.source() && &c != cas_a)
          cas_b = &c;
      }
      if (cas_a && cas_b && cas_a->gate() == cas_b->gate() &&
          cas_a->source() == cas_b->source() &&
          cas_a->bulk() == cas_b->bulk() && !roles.is_rail(cas_a->source()))
        out.emplace_back(hl2("DiffPair"),
                         std::vector<std::string>{a.name, b.name, cas_a->name,
                                                  cas_b->name});
    }
  }
  return out;
}

namespace {

bool signal_gated(const Device& dev, const NetRoles& roles) {
  const std::string& g = dev.gate();
  return !roles.is_rail(g) && !roles.is_bias(g);
}

/// Chains of 1-2 stacked same-channel devices from `drive` down to a rail:
/// the first device's drain is the drive net, each next device's drain is
/// the previous source, and the last source lands on the rail.
std::vector<std::vector<const Device*>> rail_paths(
    const Netlist& netlist, const NetRoles& roles, const std::string& drive,
    Channel channel, bool to_supply) {
  auto on_rail = [&](const std::string& net) {
    return to_supply ? roles.is_supply(net) : roles.is_ground(net);
  };
  std::vector<std::vector<const Device*>> paths;
  for (const auto& top : netlist.devices()) {
    if (!top.is_mosfet() || top.channel != channel || top.drain() != drive)
      continue;
    if (on_rail(top.source())) {
      paths.push_back({&top});
      continue;
    }
    if (roles.is_rail(top.source())) continue;  // wrong rail
    for (const auto& bottom : netlist.devices()) {
      if (!bottom.is_mosfet() || bottom.channel != channel || &bottom == &top)
        continue;
      if (bottom.drain() == top.source() && on_rail(bottom.source()))
        paths.push_back({&top, &bottom});
    }
  }
  return paths;
}

}  // namespace

std::vector<SubcircuitInstance> detect_inverters(const Netlist& netlist,
                                                 const NetRoles& roles) {
  std::vector<SubcircuitInstance> out;
  std::set<std::vector<std::string>> seen;
  for (const auto& drive : netlist.nets()) {
    if (roles.is_rail(drive)) continue;
    auto ups = rail_paths(netlist, roles, drive, Channel::pmos, true);
    if (ups.empty()) continue;
    auto downs = rail_paths(netlist, roles, drive, Channel::nmos, false);
    for (const auto& up : ups) {
      if (std::none_of(up.begin(), up.end(), [&](const Device* d) {
            return signal_gated(*d, roles);
          }))
        continue;
      for (const auto& down : downs) {
        if (std::none_of(down.begin(), down.end(), [&](const Device* d) {
              return signal_gated(*d, roles);
            }))
          continue;
        std::vector<std::string> comps;
        for (const Device* d : up) comps.push_back(d->name);
        for (const Device* d : down) comps.push_back(d->name);
        SubcircuitInstance inst(hl2("Inverter"), std::move(comps));
        if (seen.insert(inst.components).second) out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

AnnotationSet detect_hl1(const Netlist& netlist, const NetRoles& roles) {
  AnnotationSet set;
  set.add_all(detect_diode_connected(netlist));
  set.add_all(detect_capacitor_roles(netlist, roles));
  return set;
}

AnnotationSet detect_hl2(const Netlist& netlist, const NetRoles& roles) {
  AnnotationSet set;
  set.add_all(detect_current_mirrors(netlist));
  set.add_all(detect_diff_pairs(netlist, roles));
  set.add_all(detect_inverters(netlist, roles));
  return set;
}

namespace {

/// True when `net` reaches an output net through gate->drain hops. The
/// on-path set cuts cycles (diode self-loops in particular).
bool reaches_output(const Netlist& netlist, const NetRoles& roles,
                    const std::string& net, std::set<std::string>& on_path) {
  if (roles.is_output(net)) return true;
  if (!on_path.insert(net).second) return false;
  for (const auto& dev : netlist.devices()) {
    if (!dev.is_mosfet() || dev.gate() != net) continue;
    if (reaches_output(netlist, roles, dev.drain(), on_path)) {
      on_path.erase(net);
      return true;
    }
  }
  on_path.erase(net);
  return false;
}

bool reaches_output(const Netlist& netlist, const NetRoles& roles,
                    const std::string& net) {
  std::set<std::string> on_path;
  return reaches_output(netlist, roles, net, on_path);
}

/// Longest gate-hop chain (device count) from `net` to any output net;
/// -1 when no output is reachable.
int chain_depth(const Netlist& netlist, const NetRoles& roles,
                const std::string& net, std::set<std::string>& on_path) {
  if (roles.is_output(net)) return 0;
  if (!on_path.insert(net).second) return -1;
  int best = -1;
  for (const auto& dev : netlist.devices()) {
    if (!dev.is_mosfet() || dev.gate() != net) continue;
    int below = chain_depth(netlist, roles, dev.drain(), on_path);
    if (below >= 0) best = std::max(best, below + 1);
  }
  on_path.erase(net);
  return best;
}

/// True when `net` reaches a rail through drain->source hops.
bool reaches_rail(const Netlist& netlist, const NetRoles& roles,
                  const std::string& net, std::set<std::string>& on_path) {
  if (roles.is_rail(net)) return true;
  if (!on_path.insert(net).second) return false;
  for (const auto& dev : netlist.devices()) {
    if (!dev.is_mosfet() || dev.drain() != net) continue;
    if (reaches_rail(netlist, roles, dev.source(), on_path)) {
      on_path.erase(net);
      return true;
    }
  }
  on_path.erase(net);
  return false;
}

}  // namespace

AnnotationSet detect_hl3(const Netlist& netlist, const NetRoles& roles,
                         const AnnotationSet& hl2set) {
  AnnotationSet out;
  if (roles.inputs.empty()) return out;

  std::set<std::string> claimed;
  auto emit = [&](const char* name, const std::set<std::string>& comps) {
    if (comps.empty()) return;
    out.add(SubcircuitInstance(
        hl3(name), std::vector<std::string>(comps.begin(), comps.end())));
    claimed.insert(comps.begin(), comps.end());
  };

  // firstStage: union of differential pairs whose pair gates sit on inputs
  // (every detected DiffPair qualifies by construction).
  std::set<std::string> first;
  for (const auto& inst : hl2set.level(HierarchyLevel::HL2))
    if (inst.label.name == "DiffPair")
      first.insert(inst.components.begin(), inst.components.end());
  emit("firstStage", first);

  auto stage_drains = [&](const std::set<std::string>& stage) {
    std::set<std::string> nets;
    for (const auto& name : stage)
      if (netlist.has_device(name) && netlist.device(name).is_mosfet())
        nets.insert(netlist.device(name).drain());
    return nets;
  };

  auto next_stage = [&](const std::set<std::string>& prev_out) {
    std::set<std::string> stage;
    for (const auto& dev : netlist.devices()) {
      if (!dev.is_mosfet() || claimed.count(dev.name) != 0) continue;
      if (prev_out.count(dev.gate()) == 0) continue;
      if (prev_out.count(dev.drain()) != 0) continue;
      if (!reaches_output(netlist, roles, dev.drain())) continue;
      stage.insert(dev.name);
    }
    return stage;
  };

  std::set<std::string> stage1_out = stage_drains(first);
  std::set<std::string> second = next_stage(stage1_out);
  emit("secondStage", second);

  int deepest = -1;
  for (const auto& in : roles.inputs) {
    std::set<std::string> on_path;
    deepest = std::max(deepest, chain_depth(netlist, roles, in, on_path));
  }
  std::set<std::string> third;
  if (deepest >= 3 && !second.empty())
    third = next_stage(stage_drains(second));
  emit("thirdStage", third);

  // feedBack: channel connections (or capacitors outside load/compensation
  // roles) from an output net back to a gate/drain net of an earlier stage.
  std::set<std::string> stage_nets;
  for (const auto& name : claimed) {
    const Device& dev = netlist.device(name);
    if (!dev.is_mosfet()) continue;
    stage_nets.insert(dev.gate());
    stage_nets.insert(dev.drain());
  }
  for (const auto& o : roles.outputs) stage_nets.erase(o);

  std::set<std::string> classified_caps;
  for (const auto& inst : detect_capacitor_roles(netlist, roles))
    classified_caps.insert(inst.components.begin(), inst.components.end());

  std::set<std::string> feedback;
  for (const auto& dev : netlist.devices()) {
    if (claimed.count(dev.name) != 0) continue;
    std::vector<std::string> ends;
    if (dev.is_capacitor()) {
      if (classified_caps.count(dev.name) != 0) continue;
      ends = {dev.net(TerminalRole::pos), dev.net(TerminalRole::neg)};
    } else {
      ends = {dev.drain(), dev.source()};
    }
    bool touches_out = std::any_of(ends.begin(), ends.end(), [&](const auto& n) {
      return roles.is_output(n);
    });
    bool touches_stage = std::any_of(ends.begin(), ends.end(), [&](const auto& n) {
      return stage_nets.count(n) != 0;
    });
    if (touches_out && touches_stage) feedback.insert(dev.name);
  }
  emit("feedBack", feedback);

  // loadPart: unclaimed mosfets draining into an internal stage-output net
  // with a rail-reaching source, extended with their CM partners.
  std::set<std::string> all_stage(first);
  all_stage.insert(second.begin(), second.end());
  all_stage.insert(third.begin(), third.end());
  std::set<std::string> stage_out = stage_drains(all_stage);
  for (const auto& o : roles.outputs) stage_out.erase(o);

  std::set<std::string> load;
  for (const auto& dev : netlist.devices()) {
    if (!dev.is_mosfet() || claimed.count(dev.name) != 0) continue;
    if (stage_out.count(dev.drain()) == 0) continue;
    std::set<std::string> on_path;
    if (!reaches_rail(netlist, roles, dev.source(), on_path)) continue;
    load.insert(dev.name);
  }
  for (const auto& inst : hl2set.level(HierarchyLevel::HL2)) {
    if (inst.label.name != "CM") continue;
    bool hit = std::any_of(inst.components.begin(), inst.components.end(),
                           [&](const auto& n) { return load.count(n) != 0; });
    if (!hit) continue;
    for (const auto& n : inst.components)
      if (claimed.count(n) == 0) load.insert(n);
  }
  emit("loadPart", load);

  // biasPart: everything else.
  std::set<std::string> bias;
  for (const auto& dev : netlist.devices())
    if (dev.is_mosfet() && claimed.count(dev.name) == 0)
      bias.insert(dev.name);
  emit("biasPart", bias);

  return out;
}

AnnotationSet detect_level(const Netlist& netlist, const NetRoles& roles,
                           HierarchyLevel level) {
  switch (level) {
    case HierarchyLevel::HL1: return detect_hl1(netlist, roles);
    case HierarchyLevel::HL2: return detect_hl2(netlist, roles);
    case HierarchyLevel::HL3:
      return detect_hl3(netlist, roles, detect_hl2(netlist, roles));
  }
  return {};
}

}  // namespace subckt
