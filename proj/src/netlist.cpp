// SPDX-License-Identifier: Apache-2.0

#include "subckt/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace subckt {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string tok;
  while (stream >> tok) tokens.push_back(tok);
  return tokens;
}

bool all_digits(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

bool prefix_plus_digits(const std::string& name, const std::string& prefix) {
  if (name.size() < prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
    return false;
  return all_digits(name.substr(prefix.size()));
}

}  // namespace

std::string to_string(TerminalRole role) {
  switch (role) {
    case TerminalRole::drain: return "drain";
    case TerminalRole::gate: return "gate";
    case TerminalRole::source: return "source";
    case TerminalRole::bulk: return "bulk";
    case TerminalRole::pos: return "pos";
    case TerminalRole::neg: return "neg";
  }
  return "?";
}

std::string to_string(Channel channel) {
  switch (channel) {
    case Channel::nmos: return "nmos";
    case Channel::pmos: return "pmos";
    case Channel::none: return "none";
  }
  return "?";
}

const std::string& Device::net(TerminalRole role) const {
  for (const auto& t : terminals)
    if (t.role == role) return t.net;
  throw NetlistError("device '" + name + "' has no " + to_string(role) +
                     " terminal");
}

MalformedLineError::MalformedLineError(int line, const std::string& reason)
    : NetlistError("line " + std::to_string(line) + ": " + reason),
      line_no(line) {}

DuplicateDeviceError::DuplicateDeviceError(const std::string& name)
    : NetlistError("duplicate device name '" + name + "'") {}

UnknownChannelError::UnknownChannelError(const std::string& model)
    : NetlistError("mosfet model '" + model + "' names neither nmos nor pmos") {}

UnknownNetError::UnknownNetError(const std::string& net)
    : NetlistError("unknown net '" + net + "'") {}

ConflictingOverrideError::ConflictingOverrideError(const std::string& net)
    : NetlistError("net '" + net + "' assigned to two roles by overrides") {}

Netlist::Netlist(std::vector<Device> devices) : devices_(std::move(devices)) {
  std::set<std::string> seen_nets;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    const Device& dev = devices_[i];
    auto [it, fresh] = index_.emplace(lower(dev.name), i);
    if (!fresh) throw DuplicateDeviceError(dev.name);
    for (const auto& t : dev.terminals) {
      if (t.net.empty()) throw NetlistError("empty net name on " + dev.name);
      if (seen_nets.insert(t.net).second) nets_.push_back(t.net);
      by_net_[t.net].emplace_back(i, t.role);
    }
  }
}

bool Netlist::has_net(const std::string& net) const {
  return by_net_.count(net) != 0;
}

bool Netlist::has_device(const std::string& name) const {
  return index_.count(lower(name)) != 0;
}

const Device& Netlist::device(const std::string& name) const {
  auto it = index_.find(lower(name));
  if (it == index_.end())
    throw NetlistError("unknown device '" + name + "'");
  return devices_[it->second];
}

std::size_t Netlist::mosfet_count() const {
  return static_cast<std::size_t>(std::count_if(
      devices_.begin(), devices_.end(),
      [](const Device& d) { return d.is_mosfet(); }));
}

std::size_t Netlist::capacitor_count() const {
  return devices_.size() - mosfet_count();
}

std::size_t Netlist::terminal_count() const {
  std::size_t n = 0;
  for (const auto& d : devices_) n += d.terminals.size();
  return n;
}

std::vector<std::pair<const Device*, TerminalRole>> Netlist::devices_on_net(
    const std::string& net) const {
  auto it = by_net_.find(net);
  if (it == by_net_.end()) throw UnknownNetError(net);
  std::vector<std::pair<const Device*, TerminalRole>> result;
  result.reserve(it->second.size());
  for (const auto& [idx, role] : it->second)
    result.emplace_back(&devices_[idx], role);
  return result;
}

bool Netlist::operator==(const Netlist& other) const {
  if (devices_.size() != other.devices_.size()) return false;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    const Device& a = devices_[i];
    const Device& b = other.devices_[i];
    if (a.name != b.name || a.kind != b.kind || a.channel != b.channel ||
        a.model != b.model || a.terminals.size() != b.terminals.size())
      return false;
    for (std::size_t t = 0; t < a.terminals.size(); ++t)
      if (a.terminals[t].role != b.terminals[t].role ||
          a.terminals[t].net != b.terminals[t].net)
        return false;
  }
  return true;
}

bool NetRoles::is_input(const std::string& net) const {
  return std::find(inputs.begin(), inputs.end(), net) != inputs.end();
}

bool NetRoles::is_output(const std::string& net) const {
  return std::find(outputs.begin(), outputs.end(), net) != outputs.end();
}

std::string RenameMap::apply(const std::string& net) const {
  auto it = forward.find(net);
  return it == forward.end() ? net : it->second;
}

Netlist parse_netlist(const std::string& text) {
  std::vector<Device> devices;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '*') continue;

    char prefix = static_cast<char>(std::tolower(
        static_cast<unsigned char>(tokens[0][0])));
    Device dev;
    dev.name = tokens[0];
    if (prefix == 'm') {
      if (tokens.size() != 6)
        throw MalformedLineError(
            line_no, "mosfet line needs 6 tokens, got " +
                         std::to_string(tokens.size()));
      dev.kind = DeviceKind::mosfet;
      dev.model = tokens[5];
      std::string model = lower(tokens[5]);
      if (model.find("nmos") != std::string::npos)
        dev.channel = Channel::nmos;
      else if (model.find("pmos") != std::string::npos)
        dev.channel = Channel::pmos;
      else
        throw UnknownChannelError(tokens[5]);
      dev.terminals = {{TerminalRole::drain, tokens[1]},
                       {TerminalRole::gate, tokens[2]},
                       {TerminalRole::source, tokens[3]},
                       {TerminalRole::bulk, tokens[4]}};
    } else if (prefix == 'c') {
      // An optional trailing value token is accepted and ignored.
      if (tokens.size() != 3 && tokens.size() != 4)
        throw MalformedLineError(
            line_no, "capacitor line needs 3 tokens, got " +
                         std::to_string(tokens.size()));
      dev.kind = DeviceKind::capacitor;
      dev.channel = Channel::none;
      dev.terminals = {{TerminalRole::pos, tokens[1]},
                       {TerminalRole::neg, tokens[2]}};
    } else {
      throw MalformedLineError(
          line_no, "unknown device prefix '" + std::string(1, tokens[0][0]) +
                       "'");
    }
    devices.push_back(std::move(dev));
  }
  return Netlist(std::move(devices));
}

std::string serialize_netlist(const Netlist& netlist) {
  std::string out;
  for (const auto& dev : netlist.devices()) {
    out += dev.name;
    for (const auto& t : dev.terminals) {
      out += ' ';
      out += t.net;
    }
    if (dev.is_mosfet()) {
      out += ' ';
      out += dev.model;
    }
    out += '\n';
  }
  return out;
}

NetRoles classify_nets(const Netlist& netlist,
                       const NetRoleOverrides& overrides) {
  NetRoles roles;
  for (const auto& net : netlist.nets()) {
    std::string n = lower(net);
    if (n == "supply" || n == "vdd" || n == "vcc") {
      roles.supply.insert(net);
    } else if (n == "ground" || n == "gnd" || n == "vss" || n == "0") {
      roles.ground.insert(net);
    } else if (prefix_plus_digits(n, "in") || n == "vref") {
      roles.inputs.push_back(net);
    } else if (prefix_plus_digits(n, "output") || prefix_plus_digits(n, "vout") ||
               prefix_plus_digits(n, "out")) {
      roles.outputs.push_back(net);
    } else if (n.rfind("ibias", 0) == 0 || n.rfind("vbias", 0) == 0 ||
               n.rfind("bias", 0) == 0) {
      roles.bias.insert(net);
    }
  }

  if (overrides.supply) roles.supply = *overrides.supply;
  if (overrides.ground) roles.ground = *overrides.ground;
  if (overrides.inputs) roles.inputs = *overrides.inputs;
  if (overrides.outputs) roles.outputs = *overrides.outputs;
  if (overrides.bias) roles.bias = *overrides.bias;

  // A net named by two different override sets is a configuration error.
  std::set<std::string> overridden;
  auto check = [&](const std::string& net, bool from_override) {
    if (from_override && !overridden.insert(net).second)
      throw ConflictingOverrideError(net);
  };
  if (overrides.supply) for (const auto& n : roles.supply) check(n, true);
  if (overrides.ground) for (const auto& n : roles.ground) check(n, true);
  if (overrides.inputs) for (const auto& n : roles.inputs) check(n, true);
  if (overrides.outputs) for (const auto& n : roles.outputs) check(n, true);
  if (overrides.bias) for (const auto& n : roles.bias) check(n, true);

  // Explicit overrides win over inferred membership in the other sets.
  auto drop = [](auto& container, const std::set<std::string>& hits) {
    using C = std::decay_t<decltype(container)>;
    if constexpr (std::is_same_v<C, std::set<std::string>>) {
      for (const auto& n : hits) container.erase(n);
    } else {
      container.erase(std::remove_if(container.begin(), container.end(),
                                     [&](const std::string& n) {
                                       return hits.count(n) != 0;
                                     }),
                      container.end());
    }
  };
  if (!overridden.empty()) {
    if (!overrides.supply) drop(roles.supply, overridden);
    if (!overrides.ground) drop(roles.ground, overridden);
    if (!overrides.inputs) drop(roles.inputs, overridden);
    if (!overrides.outputs) drop(roles.outputs, overridden);
    if (!overrides.bias) drop(roles.bias, overridden);
  }

  std::set<std::string> assigned(roles.supply.begin(), roles.supply.end());
  assigned.insert(roles.ground.begin(), roles.ground.end());
  assigned.insert(roles.inputs.begin(), roles.inputs.end());
  assigned.insert(roles.outputs.begin(), roles.outputs.end());
  assigned.insert(roles.bias.begin(), roles.bias.end());
  for (const auto& net : netlist.nets())
    if (assigned.count(net) == 0) roles.internal.insert(net);
  return roles;
}

const std::set<std::string>& default_reserved_nets() {
  static const std::set<std::string> reserved = {
      "supply", "ground", "vdd", "vss", "gnd", "0",   "out",
      "out1",   "out2",   "in",  "in1", "in2", "ibias", "vref"};
  return reserved;
}

namespace {

bool reserved_contains(const std::set<std::string>& reserved,
                       const std::string& net) {
  // Reserved matching is case-insensitive, like role classification.
  return reserved.count(lower(net)) != 0 || reserved.count(net) != 0;
}

std::string nth_identifier(std::size_t n) {
  // 0 -> a, 25 -> z, 26 -> aa, ...
  std::string id;
  ++n;
  while (n > 0) {
    --n;
    id.insert(id.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  }
  return id;
}

}  // namespace

std::pair<Netlist, RenameMap> anonymize(const Netlist& netlist,
                                        const std::set<std::string>& reserved) {
  RenameMap map;
  map.reserved = reserved;
  std::size_t counter = 0;
  std::set<std::string> taken;
  for (const auto& net : netlist.nets())
    if (reserved_contains(reserved, net)) taken.insert(net);

  for (const auto& net : netlist.nets()) {
    if (reserved_contains(reserved, net)) continue;
    std::string fresh;
    do {
      fresh = nth_identifier(counter++);
    } while (reserved_contains(reserved, fresh) || taken.count(fresh) != 0);
    taken.insert(fresh);
    map.forward.emplace(net, fresh);
  }

  std::vector<Device> devices = netlist.devices();
  for (auto& dev : devices)
    for (auto& t : dev.terminals) t.net = map.apply(t.net);
  return {Netlist(std::move(devices)), std::move(map)};
}

}  // namespace subckt
