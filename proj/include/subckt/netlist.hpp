// SPDX-License-Identifier: Apache-2.0
//
// Flat SPICE netlists as device-terminal graphs: parsing, querying,
// serialization, net-role classification, and net-name anonymization.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subckt {

enum class DeviceKind { mosfet, capacitor };
enum class Channel { nmos, pmos, none };

/// Terminal roles. Mosfets use drain/gate/source/bulk, capacitors pos/neg.
enum class TerminalRole { drain, gate, source, bulk, pos, neg };

std::string to_string(TerminalRole role);
std::string to_string(Channel channel);

struct Terminal {
  TerminalRole role;
  std::string net;
};

struct Device {
  std::string name;
  DeviceKind kind = DeviceKind::mosfet;
  Channel channel = Channel::none;
  std::string model;  ///< original model token (mosfets only), kept for round trips
  std::vector<Terminal> terminals;

  const std::string& net(TerminalRole role) const;
  bool is_mosfet() const { return kind == DeviceKind::mosfet; }
  bool is_capacitor() const { return kind == DeviceKind::capacitor; }

  // Mosfet accessors; throw for capacitors.
  const std::string& drain() const { return net(TerminalRole::drain); }
  const std::string& gate() const { return net(TerminalRole::gate); }
  const std::string& source() const { return net(TerminalRole::source); }
  const std::string& bulk() const { return net(TerminalRole::bulk); }

  /// Gate and drain on the same net.
  bool diode_connected() const {
    return is_mosfet() && drain() == gate();
  }
};

struct NetlistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedLineError : NetlistError {
  MalformedLineError(int line_no, const std::string& reason);
  int line_no;
};

struct DuplicateDeviceError : NetlistError {
  explicit DuplicateDeviceError(const std::string& name);
};

struct UnknownChannelError : NetlistError {
  explicit UnknownChannelError(const std::string& model);
};

struct UnknownNetError : NetlistError {
  explicit UnknownNetError(const std::string& net);
};

struct ConflictingOverrideError : NetlistError {
  explicit ConflictingOverrideError(const std::string& net);
};

/// An immutable flat netlist. Devices keep their source order; nets are
/// tracked in order of first appearance so that derived transforms
/// (anonymization in particular) are deterministic.
class Netlist {
 public:
  Netlist() = default;
  explicit Netlist(std::vector<Device> devices);

  const std::vector<Device>& devices() const { return devices_; }
  /// Nets in order of first appearance.
  const std::vector<std::string>& nets() const { return nets_; }
  bool has_net(const std::string& net) const;
  bool has_device(const std::string& name) const;
  const Device& device(const std::string& name) const;

  std::size_t mosfet_count() const;
  std::size_t capacitor_count() const;
  /// Total number of device terminals.
  std::size_t terminal_count() const;

  /// Every (device, role) pair touching `net`, in source order.
  /// Throws UnknownNetError for nets no device touches.
  std::vector<std::pair<const Device*, TerminalRole>> devices_on_net(
      const std::string& net) const;

  bool operator==(const Netlist& other) const;

 private:
  std::vector<Device> devices_;
  std::vector<std::string> nets_;
  std::map<std::string, std::size_t> index_;  // lowercase name -> device index
  std::map<std::string, std::vector<std::pair<std::size_t, TerminalRole>>> by_net_;
};

/// Role classification of the nets of one netlist. The five explicit sets
/// are pairwise disjoint; `internal` is the derived complement.
struct NetRoles {
  std::set<std::string> supply;
  std::set<std::string> ground;
  std::vector<std::string> inputs;   // ordered by first appearance
  std::vector<std::string> outputs;  // ordered by first appearance
  std::set<std::string> bias;
  std::set<std::string> internal;

  bool is_supply(const std::string& net) const { return supply.count(net) != 0; }
  bool is_ground(const std::string& net) const { return ground.count(net) != 0; }
  bool is_rail(const std::string& net) const { return is_supply(net) || is_ground(net); }
  bool is_input(const std::string& net) const;
  bool is_output(const std::string& net) const;
  bool is_bias(const std::string& net) const { return bias.count(net) != 0; }
  bool is_internal(const std::string& net) const { return internal.count(net) != 0; }
};

/// Optional per-role overrides for classify_nets. A present set replaces
/// the corresponding inferred set wholesale.
struct NetRoleOverrides {
  std::optional<std::set<std::string>> supply;
  std::optional<std::set<std::string>> ground;
  std::optional<std::vector<std::string>> inputs;
  std::optional<std::vector<std::string>> outputs;
  std::optional<std::set<std::string>> bias;
};

struct RenameMap {
  std::map<std::string, std::string> forward;  // old net -> new net
  std::set<std::string> reserved;              // nets left unchanged

  std::string apply(const std::string& net) const;
};

/// Parse flat SPICE text. Blank lines and '*' comment lines are ignored.
/// Device lines: `m<name> <d> <g> <s> <b> <model>` (model naming nmos/pmos)
/// or `c<name> <n1> <n2> [value]` (value accepted and ignored).
Netlist parse_netlist(const std::string& text);

/// One device per line in source order; emits '\n' line endings.
/// parse_netlist(serialize_netlist(n)) is structurally equal to n.
std::string serialize_netlist(const Netlist& netlist);

/// Name-based net classification (case-insensitive):
///   supply  {supply, vdd, vcc}
///   ground  {ground, gnd, vss, 0}
///   inputs  "in" + optional digits, or vref
///   outputs "out"/"vout"/"output" + optional digits
///   bias    prefix "ibias"/"vbias"/"bias"
NetRoles classify_nets(const Netlist& netlist,
                       const NetRoleOverrides& overrides = {});

/// Net names treated as fixed by default when anonymizing; the union of
/// rail/io/bias names that appear across typical corpora.
const std::set<std::string>& default_reserved_nets();

/// Rename every net outside `reserved` to the next unused identifier from
/// a, b, ..., z, aa, ab, ... in order of first appearance. Generated names
/// colliding with a reserved name are skipped. Device names are unchanged
/// and the result is terminal-label-preserving isomorphic to the input.
std::pair<Netlist, RenameMap> anonymize(
    const Netlist& netlist,
    const std::set<std::string>& reserved = default_reserved_nets());

}  // namespace subckt
