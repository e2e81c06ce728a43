// SPDX-License-Identifier: Apache-2.0
//
// Deterministic structural detectors for analog subcircuits in flat SPICE
// netlists, organized by hierarchy level:
//   HL1  device roles: diode-connected mosfets, load/compensation capacitors
//   HL2  structures:   current mirrors, differential pairs, inverters
//   HL3  stages:       amplification stages, feedback, load and bias parts
//
// All detectors are pure functions of (Netlist, NetRoles); instances
// reference device names only, so outputs commute with net anonymization.

#pragma once

#include <vector>

#include "subckt/annotation.hpp"
#include "subckt/netlist.hpp"

namespace subckt {

/// One grouped MosfetDiode instance holding every mosfet whose drain and
/// gate share a net; empty if there are none.
std::vector<SubcircuitInstance> detect_diode_connected(const Netlist& netlist);

/// Grouped load_cap / compensation_cap instances. A load capacitor couples
/// an output net to a rail; a compensation capacitor couples an output net
/// to an internal net, or bridges two internal nets.
std::vector<SubcircuitInstance> detect_capacitor_roles(const Netlist& netlist,
                                               const NetRoles& roles);

/// Two-pass current-mirror detection, one CM instance per mirror.
///
/// Pass 1 (cascoded): for each same-channel cell sharing gate, source, and
/// bulk with >= 2 members, map every member in source order to the first
/// same-channel device outside the gate group whose source equals the
/// member's drain; if the mapping is total and the mains share one gate
/// net, the union is a mirror and both gate nets are suppressed for pass 2
/// (per channel). Pass 2 (simple): every unsuppressed cell with >= 2
/// members and a diode-connected member is a mirror. Mirrors sharing a
/// diode-connected device are merged; identical component sets deduplicate.
std::vector<SubcircuitInstance> detect_current_mirrors(const Netlist& netlist);

/// Merge CM instances that share a device which is diode-connected in
/// `netlist` (union-find fixpoint); non-CM instances pass through.
std::vector<SubcircuitInstance> merge_cm_instances(
    const std::vector<SubcircuitInstance>& instances, const Netlist& netlist);

/// Differential pairs: same-channel mosfets sharing source and bulk whose
/// gates sit on two distinct input nets. A pair whose members have distinct
/// sources each fed by its own same-channel cascode device (common cascode
/// gate, common cascode source and bulk) is reported with the cascodes
/// included.
std::vector<SubcircuitInstance> detect_diff_pairs(const Netlist& netlist,
                                                  const NetRoles& roles);

/// Inverters: a pmos pull-up path and an nmos pull-down path meeting at a
/// drive net, each path a chain of 1-2 stacked devices reaching supply
/// (pull-up) or ground (pull-down), with at least one signal-gated device
/// per path (gate not on supply/ground/bias). One instance per
/// (pull-up, pull-down) path combination, deduplicated.
std::vector<SubcircuitInstance> detect_inverters(const Netlist& netlist,
                                                 const NetRoles& roles);

/// HL1 = grouped MosfetDiode + capacitor roles.
AnnotationSet detect_hl1(const Netlist& netlist, const NetRoles& roles);

/// HL2 = union of current mirrors, differential pairs, and inverters.
/// Overlap across labels is legal and preserved.
AnnotationSet detect_hl2(const Netlist& netlist, const NetRoles& roles);

/// HL3 stage assignment from the HL2 result for the same netlist. Labels
/// are claimed with precedence firstStage > secondStage > thirdStage >
/// feedBack > loadPart > biasPart; each label is one grouped instance.
/// Without input nets every label is empty.
AnnotationSet detect_hl3(const Netlist& netlist, const NetRoles& roles,
                         const AnnotationSet& hl2);

/// Run the detectors for one level end to end (classifying nets with
/// `roles`); HL3 computes its HL2 input internally.
AnnotationSet detect_level(const Netlist& netlist, const NetRoles& roles,
                           HierarchyLevel level);

struct TooLargeError : NetlistError {
  explicit TooLargeError(std::size_t n)
      : NetlistError("netlist with " + std::to_string(n) +
                     " devices is too large for exhaustive enumeration") {}
};

/// Exhaustive-enumeration reference for detect_current_mirrors, for
/// netlists with at most 16 devices. Enumerates every same-channel device
/// subset, keeps maximal subsets satisfying the simple-mirror or cascode
/// predicate, and applies the same suppression and diode-sharing merge.
/// Implemented independently of the production detector.
std::vector<SubcircuitInstance> brute_force_cm_oracle(const Netlist& netlist);

}  // namespace subckt
