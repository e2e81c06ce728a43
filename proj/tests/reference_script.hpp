// SPDX-License-Identifier: Apache-2.0
//
// Python identifier used by the pipeline tests: a two-pass current-mirror
// finder with an embedded self-test, the shape the code-generation phase
// is expected to produce.

#pragma once

namespace subckt::test {

inline const char* kMirrorScript = R"PY(def findSubCircuit(netlist: str):
    """
    Find all Current Mirrors subcircuits.

    Args:
        netlist (str): A flat SPICE netlist as a string,
        where each line defines a component and its connections in the circuit.

    Returns:
        List of lists, each containing the subcircuit name 'CM'
        and the list of transistor instance names that form a current mirror.
    """
    # 1. Parse MOSFETs
    lines = [
        l.strip()
        for l in netlist.splitlines()
        if l.strip() and not l.strip().startswith("*")
    ]
    mosfets = []
    for line in lines:
        if line[0].lower() == "m":
            toks = line.split()
            name = toks[0]
            d, g, s, b = toks[1], toks[2], toks[3], toks[4]
            model = toks[5].lower()
            if "nmos" in model:
                mtype = "nmos"
            elif "pmos" in model:
                mtype = "pmos"
            else:
                mtype = model
            mosfets.append(
                {
                    "name": name,
                    "drain": d,
                    "gate": g,
                    "source": s,
                    "bulk": b,
                    "type": mtype,
                }
            )

    # 2. Group by type
    mos_by_type = {"nmos": [], "pmos": []}
    for m in mosfets:
        if m["type"] in mos_by_type:
            mos_by_type[m["type"]].append(m)

    simple_mirrors = []
    cascoded_mirrors = []
    suppressed_gates = set()

    # 3. Cascoded detection
    for mtype, devs in mos_by_type.items():
        gate_groups = {}
        for m in devs:
            gate_groups.setdefault(m["gate"], []).append(m)

        for gate_net, casg in gate_groups.items():
            if len(casg) < 2:
                continue
            # all share source & bulk
            if (
                len({m["source"] for m in casg}) != 1
                or len({m["bulk"] for m in casg}) != 1
            ):
                continue

            # map each cascode device -> a main whose source == cas.drain
            mapping = {}
            for cas in casg:
                for main in devs:
                    if main not in casg and main["source"] == cas["drain"]:
                        mapping[cas["name"]] = main
                        break

            if len(mapping) != len(casg):
                continue

            mains = list(mapping.values())
            if len({m["gate"] for m in mains}) != 1 or len(mains) < 2:
                continue

            # success: cascoded mirror
            names = sorted([m["name"] for m in casg + mains])
            cascoded_mirrors.append(["CM", names])

            # suppress both cascode-gate and primary-gate
            suppressed_gates.add(gate_net)
            suppressed_gates.add(next(iter(m["gate"] for m in mains)))

    # 4. Simple mirror detection on the remaining gates
    for mtype, devs in mos_by_type.items():
        gate_groups = {}
        for m in devs:
            gate_groups.setdefault(m["gate"], []).append(m)

        for gate_net, group in gate_groups.items():
            if gate_net in suppressed_gates or len(group) < 2:
                continue
            if (
                len({m["source"] for m in group}) == 1
                and len({m["bulk"] for m in group}) == 1
                and any(m["drain"] == m["gate"] for m in group)
            ):
                names = sorted([m["name"] for m in group])
                simple_mirrors.append(["CM", names])

    # 5. Combine, dedupe
    all_mirrors = cascoded_mirrors + simple_mirrors
    unique = []
    seen = set()
    for tag, names in all_mirrors:
        key = frozenset(names)
        if key not in seen:
            seen.add(key)
            unique.append([tag, names])

    return unique


if __name__ == "__main__":
    # ---- Test Case 1 ----
    netlist = """
    c1 a out
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
    """

    expected = [
        ["CM", ["m15", "m16", "m20", "m21"]],
        ["CM", ["m7", "m8", "m9", "m10"]],
        ["CM", ["m1", "m11", "m18", "m2", "m3"]],
        ["CM", ["m4", "m19"]],
    ]

    actual = findSubCircuit(netlist)

    # Compare as sets of frozensets so we ignore internal ordering
    actual_sets = {frozenset(group[1]) for group in actual}
    expected_sets = {frozenset(group[1]) for group in expected}

    if actual_sets != expected_sets:
        missing = expected_sets - actual_sets
        extra = actual_sets - expected_sets
        print(" Test failed!")
        print(" Missing groups:", [sorted(list(s)) for s in missing])
        print(" Extra groups:  ", [sorted(list(s)) for s in extra])
        print(" Expected:      ", expected)
        print(" Actual:        ", actual)

    assert actual_sets == expected_sets, "Current mirror detection failed"
    print(" All tests passed.")
)PY";

/// Eight-step mirror-identification procedure, tagged the way replies are
/// expected to arrive.
inline const char* kMirrorInstructionReply =
    R"(<instruction>
## Step-by-Step Instructions to Identify Current Mirrors in Flat SPICE Netlists

1. **Parse the Netlist for MOSFET Instances**
   - Record each MOSFET's name, type, and drain/gate/source/bulk nets.

2. **Group MOSFETs by Type**
   - Keep NMOS and PMOS devices separate.

3. **Identify Candidate Groups with Shared Gate Connections**
   - Within each type, collect sets of two or more MOSFETs sharing a gate net.

4. **Filter Groups with Shared Source Connections**
   - Keep only groups whose members also share one source net.

5. **Check Bulk Connections**
   - Require a common bulk net across the group.

6. **Identify Reference (Diode-Connected) Devices**
   - Require at least one member with gate tied to drain.

7. **Check for Cascoded or Multi-Stage Mirrors**
   - Stacked devices whose source or drain feeds another member indicate a
     cascoded mirror; include the stacked devices.

8. **Form and Output Current Mirror Groups**
   - Emit each valid group as one current mirror with all member names.
</instruction>)";

}  // namespace subckt::test
