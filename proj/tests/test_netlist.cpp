// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "subckt/netlist.hpp"
#include "support.hpp"

using namespace subckt;
using namespace subckt::test;

TEST_CASE("parse mosfet line") {
  Netlist n = parse_netlist("m13 a a ground ground nmos\n");
  REQUIRE(n.devices().size() == 1);
  const Device& d = n.devices()[0];
  CHECK(d.name == "m13");
  CHECK(d.kind == DeviceKind::mosfet);
  CHECK(d.channel == Channel::nmos);
  CHECK(d.drain() == "a");
  CHECK(d.gate() == "a");
  CHECK(d.source() == "ground");
  CHECK(d.bulk() == "ground");
  CHECK(d.diode_connected());
}

TEST_CASE("empty text gives empty netlist") {
  Netlist n = parse_netlist("");
  CHECK(n.devices().empty());
  CHECK(n.nets().empty());
  CHECK(serialize_netlist(n).empty());
}

TEST_CASE("comments, blanks, and crlf endings") {
  Netlist n = parse_netlist("* header\r\n\r\nm1 a b ground ground nmos\r\n");
  CHECK(n.devices().size() == 1);
  CHECK(n.devices()[0].gate() == "b");
}

TEST_CASE("cascoded demonstration netlist parses completely") {
  Netlist n = parse_netlist(kCascodedNetlist);
  CHECK(n.mosfet_count() == 22);
  CHECK(n.capacitor_count() == 2);
}

TEST_CASE("capacitor value token is accepted and ignored") {
  Netlist n = parse_netlist("c1 out ground 1p\n");
  CHECK(n.devices()[0].kind == DeviceKind::capacitor);
  CHECK(serialize_netlist(n) == "c1 out ground\n");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_netlist("m1 a b ground nmos\n"), MalformedLineError);
  CHECK_THROWS_AS(parse_netlist("r1 a b 10k\n"), MalformedLineError);
  CHECK_THROWS_AS(
      parse_netlist("m1 a b c d nmos\nM1 e f g h pmos\n"),
      DuplicateDeviceError);
  CHECK_THROWS_AS(parse_netlist("m1 a b c d bjt\n"), UnknownChannelError);
  try {
    parse_netlist("m1 a b c d nmos\nc2 x\n");
    FAIL("expected MalformedLineError");
  } catch (const MalformedLineError& e) {
    CHECK(e.line_no == 2);
  }
}

TEST_CASE("devices sharing all terminals are kept") {
  Netlist n = parse_netlist(
      "m1 a b c c nmos\nm2 a b c c nmos\n");
  CHECK(n.devices().size() == 2);
}

TEST_CASE("devices_on_net") {
  Netlist n = parse_netlist(kAmpNetlist);
  auto touching = n.devices_on_net("f");
  std::vector<std::pair<std::string, TerminalRole>> got;
  for (const auto& [dev, role] : touching) got.emplace_back(dev->name, role);
  std::vector<std::pair<std::string, TerminalRole>> want = {
      {"m9", TerminalRole::drain},   {"m11", TerminalRole::source},
      {"m11", TerminalRole::bulk},   {"m12", TerminalRole::source},
      {"m12", TerminalRole::bulk}};
  CHECK(got == want);
  CHECK_THROWS_AS(n.devices_on_net("nosuch"), UnknownNetError);

  Netlist single = parse_netlist("c1 out ground\n");
  auto on_out = single.devices_on_net("out");
  REQUIRE(on_out.size() == 1);
  CHECK(on_out[0].first->name == "c1");
  CHECK(on_out[0].second == TerminalRole::pos);
}

TEST_CASE("devices_on_net is exhaustive") {
  NetlistGenerator gen(11);
  for (int round = 0; round < 20; ++round) {
    Netlist n = gen.generate();
    std::size_t touched = 0;
    for (const auto& net : n.nets()) touched += n.devices_on_net(net).size();
    CHECK(touched == n.terminal_count());
  }
}

TEST_CASE("classify_nets on the amplifier netlist") {
  Netlist n = parse_netlist(kAmpNetlist);
  NetRoles roles = classify_nets(n);
  CHECK(roles.supply == std::set<std::string>{"supply"});
  CHECK(roles.ground == std::set<std::string>{"ground"});
  CHECK(roles.inputs == std::vector<std::string>{"in1", "in2"});
  CHECK(roles.outputs == std::vector<std::string>{"out"});
  CHECK(roles.bias == std::set<std::string>{"ibias"});
  CHECK(roles.internal ==
        std::set<std::string>{"a", "b", "c", "d", "e", "f", "g"});
}

TEST_CASE("classify_nets without reserved names") {
  Netlist n = parse_netlist("c1 a b\n");
  NetRoles roles = classify_nets(n);
  CHECK(roles.supply.empty());
  CHECK(roles.ground.empty());
  CHECK(roles.inputs.empty());
  CHECK(roles.outputs.empty());
  CHECK(roles.bias.empty());
  CHECK(roles.internal == std::set<std::string>{"a", "b"});
}

TEST_CASE("classify_nets overrides replace wholesale") {
  Netlist n = parse_netlist("m1 x in1 ground ground nmos\n");
  NetRoleOverrides o;
  o.outputs = std::vector<std::string>{"x"};
  NetRoles roles = classify_nets(n, o);
  CHECK(roles.outputs == std::vector<std::string>{"x"});
  CHECK(roles.inputs == std::vector<std::string>{"in1"});
  CHECK(roles.internal.empty());

  NetRoleOverrides bad;
  bad.outputs = std::vector<std::string>{"x"};
  bad.bias = std::set<std::string>{"x"};
  CHECK_THROWS_AS(classify_nets(n, bad), ConflictingOverrideError);
}

TEST_CASE("classify_nets name edge cases") {
  Netlist n = parse_netlist(
      "m1 vout1 vbias_n internal internal nmos\n"
      "m2 output2 vref 0 0 nmos\n");
  NetRoles roles = classify_nets(n);
  CHECK(roles.is_output("vout1"));
  CHECK(roles.is_output("output2"));
  CHECK(roles.is_bias("vbias_n"));
  CHECK(roles.is_input("vref"));
  CHECK(roles.is_ground("0"));
  CHECK(roles.is_internal("internal"));  // "in" + non-digits is not an input
}

TEST_CASE("serialize then reparse is structurally equal") {
  for (const char* text : {kAmpNetlist, kTwoStageNetlist, kFullyDiffNetlist,
                           kCascodedNetlist, kMirrorLoadedNetlist}) {
    Netlist n = parse_netlist(text);
    Netlist again = parse_netlist(serialize_netlist(n));
    CHECK(n == again);
  }
  NetlistGenerator gen(23);
  for (int round = 0; round < 30; ++round) {
    Netlist n = gen.generate();
    CHECK(n == parse_netlist(serialize_netlist(n)));
  }
}

TEST_CASE("anonymize renames in first-appearance order") {
  Netlist n = parse_netlist(
      "m1 out1FirstStage in1 tail tail nmos\n"
      "m2 other in2 tail tail nmos\n");
  auto [anon, map] = anonymize(n);
  CHECK(map.forward.at("out1FirstStage") == "a");
  CHECK(map.forward.at("tail") == "b");
  CHECK(map.forward.at("other") == "c");
  CHECK(map.forward.count("in1") == 0);
  CHECK(anon.devices()[0].drain() == "a");
}

TEST_CASE("anonymize keeps reserved nets and is idempotent") {
  Netlist n = parse_netlist(kTwoStageNetlist);
  auto [anon, map] = anonymize(n);
  CHECK(anon.nets().size() == n.nets().size());
  for (const auto& net : {"supply", "ground", "out", "in1", "in2", "ibias"})
    CHECK(map.forward.count(net) == 0);

  auto [again, map2] = anonymize(anon);
  CHECK(again == anon);

  // Fully reserved netlist maps to itself.
  std::set<std::string> everything(n.nets().begin(), n.nets().end());
  auto [same, map3] = anonymize(n, everything);
  CHECK(same == n);
  CHECK(map3.forward.empty());
}

TEST_CASE("anonymize skips generated names that collide with reserved") {
  Netlist n = parse_netlist("m1 x y supply supply pmos\nc1 in z\n");
  std::set<std::string> reserved = {"supply", "a", "in"};
  auto [anon, map] = anonymize(n, reserved);
  CHECK(map.forward.at("x") == "b");  // "a" reserved, skipped
  CHECK(map.forward.at("y") == "c");
  CHECK(map.forward.at("z") == "d");
  CHECK(anon.has_net("in"));
}

TEST_CASE("anonymize preserves the device-terminal graph") {
  NetlistGenerator gen(7);
  for (int round = 0; round < 25; ++round) {
    Netlist n = gen.generate();
    auto [anon, map] = anonymize(n);
    REQUIRE(anon.devices().size() == n.devices().size());
    for (std::size_t i = 0; i < n.devices().size(); ++i) {
      const Device& before = n.devices()[i];
      const Device& after = anon.devices()[i];
      CHECK(before.name == after.name);
      CHECK(before.channel == after.channel);
      REQUIRE(before.terminals.size() == after.terminals.size());
      for (std::size_t t = 0; t < before.terminals.size(); ++t) {
        CHECK(before.terminals[t].role == after.terminals[t].role);
        CHECK(map.apply(before.terminals[t].net) == after.terminals[t].net);
      }
    }
    // forward is injective
    std::set<std::string> targets;
    for (const auto& [from, to] : map.forward)
      CHECK(targets.insert(to).second);
  }
}
