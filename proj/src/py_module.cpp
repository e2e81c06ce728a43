// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the core operations: parsing, net classification,
// anonymization, the structural detectors, the evaluation metrics, and
// corpus normalization.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "subckt/benchmark.hpp"
#include "subckt/detectors.hpp"
#include "subckt/metrics.hpp"
#include "subckt/netlist.hpp"
#include "subckt/prompts.hpp"

namespace py = pybind11;
using namespace subckt;

namespace {

NetRoleOverrides overrides_from_dict(const py::dict& d) {
  NetRoleOverrides o;
  auto as_set = [](py::handle h) {
    std::set<std::string> s;
    for (auto item : h) s.insert(py::cast<std::string>(item));
    return s;
  };
  auto as_list = [](py::handle h) {
    std::vector<std::string> v;
    for (auto item : h) v.push_back(py::cast<std::string>(item));
    return v;
  };
  for (auto item : d) {
    auto key = py::cast<std::string>(item.first);
    if (key == "supply") o.supply = as_set(item.second);
    else if (key == "ground") o.ground = as_set(item.second);
    else if (key == "inputs") o.inputs = as_list(item.second);
    else if (key == "outputs") o.outputs = as_list(item.second);
    else if (key == "bias") o.bias = as_set(item.second);
    else throw std::invalid_argument("unknown role '" + key + "'");
  }
  return o;
}

py::list instances_to_py(const std::vector<SubcircuitInstance>& instances) {
  py::list out;
  for (const auto& inst : instances) {
    py::dict d;
    d["sub_circuit_name"] = inst.label.name;
    d["components"] = inst.components;
    out.append(d);
  }
  return out;
}

py::dict set_to_py(const AnnotationSet& set) {
  py::dict out;
  for (auto level : set.levels_present())
    out[py::cast(to_string(level))] = instances_to_py(set.level(level));
  return out;
}

AnnotationSet set_from_py(const py::dict& d) {
  AnnotationSet set;
  for (auto item : d) {
    auto level = level_from_string(py::cast<std::string>(item.first));
    for (auto entry : item.second) {
      auto dict = py::cast<py::dict>(entry);
      std::vector<std::string> comps;
      for (auto c : dict["components"]) comps.push_back(py::cast<std::string>(c));
      set.add(SubcircuitInstance(
          {level, py::cast<std::string>(dict["sub_circuit_name"])}, comps));
    }
  }
  return set;
}

py::dict scores_to_py(const Scores& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_subckt, m) {
  m.doc() = "analog subcircuit identification toolkit";

  py::class_<Netlist>(m, "Netlist")
      .def("__len__", [](const Netlist& n) { return n.devices().size(); })
      .def_property_readonly("nets", &Netlist::nets)
      .def_property_readonly("mosfet_count", &Netlist::mosfet_count)
      .def_property_readonly("capacitor_count", &Netlist::capacitor_count)
      .def("device_names",
           [](const Netlist& n) {
             std::vector<std::string> names;
             for (const auto& d : n.devices()) names.push_back(d.name);
             return names;
           })
      .def("devices_on_net", [](const Netlist& n, const std::string& net) {
        py::list out;
        for (const auto& [dev, role] : n.devices_on_net(net))
          out.append(py::make_tuple(dev->name, to_string(role)));
        return out;
      });

  m.def("parse_netlist", &parse_netlist, py::arg("text"));
  m.def("serialize_netlist", &serialize_netlist, py::arg("netlist"));

  m.def(
      "classify_nets",
      [](const Netlist& netlist, const py::dict& overrides) {
        NetRoles roles = classify_nets(netlist, overrides_from_dict(overrides));
        py::dict out;
        out["supply"] = roles.supply;
        out["ground"] = roles.ground;
        out["inputs"] = roles.inputs;
        out["outputs"] = roles.outputs;
        out["bias"] = roles.bias;
        out["internal"] = roles.internal;
        return out;
      },
      py::arg("netlist"), py::arg("overrides") = py::dict());

  m.def(
      "anonymize",
      [](const Netlist& netlist, const std::set<std::string>& reserved) {
        auto [anon, map] = anonymize(netlist, reserved);
        return py::make_tuple(anon, map.forward);
      },
      py::arg("netlist"), py::arg("reserved") = default_reserved_nets());
  m.def("default_reserved_nets", [] { return default_reserved_nets(); });

  m.def(
      "identify",
      [](const Netlist& netlist, const std::string& level,
         const py::dict& overrides) {
        NetRoles roles = classify_nets(netlist, overrides_from_dict(overrides));
        return set_to_py(
            detect_level(netlist, roles, level_from_string(level)));
      },
      py::arg("netlist"), py::arg("level"), py::arg("overrides") = py::dict(),
      "Run the structural detectors for one hierarchy level.");

  m.def("detect_current_mirrors", [](const Netlist& n) {
    return instances_to_py(detect_current_mirrors(n));
  });
  m.def("brute_force_cm_oracle", [](const Netlist& n) {
    return instances_to_py(brute_force_cm_oracle(n));
  });

  m.def(
      "strict_scores",
      [](const py::dict& pred, const py::dict& truth, const std::string& level) {
        return scores_to_py(strict_scores(set_from_py(pred), set_from_py(truth),
                                          level_from_string(level)));
      },
      py::arg("pred"), py::arg("truth"), py::arg("level"));
  m.def(
      "node_scores",
      [](const py::dict& pred, const py::dict& truth, const std::string& level,
         const std::set<std::string>& universe) {
        return scores_to_py(node_scores(set_from_py(pred), set_from_py(truth),
                                        level_from_string(level), universe));
      },
      py::arg("pred"), py::arg("truth"), py::arg("level"), py::arg("universe"));

  m.def(
      "canonicalize",
      [](const py::dict& truth) { return set_to_py(canonicalize(set_from_py(truth))); },
      py::arg("truth"), "Map variant labels onto canonical ones.");

  m.def(
      "render_prompt",
      [](const std::string& id, const std::map<std::string, std::string>& b) {
        return render_prompt(prompt_template(id), b);
      },
      py::arg("template_id"), py::arg("bindings"));

  m.def("serialize_annotations", [](const py::dict& set, const std::string& level) {
    return serialize_annotations(set_from_py(set), level_from_string(level));
  });
  m.def("parse_annotations", [](const std::string& text, const std::string& level) {
    return set_to_py(parse_annotations(text, level_from_string(level)));
  });
}
