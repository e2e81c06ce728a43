// SPDX-License-Identifier: Apache-2.0

#include "subckt/pipeline.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "subckt/io.hpp"

namespace subckt {

namespace fs = std::filesystem;

const std::vector<SubcircuitTarget>& standard_targets() {
  static const std::vector<SubcircuitTarget> targets = {
      {"hl1",
       HierarchyLevel::HL1,
       "diode-connected transistors and load/compensation capacitors",
       {"MosfetDiode", "load_cap", "compensation_cap"}},
      {"cm", HierarchyLevel::HL2, "Current Mirrors", {"CM"}},
      {"diffpair", HierarchyLevel::HL2, "Differential Pairs", {"DiffPair"}},
      {"inverter", HierarchyLevel::HL2, "Analog Inverters", {"Inverter"}},
      {"hl3",
       HierarchyLevel::HL3,
       "amplification stages (first, second, third stage), feedback stage, "
       "load and bias parts",
       {"firstStage", "secondStage", "thirdStage", "feedBack", "loadPart",
        "biasPart"}},
  };
  return targets;
}

const SubcircuitTarget& find_target(const std::string& id) {
  for (const auto& t : standard_targets())
    if (t.id == id) return t;
  throw PipelineError("unknown target '" + id + "'");
}

std::string to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::accepted: return "accepted";
    case EntryKind::cautious: return "cautious";
    case EntryKind::empty: return "empty";
  }
  return "?";
}

void RunLog::record(nlohmann::json event) {
  event["seq"] = next_seq_++;
  events_.push_back(std::move(event));
}

std::string RunLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) out += e.dump() + "\n";
  return out;
}

std::map<std::string, long> RunLog::status_histogram() const {
  std::map<std::string, long> hist;
  for (const auto& e : events_)
    if (e.value("event", "") == "execution")
      ++hist[e.value("status", "?")];
  return hist;
}

std::map<std::string, std::pair<int, int>> RunLog::retry_summary() const {
  std::map<std::string, std::pair<int, int>> summary;
  for (const auto& e : events_)
    if (e.value("event", "") == "outcome")
      summary[e.value("target", "?")] = {e.value("retries", 0),
                                         e.value("retry_limit", 0)};
  return summary;
}

namespace {

std::string quoted_list(const std::vector<std::string>& names) {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += "'" + names[i] + "'";
  }
  return out + "]";
}

std::string hl3_prose(const std::string& label) {
  if (label == "firstStage") return "the first amplification stage";
  if (label == "secondStage") return "the second amplification stage";
  if (label == "thirdStage") return "the third amplification stage";
  if (label == "feedBack") return "the feedback stage";
  if (label == "loadPart") return "load parts";
  if (label == "biasPart") return "bias parts";
  return label;
}

std::string hl1_prose(const std::string& label, std::size_t n) {
  if (label == "MosfetDiode")
    return n == 1 ? "diode-connected transistor" : "diode-connected transistors";
  if (label == "load_cap")
    return n == 1 ? "load capacitor" : "load capacitors";
  return n == 1 ? "compensation capacitor" : "compensation capacitors";
}

std::vector<const SubcircuitInstance*> target_instances(
    const SubcircuitTarget& target, const Demo& demo) {
  std::vector<const SubcircuitInstance*> out;
  for (const auto& inst : demo.truth.level(target.level))
    if (std::find(target.labels.begin(), target.labels.end(),
                  inst.label.name) != target.labels.end())
      out.push_back(&inst);
  return out;
}

std::string extract_tagged(const std::string& reply, const std::string& open,
                           const std::string& close) {
  auto a = reply.find(open);
  if (a == std::string::npos) return {};
  a += open.size();
  auto b = reply.find(close, a);
  if (b == std::string::npos) return {};
  std::string body = reply.substr(a, b - a);
  // trim
  auto begin = body.find_first_not_of(" \t\r\n");
  auto end = body.find_last_not_of(" \t\r\n");
  return begin == std::string::npos ? std::string()
                                    : body.substr(begin, end - begin + 1);
}

std::string extract_code_block(const std::string& reply) {
  auto open = reply.find("```");
  if (open == std::string::npos) return {};
  auto eol = reply.find('\n', open);
  if (eol == std::string::npos) return {};
  auto close = reply.find("```", eol);
  if (close == std::string::npos) return {};
  return reply.substr(eol + 1, close - eol - 1);
}

}  // namespace

std::string render_ground_truth(const SubcircuitTarget& target,
                                const Demo& demo) {
  auto instances = target_instances(target, demo);
  std::ostringstream out;
  if (target.level == HierarchyLevel::HL1) {
    for (const auto& label : target.labels) {
      std::vector<std::string> comps;
      for (const auto* inst : instances)
        if (inst->label.name == label)
          comps.insert(comps.end(), inst->components.begin(),
                       inst->components.end());
      out << "- In the given SPICE netlist, there are a total of "
          << comps.size() << " **" << hl1_prose(label, comps.size())
          << "**: " << (comps.empty() ? "" : quoted_list(comps)) << "\n\n";
    }
  } else if (target.level == HierarchyLevel::HL2) {
    out << "In the given SPICE netlist, there are a total of "
        << instances.size() << " **" << target.display << "**: ";
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (i) out << ", ";
      out << quoted_list(instances[i]->components);
    }
    out << "\n";
  } else {
    for (const auto& label : target.labels) {
      std::vector<std::string> comps;
      for (const auto* inst : instances)
        if (inst->label.name == label)
          comps.insert(comps.end(), inst->components.begin(),
                       inst->components.end());
      if (comps.empty()) continue;
      out << "- In the given SPICE netlist, there are a total of "
          << comps.size() << " transistor(s) belong to **"
          << hl3_prose(label) << "**: " << quoted_list(comps) << "\n\n";
    }
  }
  return out.str();
}

std::string render_expected_rows(const SubcircuitTarget& target,
                                 const Demo& demo) {
  auto instances = target_instances(target, demo);
  std::ostringstream out;
  out << "[";
  bool first = true;
  if (target.level == HierarchyLevel::HL2) {
    for (const auto* inst : instances) {
      if (!first) out << ", ";
      first = false;
      out << "['" << inst->label.name << "', "
          << quoted_list(inst->components) << "]";
    }
  } else {
    // Grouped levels: one row per label that has components.
    for (const auto& label : target.labels) {
      std::vector<std::string> comps;
      for (const auto* inst : instances)
        if (inst->label.name == label)
          comps.insert(comps.end(), inst->components.begin(),
                       inst->components.end());
      if (comps.empty()) continue;
      if (!first) out << ", ";
      first = false;
      out << "['" << label << "', " << quoted_list(comps) << "]";
    }
  }
  out << "]";
  return out.str();
}

namespace {

std::string render_test_cases(const SubcircuitTarget& target,
                              const Demo& demo) {
  std::ostringstream out;
  out << "**Test Case 1**\n\n**Input SPICE Netlist**\n\n```\n"
      << serialize_netlist(demo.netlist)
      << "```\n\n**Expected Output**  (order of list elements does not "
         "matter)\n\n```\n"
      << render_expected_rows(target, demo) << "\n```\n";
  return out.str();
}

}  // namespace

Instruction generate_instruction(ChatProvider& provider,
                                 const SubcircuitTarget& target,
                                 const Demo& demo) {
  auto prompt = render_prompt(
      prompt_template("instruction_gen"),
      {{"subcircuit", target.display},
       {"netlist", serialize_netlist(demo.netlist)},
       {"ground_truth", render_ground_truth(target, demo)}});
  std::string reply = provider.complete({{"user", prompt}});
  std::string body = extract_tagged(reply, "<instruction>", "</instruction>");
  if (body.empty())
    throw MalformedReplyError("reply carries no <instruction> tags");
  return {target.id, body};
}

Instruction merge_instructions(ChatProvider& provider,
                               const SubcircuitTarget& target,
                               const Instruction& a, const Instruction& b) {
  if (a.subcircuit != target.id || b.subcircuit != target.id)
    throw PipelineError("instructions belong to a different target");
  auto prompt = render_prompt(prompt_template("instruction_merge"),
                              {{"subcircuit", target.display},
                               {"instruction_1", a.body},
                               {"instruction_2", b.body}});
  std::string reply = provider.complete({{"user", prompt}});
  std::string body = extract_tagged(reply, "<instruction>", "</instruction>");
  if (body.empty())
    throw MalformedReplyError("reply carries no <instruction> tags");
  return {target.id, body};
}

IdentifierScript generate_identifier(ChatProvider& provider,
                                     const Instruction& instruction,
                                     const SubcircuitTarget& target,
                                     const Demo& demo,
                                     std::vector<Message>& conversation) {
  auto prompt = render_prompt(prompt_template("code_gen"),
                              {{"subcircuit", target.display},
                               {"instruction_final", instruction.body},
                               {"test_cases", render_test_cases(target, demo)}});
  conversation.push_back({"user", prompt});
  std::string reply = provider.complete(conversation);
  conversation.push_back({"assistant", reply});
  std::string source = extract_code_block(reply);
  if (source.empty())
    throw MalformedReplyError("reply carries no fenced code block");
  if (source.find("findSubCircuit(") == std::string::npos)
    throw MalformedReplyError("script lacks the findSubCircuit entry function");
  return {target.id, source, ""};
}

IdentifierScript repair_identifier(ChatProvider& provider,
                                   const IdentifierScript& current,
                                   const ExecutionResult& error,
                                   std::vector<Message>& conversation) {
  if (error.status == ExecStatus::pass)
    throw std::invalid_argument("repair requested for a passing execution");
  auto prompt = render_prompt(prompt_template("code_repair"),
                              {{"error_message", error.message}});
  conversation.push_back({"user", prompt});
  std::string reply = provider.complete(conversation);
  conversation.push_back({"assistant", reply});
  std::string source = extract_code_block(reply);
  if (source.empty())
    throw MalformedReplyError("reply carries no fenced code block");
  if (source.find("findSubCircuit(") == std::string::npos)
    throw MalformedReplyError("script lacks the findSubCircuit entry function");
  return {current.subcircuit, source, current.interpreter};
}

PipelineRun run_pipeline(ChatProvider& provider, const PipelineConfig& config,
                         const std::vector<SubcircuitTarget>& targets) {
  if (config.demos.empty()) throw PipelineError("config carries no demos");
  if (config.retry_limit < 0) throw PipelineError("negative retry limit");
  for (const auto& target : targets) {
    for (const auto& label : target.labels) {
      bool covered = std::any_of(
          config.demos.begin(), config.demos.end(), [&](const Demo& d) {
            const auto& insts = d.truth.level(target.level);
            return std::any_of(insts.begin(), insts.end(),
                               [&](const SubcircuitInstance& i) {
                                 return i.label.name == label;
                               });
          });
      if (!covered)
        throw PipelineError("demos do not cover label '" + label + "'");
    }
  }

  PipelineRun run;
  ScriptRunner runner(config.interpreter, config.timeout_seconds,
                      config.driver);
  std::mt19937_64 rng(config.seed);

  for (const auto& target : targets) {
    // The code-gen demo pick consumes one draw per target whether or not
    // the target completes, keeping runs reproducible.
    std::uniform_int_distribution<std::size_t> pick(0,
                                                    config.demos.size() - 1);
    const Demo& codegen_demo = config.demos[pick(rng)];
    try {
      // Phase 1: one instruction per demo, folded through pairwise merges.
      std::vector<Instruction> derived;
      for (const auto& demo : config.demos) {
        run.log.record({{"event", "prompt"},
                        {"target", target.id},
                        {"phase", 1},
                        {"kind", "instruction_gen"},
                        {"demo", demo.id}});
        derived.push_back(generate_instruction(provider, target, demo));
      }
      Instruction merged = derived.front();
      for (std::size_t i = 1; i < derived.size(); ++i) {
        run.log.record({{"event", "prompt"},
                        {"target", target.id},
                        {"phase", 1},
                        {"kind", "instruction_merge"}});
        merged = merge_instructions(provider, target, merged, derived[i]);
      }

      // Phase 2: generate, execute, repair.
      std::vector<Message> conversation;
      run.log.record({{"event", "prompt"},
                      {"target", target.id},
                      {"phase", 2},
                      {"kind", "code_gen"},
                      {"demo", codegen_demo.id}});
      IdentifierScript script = generate_identifier(
          provider, merged, target, codegen_demo, conversation);

      int retries = 0;
      ExecutionResult result =
          runner.validate(script.source, serialize_netlist(codegen_demo.netlist));
      run.log.record({{"event", "execution"},
                      {"target", target.id},
                      {"status", to_string(result.status)},
                      {"retries", retries}});
      while (result.status != ExecStatus::pass &&
             retries < config.retry_limit) {
        ++retries;
        run.log.record({{"event", "prompt"},
                        {"target", target.id},
                        {"phase", 2},
                        {"kind", "code_repair"},
                        {"retry", retries}});
        script = repair_identifier(provider, script, result, conversation);
        result = runner.validate(script.source,
                                 serialize_netlist(codegen_demo.netlist));
        run.log.record({{"event", "execution"},
                        {"target", target.id},
                        {"status", to_string(result.status)},
                        {"retries", retries}});
      }

      CodebaseEntry entry;
      entry.retries = retries;
      entry.script = script;
      entry.script.interpreter = config.interpreter;
      if (result.status == ExecStatus::pass) {
        entry.kind = EntryKind::accepted;
      } else if (result.parsed_output.has_value()) {
        entry.kind = EntryKind::cautious;
        entry.note = "retries exhausted; last run still produced rows";
      } else {
        entry.kind = EntryKind::empty;
        entry.script.source.clear();
        entry.note = "retries exhausted with " + to_string(result.status);
      }
      run.codebase.entries[target.id] = entry;
      run.log.record({{"event", "outcome"},
                      {"target", target.id},
                      {"kind", to_string(entry.kind)},
                      {"retries", retries},
                      {"retry_limit", config.retry_limit}});
    } catch (const ProviderError& e) {
      CodebaseEntry entry;
      entry.kind = EntryKind::empty;
      entry.note = std::string("provider error: ") + e.what();
      run.codebase.entries[target.id] = entry;
      run.log.record({{"event", "outcome"},
                      {"target", target.id},
                      {"kind", "empty"},
                      {"error", e.what()},
                      {"retries", 0},
                      {"retry_limit", config.retry_limit}});
    }
  }
  return run;
}

IdentifyOutcome identify_with_codebase(const Codebase& codebase,
                                       const Netlist& netlist,
                                       const ScriptRunner& runner) {
  IdentifyOutcome outcome;
  std::string text = serialize_netlist(netlist);
  for (const auto& [id, entry] : codebase.entries) {
    if (entry.kind == EntryKind::empty) continue;
    const auto& target = find_target(id);
    ExecutionResult result = runner.infer(entry.script.source, text);
    if (!result.parsed_output.has_value()) {
      outcome.failed_targets.push_back(id);
      continue;
    }
    for (const auto& [label, comps] : *result.parsed_output) {
      if (comps.empty()) continue;
      outcome.annotations.add(
          SubcircuitInstance({target.level, label}, comps));
    }
  }
  return outcome;
}

void save_codebase(const Codebase& codebase, const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::json manifest;
  for (const auto& [id, entry] : codebase.entries) {
    nlohmann::json item;
    item["kind"] = to_string(entry.kind);
    item["retries"] = entry.retries;
    item["note"] = entry.note;
    item["interpreter"] = entry.script.interpreter;
    if (entry.kind != EntryKind::empty) {
      std::string file = id + ".py";
      write_file_atomic(dir / file, entry.script.source);
      item["script"] = file;
    }
    manifest[id] = item;
  }
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Codebase load_codebase(const fs::path& dir) {
  Codebase codebase;
  auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  for (const auto& [id, item] : manifest.items()) {
    CodebaseEntry entry;
    std::string kind = item.value("kind", "empty");
    entry.kind = kind == "accepted" ? EntryKind::accepted
                 : kind == "cautious" ? EntryKind::cautious
                                      : EntryKind::empty;
    entry.retries = item.value("retries", 0);
    entry.note = item.value("note", "");
    entry.script.subcircuit = id;
    entry.script.interpreter = item.value("interpreter", "");
    if (item.contains("script"))
      entry.script.source = read_file(dir / item["script"].get<std::string>());
    codebase.entries[id] = entry;
  }
  return codebase;
}

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config) {
  if (config.kind == "mock")
    return std::make_unique<MockProvider>(config.replies, config.repeat_last);
  if (config.kind == "http")
    return std::make_unique<HttpChatProvider>(config.endpoint);
  throw PipelineError("unknown provider kind '" + config.kind + "'");
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  PipelineConfig config;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw PipelineError(std::string("cannot load config: ") + e.what());
  }
  auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  config.retry_limit = doc.value("retry_limit", 5);
  config.seed = doc.value("seed", std::uint64_t{0});
  config.timeout_seconds = doc.value("timeout_seconds", 30.0);
  config.interpreter = doc.value("interpreter", config.interpreter);
  if (doc.contains("driver_file"))
    config.driver = read_file(resolve(doc["driver_file"].get<std::string>()));

  if (!doc.contains("demos_dir"))
    throw PipelineError("config needs demos_dir");
  fs::path demos_dir = resolve(doc["demos_dir"].get<std::string>());
  for (const auto& item : fs::directory_iterator(demos_dir)) {
    if (item.path().extension() != ".sp") continue;
    Demo demo;
    demo.id = item.path().stem().string();
    demo.netlist = parse_netlist(read_file(item.path()));
    const std::pair<const char*, HierarchyLevel> kLevels[] = {
        {".hl1", HierarchyLevel::HL1},
        {".hl2", HierarchyLevel::HL2},
        {".hl3", HierarchyLevel::HL3}};
    for (const auto& [ext, level] : kLevels) {
      fs::path ann = item.path();
      ann.replace_extension(ext);
      if (!fs::exists(ann)) continue;
      auto parsed = parse_annotations(read_file(ann), level);
      for (const auto& inst : parsed.level(level)) demo.truth.add(inst);
    }
    config.demos.push_back(std::move(demo));
  }
  std::sort(config.demos.begin(), config.demos.end(),
            [](const Demo& a, const Demo& b) { return a.id < b.id; });

  if (!doc.contains("provider")) throw PipelineError("config needs provider");
  const auto& p = doc["provider"];
  config.provider.kind = p.value("kind", "mock");
  if (config.provider.kind == "http") {
    config.provider.endpoint.url = p.value("url", "");
    config.provider.endpoint.model = p.value("model", "");
    config.provider.endpoint.credential_env = p.value("credential_env", "");
    if (config.provider.endpoint.url.empty())
      throw PipelineError("http provider needs url");
  } else if (config.provider.kind == "mock") {
    config.provider.repeat_last = p.value("repeat_last", false);
    if (p.contains("replies"))
      config.provider.replies =
          p["replies"].get<std::vector<std::string>>();
    if (p.contains("replay_file")) {
      auto replay = nlohmann::json::parse(
          read_file(resolve(p["replay_file"].get<std::string>())));
      config.provider.replies = replay.value("replies", config.provider.replies);
      config.provider.repeat_last =
          replay.value("repeat_last", config.provider.repeat_last);
    }
  } else {
    throw PipelineError("unknown provider kind '" + config.provider.kind + "'");
  }
  return config;
}

std::string format_run_summary(const RunLog& log, int retry_limit) {
  std::ostringstream out;
  out << "retry summary\n";
  for (const auto& [target, counts] : log.retry_summary()) {
    std::string label = find_target(target).id;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    out << "  " << label << " " << counts.first << "/"
        << (counts.second > 0 ? counts.second : retry_limit) << "\n";
  }
  out << "execution status histogram\n";
  auto hist = log.status_histogram();
  const char* order[] = {"pass", "assertion_failure", "syntax_error",
                         "runtime_error", "timeout"};
  for (const char* key : order)
    out << "  " << key << " " << (hist.count(key) ? hist.at(key) : 0) << "\n";
  return out.str();
}

}  // namespace subckt
