// SPDX-License-Identifier: Apache-2.0
//
// Two-phase identifier synthesis: per-demo instruction generation folded
// through pairwise merges, then code generation with an execute/repair
// loop under a retry budget. Accepted (or cautiously accepted) scripts
// form a codebase that identifies subcircuits in new netlists without any
// further provider calls.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subckt/annotation.hpp"
#include "subckt/exec.hpp"
#include "subckt/netlist.hpp"
#include "subckt/prompts.hpp"
#include "subckt/provider.hpp"

namespace subckt {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedReplyError : PipelineError {
  using PipelineError::PipelineError;
};

/// One synthesis target: a subcircuit family identified by a single
/// script. HL2 families run as separate targets whose outputs union at
/// identification time; HL1 and HL3 each run as one combined target.
struct SubcircuitTarget {
  std::string id;          // hl1 | cm | diffpair | inverter | hl3
  HierarchyLevel level;
  std::string display;     // prose name used inside prompts
  std::vector<std::string> labels;
};

const std::vector<SubcircuitTarget>& standard_targets();
const SubcircuitTarget& find_target(const std::string& id);

struct Demo {
  std::string id;
  Netlist netlist;
  AnnotationSet truth;
};

struct Instruction {
  std::string subcircuit;
  std::string body;
};

struct IdentifierScript {
  std::string subcircuit;
  std::string source;
  std::string interpreter;
};

enum class EntryKind { accepted, cautious, empty };
std::string to_string(EntryKind kind);

struct CodebaseEntry {
  EntryKind kind = EntryKind::empty;
  IdentifierScript script;  // empty source for empty entries
  int retries = 0;
  std::string note;
};

struct Codebase {
  std::map<std::string, CodebaseEntry> entries;  // target id -> entry
};

/// Line-delimited structured run records. Events carry a monotonic
/// sequence number; no wall-clock fields, so identical runs produce
/// identical logs.
class RunLog {
 public:
  void record(nlohmann::json event);
  const std::vector<nlohmann::json>& events() const { return events_; }

  std::string to_jsonl() const;
  /// Executions by status; statuses partition total executions.
  std::map<std::string, long> status_histogram() const;
  /// target id -> (retries used, retry limit).
  std::map<std::string, std::pair<int, int>> retry_summary() const;

 private:
  std::vector<nlohmann::json> events_;
  long next_seq_ = 0;
};

struct ProviderConfig {
  std::string kind = "mock";  // mock | http
  // http
  EndpointDescriptor endpoint;
  // mock
  std::vector<std::string> replies;
  bool repeat_last = false;
};

struct PipelineConfig {
  int retry_limit = 5;
  std::vector<Demo> demos;
  ProviderConfig provider;
  std::string interpreter = "python3 {script}";
  std::string driver = ScriptRunner::default_driver();
  double timeout_seconds = 30.0;
  std::uint64_t seed = 0;
};

/// Read a JSON config (provider, demos_dir, interpreter, retry_limit,
/// seed, timeout_seconds); demo netlists and annotations load from the
/// corpus layout. Relative paths resolve against the config file.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config);

/// Phase-1 single step: derive an instruction from one labeled demo.
/// Throws MalformedReplyError when the reply carries no instruction tags.
Instruction generate_instruction(ChatProvider& provider,
                                 const SubcircuitTarget& target,
                                 const Demo& demo);

/// Phase-1 fold step: combine two instructions for the same target.
Instruction merge_instructions(ChatProvider& provider,
                               const SubcircuitTarget& target,
                               const Instruction& a, const Instruction& b);

/// Phase-2 opening move: ask for a script implementing `instruction`,
/// validated against the demo's expected rows. Appends to `conversation`
/// (the repair loop shares it). Throws MalformedReplyError when the reply
/// has no fenced code block or the block lacks the entry function.
IdentifierScript generate_identifier(ChatProvider& provider,
                                     const Instruction& instruction,
                                     const SubcircuitTarget& target,
                                     const Demo& demo,
                                     std::vector<Message>& conversation);

/// Phase-2 repair move within the same conversation. `error.status` must
/// not be pass.
IdentifierScript repair_identifier(ChatProvider& provider,
                                   const IdentifierScript& current,
                                   const ExecutionResult& error,
                                   std::vector<Message>& conversation);

/// The demo ground truth rendered the way prompts expect it.
std::string render_ground_truth(const SubcircuitTarget& target,
                                const Demo& demo);
/// "[['CM', ['m4', 'm19']], ...]" rows for a demo at a target.
std::string render_expected_rows(const SubcircuitTarget& target,
                                 const Demo& demo);

struct PipelineRun {
  Codebase codebase;
  RunLog log;
};

/// Run both phases for every target. Provider errors abort only the
/// current target. Per target the provider sees at most
/// N + (N-1) + 1 + retry_limit calls.
PipelineRun run_pipeline(ChatProvider& provider, const PipelineConfig& config,
                         const std::vector<SubcircuitTarget>& targets);

struct IdentifyOutcome {
  AnnotationSet annotations;
  std::vector<std::string> failed_targets;
};

/// Execute every accepted/cautious script on the serialized netlist and
/// union the parsed rows. No provider involved.
IdentifyOutcome identify_with_codebase(const Codebase& codebase,
                                       const Netlist& netlist,
                                       const ScriptRunner& runner);

void save_codebase(const Codebase& codebase, const std::filesystem::path& dir);
Codebase load_codebase(const std::filesystem::path& dir);

/// "HL1 0/5"-style per-target retry lines plus a status histogram.
std::string format_run_summary(const RunLog& log, int retry_limit);

}  // namespace subckt
