// SPDX-License-Identifier: Apache-2.0
//
// subckt: identify analog subcircuits in flat SPICE netlists, score
// predictions against labeled corpora, prepare benchmark data, and drive
// the two-phase identifier-synthesis pipeline.
//
// Exit codes: 0 success, 2 netlist parse error, 3 corpus mismatch,
// 4 provider/config error, 1 anything else.

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "subckt/benchmark.hpp"
#include "subckt/detectors.hpp"
#include "subckt/io.hpp"
#include "subckt/metrics.hpp"
#include "subckt/pipeline.hpp"

namespace fs = std::filesystem;
using namespace subckt;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitCorpus = 3;
constexpr int kExitProvider = 4;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<HierarchyLevel> parse_levels(const std::string& csv) {
  std::vector<HierarchyLevel> out;
  for (const auto& item : split_list(csv)) {
    if (item == "all")
      return {HierarchyLevel::HL1, HierarchyLevel::HL2, HierarchyLevel::HL3};
    out.push_back(level_from_string(item));
  }
  return out;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w)
    pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

NetRoleOverrides overrides_from(const std::string& supply,
                                const std::string& ground,
                                const std::string& inputs,
                                const std::string& outputs,
                                const std::string& bias) {
  NetRoleOverrides o;
  auto as_set = [](const std::string& csv) {
    auto v = split_list(csv);
    return std::set<std::string>(v.begin(), v.end());
  };
  if (!supply.empty()) o.supply = as_set(supply);
  if (!ground.empty()) o.ground = as_set(ground);
  if (!inputs.empty()) o.inputs = split_list(inputs);
  if (!outputs.empty()) o.outputs = split_list(outputs);
  if (!bias.empty()) o.bias = as_set(bias);
  return o;
}

std::vector<fs::path> sp_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir))
    if (item.path().extension() == ".sp") files.push_back(item.path());
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_identify(const std::string& netlist_path, const std::string& levels_csv,
                 const NetRoleOverrides& overrides, const std::string& out_dir,
                 unsigned workers) {
  auto levels = parse_levels(levels_csv);
  fs::path in(netlist_path);
  std::vector<fs::path> inputs =
      fs::is_directory(in) ? sp_files(in) : std::vector<fs::path>{in};
  fs::path out_base = out_dir.empty()
                          ? (fs::is_directory(in) ? in : in.parent_path())
                          : fs::path(out_dir);

  parallel_for(inputs.size(), workers, [&](std::size_t i) {
    const auto& path = inputs[i];
    Netlist netlist = parse_netlist(read_file(path));
    NetRoles roles = classify_nets(netlist, overrides);
    for (auto level : levels) {
      AnnotationSet result = detect_level(netlist, roles, level);
      fs::path doc = out_base / path.stem();
      doc += "." + to_string(level);
      write_file_atomic(doc, serialize_annotations(result, level));
    }
  });
  return 0;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& truth_dir,
                 const std::string& level_csv, const std::string& report_path,
                 unsigned workers) {
  auto levels = parse_levels(level_csv);
  auto truth_files = sp_files(truth_dir);
  if (truth_files.empty())
    throw BenchmarkError("no .sp files under " + truth_dir);

  // Pair up documents first; orphans are a corpus mismatch.
  std::vector<std::string> orphans;
  struct Job {
    fs::path sp;
    HierarchyLevel level;
    fs::path truth_doc;
    fs::path pred_doc;
  };
  std::vector<Job> jobs;
  for (const auto& sp : truth_files) {
    for (auto level : levels) {
      fs::path truth_doc = sp;
      truth_doc.replace_extension("." + to_string(level));
      if (!fs::exists(truth_doc)) continue;
      fs::path pred_doc = fs::path(pred_dir) / truth_doc.filename();
      if (!fs::exists(pred_doc)) {
        orphans.push_back(truth_doc.filename().string());
        continue;
      }
      jobs.push_back({sp, level, truth_doc, pred_doc});
    }
  }
  if (!orphans.empty()) {
    std::cerr << "missing prediction documents:\n";
    for (const auto& o : orphans) std::cerr << "  " << o << "\n";
    return kExitCorpus;
  }
  if (jobs.empty()) throw BenchmarkError("no annotation documents to score");

  std::vector<NetlistEval> evals(jobs.size());
  std::map<HierarchyLevel, ConfusionMatrix> confusions;
  std::mutex confusion_mutex;
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    Netlist netlist = parse_netlist(read_file(job.sp));
    auto truth = parse_annotations(read_file(job.truth_doc), job.level);
    auto pred = parse_annotations(read_file(job.pred_doc), job.level);
    std::set<std::string> universe;
    for (const auto& dev : netlist.devices()) universe.insert(dev.name);
    for (const auto& d : truth.devices_at(job.level)) universe.insert(d);
    for (const auto& d : pred.devices_at(job.level)) universe.insert(d);

    NetlistEval eval;
    eval.id = job.sp.stem().string();
    eval.level = job.level;
    eval.strict = strict_counts(pred, truth, job.level);
    eval.node = node_counts(pred, truth, job.level, universe);
    evals[i] = eval;

    auto cm = confusion(pred, truth, job.level, universe);
    std::lock_guard<std::mutex> lock(confusion_mutex);
    confusions[job.level] += cm;
  });

  EvalReport report = aggregate(evals);
  report.confusions = std::move(confusions);
  std::string text = format_report(report);
  std::cout << text;
  if (!report_path.empty()) {
    fs::path path(report_path);
    if (path.extension() == ".json")
      write_file_atomic(path, report_to_json(report));
    else
      write_file_atomic(path, text);
  }
  return 0;
}

int cmd_prepare(const std::string& in_dir, const std::string& out_dir,
                const std::string& extra_reserved, unsigned workers) {
  auto entries = load_corpus(in_dir);
  std::set<std::string> reserved = default_reserved_nets();
  for (const auto& n : split_list(extra_reserved)) reserved.insert(n);
  fs::create_directories(out_dir);

  std::mutex manifest_mutex;
  nlohmann::json manifest;
  parallel_for(entries.size(), workers, [&](std::size_t i) {
    const auto& entry = entries[i];
    auto [anon, map] = anonymize(entry.netlist, reserved);
    AnnotationSet truth = canonicalize(entry.truth);
    truth = merge_shared_diode_cms(truth, anon);
    SizeBucket bucket = size_bucket(anon);

    fs::path sp = fs::path(out_dir) / (entry.id + ".sp");
    write_file_atomic(sp, serialize_netlist(anon));
    for (auto level : {HierarchyLevel::HL1, HierarchyLevel::HL2,
                       HierarchyLevel::HL3}) {
      if (truth.level(level).empty()) continue;
      fs::path doc = fs::path(out_dir) / (entry.id + "." + to_string(level));
      write_file_atomic(doc, serialize_annotations(truth, level));
    }
    std::lock_guard<std::mutex> lock(manifest_mutex);
    manifest[entry.id] = {{"bucket", to_string(bucket)},
                          {"transistors", anon.mosfet_count()},
                          {"renamed_nets", map.forward.size()}};
  });
  write_file_atomic(fs::path(out_dir) / "manifest.json",
                    manifest.dump(2) + "\n");
  return 0;
}

int cmd_stats(const std::string& corpus_dir) {
  auto entries = load_corpus(corpus_dir);
  std::cout << format_stats(corpus_stats(entries));
  return 0;
}

int cmd_pipeline(const std::string& config_path, const std::string& targets_csv,
                 const std::string& out_dir, std::uint64_t* seed_override,
                 double* timeout_override) {
  PipelineConfig config;
  std::unique_ptr<ChatProvider> provider;
  std::vector<SubcircuitTarget> targets;
  try {
    config = load_pipeline_config(config_path);
    if (seed_override) config.seed = *seed_override;
    if (timeout_override) config.timeout_seconds = *timeout_override;
    provider = make_provider(config.provider);
    for (const auto& id : split_list(targets_csv))
      targets.push_back(find_target(id));
    if (targets.empty()) throw PipelineError("no targets requested");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  }

  PipelineRun run = run_pipeline(*provider, config, targets);
  save_codebase(run.codebase, out_dir);
  write_file_atomic(fs::path(out_dir) / "runlog.jsonl", run.log.to_jsonl());
  std::cout << format_run_summary(run.log, config.retry_limit);

  bool all_empty = std::all_of(
      run.codebase.entries.begin(), run.codebase.entries.end(),
      [](const auto& kv) { return kv.second.kind == EntryKind::empty; });
  bool provider_failed = std::any_of(
      run.codebase.entries.begin(), run.codebase.entries.end(),
      [](const auto& kv) {
        return kv.second.note.rfind("provider error", 0) == 0;
      });
  if (provider_failed && all_empty) return kExitProvider;
  return 0;
}

int cmd_infer(const std::string& codebase_dir, const std::string& netlists_dir,
              const std::string& out_dir, const std::string& interpreter,
              double timeout, unsigned workers) {
  Codebase codebase = load_codebase(codebase_dir);
  ScriptRunner runner(interpreter, timeout);
  auto files = sp_files(netlists_dir);
  if (files.empty()) throw BenchmarkError("no .sp files under " + netlists_dir);
  fs::create_directories(out_dir);

  std::set<HierarchyLevel> covered;
  for (const auto& [id, entry] : codebase.entries)
    if (entry.kind != EntryKind::empty) covered.insert(find_target(id).level);

  std::mutex log_mutex;
  parallel_for(files.size(), workers, [&](std::size_t i) {
    const auto& path = files[i];
    Netlist netlist = parse_netlist(read_file(path));
    IdentifyOutcome outcome = identify_with_codebase(codebase, netlist, runner);
    for (auto level : covered) {
      fs::path doc = fs::path(out_dir) / path.stem();
      doc += "." + to_string(level);
      write_file_atomic(doc, serialize_annotations(outcome.annotations, level));
    }
    if (!outcome.failed_targets.empty()) {
      std::lock_guard<std::mutex> lock(log_mutex);
      for (const auto& t : outcome.failed_targets)
        std::cerr << path.stem().string() << ": execution failure for target "
                  << t << "\n";
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analog subcircuit identification toolkit"};
  app.require_subcommand(1);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  // identify
  auto* identify = app.add_subcommand(
      "identify", "run the structural detectors on netlists");
  std::string id_netlist, id_levels = "hl1,hl2,hl3", id_out;
  std::string ov_supply, ov_ground, ov_inputs, ov_outputs, ov_bias;
  identify->add_option("--netlist", id_netlist, ".sp file or directory")
      ->required();
  identify->add_option("--levels,--level", id_levels, "hl1,hl2,hl3 or all");
  identify->add_option("--out", id_out, "output directory");
  identify->add_option("--supply", ov_supply, "override supply nets");
  identify->add_option("--ground", ov_ground, "override ground nets");
  identify->add_option("--inputs", ov_inputs, "override input nets");
  identify->add_option("--outputs", ov_outputs, "override output nets");
  identify->add_option("--bias", ov_bias, "override bias nets");
  identify->add_option("--workers", workers, "worker pool size");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "score prediction documents against ground truth");
  std::string ev_pred, ev_truth, ev_level = "all", ev_report;
  evaluate->add_option("--pred", ev_pred, "prediction directory")->required();
  evaluate->add_option("--truth", ev_truth, "ground-truth corpus directory")
      ->required();
  evaluate->add_option("--level,--levels", ev_level, "hl1|hl2|hl3|all");
  evaluate->add_option("--report", ev_report,
                       "report path (.json for JSON, else text)");
  evaluate->add_option("--workers", workers, "worker pool size");

  // prepare
  auto* prepare = app.add_subcommand(
      "prepare", "anonymize and normalize a labeled corpus");
  std::string pr_in, pr_out, pr_reserved;
  prepare->add_option("--in", pr_in, "input corpus directory")->required();
  prepare->add_option("--out", pr_out, "output directory")->required();
  prepare->add_option("--reserved-nets", pr_reserved,
                      "extra reserved net names (comma separated)");
  prepare->add_option("--workers", workers, "worker pool size");

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics table");
  std::string st_corpus;
  stats->add_option("--corpus", st_corpus, "corpus directory")->required();

  // pipeline
  auto* pipeline = app.add_subcommand(
      "pipeline", "run instruction and code generation for targets");
  std::string pl_config, pl_targets = "hl1,cm,diffpair,inverter,hl3", pl_out;
  std::uint64_t pl_seed = 0;
  double pl_timeout = 0.0;
  bool pl_seed_set = false, pl_timeout_set = false;
  pipeline->add_option("--config", pl_config, "pipeline config JSON")
      ->required();
  pipeline->add_option("--targets", pl_targets, "target ids, comma separated");
  pipeline->add_option("--out", pl_out, "output directory")->required();
  pipeline->add_option("--seed", pl_seed, "demo-selection seed")
      ->each([&](const std::string&) { pl_seed_set = true; });
  pipeline->add_option("--timeout", pl_timeout, "script timeout seconds")
      ->each([&](const std::string&) { pl_timeout_set = true; });

  // infer
  auto* infer = app.add_subcommand(
      "infer", "identify subcircuits with a persisted codebase");
  std::string in_codebase, in_netlists, in_out;
  std::string in_interpreter = "python3 {script}";
  double in_timeout = 30.0;
  infer->add_option("--codebase", in_codebase, "codebase directory")
      ->required();
  infer->add_option("--netlists", in_netlists, "directory of .sp files")
      ->required();
  infer->add_option("--out", in_out, "prediction output directory")
      ->required();
  infer->add_option("--interpreter", in_interpreter, "interpreter template");
  infer->add_option("--timeout", in_timeout, "script timeout seconds");
  infer->add_option("--workers", workers, "worker pool size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (identify->parsed())
      return cmd_identify(
          id_netlist, id_levels,
          overrides_from(ov_supply, ov_ground, ov_inputs, ov_outputs, ov_bias),
          id_out, workers);
    if (evaluate->parsed())
      return cmd_evaluate(ev_pred, ev_truth, ev_level, ev_report, workers);
    if (prepare->parsed())
      return cmd_prepare(pr_in, pr_out, pr_reserved, workers);
    if (stats->parsed()) return cmd_stats(st_corpus);
    if (pipeline->parsed())
      return cmd_pipeline(pl_config, pl_targets, pl_out,
                          pl_seed_set ? &pl_seed : nullptr,
                          pl_timeout_set ? &pl_timeout : nullptr);
    if (infer->parsed())
      return cmd_infer(in_codebase, in_netlists, in_out, in_interpreter,
                       in_timeout, workers);
  } catch (const MalformedLineError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NetlistError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
