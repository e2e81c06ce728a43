// SPDX-License-Identifier: Apache-2.0
//
// Sandboxed execution of generated identifier scripts: isolated child
// process in a private working directory with a wall-clock timeout.
// Script failure is data (an ExecutionResult), never an exception;
// exceptions are reserved for environment problems.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subckt {

enum class ExecStatus { pass, assertion_failure, syntax_error, runtime_error, timeout };

std::string to_string(ExecStatus status);

/// Raw (label, components) rows as printed by identifier scripts.
using ResultRows = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct ExecutionResult {
  ExecStatus status = ExecStatus::runtime_error;
  std::string message;  ///< captured diagnostics (stdout tail + stderr)
  std::optional<ResultRows> parsed_output;
};

struct SandboxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Last parseable (label, components) list literal in `text`, if any.
/// Understands the <result>…</result> wrapper emitted by the inference
/// driver as well as bare Python/JSON list literals in debug prints.
std::optional<ResultRows> scan_result_rows(const std::string& text);

class ScriptRunner {
 public:
  /// `interpreter` is a command template with a {script} placeholder,
  /// e.g. "python3 {script}". `driver` wraps a script for inference; the
  /// default driver is Python-specific (runpy import, netlist on stdin,
  /// JSON result on stdout).
  ScriptRunner(std::string interpreter, double timeout_seconds,
               std::string driver = default_driver());

  static std::string default_driver();

  /// Run the script as-is (its embedded test cases included), classifying
  /// the outcome; `stdin_text` is offered on the input channel.
  ExecutionResult validate(const std::string& source,
                           const std::string& stdin_text = "") const;

  /// Run the script's findSubCircuit entry on `netlist_text` through the
  /// driver and parse the printed rows.
  ExecutionResult infer(const std::string& source,
                        const std::string& netlist_text) const;

 private:
  ExecutionResult run(const std::string& source,
                      const std::optional<std::string>& driver,
                      const std::string& stdin_text) const;

  std::string interpreter_;
  std::string driver_;
  double timeout_seconds_;
};

}  // namespace subckt
