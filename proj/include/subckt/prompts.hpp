// SPDX-License-Identifier: Apache-2.0
//
// Prompt templates for the two-phase identification flow plus the bundled
// single-phase baseline templates. Placeholders are written {name}; the
// recognized names are: subcircuit, netlist, ground_truth, instruction_1,
// instruction_2, instruction_final, error_message, test_cases.

#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace subckt {

struct PromptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingBindingError : PromptError {
  explicit MissingBindingError(const std::string& name)
      : PromptError("no binding for placeholder '" + name + "'") {}
};

struct PromptTemplate {
  std::string id;
  std::string body;

  /// Placeholder names appearing in the body.
  std::set<std::string> placeholders() const;
};

/// Built-in templates: instruction_gen, instruction_merge, code_gen,
/// code_repair, plus baseline templates instruction_following,
/// direct_prompt, direct_codegen (bundled for rendering only).
const PromptTemplate& prompt_template(const std::string& id);

/// Substitute every placeholder verbatim; single pass, so binding values
/// are never re-scanned. Throws MissingBindingError when the body names a
/// placeholder without a binding.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& bindings);

}  // namespace subckt
