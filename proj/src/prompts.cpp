// SPDX-License-Identifier: Apache-2.0

#include "subckt/prompts.hpp"

#include <cctype>
#include <vector>

namespace subckt {

namespace {

const char* kInstructionGen = R"(You are an experienced analog designer. You are developing an instruction on how to identify {subcircuit} in flat SPICE netlists.
The instruction should be in a step-by-step format and will be used by other LLMs to find {subcircuit} in new, unseen SPICE netlists.

A labeled example is provided, consisting of a flat SPICE netlist and the corresponding ground truth:

SPICE netlist:

{netlist}

Ground Truth:

{ground_truth}

Your task is to:

- Analyze the example to extract reusable, step-by-step instructions that can be used to identify the same {subcircuit} in new, unseen SPICE netlists.

- Use a clear, step-by-step format in Markdown, and wrap the generated instruction between `<instruction>` and `</instruction>` tags. The instruction should be general and applicable to new, unseen SPICE netlists.

- Do not include any explanation, description, or comments related to the demonstration example.
)";

const char* kInstructionMerge = R"(You are an experienced analog designer. You are developing an instruction on how to identify {subcircuit} in flat SPICE netlists.
The instruction should be in a step-by-step format and will be used by other LLMs to identify {subcircuit} in new, unseen SPICE netlists.

You are given two step-by-step instructions derived from previous, different examples:

**Instruction 1**:

{instruction_1}

**Instruction 2**:

{instruction_2}

Your task is to:

- Analyze and combine these two instructions into a reusable, step-by-step instruction that can be used to identify the same {subcircuit} in new, unseen SPICE netlists.

- Do not include any duplicated information in the new instruction (e.g., duplicate steps).

- Use a clear, step-by-step format in Markdown, and wrap the generated instruction between `<instruction>` and `</instruction>` tags. The instruction should be general and easy for other large language models to follow when applied to new, unseen SPICE netlists.

- Do not include any explanation, description, or comments related to the demonstration examples.
)";

const char* kCodeGen = R"(You are an experienced Python programmer working on identifying {subcircuit} in a SPICE netlist.
You are given step-by-step instructions on how to identify {subcircuit} in a SPICE netlist.

Your task is to:

- Translate the given instructions for identifying {subcircuit} into a Python script.

- The generated Python script should extract a list of all available {subcircuit} from a new, unseen SPICE netlist.

- The generated Python script should follow the function template below:

``` python

def findSubCircuit(netlist: str):

    """
    Find all {subcircuit} subcircuits.

    Args:
        netlist (str): A flat SPICE netlist as a string, where each line defines a component and its connections in the circuit.

    Returns:
        List of tuples containing identified {subcircuit} and the corresponding transistors.
    """

    # add your code here

```

- For each given test case, write an assertion to ensure the returned output matches the expected output.

- In addition to the assertion, print the expected output, actual output, and any relevant information to assist in debugging if the result is not as expected.

Provided Identification Instructions:

{instruction_final}

{test_cases}

Let's think step by step.
)";

const char* kCodeRepair = R"(When I executed the provided Python code, I got the following error message:

**Error Message**

```
{error_message}
```

Your task is to revise the previously generated Python code and fix any bugs or incorrect logic so that the returned output matches the expected output.

In addition, add relevant assertions with detailed debugging information to assist future revisions and avoid repeating the same error.

Let's think step by step.
)";

const char* kInstructionFollowing = R"(You are an experienced analog circuit designer. Given a SPICE netlist, your task is to identify and extract all available {subcircuit}.
When answering the question, use the provided instructions to improve the identification accuracy. Provide your answer in JSON format.
The output should be a list of dictionaries. Each dictionary must have two keys:

- 'sub_circuit_name': the type of the identified subcircuit

- 'components': a list of component names that belong to this subcircuit.

Wrap your response between `<json>` and `</json>` tags. Do not include any explanation, description, or comments.

Provided Identification Instructions:

{instruction_final}

Input SPICE netlist:

{netlist}

Let's think step by step.
)";

const char* kDirectPrompt = R"(You are an experienced analog circuit designer. Given a SPICE netlist, your task is to identify and extract all available {subcircuit}.
Provide your answer in JSON format.
The output should be a list of dictionaries. Each dictionary must have two keys:

- 'sub_circuit_name': the type of the identified subcircuit

- 'components': a list of component names that belong to this subcircuit.

Wrap your response between `<json>` and `</json>` tags. Do not include any explanation, description, or comments.

Input SPICE netlist:

{netlist}

Let's think step by step.
)";

const char* kDirectCodegen = R"(You are an experienced Python programmer working on identifying {subcircuit} in a SPICE netlist.

Your task is to:

- Write a Python script for identifying {subcircuit}.

- The generated Python script should extract a list of all available {subcircuit} from a new, unseen SPICE netlist.

- The generated Python script should follow the function template below:

``` python

def findSubCircuit(netlist: str):

    """
    Find all {subcircuit} subcircuits.

    Args:
        netlist (str): A flat SPICE netlist as a string, where each line defines a component and its connections in the circuit.

    Returns:
        List of tuples containing identified subcircuit names and the corresponding transistors.
    """

    # add your code here

```

- For each given test case, write an assertion to ensure the returned output matches the expected output.

- In addition to the assertion, print the expected output, actual output, and any relevant information to assist in debugging if the result is not as expected.

- Always raise an assertion error if the output does not match the expected output.

{test_cases}

Let's think step by step.
)";

bool placeholder_at(const std::string& body, std::size_t open,
                    std::string& name, std::size_t& close) {
  close = body.find('}', open + 1);
  if (close == std::string::npos) return false;
  name = body.substr(open + 1, close - open - 1);
  if (name.empty()) return false;
  for (char c : name)
    if (!std::islower(static_cast<unsigned char>(c)) && c != '_' &&
        !std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

}  // namespace

std::set<std::string> PromptTemplate::placeholders() const {
  std::set<std::string> names;
  std::size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    std::string name;
    std::size_t close;
    if (placeholder_at(body, pos, name, close)) {
      names.insert(name);
      pos = close + 1;
    } else {
      ++pos;
    }
  }
  return names;
}

const PromptTemplate& prompt_template(const std::string& id) {
  static const std::vector<PromptTemplate> templates = {
      {"instruction_gen", kInstructionGen},
      {"instruction_merge", kInstructionMerge},
      {"code_gen", kCodeGen},
      {"code_repair", kCodeRepair},
      {"instruction_following", kInstructionFollowing},
      {"direct_prompt", kDirectPrompt},
      {"direct_codegen", kDirectCodegen},
  };
  for (const auto& t : templates)
    if (t.id == id) return t;
  throw PromptError("unknown prompt template '" + id + "'");
}

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(tmpl.body.size());
  std::size_t pos = 0;
  while (pos < tmpl.body.size()) {
    std::size_t open = tmpl.body.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl.body, pos, std::string::npos);
      break;
    }
    out.append(tmpl.body, pos, open - pos);
    std::string name;
    std::size_t close;
    if (placeholder_at(tmpl.body, open, name, close)) {
      auto it = bindings.find(name);
      if (it == bindings.end()) throw MissingBindingError(name);
      out += it->second;
      pos = close + 1;
    } else {
      out += '{';
      pos = open + 1;
    }
  }
  return out;
}

}  // namespace subckt
