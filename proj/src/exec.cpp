// SPDX-License-Identifier: Apache-2.0

#include "subckt/exec.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace subckt {

namespace fs = std::filesystem;

std::string to_string(ExecStatus status) {
  switch (status) {
    case ExecStatus::pass: return "pass";
    case ExecStatus::assertion_failure: return "assertion_failure";
    case ExecStatus::syntax_error: return "syntax_error";
    case ExecStatus::runtime_error: return "runtime_error";
    case ExecStatus::timeout: return "timeout";
  }
  return "?";
}

namespace {

struct ProcessResult {
  bool timed_out = false;
  bool exec_failed = false;
  int exit_code = -1;
  std::string out;
  std::string err;
};

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& stdin_text, double timeout_s,
                          const fs::path& workdir) {
  int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe) || pipe(exec_pipe))
    throw SandboxError("pipe() failed");
  fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

  pid_t pid = fork();
  if (pid < 0) throw SandboxError("fork() failed");

  if (pid == 0) {
    setpgid(0, 0);
    if (chdir(workdir.c_str()) != 0) _exit(125);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1], exec_pipe[0]})
      close(fd);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    int saved = errno;
    (void)!write(exec_pipe[1], &saved, sizeof(saved));
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  // Small inputs fit the pipe buffer; ignore EPIPE from early exits.
  signal(SIGPIPE, SIG_IGN);
  std::size_t written = 0;
  while (written < stdin_text.size()) {
    ssize_t n = write(in_pipe[1], stdin_text.data() + written,
                      stdin_text.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  ProcessResult result;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout_s);
  bool out_open = true, err_open = true;
  char buffer[4096];
  while (out_open || err_open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                         deadline - std::chrono::steady_clock::now())
                         .count();
    if (remaining <= 0) {
      result.timed_out = true;
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      break;
    }
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    fds[0].fd = out_open ? out_pipe[0] : -1;
    fds[1].fd = err_open ? err_pipe[0] : -1;
    int rc = poll(fds, 2, static_cast<int>(std::min<long long>(remaining, 200)));
    if (rc < 0 && errno != EINTR) break;
    if (fds[0].revents & (POLLIN | POLLHUP)) {
      ssize_t n = read(out_pipe[0], buffer, sizeof(buffer));
      if (n > 0)
        result.out.append(buffer, static_cast<std::size_t>(n));
      else
        out_open = false;
    }
    if (fds[1].revents & (POLLIN | POLLHUP)) {
      ssize_t n = read(err_pipe[0], buffer, sizeof(buffer));
      if (n > 0)
        result.err.append(buffer, static_cast<std::size_t>(n));
      else
        err_open = false;
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof(exec_errno)) ==
      sizeof(exec_errno))
    result.exec_failed = true;
  close(exec_pipe[0]);
  return result;
}

std::vector<std::string> command_argv(const std::string& tmpl,
                                      const std::string& script_name) {
  std::vector<std::string> argv;
  std::istringstream stream(tmpl);
  std::string tok;
  bool substituted = false;
  while (stream >> tok) {
    auto pos = tok.find("{script}");
    if (pos != std::string::npos) {
      tok.replace(pos, 8, script_name);
      substituted = true;
    }
    argv.push_back(tok);
  }
  if (argv.empty()) throw SandboxError("empty interpreter command");
  if (!substituted) argv.push_back(script_name);
  return argv;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "subckt-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr)
      throw SandboxError("mkdtemp() failed");
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// --- tolerant literal scanning -------------------------------------------
//
// Identifier scripts print expected/actual rows as Python list literals;
// the inference driver prints JSON inside <result> tags. Both reduce to
// nested lists of strings.

struct LiteralParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit LiteralParser(const std::string& t, std::size_t start)
      : text(t), pos(start) {}

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool parse_string(std::string& out) {
    if (pos >= text.size() || (text[pos] != '\'' && text[pos] != '"'))
      return false;
    char quote = text[pos++];
    out.clear();
    while (pos < text.size() && text[pos] != quote) {
      if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
      out += text[pos++];
    }
    if (pos >= text.size()) return false;
    ++pos;
    return true;
  }

  // value := string | sequence; sequences may be lists or tuples.
  bool parse_value(std::string* str_out,
                   std::vector<std::string>* seq_of_str,
                   ResultRows* rows_out);

  bool parse_row(std::pair<std::string, std::vector<std::string>>& row) {
    skip_ws();
    if (pos >= text.size() || (text[pos] != '[' && text[pos] != '('))
      return false;
    char open = text[pos++];
    char close = open == '[' ? ']' : ')';
    skip_ws();
    if (!parse_string(row.first)) return false;
    skip_ws();
    if (pos >= text.size() || text[pos] != ',') return false;
    ++pos;
    skip_ws();
    if (!parse_string_list(row.second)) return false;
    skip_ws();
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      skip_ws();
    }
    if (pos >= text.size() || text[pos] != close) return false;
    ++pos;
    return true;
  }

  bool parse_string_list(std::vector<std::string>& out) {
    skip_ws();
    if (pos >= text.size() || (text[pos] != '[' && text[pos] != '('))
      return false;
    char close = text[pos] == '[' ? ']' : ')';
    ++pos;
    out.clear();
    skip_ws();
    if (pos < text.size() && text[pos] == close) {
      ++pos;
      return true;
    }
    while (true) {
      std::string item;
      skip_ws();
      if (!parse_string(item)) return false;
      out.push_back(item);
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        skip_ws();
        if (pos < text.size() && text[pos] == close) {
          ++pos;
          return true;
        }
        continue;
      }
      if (pos < text.size() && text[pos] == close) {
        ++pos;
        return true;
      }
      return false;
    }
  }

  bool parse_rows(ResultRows& rows) {
    skip_ws();
    if (pos >= text.size() || text[pos] != '[') return false;
    ++pos;
    rows.clear();
    skip_ws();
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      return true;
    }
    while (true) {
      std::pair<std::string, std::vector<std::string>> row;
      if (!parse_row(row)) return false;
      rows.push_back(std::move(row));
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
          ++pos;
          return true;
        }
        continue;
      }
      if (pos < text.size() && text[pos] == ']') {
        ++pos;
        return true;
      }
      return false;
    }
  }
};

}  // namespace

std::optional<ResultRows> scan_result_rows(const std::string& text) {
  // Prefer the driver's tagged payload.
  auto open = text.rfind("<result>");
  if (open != std::string::npos) {
    auto close = text.find("</result>", open);
    if (close != std::string::npos) {
      LiteralParser parser(text, open + 8);
      ResultRows rows;
      if (parser.parse_rows(rows)) return rows;
    }
  }
  // Otherwise the last parseable list literal wins (scripts print the
  // expected rows before the actual ones).
  std::optional<ResultRows> found;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '[') continue;
    LiteralParser parser(text, i);
    ResultRows rows;
    if (parser.parse_rows(rows) && !rows.empty()) found = rows;
  }
  return found;
}

ScriptRunner::ScriptRunner(std::string interpreter, double timeout_seconds,
                           std::string driver)
    : interpreter_(std::move(interpreter)),
      driver_(std::move(driver)),
      timeout_seconds_(timeout_seconds) {}

std::string ScriptRunner::default_driver() {
  return R"(import json
import runpy
import sys

ns = runpy.run_path("{script}", run_name="__identify__")
rows = []
for item in ns["findSubCircuit"](sys.stdin.read()) or []:
    label, comps = item[0], item[1]
    rows.append([str(label), [str(c) for c in comps]])
print("<result>" + json.dumps(rows) + "</result>")
)";
}

ExecutionResult ScriptRunner::run(const std::string& source,
                                  const std::optional<std::string>& driver,
                                  const std::string& stdin_text) const {
  TempDir sandbox;
  const std::string script_name = "script.py";
  {
    std::ofstream out(sandbox.path / script_name, std::ios::binary);
    out << source;
  }
  std::string entry = script_name;
  if (driver) {
    entry = "driver.py";
    std::string body = *driver;
    std::size_t pos;
    while ((pos = body.find("{script}")) != std::string::npos)
      body.replace(pos, 8, script_name);
    std::ofstream out(sandbox.path / entry, std::ios::binary);
    out << body;
  }

  auto argv = command_argv(interpreter_, entry);
  auto proc = run_process(argv, stdin_text, timeout_seconds_, sandbox.path);
  if (proc.exec_failed)
    throw SandboxError("interpreter unavailable: " + argv[0]);

  ExecutionResult result;
  std::string tail = proc.out;
  if (tail.size() > 4000) tail = tail.substr(tail.size() - 4000);
  result.message = tail + proc.err;
  result.parsed_output = scan_result_rows(proc.out);

  if (proc.timed_out)
    result.status = ExecStatus::timeout;
  else if (proc.exit_code == 0)
    result.status = ExecStatus::pass;
  else if (proc.err.find("SyntaxError") != std::string::npos ||
           proc.err.find("IndentationError") != std::string::npos ||
           proc.err.find("TabError") != std::string::npos)
    result.status = ExecStatus::syntax_error;
  else if (proc.err.find("AssertionError") != std::string::npos)
    result.status = ExecStatus::assertion_failure;
  else
    result.status = ExecStatus::runtime_error;
  return result;
}

ExecutionResult ScriptRunner::validate(const std::string& source,
                                       const std::string& stdin_text) const {
  return run(source, std::nullopt, stdin_text);
}

ExecutionResult ScriptRunner::infer(const std::string& source,
                                    const std::string& netlist_text) const {
  return run(source, driver_, netlist_text);
}

}  // namespace subckt
