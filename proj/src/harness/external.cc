// Copyright 2026 The zfolio Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/time.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "zf/harness.h"

namespace zf {

namespace {

using Kind = HarnessError::Kind;

std::string expand_command(const std::string& command, const std::string& instance_path) {
  static const std::string kPlaceholder = "{instance}";
  std::string quoted = "'";
  for (char c : instance_path) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  quoted += "'";
  std::string out = command;
  size_t pos = out.find(kPlaceholder);
  if (pos == std::string::npos) return out + " " + quoted;
  while (pos != std::string::npos) {
    out.replace(pos, kPlaceholder.size(), quoted);
    pos = out.find(kPlaceholder, pos + quoted.size());
  }
  return out;
}

double seconds(const timeval& tv) { return static_cast<double>(tv.tv_sec) + 1e-6 * static_cast<double>(tv.tv_usec); }

// Last answer line ("s SATISFIABLE" / "s UNSATISFIABLE") in the output.
std::optional<RunStatus> answer_from_output(const std::string& output) {
  std::optional<RunStatus> answer;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "s SATISFIABLE") answer = RunStatus::kSat;
    if (line == "s UNSATISFIABLE") answer = RunStatus::kUnsat;
  }
  return answer;
}

}  // namespace

std::string to_string(SolverKind kind) { return kind == SolverKind::kLocalSearch ? "local_search" : "complete"; }

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "complete") return SolverKind::kComplete;
  if (name == "local_search" || name == "local") return SolverKind::kLocalSearch;
  throw HarnessError(Kind::kConfig, "unknown solver kind '" + name + "'");
}

std::vector<SolverDescriptor> read_solvers_config(std::istream& in) {
  std::vector<SolverDescriptor> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    SolverDescriptor d;
    std::string kind;
    fields >> d.id >> kind;
    std::getline(fields, d.command);
    size_t start = d.command.find_first_not_of(" \t");
    d.command = start == std::string::npos ? "" : d.command.substr(start);
    while (!d.command.empty() && (d.command.back() == '\r' || d.command.back() == ' ')) d.command.pop_back();
    if (d.id.empty() || kind.empty() || d.command.empty()) {
      throw HarnessError(Kind::kConfig, "solvers config line " + std::to_string(line_no) + ": expected id kind command");
    }
    d.kind = solver_kind_from_string(kind);
    for (const auto& other : out) {
      if (other.id == d.id) throw HarnessError(Kind::kConfig, "duplicate solver id " + d.id);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SolverDescriptor> read_solvers_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError(Kind::kConfig, "cannot open " + path);
  return read_solvers_config(in);
}

RunRecord run_external(const SolverDescriptor& solver, const std::string& instance_path, const std::string& instance_id,
                       double cutoff_seconds) {
  if (!(cutoff_seconds > 0.0)) throw HarnessError(Kind::kInvalidArgument, "cutoff must be positive");
  struct stat st {};
  if (::stat(instance_path.c_str(), &st) != 0) {
    throw HarnessError(Kind::kSpawnFailure, "instance file not found: " + instance_path);
  }
  const std::string command = "exec " + expand_command(solver.command, instance_path);

  int out_pipe[2];
  int err_pipe[2];  // reports exec failure of the shell itself
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw HarnessError(Kind::kSpawnFailure, "pipe: " + std::string(strerror(errno)));
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    throw HarnessError(Kind::kSpawnFailure, "pipe: " + std::string(strerror(errno)));
  }
  const auto cpu_limit = static_cast<rlim_t>(std::ceil(cutoff_seconds));
  const auto wall_start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    throw HarnessError(Kind::kSpawnFailure, "fork: " + std::string(strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    rlimit limit{cpu_limit, cpu_limit + 1};
    ::setrlimit(RLIMIT_CPU, &limit);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_RDWR);
    if (devnull >= 0) {
      ::dup2(devnull, STDIN_FILENO);
      ::dup2(devnull, STDERR_FILENO);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    int code = errno;
    (void)!::write(err_pipe[1], &code, sizeof(code));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  int exec_errno = 0;
  bool exec_failed = ::read(err_pipe[0], &exec_errno, sizeof(exec_errno)) == static_cast<ssize_t>(sizeof(exec_errno));
  ::close(err_pipe[0]);

  std::string output;
  bool wall_killed = false;
  const double wall_limit = 2.0 * cutoff_seconds + 1.0;
  char buffer[4096];
  for (;;) {
    double waited = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (waited > wall_limit) {
      ::kill(-pid, SIGKILL);
      wall_killed = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int ready = ::poll(&pfd, 1, 50);
    if (ready < 0 && errno != EINTR) break;
    if (ready > 0) {
      ssize_t got = ::read(out_pipe[0], buffer, sizeof(buffer));
      if (got <= 0) break;  // EOF: every writer closed
      if (output.size() < (1u << 20)) output.append(buffer, static_cast<size_t>(got));
    }
  }
  ::close(out_pipe[0]);

  int status = 0;
  rusage usage{};
  while (::wait4(pid, &status, 0, &usage) < 0 && errno == EINTR) {
  }
  // Reap anything left in the process group.
  ::kill(-pid, SIGKILL);

  if (exec_failed) {
    throw HarnessError(Kind::kSpawnFailure, "cannot start /bin/sh: " + std::string(strerror(exec_errno)));
  }
  const double cpu = seconds(usage.ru_utime) + seconds(usage.ru_stime);
  if (WIFEXITED(status) && (WEXITSTATUS(status) == 126 || WEXITSTATUS(status) == 127) && cpu < cutoff_seconds &&
      !answer_from_output(output)) {
    throw HarnessError(Kind::kSpawnFailure, "command could not be executed: " + solver.command);
  }

  const bool cpu_exceeded = cpu >= cutoff_seconds;
  const bool limit_signal =
      WIFSIGNALED(status) && (WTERMSIG(status) == SIGXCPU || (WTERMSIG(status) == SIGKILL && cpu >= cpu_limit));
  if (wall_killed || cpu_exceeded || limit_signal) {
    return make_record(solver.id, instance_id, cutoff_seconds, RunStatus::kTimeout, cutoff_seconds);
  }
  RunStatus result = RunStatus::kCrash;
  if (WIFEXITED(status)) {
    if (WEXITSTATUS(status) == 10) {
      result = RunStatus::kSat;
    } else if (WEXITSTATUS(status) == 20) {
      result = RunStatus::kUnsat;
    } else if (auto answer = answer_from_output(output)) {
      result = *answer;
    }
  }
  return make_record(solver.id, instance_id, cpu, result, cutoff_seconds);
}

}  // namespace zf
