#include "agentrt/exec/sandbox.hpp"

#include <fcntl.h>
#include <linux/audit.h>
#include <linux/filter.h>
#include <linux/seccomp.h>
#include <poll.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/socket.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstddef>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "agentrt/datamodel/table.hpp"

namespace agentrt::exec {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

void SandboxLimits::validate() const {
  if (wall_clock.count() <= 0) throw Error(ErrorCategory::InvalidArgument, "wall_clock must be positive");
  if (memory == 0) throw Error(ErrorCategory::InvalidArgument, "memory must be positive");
  if (output_cap == 0) throw Error(ErrorCategory::InvalidArgument, "output_cap must be positive");
}

std::string describe(const ExitStatus& s) {
  switch (s.kind) {
    case ExitKind::Ok: return "ok";
    case ExitKind::NonZero: return "exit code " + std::to_string(s.code);
    case ExitKind::Killed: return "killed: " + std::string(to_string(s.limit));
  }
  return "?";
}

namespace {

#if defined(__x86_64__)
#define AGENTRT_AUDIT_ARCH AUDIT_ARCH_X86_64
#elif defined(__aarch64__)
#define AGENTRT_AUDIT_ARCH AUDIT_ARCH_AARCH64
#endif

// socket(AF_INET|AF_INET6, ...) fails with EACCES; everything else passes.
// Unix sockets stay usable so the interpreter's own machinery keeps working.
bool deny_inet_sockets() {
#ifndef AGENTRT_AUDIT_ARCH
  return false;
#else
  sock_filter filter[] = {
      BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, arch)),
      BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, AGENTRT_AUDIT_ARCH, 1, 0),
      BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_KILL_PROCESS),
      BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, nr)),
      BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, __NR_socket, 0, 4),
      BPF_STMT(BPF_LD | BPF_W | BPF_ABS, offsetof(seccomp_data, args[0])),
      BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, AF_INET, 1, 0),
      BPF_JUMP(BPF_JMP | BPF_JEQ | BPF_K, AF_INET6, 0, 1),
      BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ERRNO | (EACCES & SECCOMP_RET_DATA)),
      BPF_STMT(BPF_RET | BPF_K, SECCOMP_RET_ALLOW),
  };
  sock_fprog prog{static_cast<unsigned short>(sizeof(filter) / sizeof(filter[0])), filter};
  if (prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) return false;
  return syscall(SYS_seccomp, SECCOMP_SET_MODE_FILTER, 0, &prog) == 0;
#endif
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe2(fd, O_CLOEXEC) != 0) throw Error(ErrorCategory::Internal, std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fd[0] >= 0) ::close(fd[0]);
    fd[0] = -1;
  }
  void close_write() {
    if (fd[1] >= 0) ::close(fd[1]);
    fd[1] = -1;
  }
};

// Removes the workspace on every exit path.
struct ScopedDir {
  fs::path path;
  ~ScopedDir() {
    std::error_code ec;
    if (!path.empty()) {
      // Inputs are made read-only; restore write permission so they can go.
      for (auto it = fs::recursive_directory_iterator(path, ec); !ec && it != fs::recursive_directory_iterator();
           it.increment(ec))
        fs::permissions(it->path(), fs::perms::owner_all, fs::perm_options::add, ec);
      fs::remove_all(path, ec);
    }
  }
};

fs::path make_workspace(const fs::path& root) {
  const auto base = root.empty() ? fs::temp_directory_path() : root;
  fs::create_directories(base);
  std::string tmpl = (base / "agentrt-ws-XXXXXX").string();
  if (!mkdtemp(tmpl.data()))
    throw Error(ErrorCategory::Internal, std::string("cannot create workspace: ") + std::strerror(errno));
  return tmpl;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> image_mime(std::string ext) {
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  return std::nullopt;
}

constexpr const char* kScriptName = ".agentrt_main.py";

std::set<std::string> snapshot(const fs::path& ws) {
  std::set<std::string> out;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(ws, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    const auto rel = fs::relative(it->path(), ws).generic_string();
    if (rel == "inputs" || rel.rfind("inputs/", 0) == 0) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && rel != kScriptName) out.insert(rel);
  }
  return out;
}

std::vector<datamodel::Artifact> collect_outputs(const fs::path& ws, const std::set<std::string>& before,
                                                 std::uint64_t inline_cap) {
  std::vector<datamodel::Artifact> out;
  for (const auto& rel : snapshot(ws)) {
    if (before.count(rel)) continue;
    const auto p = ws / rel;
    std::error_code ec;
    const auto size = fs::file_size(p, ec);
    datamodel::BlobRef blob{"sandbox://" + rel, ec ? 0 : size, std::nullopt};
    if (!ec && size <= inline_cap) blob.data = read_file(p);
    const auto ext = p.extension().string();
    if (auto mime = image_mime(ext)) {
      out.push_back(datamodel::Artifact::image(blob, *mime, rel));
      continue;
    }
    if ((ext == ".csv" || ext == ".CSV") && blob.data) {
      try {
        out.push_back(datamodel::Artifact::table(datamodel::parse_csv(*blob.data), rel));
        continue;
      } catch (const Error&) {
        // fall back to a plain file reference
      }
    }
    out.push_back(datamodel::Artifact::file_ref(blob, std::nullopt, rel));
  }
  return out;
}

// Everything the child needs, built before fork so the child only makes
// async-signal-safe calls.
struct ChildPlan {
  std::string ws, interpreter, script = kScriptName;
  std::vector<std::string> env;
  std::vector<char*> envp, argv;
  rlim_t memory = 0, cpu_s = 0;
  bool deny_network = true;

  ChildPlan(const fs::path& dir, const std::string& interp, const SandboxLimits& limits)
      : ws(dir.string()), interpreter(interp) {
    const char* path = getenv("PATH");
    env = {std::string("PATH=") + (path ? path : "/usr/bin:/bin"), "HOME=" + ws, "MPLBACKEND=Agg",
           "PYTHONDONTWRITEBYTECODE=1", "PYTHONIOENCODING=utf-8", "LANG=C.UTF-8"};
    for (auto& e : env) envp.push_back(e.data());
    envp.push_back(nullptr);
    argv = {interpreter.data(), script.data(), nullptr};
    memory = limits.memory;
    cpu_s = static_cast<rlim_t>(limits.wall_clock.count() / 1000 + 2);
    deny_network = limits.network == NetworkPolicy::Denied;
  }
};

[[noreturn]] void child_fail(int status_fd, int code) {
  (void)!::write(status_fd, &code, sizeof code);
  _exit(127);
}

[[noreturn]] void child_exec(ChildPlan& plan, int out_fd, int err_fd, int status_fd) {
  setpgid(0, 0);
  const int devnull = open("/dev/null", O_RDONLY);
  if (devnull < 0 || dup2(devnull, 0) < 0 || dup2(out_fd, 1) < 0 || dup2(err_fd, 2) < 0) child_fail(status_fd, errno);
  if (chdir(plan.ws.c_str()) != 0) child_fail(status_fd, errno);
  const std::pair<int, rlim_t> limits[] = {{RLIMIT_AS, plan.memory}, {RLIMIT_CORE, 0}, {RLIMIT_CPU, plan.cpu_s}};
  for (const auto& [res, v] : limits) {
    rlimit r{v, v};
    if (setrlimit(res, &r) != 0) child_fail(status_fd, errno);
  }
  if (plan.deny_network && !deny_inet_sockets()) child_fail(status_fd, EPERM);
  execvpe(plan.interpreter.c_str(), plan.argv.data(), plan.envp.data());
  child_fail(status_fd, errno);
}

}  // namespace

ExecutionResult run_sandboxed(const std::string& source, const SandboxLimits& limits, const std::vector<InputFile>& inputs,
                              const SandboxOptions& opts, const CancelToken& cancel) {
  limits.validate();
  if (cancel.cancelled()) throw Error(ErrorCategory::Interrupted, "cancelled before execution");

  ScopedDir ws{make_workspace(opts.work_root)};
  fs::create_directory(ws.path / "inputs");
  fs::create_directory(ws.path / "outputs");
  for (const auto& in : inputs) {
    const auto name = fs::path(in.name).filename();
    if (name.empty() || name == "." || name == "..")
      throw Error(ErrorCategory::InvalidArgument, "bad input name " + in.name);
    std::error_code ec;
    fs::copy_file(in.source, ws.path / "inputs" / name, ec);
    if (ec) throw Error(ErrorCategory::NotFound, "cannot stage input " + in.name + ": " + ec.message());
    fs::permissions(ws.path / "inputs" / name, fs::perms::owner_read | fs::perms::group_read | fs::perms::others_read);
  }
  fs::permissions(ws.path / "inputs", fs::perms::owner_read | fs::perms::owner_exec);
  {
    std::ofstream script(ws.path / kScriptName, std::ios::binary);
    script << source;
  }
  const auto before = snapshot(ws.path);

  ChildPlan plan(ws.path, opts.interpreter, limits);
  Pipe out, err, status;
  const auto start = Clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCategory::Internal, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) child_exec(plan, out.fd[1], err.fd[1], status.fd[1]);
  setpgid(pid, pid);  // also done in the child; whichever runs first wins
  out.close_write();
  err.close_write();
  status.close_write();

  ExecutionResult result;
  std::optional<ErrorCategory> killed;
  bool interrupted = false;
  int wstatus = 0;
  bool reaped = false;
  const auto deadline = start + limits.wall_clock;

  auto kill_group = [&] { kill(-pid, SIGKILL); };
  // Appends to `buf` up to the cap; true once the stream overflows it.
  auto drain = [&](int fd, std::string& buf, bool& open) {
    char chunk[8192];
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n <= 0) {
      open = false;
      return false;
    }
    const auto room = limits.output_cap - std::min<std::uint64_t>(buf.size(), limits.output_cap);
    buf.append(chunk, std::min<std::uint64_t>(room, static_cast<std::uint64_t>(n)));
    return static_cast<std::uint64_t>(n) > room;
  };

  bool out_open = true, err_open = true;
  while (true) {
    if (!reaped && waitpid(pid, &wstatus, WNOHANG) == pid) reaped = true;
    if (reaped && !out_open && !err_open) break;
    if (!killed && !interrupted) {
      if (Clock::now() >= deadline) {
        killed = ErrorCategory::TimeLimit;
        kill_group();
      } else if (cancel.cancelled()) {
        interrupted = true;
        kill_group();
      }
    }
    if (reaped) {
      // Leftover descendants may keep the pipes open; they die with the group.
      kill_group();
    }
    pollfd fds[2];
    int nfds = 0;
    if (out_open) fds[nfds++] = {out.fd[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err.fd[0], POLLIN, 0};
    if (nfds == 0) {
      if (!reaped && waitpid(pid, &wstatus, 0) == pid) reaped = true;
      continue;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    const int timeout = static_cast<int>(std::clamp<long long>(left, 1, 20));
    if (poll(fds, nfds, timeout) < 0 && errno != EINTR) break;
    for (int i = 0; i < nfds; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const bool is_out = fds[i].fd == out.fd[0];
      const bool overflow =
          is_out ? drain(out.fd[0], result.stdout_text, out_open) : drain(err.fd[0], result.stderr_text, err_open);
      if (overflow && !killed && !interrupted) {
        killed = ErrorCategory::OutputLimit;
        kill_group();
      }
    }
  }
  kill_group();
  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);

  int exec_errno = 0;
  if (::read(status.fd[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    if (exec_errno == ENOENT || exec_errno == EACCES)
      throw Error(ErrorCategory::InterpreterMissing, "cannot start " + opts.interpreter + ": " + std::strerror(exec_errno));
    throw Error(ErrorCategory::Internal, "sandbox setup failed: " + std::string(std::strerror(exec_errno)));
  }
  if (interrupted) throw Error(ErrorCategory::Interrupted, "execution interrupted");

  if (killed) {
    result.exit = {ExitKind::Killed, 0, *killed};
  } else if (WIFSIGNALED(wstatus)) {
    const int sig = WTERMSIG(wstatus);
    // SIGXCPU is the CPU-time backstop; SIGSEGV/SIGKILL/SIGABRT without our
    // kill come from allocation failures under the address-space limit.
    result.exit = {ExitKind::Killed, 0, sig == SIGXCPU ? ErrorCategory::TimeLimit : ErrorCategory::MemoryLimit};
  } else if (WEXITSTATUS(wstatus) != 0) {
    if (result.stderr_text.find("MemoryError") != std::string::npos)
      result.exit = {ExitKind::Killed, 0, ErrorCategory::MemoryLimit};
    else
      result.exit = {ExitKind::NonZero, WEXITSTATUS(wstatus), ErrorCategory::Internal};
  }
  result.produced_artifacts = collect_outputs(ws.path, before, opts.inline_cap);
  return result;
}

void probe_interpreter(const std::string& interpreter) {
  SandboxLimits limits;
  limits.wall_clock = std::chrono::seconds(10);
  SandboxOptions opts;
  opts.interpreter = interpreter;
  const auto r = run_sandboxed("import sys\nprint(sys.version_info[0])\n", limits, {}, opts);
  if (r.exit.kind != ExitKind::Ok || r.stdout_text.rfind('3', 0) != 0)
    throw Error(ErrorCategory::InterpreterMissing, interpreter + " is not a working Python 3: " + describe(r.exit));
}

}  // namespace agentrt::exec
