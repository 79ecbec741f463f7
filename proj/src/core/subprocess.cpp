// Copyright 2026 The nifuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/ipc.h>
#include <sys/shm.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <vector>

#include "core/errors.hpp"

extern char** environ;

namespace nifuzz {
namespace {

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_, O_CLOEXEC) != 0) {
      throw TargetError(std::string("pipe2 failed: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_fd() const { return fds_[0]; }
  int write_fd() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  int fds_[2] = {-1, -1};
};

// Reads what is available; returns false once the stream hit EOF.
bool drain(int fd, Bytes& sink, std::size_t cap, bool& truncated) {
  std::uint8_t buf[65536];
  const ssize_t n = ::read(fd, buf, sizeof(buf));
  if (n <= 0) return n < 0 && (errno == EINTR || errno == EAGAIN);
  const std::size_t room = cap - std::min(cap, sink.size());
  const std::size_t take = std::min(room, static_cast<std::size_t>(n));
  if (take < static_cast<std::size_t>(n)) truncated = true;
  sink.insert(sink.end(), buf, buf + take);
  return true;
}

}  // namespace

SubprocessBackend::SubprocessBackend(std::string path, std::chrono::milliseconds timeout,
                                     std::size_t map_size, std::size_t output_cap)
    : path_(std::move(path)), timeout_(timeout), map_size_(map_size), output_cap_(output_cap) {
  struct stat st {};
  if (::stat(path_.c_str(), &st) != 0 || !S_ISREG(st.st_mode) ||
      ::access(path_.c_str(), X_OK) != 0) {
    throw ConfigError("target '" + path_ + "' is not an executable file");
  }
  if (map_size_ == 0) throw ConfigError("map size must be positive");

  shm_id_ = ::shmget(IPC_PRIVATE, map_size_, IPC_CREAT | IPC_EXCL | 0600);
  if (shm_id_ < 0) throw TargetError(std::string("shmget failed: ") + std::strerror(errno));
  void* addr = ::shmat(shm_id_, nullptr, 0);
  if (addr == reinterpret_cast<void*>(-1)) {
    ::shmctl(shm_id_, IPC_RMID, nullptr);
    throw TargetError(std::string("shmat failed: ") + std::strerror(errno));
  }
  shm_ = static_cast<std::uint8_t*>(addr);

  std::string templ = (std::filesystem::temp_directory_path() / "nifuzz-XXXXXX").string();
  if (::mkdtemp(templ.data()) == nullptr) {
    ::shmdt(shm_);
    ::shmctl(shm_id_, IPC_RMID, nullptr);
    throw TargetError("cannot create work directory");
  }
  work_dir_ = templ;
  input_path_ = work_dir_ + "/cur_input";
}

SubprocessBackend::~SubprocessBackend() {
  if (shm_ != nullptr) ::shmdt(shm_);
  if (shm_id_ >= 0) ::shmctl(shm_id_, IPC_RMID, nullptr);
  std::error_code ec;
  std::filesystem::remove_all(work_dir_, ec);
}

ExecutionResult SubprocessBackend::do_run(const StructuredInput& input) {
  write_input_file(input_path_, input);
  std::memset(shm_, 0, map_size_);

  std::vector<std::string> env_storage;
  for (char** e = environ; *e != nullptr; ++e) {
    if (std::strncmp(*e, "NIFUZZ_SHM_ID=", 14) == 0 ||
        std::strncmp(*e, "NIFUZZ_MAP_SIZE=", 16) == 0) {
      continue;
    }
    env_storage.emplace_back(*e);
  }
  env_storage.push_back(std::string(kShmEnvVar) + "=" + std::to_string(shm_id_));
  env_storage.push_back(std::string(kMapSizeEnvVar) + "=" + std::to_string(map_size_));
  std::vector<char*> envp;
  for (auto& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<char*> argv = {path_.data(), input_path_.data(), nullptr};

  Pipe out_pipe;
  Pipe err_pipe;
  Pipe exec_status;

  const pid_t pid = ::fork();
  if (pid < 0) throw TargetError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(out_pipe.write_fd(), STDOUT_FILENO);
    ::dup2(err_pipe.write_fd(), STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::execve(path_.c_str(), argv.data(), envp.data());
    const int err = errno;
    [[maybe_unused]] auto w = ::write(exec_status.write_fd(), &err, sizeof(err));
    ::_exit(127);
  }
  out_pipe.close_write();
  err_pipe.close_write();
  exec_status.close_write();

  int exec_errno = 0;
  if (::read(exec_status.read_fd(), &exec_errno, sizeof(exec_errno)) ==
      static_cast<ssize_t>(sizeof(exec_errno))) {
    ::waitpid(pid, nullptr, 0);
    throw TargetError("cannot execute '" + path_ + "': " + std::strerror(exec_errno));
  }

  ExecutionResult result{OutputData{}, CoverageMap(map_size_), ExitKind::kNormal, false};
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  bool out_open = true;
  bool err_open = true;
  bool timed_out = false;
  while (out_open || err_open) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd fds[2] = {{out_open ? out_pipe.read_fd() : -1, POLLIN, 0},
                     {err_open ? err_pipe.read_fd() : -1, POLLIN, 0}};
    const int rc = ::poll(fds, 2, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc == 0) continue;
    if (out_open && (fds[0].revents & (POLLIN | POLLHUP | POLLERR))) {
      out_open = drain(out_pipe.read_fd(), result.output.stdout_bytes, output_cap_,
                       result.output_truncated);
    }
    if (err_open && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
      err_open = drain(err_pipe.read_fd(), result.output.stderr_bytes, output_cap_,
                       result.output_truncated);
    }
  }

  int status = 0;
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    result.exit_kind = ExitKind::kTimeout;
  } else {
    // Streams closed; the process may still be running if it closed them.
    while (true) {
      const pid_t w = ::waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        result.exit_kind = ExitKind::kTimeout;
        break;
      }
      ::usleep(100);
    }
    if (result.exit_kind != ExitKind::kTimeout && WIFSIGNALED(status)) {
      result.exit_kind = ExitKind::kCrash;
    }
  }

  result.coverage = CoverageMap::from_dense({shm_, map_size_});
  return result;
}

}  // namespace nifuzz
