#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "recourse/csv.hpp"
#include "recourse/errors.hpp"
#include "recourse/predictor.hpp"

extern char** environ;

namespace recourse {

namespace {

struct Pipe {
  int rd = -1;
  int wr = -1;

  void open() {
    int fds[2];
    if (pipe(fds) != 0) throw RuntimeError("external predictor: pipe() failed");
    rd = fds[0];
    wr = fds[1];
  }
  static void close_fd(int& fd) {
    if (fd >= 0) {
      ::close(fd);
      fd = -1;
    }
  }
};

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RuntimeError("external predictor: write to child failed");
    }
    off += static_cast<std::size_t>(n);
  }
}

// Child process wrapper. Spawned lazily, kept alive across batches; one
// batch is written and its answers read per call, under the caller's lock.
class ChildProcess {
 public:
  explicit ChildProcess(std::string command) : command_(std::move(command)) {}

  const std::string& command() const { return command_; }

  ~ChildProcess() {
    Pipe::close_fd(stdin_.wr);
    Pipe::close_fd(stdout_.rd);
    Pipe::close_fd(stderr_.rd);
    if (stderr_thread_.joinable()) stderr_thread_.join();
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  void ensure_started() {
    if (pid_ > 0) return;
    stdin_.open();
    stdout_.open();
    stderr_.open();

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, stdin_.rd, 0);
    posix_spawn_file_actions_adddup2(&actions, stdout_.wr, 1);
    posix_spawn_file_actions_adddup2(&actions, stderr_.wr, 2);
    for (int fd : {stdin_.rd, stdin_.wr, stdout_.rd, stdout_.wr, stderr_.rd, stderr_.wr})
      posix_spawn_file_actions_addclose(&actions, fd);

    const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
    int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char**>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    Pipe::close_fd(stdin_.rd);
    Pipe::close_fd(stdout_.wr);
    Pipe::close_fd(stderr_.wr);
    if (rc != 0) {
      pid_ = -1;
      throw RuntimeError("external predictor: cannot spawn '" + command_ + "'");
    }
    // Drain stderr continuously so the child never blocks on it.
    int err_fd = stderr_.rd;
    stderr_thread_ = std::thread([this, err_fd] {
      char buf[4096];
      for (;;) {
        ssize_t n = ::read(err_fd, buf, sizeof(buf));
        if (n <= 0) break;
        std::lock_guard<std::mutex> lock(stderr_mu_);
        stderr_text_.append(buf, static_cast<std::size_t>(n));
      }
    });
  }

  // Sends one batch, returns exactly n_rows answer lines.
  std::vector<std::string> exchange(const std::string& request, std::size_t n_rows) {
    ensure_started();
    // Writer thread keeps the child's stdin fed while this thread reads
    // answers, so neither pipe can fill up and deadlock the pair.
    std::string write_error;
    std::thread writer([&] {
      try {
        write_all(stdin_.wr, request);
      } catch (const std::exception& e) {
        write_error = e.what();
      }
    });

    std::vector<std::string> lines;
    std::string current;
    char buf[4096];
    bool eof = false;
    while (lines.size() < n_rows && !eof) {
      ssize_t n = ::read(stdout_.rd, buf, sizeof(buf));
      if (n < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (n == 0) {
        eof = true;
        break;
      }
      for (ssize_t i = 0; i < n && lines.size() < n_rows; ++i) {
        char c = buf[i];
        if (c == '\n') {
          if (!current.empty() && current.back() == '\r') current.pop_back();
          lines.push_back(current);
          current.clear();
        } else {
          current.push_back(c);
        }
      }
    }
    writer.join();
    if (!write_error.empty()) fail("write failed: " + write_error);
    if (lines.size() < n_rows) {
      std::ostringstream oss;
      oss << "child answered " << lines.size() << " of " << n_rows << " rows";
      fail(oss.str());
    }
    return lines;
  }

  [[noreturn]] void fail(const std::string& what) {
    std::string err;
    {
      std::lock_guard<std::mutex> lock(stderr_mu_);
      err = stderr_text_;
    }
    if (err.size() > 2000) err = err.substr(err.size() - 2000);
    std::string msg = "external predictor '" + command_ + "': " + what;
    if (!err.empty()) msg += "\n--- child stderr ---\n" + err;
    throw RuntimeError(msg);
  }

 private:
  std::string command_;
  pid_t pid_ = -1;
  Pipe stdin_, stdout_, stderr_;
  std::thread stderr_thread_;
  std::mutex stderr_mu_;
  std::string stderr_text_;
};

class ExternalPredictor : public Predictor {
 public:
  ExternalPredictor(std::string command, FeatureSchema schema)
      : schema_(std::move(schema)), child_(std::move(command)) {
    header_.reserve(64);
    std::vector<std::string> names;
    for (const auto& f : schema_.features) names.push_back(f.name);
    header_ = csv_join(names);
  }

  std::vector<int> predict(const std::vector<Instance>& batch) const override {
    std::lock_guard<std::mutex> lock(mu_);
    std::string request;
    request.reserve(batch.size() * 32 + header_.size() + 2);
    request += header_;
    request.push_back('\n');
    std::vector<std::string> cells(schema_.features.size());
    for (const Instance& x : batch) {
      for (std::size_t j = 0; j < schema_.features.size(); ++j)
        cells[j] = render_value(schema_.features[j], x[j]);
      request += csv_join(cells);
      request.push_back('\n');
    }
    request.push_back('\n');  // blank line terminates the batch

    std::vector<std::string> lines = child_.exchange(request, batch.size());
    std::vector<int> out(batch.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i] == "0") out[i] = 0;
      else if (lines[i] == "1") out[i] = 1;
      else child_.fail("expected '0' or '1', got '" + lines[i] + "'");
    }
    return out;
  }

  std::string name() const override { return "external"; }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["type"] = "external";
    j["command"] = child_.command();
    return j;
  }

 private:
  FeatureSchema schema_;
  std::string header_;
  mutable std::mutex mu_;
  mutable ChildProcess child_;
};

}  // namespace

std::unique_ptr<Predictor> make_external_predictor(const std::string& command,
                                                   const FeatureSchema& schema) {
  if (command.empty()) throw ConfigError("external predictor: empty command");
  return std::make_unique<ExternalPredictor>(command, schema);
}

}  // namespace recourse
