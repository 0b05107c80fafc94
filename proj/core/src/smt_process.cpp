#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <vector>

#include "tamc/smt/solver.hpp"

namespace tamc::smt {

namespace {

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> out;
  std::istringstream in(command);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

// Minimal s-expression reader for solver replies.
struct Sexpr {
  bool is_atom = true;
  std::string atom;
  std::vector<Sexpr> kids;
};

bool parse_sexpr(const std::string& text, std::size_t& pos, Sexpr& out) {
  while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  if (pos >= text.size()) return false;
  if (text[pos] == '(') {
    ++pos;
    out.is_atom = false;
    for (;;) {
      while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
        return true;
      }
      Sexpr kid;
      if (!parse_sexpr(text, pos, kid)) return false;
      out.kids.push_back(std::move(kid));
    }
  }
  if (text[pos] == '"') {
    std::size_t end = text.find('"', pos + 1);
    if (end == std::string::npos) return false;
    out.is_atom = true;
    out.atom = text.substr(pos, end - pos + 1);
    pos = end + 1;
    return true;
  }
  std::size_t start = pos;
  while (pos < text.size() && !std::isspace((unsigned char)text[pos]) && text[pos] != '(' &&
         text[pos] != ')')
    ++pos;
  out.is_atom = true;
  out.atom = text.substr(start, pos - start);
  return pos > start;
}

std::optional<std::int64_t> sexpr_int(const Sexpr& e) {
  if (e.is_atom) {
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(e.atom, &used);
      if (used == e.atom.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  // (- 5)
  if (e.kids.size() == 2 && e.kids[0].is_atom && e.kids[0].atom == "-") {
    auto v = sexpr_int(e.kids[1]);
    if (v) return -*v;
  }
  return std::nullopt;
}

class ProcessSession : public SolverSession {
 public:
  ProcessSession(const std::string& command, Deadline deadline) : deadline_(deadline) {
    spawn(command);
    handshake();
  }

  ~ProcessSession() override {
    if (pid_ > 0) {
      if (alive_) {
        // Best effort; the solver may already be gone.
        std::string bye = "(exit)\n";
        (void)!write(in_fd_, bye.data(), bye.size());
      }
      close_fds();
      kill(pid_, SIGKILL);
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  void declare_int(const std::string& name) override {
    command_expect_success("(declare-const " + name + " Int)");
    declared_.back().push_back(name);
  }

  void assert_term(const TermRef& t) override {
    command_expect_success("(assert " + to_smtlib(t) + ")");
  }

  void push() override {
    command_expect_success("(push 1)");
    declared_.emplace_back();
    ++depth_;
  }

  void pop() override {
    if (depth_ < 1) throw SolverError(SolverError::Kind::ProtocolError, "pop without push");
    command_expect_success("(pop 1)");
    declared_.pop_back();
    --depth_;
  }

  SmtResult check() override {
    if (!alive_) return {SmtResult::Kind::Unknown, {}, "solver process is gone"};
    std::optional<std::string> reply = round_trip("(check-sat)");
    if (!reply) return {SmtResult::Kind::Unknown, {}, "solver timed out or died"};
    std::string verdict = trim(*reply);
    if (verdict == "unsat") return {SmtResult::Kind::Unsat, {}, ""};
    if (verdict == "unknown") return {SmtResult::Kind::Unknown, {}, "solver returned unknown"};
    if (verdict != "sat")
      throw SolverError(SolverError::Kind::ProtocolError,
                        "unexpected check-sat reply: " + verdict);
    SmtResult res;
    res.kind = SmtResult::Kind::Sat;
    std::vector<std::string> names;
    for (const auto& frame : declared_) names.insert(names.end(), frame.begin(), frame.end());
    if (names.empty()) return res;

    std::string q = "(get-value (";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) q += " ";
      q += names[i];
    }
    q += "))";
    std::optional<std::string> vals = round_trip(q);
    if (!vals) return {SmtResult::Kind::Unknown, {}, "solver timed out on get-value"};
    Sexpr e;
    std::size_t pos = 0;
    if (!parse_sexpr(*vals, pos, e) || e.is_atom)
      throw SolverError(SolverError::Kind::ProtocolError, "malformed get-value reply: " + *vals);
    for (const auto& pair : e.kids) {
      if (pair.is_atom || pair.kids.size() != 2 || !pair.kids[0].is_atom)
        throw SolverError(SolverError::Kind::ProtocolError, "malformed get-value entry");
      auto v = sexpr_int(pair.kids[1]);
      if (!v)
        throw SolverError(SolverError::Kind::ProtocolError,
                          "non-integer model value for " + pair.kids[0].atom);
      res.model[pair.kids[0].atom] = *v;
    }
    return res;
  }

  int depth() const override { return depth_; }
  void set_deadline(Deadline d) override { deadline_ = d; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  void spawn(const std::string& command) {
    std::vector<std::string> args = split_command(command);
    if (args.empty())
      throw SolverError(SolverError::Kind::SpawnFailure, "empty solver command");

    int to_child[2], from_child[2], exec_err[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0 || pipe(exec_err) != 0)
      throw SolverError(SolverError::Kind::SpawnFailure, "pipe() failed");
    fcntl(exec_err[1], F_SETFD, FD_CLOEXEC);

    pid_ = fork();
    if (pid_ < 0) throw SolverError(SolverError::Kind::SpawnFailure, "fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      close(exec_err[0]);
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      int err = errno;
      (void)!write(exec_err[1], &err, sizeof(err));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    close(exec_err[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];

    int err = 0;
    ssize_t n = read(exec_err[0], &err, sizeof(err));
    close(exec_err[0]);
    if (n > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
      close_fds();
      throw SolverError(SolverError::Kind::SpawnFailure,
                        "cannot launch '" + args[0] + "': " + std::strerror(err));
    }
    alive_ = true;
  }

  void handshake() {
    for (const char* cmd : {"(set-option :print-success true)",
                            "(set-option :produce-models true)", "(set-logic QF_LIA)"}) {
      std::optional<std::string> reply = round_trip(cmd);
      if (!reply || trim(*reply) != "success")
        throw SolverError(SolverError::Kind::HandshakeFailure,
                          std::string("solver rejected '") + cmd +
                              "': " + (reply ? trim(*reply) : "no reply"));
    }
  }

  void command_expect_success(const std::string& cmd) {
    std::optional<std::string> reply = round_trip(cmd);
    if (!reply)
      throw SolverError(SolverError::Kind::ProtocolError, "solver timed out on: " + cmd);
    if (trim(*reply) != "success")
      throw SolverError(SolverError::Kind::ProtocolError,
                        "solver replied '" + trim(*reply) + "' to: " + cmd);
  }

  // Sends one command line and reads one complete reply (a bare word or a
  // balanced s-expression). Returns nullopt on timeout or solver death.
  std::optional<std::string> round_trip(const std::string& cmd) {
    if (!alive_) return std::nullopt;
    std::string line = cmd + "\n";
    std::size_t off = 0;
    while (off < line.size()) {
      ssize_t n = write(in_fd_, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        mark_dead();
        return std::nullopt;
      }
      off += (std::size_t)n;
    }
    std::string reply;
    int balance = 0;
    bool saw_any = false;
    for (;;) {
      // A reply is complete at a newline with balanced parentheses.
      std::size_t nl = buffer_.find('\n');
      while (nl != std::string::npos) {
        std::string chunk = buffer_.substr(0, nl + 1);
        buffer_.erase(0, nl + 1);
        for (char c : chunk) {
          if (c == '(') ++balance;
          if (c == ')') --balance;
        }
        reply += chunk;
        if (!trim(reply).empty()) saw_any = true;
        if (saw_any && balance <= 0) return reply;
        nl = buffer_.find('\n');
      }
      if (!wait_readable()) return std::nullopt;
      char buf[4096];
      ssize_t n = read(out_fd_, buf, sizeof(buf));
      if (n < 0) {
        if (errno == EINTR) continue;
        mark_dead();
        return std::nullopt;
      }
      if (n == 0) {
        mark_dead();
        return std::nullopt;
      }
      buffer_.append(buf, (std::size_t)n);
    }
  }

  bool wait_readable() {
    for (;;) {
      int timeout_ms = -1;
      if (deadline_) {
        auto now = std::chrono::steady_clock::now();
        if (now >= *deadline_) {
          mark_dead();
          return false;
        }
        timeout_ms = (int)std::chrono::duration_cast<std::chrono::milliseconds>(*deadline_ - now)
                         .count() +
                     1;
      }
      struct pollfd p{out_fd_, POLLIN, 0};
      int r = poll(&p, 1, timeout_ms);
      if (r < 0) {
        if (errno == EINTR) continue;
        mark_dead();
        return false;
      }
      if (r == 0) {
        mark_dead();  // deadline elapsed; kill the query
        return false;
      }
      return true;
    }
  }

  void mark_dead() {
    if (!alive_) return;
    alive_ = false;
    if (pid_ > 0) kill(pid_, SIGKILL);
  }

  void close_fds() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    in_fd_ = out_fd_ = -1;
  }

  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  bool alive_ = false;
  int depth_ = 0;
  Deadline deadline_;
  std::string buffer_;
  std::vector<std::vector<std::string>> declared_{1};
};

}  // namespace

std::unique_ptr<SolverSession> make_process_session(const std::string& command,
                                                    Deadline deadline) {
  return std::make_unique<ProcessSession>(command, deadline);
}

}  // namespace tamc::smt
