#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "tamc/smt/term.hpp"

namespace tamc::smt {

struct SmtResult {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  std::map<std::string, std::int64_t> model;  // every declared constant, on Sat
  std::string info;                           // detail for Unknown

  bool is_sat() const { return kind == Kind::Sat; }
  bool is_unsat() const { return kind == Kind::Unsat; }
  bool is_unknown() const { return kind == Kind::Unknown; }
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { SpawnFailure, HandshakeFailure, ProtocolError };
  SolverError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// An incremental QF_LIA solver session with push/pop. A session is owned by
/// one logical thread; distinct sessions may run in parallel.
class SolverSession {
 public:
  virtual ~SolverSession() = default;

  virtual void declare_int(const std::string& name) = 0;
  virtual void assert_term(const TermRef& t) = 0;
  virtual void push() = 0;
  virtual void pop() = 0;
  virtual SmtResult check() = 0;

  /// Number of unmatched push commands issued.
  virtual int depth() const = 0;

  virtual void set_deadline(Deadline d) = 0;
};

/// How sessions are created. An empty command selects the in-process engine;
/// otherwise the command is split on whitespace and spawned as a child
/// process speaking SMT-LIB2 on its standard input/output.
struct SessionOptions {
  std::string command;
  Deadline deadline;
};

std::unique_ptr<SolverSession> open_session(const SessionOptions& options);

/// Resolves the solver command: explicit choice, then the TACHECKER_SMT
/// environment variable, then the in-process engine.
std::string resolve_solver_command(const std::string& explicit_command);

class SessionFactory {
 public:
  explicit SessionFactory(std::string command = "", Deadline deadline = std::nullopt)
      : command_(std::move(command)), deadline_(deadline) {}

  std::unique_ptr<SolverSession> make() const {
    return open_session({command_, deadline_});
  }

  const std::string& command() const { return command_; }
  void set_deadline(Deadline d) { deadline_ = d; }

 private:
  std::string command_;
  Deadline deadline_;
};

}  // namespace tamc::smt
