// tamc-smt: a minimal SMT-LIB2 QF_LIA solver on standard input/output,
// backed by the in-process decision procedure. Supports the interactive
// subset the model checkers emit: set-option/set-logic, declare-const,
// assert, push/pop, check-sat, get-value, get-model.

#include <unistd.h>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tamc/smt/builtin.hpp"
#include "tamc/smt/term.hpp"

namespace {

using tamc::smt::BuiltinSolver;
using tamc::smt::SmtResult;
using tamc::smt::TermRef;

struct Sexpr {
  bool is_atom = true;
  std::string atom;
  std::vector<Sexpr> kids;
};

class Reader {
 public:
  // Reads one complete s-expression (or bare atom) from stdin.
  std::optional<Sexpr> next() {
    skip_ws();
    if (!ensure(1)) return std::nullopt;
    return parse();
  }

 private:
  std::optional<Sexpr> parse() {
    skip_ws();
    if (!ensure(1)) return std::nullopt;
    char c = buf_[pos_];
    if (c == '(') {
      ++pos_;
      Sexpr list;
      list.is_atom = false;
      for (;;) {
        skip_ws();
        if (!ensure(1)) return std::nullopt;
        if (buf_[pos_] == ')') {
          ++pos_;
          return list;
        }
        auto kid = parse();
        if (!kid) return std::nullopt;
        list.kids.push_back(std::move(*kid));
      }
    }
    if (c == '"') {
      std::size_t end = pos_ + 1;
      for (;;) {
        while (end >= buf_.size() && fill()) {
        }
        if (end >= buf_.size()) return std::nullopt;
        if (buf_[end] == '"') break;
        ++end;
      }
      Sexpr a;
      a.atom = buf_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return a;
    }
    std::size_t start = pos_;
    for (;;) {
      if (pos_ >= buf_.size()) {
        if (pos_ > start) break;
        if (!fill()) return std::nullopt;
        continue;
      }
      char d = buf_[pos_];
      if (std::isspace((unsigned char)d) || d == '(' || d == ')') break;
      ++pos_;
    }
    Sexpr a;
    a.atom = buf_.substr(start, pos_ - start);
    return a;
  }

  void skip_ws() {
    for (;;) {
      if (pos_ >= buf_.size()) {
        if (!fill()) return;
        continue;
      }
      char c = buf_[pos_];
      if (std::isspace((unsigned char)c)) {
        ++pos_;
      } else if (c == ';') {  // comment to end of line
        while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  bool ensure(std::size_t n) {
    while (buf_.size() - pos_ < n)
      if (!fill()) return false;
    return true;
  }

  bool fill() {
    if (pos_ > 1 << 20) {
      buf_.erase(0, pos_);
      pos_ = 0;
    }
    // Partial reads keep the interactive protocol responsive.
    char chunk[4096];
    ssize_t n = ::read(0, chunk, sizeof(chunk));
    if (n <= 0) return false;
    buf_.append(chunk, (std::size_t)n);
    return true;
  }

  std::string buf_;
  std::size_t pos_ = 0;
};

struct CommandError {
  std::string message;
};

std::int64_t parse_numeral(const std::string& s) {
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(s, &used);
    if (used == s.size() && s[0] != '-') return v;
  } catch (const std::exception&) {
  }
  throw CommandError{"invalid numeral: " + s};
}

TermRef to_term(const Sexpr& e, const BuiltinSolver& solver) {
  namespace smt = tamc::smt;
  if (e.is_atom) {
    if (e.atom == "true") return smt::tru();
    if (e.atom == "false") return smt::fls();
    if (!e.atom.empty() && std::isdigit((unsigned char)e.atom[0]))
      return smt::lit(parse_numeral(e.atom));
    if (!solver.is_declared(e.atom)) throw CommandError{"unknown constant " + e.atom};
    return smt::var(e.atom);
  }
  if (e.kids.empty() || !e.kids[0].is_atom) throw CommandError{"malformed term"};
  const std::string& op = e.kids[0].atom;
  std::vector<TermRef> args;
  for (std::size_t i = 1; i < e.kids.size(); ++i) args.push_back(to_term(e.kids[i], solver));

  auto need = [&](std::size_t n) {
    if (args.size() != n) throw CommandError{"operator " + op + " expects " + std::to_string(n) + " arguments"};
  };
  if (op == "+") return smt::add(std::move(args));
  if (op == "-") {
    if (args.size() == 1) return smt::mul(-1, args[0]);
    if (args.empty()) throw CommandError{"operator - expects arguments"};
    std::vector<TermRef> parts{args[0]};
    for (std::size_t i = 1; i < args.size(); ++i) parts.push_back(smt::mul(-1, args[i]));
    return smt::add(std::move(parts));
  }
  if (op == "*") {
    need(2);
    if (e.kids[1].is_atom && !e.kids[1].atom.empty() &&
        (std::isdigit((unsigned char)e.kids[1].atom[0])))
      return smt::mul(parse_numeral(e.kids[1].atom), args[1]);
    if (e.kids[2].is_atom && !e.kids[2].atom.empty() &&
        (std::isdigit((unsigned char)e.kids[2].atom[0])))
      return smt::mul(parse_numeral(e.kids[2].atom), args[0]);
    // (* (- k) x) style
    auto lit_of = [](const TermRef& t) -> std::optional<std::int64_t> {
      using tamc::smt::NodeKind;
      if (t->kind == NodeKind::Lit) return t->value;
      if (t->kind == NodeKind::Mul && t->kids[1]->kind == NodeKind::Lit)
        return t->kids[0]->value * t->kids[1]->value;
      return std::nullopt;
    };
    if (auto k = lit_of(args[0])) return smt::mul(*k, args[1]);
    if (auto k = lit_of(args[1])) return smt::mul(*k, args[0]);
    throw CommandError{"nonlinear multiplication"};
  }
  if (op == "<=") { need(2); return smt::le(args[0], args[1]); }
  if (op == "<") { need(2); return smt::lt(args[0], args[1]); }
  if (op == ">=") { need(2); return smt::ge(args[0], args[1]); }
  if (op == ">") { need(2); return smt::gt(args[0], args[1]); }
  if (op == "=") { need(2); return smt::eq(args[0], args[1]); }
  if (op == "and") return smt::land(std::move(args));
  if (op == "or") return smt::lor(std::move(args));
  if (op == "not") { need(1); return smt::lnot(args[0]); }
  if (op == "=>") {
    if (args.size() < 2) throw CommandError{"=> expects at least 2 arguments"};
    TermRef r = args.back();
    for (std::size_t i = args.size() - 1; i-- > 0;) r = smt::implies(args[i], r);
    return r;
  }
  throw CommandError{"unsupported operator " + op};
}

std::string value_str(std::int64_t v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

}  // namespace

int main() {
  std::ios::sync_with_stdio(false);
  Reader reader;
  BuiltinSolver solver;
  bool print_success = false;
  std::optional<SmtResult> last;

  auto ok = [&]() {
    if (print_success) std::cout << "success\n" << std::flush;
  };
  auto error = [&](const std::string& msg) {
    std::cout << "(error \"" << msg << "\")\n" << std::flush;
  };

  for (;;) {
    auto cmd = reader.next();
    if (!cmd) break;
    try {
      if (cmd->is_atom || cmd->kids.empty() || !cmd->kids[0].is_atom) {
        error("expected a command");
        continue;
      }
      const std::string& head = cmd->kids[0].atom;
      if (head == "exit") {
        ok();
        break;
      } else if (head == "set-option") {
        if (cmd->kids.size() == 3 && cmd->kids[1].is_atom &&
            cmd->kids[1].atom == ":print-success")
          print_success = cmd->kids[2].atom == "true";
        ok();
      } else if (head == "set-logic" || head == "set-info") {
        ok();
      } else if (head == "declare-const" || head == "declare-fun") {
        if (cmd->kids.size() < 2 || !cmd->kids[1].is_atom) throw CommandError{"malformed declaration"};
        const std::string& sort = cmd->kids.back().is_atom ? cmd->kids.back().atom : "";
        if (sort != "Int") throw CommandError{"only Int constants are supported"};
        if (head == "declare-fun" &&
            !(cmd->kids.size() == 4 && !cmd->kids[2].is_atom && cmd->kids[2].kids.empty()))
          throw CommandError{"only zero-ary Int functions are supported"};
        solver.declare(cmd->kids[1].atom);
        last.reset();
        ok();
      } else if (head == "assert") {
        if (cmd->kids.size() != 2) throw CommandError{"assert expects one term"};
        solver.assert_term(to_term(cmd->kids[1], solver));
        last.reset();
        ok();
      } else if (head == "push" || head == "pop") {
        std::int64_t n = 1;
        if (cmd->kids.size() == 2 && cmd->kids[1].is_atom) n = parse_numeral(cmd->kids[1].atom);
        for (std::int64_t i = 0; i < n; ++i) {
          if (head == "push")
            solver.push();
          else if (solver.depth() > 0)
            solver.pop();
          else
            throw CommandError{"pop without matching push"};
        }
        last.reset();
        ok();
      } else if (head == "check-sat") {
        last = solver.check();
        switch (last->kind) {
          case SmtResult::Kind::Sat: std::cout << "sat\n"; break;
          case SmtResult::Kind::Unsat: std::cout << "unsat\n"; break;
          case SmtResult::Kind::Unknown: std::cout << "unknown\n"; break;
        }
        std::cout << std::flush;
      } else if (head == "get-value") {
        if (!last || last->kind != SmtResult::Kind::Sat)
          throw CommandError{"no model available"};
        if (cmd->kids.size() != 2 || cmd->kids[1].is_atom)
          throw CommandError{"get-value expects a term list"};
        std::cout << "(";
        bool first = true;
        for (const auto& t : cmd->kids[1].kids) {
          if (!t.is_atom || !last->model.count(t.atom))
            throw CommandError{"get-value supports declared constants only"};
          if (!first) std::cout << " ";
          std::cout << "(" << t.atom << " " << value_str(last->model.at(t.atom)) << ")";
          first = false;
        }
        std::cout << ")\n" << std::flush;
      } else if (head == "get-model") {
        if (!last || last->kind != SmtResult::Kind::Sat)
          throw CommandError{"no model available"};
        std::cout << "(\n";
        for (const auto& name : solver.declared())
          std::cout << "  (define-fun " << name << " () Int " << value_str(last->model.at(name))
                    << ")\n";
        std::cout << ")\n" << std::flush;
      } else {
        error("unsupported command " + head);
      }
    } catch (const CommandError& e) {
      error(e.message);
    } catch (const std::exception& e) {
      error(e.what());
    }
  }
  return 0;
}
