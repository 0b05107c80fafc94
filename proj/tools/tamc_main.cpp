// tamc: parameterized safety checking for threshold automata.
//
//   tamc check FILE [--property NAME] [--checker auto|smt|acs|zcs] ...
//   tamc oracle FILE --params n=4,t=1,f=0 [--bound N]
//   tamc fmt FILE
//
// Exit codes: 0 all checked properties hold, 1 a property is violated,
// 2 some result is unknown (and none violated), 3 usage or parse error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tamc/abstraction.hpp"
#include "tamc/checker.hpp"
#include "tamc/oracle.hpp"
#include "tamc/parser.hpp"
#include "tamc/render.hpp"

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 3;

std::optional<tamc::ThresholdAutomaton> load(const std::string& path) {
  tamc::ParseResult parsed = tamc::parse_file(path);
  for (const auto& d : parsed.diagnostics) std::cerr << d.str() << "\n";
  if (!parsed.ok()) return std::nullopt;
  return std::move(parsed.automaton);
}

std::string trace_text(const tamc::ThresholdAutomaton& ta, const tamc::Trace& trace) {
  std::ostringstream out;
  out << "params: " << trace.params_str(ta) << "\n";
  for (const auto& step : trace.steps)
    out << "fire r" << step.rule << " x" << step.count << "\n";
  out << "final:";
  tamc::oracle::ReplayResult replay = tamc::oracle::replay(ta, trace);
  if (replay.ok()) {
    for (std::size_t l = 0; l < ta.locations.size(); ++l)
      if (replay.final_config->counts[l] > 0)
        out << " " << ta.locations[l] << "=" << replay.final_config->counts[l];
    for (std::size_t v = 0; v < ta.shared.size(); ++v)
      out << " " << ta.shared[v] << "=" << replay.final_config->shared[v];
  } else {
    out << " <trace replay failed>";
  }
  out << "\n";
  return out.str();
}

int run_enumerate_orders(const tamc::ThresholdAutomaton& ta, const std::string& solver) {
  auto session =
      tamc::smt::open_session({tamc::smt::resolve_solver_command(solver), std::nullopt});
  tamc::OrderEnumeration orders = tamc::enumerate_orders(ta, *session);
  if (orders.rc_unsat) {
    std::cout << "resilience condition is unsatisfiable; no parameter valuations\n";
    return kExitSafe;
  }
  if (orders.unknown) {
    std::cerr << "order enumeration incomplete: " << orders.info << "\n";
    return kExitUnknown;
  }
  std::cout << orders.orders.size() << " threshold order(s) under the resilience condition\n";
  for (std::size_t i = 0; i < orders.orders.size(); ++i)
    std::cout << "order " << i << ": " << orders.orders[i].str(ta) << "\n";
  return kExitSafe;
}

int cmd_check(const std::string& file, const std::string& property,
              const std::string& checker_name, tamc::CheckOptions options,
              const std::string& trace_path, bool enumerate_only) {
  auto ta = load(file);
  if (!ta) return kExitUsage;

  if (enumerate_only) return run_enumerate_orders(*ta, options.solver_command);

  if (checker_name == "auto") options.checker = tamc::CheckerKind::Auto;
  else if (checker_name == "smt") options.checker = tamc::CheckerKind::Smt;
  else if (checker_name == "zcs") options.checker = tamc::CheckerKind::Zcs;
  else if (checker_name == "acs") options.checker = tamc::CheckerKind::Acs;
  else {
    std::cerr << "unknown checker '" << checker_name << "'\n";
    return kExitUsage;
  }

  std::vector<const tamc::SafetySpec*> specs;
  if (!property.empty()) {
    const tamc::SafetySpec* s = ta->find_spec(property);
    if (!s) {
      std::cerr << "no specification named '" << property << "' in " << file << "\n";
      return kExitUsage;
    }
    specs.push_back(s);
  } else {
    for (const auto& s : ta->specs) specs.push_back(&s);
  }

  bool any_unknown = false;
  for (const tamc::SafetySpec* spec : specs) {
    tamc::Verdict verdict;
    try {
      verdict = tamc::run_check(*ta, *spec, options);
    } catch (const tamc::UnsupportedCheck& e) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
    std::cout << "SPEC " << spec->name << ": " << verdict.name() << "\n";
    if (verdict.is_unknown() && !verdict.reason.empty())
      std::cerr << "  (" << verdict.reason << ")\n";
    if (verdict.is_unsafe()) {
      std::string text = trace_text(*ta, *verdict.trace);
      if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        out << text;
      } else {
        std::cout << text;
      }
      return kExitUnsafe;  // stop at the first violated property
    }
    if (verdict.is_unknown()) any_unknown = true;
  }
  return any_unknown ? kExitUnknown : kExitSafe;
}

int cmd_oracle(const std::string& file, const std::string& params_arg,
               std::optional<std::int64_t> bound, const std::string& property) {
  auto ta = load(file);
  if (!ta) return kExitUsage;

  std::vector<std::int64_t> params(ta->params.size(), -1);
  std::istringstream in(params_arg);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::cerr << "malformed --params entry '" << item << "' (expected name=value)\n";
      return kExitUsage;
    }
    auto idx = ta->param_index(item.substr(0, eq));
    if (!idx) {
      std::cerr << "unknown parameter '" << item.substr(0, eq) << "'\n";
      return kExitUsage;
    }
    try {
      params[*idx] = std::stoll(item.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "invalid value in --params entry '" << item << "'\n";
      return kExitUsage;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i] < 0) {
      std::cerr << "missing value for parameter '" << ta->params[i] << "'\n";
      return kExitUsage;
    }

  std::vector<const tamc::SafetySpec*> specs;
  if (!property.empty()) {
    const tamc::SafetySpec* s = ta->find_spec(property);
    if (!s) {
      std::cerr << "no specification named '" << property << "'\n";
      return kExitUsage;
    }
    specs.push_back(s);
  } else {
    for (const auto& s : ta->specs) specs.push_back(&s);
  }

  bool any_unsafe = false, any_bound = false;
  for (const tamc::SafetySpec* spec : specs) {
    tamc::oracle::Outcome outcome;
    try {
      outcome = tamc::oracle::explore(*ta, *spec, params,
                                      bound ? std::optional<std::int64_t>(*bound)
                                            : std::nullopt);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
    switch (outcome.status) {
      case tamc::oracle::Outcome::Status::Safe:
        std::cout << "SPEC " << spec->name << ": SAFE\n";
        break;
      case tamc::oracle::Outcome::Status::BoundHit:
        std::cout << "SPEC " << spec->name << ": BOUND_HIT\n";
        any_bound = true;
        break;
      case tamc::oracle::Outcome::Status::Unsafe:
        std::cout << "SPEC " << spec->name << ": UNSAFE\n";
        std::cout << trace_text(*ta, *outcome.trace);
        any_unsafe = true;
        break;
    }
  }
  if (any_unsafe) return kExitUnsafe;
  if (any_bound) return kExitUnknown;
  return kExitSafe;
}

int cmd_fmt(const std::string& file) {
  auto ta = load(file);
  if (!ta) return kExitUsage;
  std::cout << tamc::render(*ta);
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parameterized safety model checking for threshold automata"};
  app.require_subcommand(1);

  std::string file, property, checker = "auto", solver, trace_path, params_arg;
  double timeout = 0;
  bool no_preprocess = false, prune_unsat = false, enumerate = false;
  std::int64_t max_path_len = 0, max_basis = 200000, bound_arg = -1;
  int jobs = 1;

  CLI::App* check = app.add_subcommand("check", "decide the safety specifications of a file");
  check->add_option("file", file, "input .ta/.eta file")->required();
  check->add_option("--property", property, "check a single named specification");
  check->add_option("--checker", checker, "auto|smt|acs|zcs (default auto)");
  check->add_option("--timeout", timeout, "global wall-clock budget in seconds");
  check->add_flag("--no-preprocess", no_preprocess, "disable static simplification");
  check->add_flag("--prune-unsat-guards", prune_unsat,
                  "also remove rules with RC-unsatisfiable guards");
  check->add_option("--smt-solver", solver,
                    "solver command speaking SMT-LIB2 on stdin (default: in-process engine, "
                    "or TACHECKER_SMT)");
  check->add_option("--trace", trace_path, "write the counterexample trace to this file");
  check->add_flag("--enumerate-orders", enumerate,
                  "print the feasible threshold orders with witnesses and exit");
  check->add_option("--max-abstract-path-len", max_path_len,
                    "ZCS abstract path length budget (0 = default)");
  check->add_option("--max-basis-size", max_basis, "ACS basis size budget");
  check->add_option("--jobs", jobs, "parallel workers for per-order checking");

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "explicit-state exploration at fixed parameters");
  oracle_cmd->add_option("file", file, "input .ta/.eta file")->required();
  oracle_cmd->add_option("--params", params_arg, "parameter valuation, e.g. n=4,t=1,f=0")
      ->required();
  oracle_cmd->add_option("--bound", bound_arg, "step bound (required for ETA)");
  oracle_cmd->add_option("--property", property, "explore a single named specification");

  CLI::App* fmt = app.add_subcommand("fmt", "parse and re-render a file");
  fmt->add_option("file", file, "input .ta/.eta file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (check->parsed()) {
    tamc::CheckOptions options;
    options.preprocess = !no_preprocess;
    options.prune_unsat_guards = prune_unsat;
    options.solver_command = solver;
    if (timeout > 0) options.timeout_seconds = timeout;
    options.max_abstract_path_len = max_path_len;
    options.max_basis_size = max_basis;
    options.jobs = jobs;
    return cmd_check(file, property, checker, options, trace_path, enumerate);
  }
  if (oracle_cmd->parsed()) {
    return cmd_oracle(file, params_arg,
                      bound_arg >= 0 ? std::optional<std::int64_t>(bound_arg) : std::nullopt,
                      property);
  }
  if (fmt->parsed()) return cmd_fmt(file);
  return kExitUsage;
}
