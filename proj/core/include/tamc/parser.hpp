#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tamc/automaton.hpp"

namespace tamc {

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  std::string str() const;
};

struct ParseResult {
  std::optional<ThresholdAutomaton> automaton;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return automaton.has_value(); }
  bool has_errors() const {
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Error) return true;
    return false;
  }
};

/// Parses `.ta`/`.eta` source text. The origin path is used for diagnostics
/// and for the extension rule: a file ending in `.eta` is an ETA; a `.ta`
/// file containing resets or decrements is promoted to ETA with a warning.
ParseResult parse(const std::string& source, const std::string& origin);

/// Reads and parses a file from disk.
ParseResult parse_file(const std::string& path);

}  // namespace tamc
