#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neg/negotiation.hpp"

namespace neg {

// Line-oriented text format:
//
//   # comment
//   agents F D M
//   states F bot t1 t2                      (concrete backend only)
//   atom n0 parties D F M initial
//   atom nf parties D F M final
//   atom n1 parties D F
//   outcome n0 st -> D:n1 F:n1 M:n2 M:nf    (target set per agent)
//   outcome n1 pr -> D:n2 F:n2 delta {n1:pr}.{n1:pr}
//   outcome nf end                          (no targets: final outcome)
//   pairs n1 pr (t1,bot,t2)->(t1,bot,t1) ...  (concrete transformers)
//
// Transformer expressions: `1`, `{atom:outcome}`, concatenation `.`, union
// `|`, postfix `*`, parentheses. A missing delta means the canonical label
// `{atom:outcome}`. Lines may come in any order; `serialize` emits the
// canonical order shown above, which `parse` reproduces byte for byte.

struct ParseDiagnostic {
  int line = 0;  // 0 for whole-file problems
  std::string message;
};

struct ParseResult {
  std::optional<Negotiation> negotiation;  // engaged iff no diagnostics
  std::vector<ParseDiagnostic> diagnostics;
};

ParseResult parse_negotiation(const std::string& text);
ParseResult parse_negotiation_file(const std::string& path);

std::string serialize(const Negotiation& neg);

// Transformer expression used by `delta` clauses; exposed for tests and the
// CLI. Returns nullptr and fills `error` on malformed input.
SymExprPtr parse_expr(const std::string& text, std::string& error);

}  // namespace neg
