#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "neg/relation.hpp"

namespace neg {

// Symbolic state transformers: regular expressions over per-outcome labels,
// kept as a shared immutable DAG in a light normal form so that structurally
// equal transformers compare (and print) identically:
//   - concatenation is flattened and identity operands are dropped,
//   - union is flattened, deduplicated and sorted,
//   - star(identity) = identity and star(star(x)) = star(x).
class SymExpr;
using SymExprPtr = std::shared_ptr<const SymExpr>;

class SymExpr {
 public:
  enum class Kind { identity, label, concat, alt, star };

  static SymExprPtr identity();
  static SymExprPtr label(std::string atom, std::string outcome);
  static SymExprPtr concat(const SymExprPtr& a, const SymExprPtr& b);
  static SymExprPtr alt(const SymExprPtr& a, const SymExprPtr& b);
  static SymExprPtr star(const SymExprPtr& a);

  Kind kind() const { return kind_; }
  const std::string& atom() const { return atom_; }
  const std::string& outcome() const { return outcome_; }
  const std::vector<SymExprPtr>& children() const { return children_; }
  uint64_t hash() const { return hash_; }

  // Deterministic structural order; used to canonicalize unions.
  static int compare(const SymExprPtr& a, const SymExprPtr& b);
  static bool equal(const SymExprPtr& a, const SymExprPtr& b) {
    return compare(a, b) == 0;
  }

  // Infix rendering: `1`, `{n:r}`, `a.b`, `a|b`, `a*` with parentheses as
  // needed. Labels are brace-delimited because outcome names may themselves
  // contain operator characters once rules have renamed them.
  static std::string to_string(const SymExprPtr& e);

  // Evaluate over concrete relations; `leaf` supplies the relation of each
  // label and `n` is the number of global states.
  static Relation eval(const SymExprPtr& e,
                       const std::function<Relation(const std::string&, const std::string&)>& leaf,
                       uint32_t n);

 private:
  SymExpr(Kind k, std::string atom, std::string outcome,
          std::vector<SymExprPtr> children);

  static SymExprPtr make(Kind k, std::string atom, std::string outcome,
                         std::vector<SymExprPtr> children);

  Kind kind_;
  std::string atom_, outcome_;   // label leaves only
  std::vector<SymExprPtr> children_;
  uint64_t hash_ = 0;
};

}  // namespace neg
