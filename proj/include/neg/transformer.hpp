#pragma once

#include <cstdint>
#include <string>

#include "neg/relation.hpp"
#include "neg/symexpr.hpp"

namespace neg {

// A state transformer attached to an outcome. Either symbolic (an expression
// over outcome labels) or concrete (a relation over the joint state space).
// All outcomes of one negotiation use the same backend.
class Transformer {
 public:
  Transformer() : expr_(SymExpr::identity()) {}

  static Transformer label(const std::string& atom, const std::string& outcome) {
    return Transformer(SymExpr::label(atom, outcome));
  }
  static Transformer identity_symbolic() { return Transformer(SymExpr::identity()); }
  static Transformer symbolic(SymExprPtr e) { return Transformer(std::move(e)); }
  static Transformer concrete(Relation r) { return Transformer(std::move(r)); }

  bool is_concrete() const { return concrete_; }
  const SymExprPtr& expr() const;
  const Relation& rel() const;

  // Successor-state mask under a concrete transformer.
  uint64_t apply_relation(uint32_t state) const;

  friend Transformer compose(const Transformer& a, const Transformer& b);
  friend Transformer union_of(const Transformer& a, const Transformer& b);
  friend Transformer star(const Transformer& a);

  // Structural equality: normal-form comparison for symbolic transformers,
  // exact relation equality for concrete ones.
  bool operator==(const Transformer& other) const;

  std::string to_string() const;

 private:
  explicit Transformer(SymExprPtr e) : concrete_(false), expr_(std::move(e)) {}
  explicit Transformer(Relation r) : concrete_(true), rel_(std::move(r)) {}

  bool concrete_ = false;
  SymExprPtr expr_;
  Relation rel_;
};

Transformer compose(const Transformer& a, const Transformer& b);
Transformer union_of(const Transformer& a, const Transformer& b);
Transformer star(const Transformer& a);

}  // namespace neg
