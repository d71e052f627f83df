#include "neg/transformer.hpp"

#include <sstream>

#include "neg/errors.hpp"

namespace neg {

const SymExprPtr& Transformer::expr() const {
  if (concrete_) throw Error("transformer: concrete backend has no expression");
  return expr_;
}

const Relation& Transformer::rel() const {
  if (!concrete_) throw Error("transformer: symbolic backend has no relation");
  return rel_;
}

uint64_t Transformer::apply_relation(uint32_t state) const {
  if (!concrete_)
    throw Error("transformer: apply_relation needs the concrete backend");
  return rel_.apply(state);
}

Transformer compose(const Transformer& a, const Transformer& b) {
  if (a.concrete_ != b.concrete_)
    throw Error("transformer: mixed backends in compose");
  if (a.concrete_) return Transformer(a.rel_.compose(b.rel_));
  return Transformer(SymExpr::concat(a.expr_, b.expr_));
}

Transformer union_of(const Transformer& a, const Transformer& b) {
  if (a.concrete_ != b.concrete_)
    throw Error("transformer: mixed backends in union");
  if (a.concrete_) return Transformer(a.rel_.union_with(b.rel_));
  return Transformer(SymExpr::alt(a.expr_, b.expr_));
}

Transformer star(const Transformer& a) {
  if (a.concrete_) return Transformer(a.rel_.star());
  return Transformer(SymExpr::star(a.expr_));
}

bool Transformer::operator==(const Transformer& other) const {
  if (concrete_ != other.concrete_) return false;
  if (concrete_) return rel_ == other.rel_;
  return SymExpr::equal(expr_, other.expr_);
}

std::string Transformer::to_string() const {
  if (!concrete_) return SymExpr::to_string(expr_);
  std::ostringstream out;
  out << "rel{";
  bool first = true;
  for (auto [i, j] : rel_.pairs()) {
    if (!first) out << ' ';
    first = false;
    out << i << "->" << j;
  }
  out << '}';
  return out.str();
}

}  // namespace neg
