#include "neg/symexpr.hpp"

#include <algorithm>

#include "neg/errors.hpp"

namespace neg {

namespace {

uint64_t fnv(uint64_t h, uint64_t v) {
  // 64-bit FNV-1a step, applied bytewise to v.
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t fnv(uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fnv(h, s.size());
}

}  // namespace

SymExpr::SymExpr(Kind k, std::string atom, std::string outcome,
                 std::vector<SymExprPtr> children)
    : kind_(k), atom_(std::move(atom)), outcome_(std::move(outcome)),
      children_(std::move(children)) {
  uint64_t h = 14695981039346656037ull;
  h = fnv(h, static_cast<uint64_t>(kind_));
  h = fnv(h, atom_);
  h = fnv(h, outcome_);
  for (const auto& c : children_) h = fnv(h, c->hash_);
  hash_ = h;
}

SymExprPtr SymExpr::make(Kind k, std::string atom, std::string outcome,
                         std::vector<SymExprPtr> children) {
  return SymExprPtr(new SymExpr(k, std::move(atom), std::move(outcome),
                                std::move(children)));
}

SymExprPtr SymExpr::identity() {
  static const SymExprPtr id = make(Kind::identity, "", "", {});
  return id;
}

SymExprPtr SymExpr::label(std::string atom, std::string outcome) {
  return make(Kind::label, std::move(atom), std::move(outcome), {});
}

SymExprPtr SymExpr::concat(const SymExprPtr& a, const SymExprPtr& b) {
  std::vector<SymExprPtr> kids;
  for (const auto& e : {a, b}) {
    if (e->kind_ == Kind::identity) continue;
    if (e->kind_ == Kind::concat)
      kids.insert(kids.end(), e->children_.begin(), e->children_.end());
    else
      kids.push_back(e);
  }
  if (kids.empty()) return identity();
  if (kids.size() == 1) return kids[0];
  return make(Kind::concat, "", "", std::move(kids));
}

SymExprPtr SymExpr::alt(const SymExprPtr& a, const SymExprPtr& b) {
  std::vector<SymExprPtr> kids;
  for (const auto& e : {a, b}) {
    if (e->kind_ == Kind::alt)
      kids.insert(kids.end(), e->children_.begin(), e->children_.end());
    else
      kids.push_back(e);
  }
  std::sort(kids.begin(), kids.end(),
            [](const SymExprPtr& x, const SymExprPtr& y) { return compare(x, y) < 0; });
  kids.erase(std::unique(kids.begin(), kids.end(),
                         [](const SymExprPtr& x, const SymExprPtr& y) { return equal(x, y); }),
             kids.end());
  if (kids.size() == 1) return kids[0];
  return make(Kind::alt, "", "", std::move(kids));
}

SymExprPtr SymExpr::star(const SymExprPtr& a) {
  if (a->kind_ == Kind::identity) return identity();
  if (a->kind_ == Kind::star) return a;
  return make(Kind::star, "", "", {a});
}

int SymExpr::compare(const SymExprPtr& a, const SymExprPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->hash_ != b->hash_) {
    // Hash order is deterministic across runs (it depends only on structure);
    // unequal hashes imply structural inequality.
    return a->hash_ < b->hash_ ? -1 : 1;
  }
  if (a->kind_ != b->kind_) return a->kind_ < b->kind_ ? -1 : 1;
  if (int c = a->atom_.compare(b->atom_)) return c < 0 ? -1 : 1;
  if (int c = a->outcome_.compare(b->outcome_)) return c < 0 ? -1 : 1;
  if (a->children_.size() != b->children_.size())
    return a->children_.size() < b->children_.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->children_.size(); ++i)
    if (int c = compare(a->children_[i], b->children_[i])) return c;
  return 0;
}

namespace {

// Precedence: alt < concat < star/leaf.
void render(const SymExprPtr& e, int parent_prec, std::string& out) {
  using Kind = SymExpr::Kind;
  switch (e->kind()) {
    case Kind::identity:
      out += '1';
      return;
    case Kind::label:
      out += '{';
      out += e->atom();
      out += ':';
      out += e->outcome();
      out += '}';
      return;
    case Kind::concat: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      bool first = true;
      for (const auto& c : e->children()) {
        if (!first) out += '.';
        first = false;
        render(c, 2, out);
      }
      if (paren) out += ')';
      return;
    }
    case Kind::alt: {
      bool paren = parent_prec > 0;
      if (paren) out += '(';
      bool first = true;
      for (const auto& c : e->children()) {
        if (!first) out += '|';
        first = false;
        render(c, 1, out);
      }
      if (paren) out += ')';
      return;
    }
    case Kind::star:
      render(e->children()[0], 3, out);
      out += '*';
      return;
  }
}

}  // namespace

std::string SymExpr::to_string(const SymExprPtr& e) {
  std::string out;
  render(e, 0, out);
  return out;
}

Relation SymExpr::eval(
    const SymExprPtr& e,
    const std::function<Relation(const std::string&, const std::string&)>& leaf,
    uint32_t n) {
  switch (e->kind_) {
    case Kind::identity:
      return Relation::identity(n);
    case Kind::label:
      return leaf(e->atom_, e->outcome_);
    case Kind::concat: {
      Relation acc = eval(e->children_[0], leaf, n);
      for (std::size_t i = 1; i < e->children_.size(); ++i)
        acc = acc.compose(eval(e->children_[i], leaf, n));
      return acc;
    }
    case Kind::alt: {
      Relation acc(n);
      for (const auto& c : e->children_) acc = acc.union_with(eval(c, leaf, n));
      return acc;
    }
    case Kind::star:
      return eval(e->children_[0], leaf, n).star();
  }
  throw Error("symexpr: unreachable");
}

}  // namespace neg
