#include "neg/relation.hpp"

#include <algorithm>

#include "neg/errors.hpp"

namespace neg {

StateSpace::StateSpace(std::vector<std::string> agents,
                       std::vector<std::vector<std::string>> labels)
    : agents_(std::move(agents)), labels_(std::move(labels)) {
  if (agents_.size() != labels_.size())
    throw Error("state space: one label list per agent required");
  if (!std::is_sorted(agents_.begin(), agents_.end()))
    throw Error("state space: agents must be in canonical (sorted) order");
  uint64_t size = 1;
  for (const auto& ls : labels_) {
    if (ls.empty()) throw Error("state space: every agent needs at least one state");
    size *= ls.size();
    if (size > 64) throw Error("state space: more than 64 global states");
  }
  size_ = static_cast<uint32_t>(size);
  // Row-major: the last agent varies fastest.
  stride_.assign(agents_.size(), 1);
  for (std::size_t i = agents_.size(); i-- > 1;)
    stride_[i - 1] = stride_[i] * static_cast<uint32_t>(labels_[i].size());
}

uint32_t StateSpace::encode(const std::vector<uint32_t>& tuple) const {
  uint32_t idx = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) idx += tuple[i] * stride_[i];
  return idx;
}

std::vector<uint32_t> StateSpace::decode(uint32_t index) const {
  std::vector<uint32_t> tuple(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    tuple[i] = index / stride_[i] % static_cast<uint32_t>(labels_[i].size());
  }
  return tuple;
}

int StateSpace::agent_index(const std::string& agent) const {
  auto it = std::lower_bound(agents_.begin(), agents_.end(), agent);
  if (it == agents_.end() || *it != agent) return -1;
  return static_cast<int>(it - agents_.begin());
}

int StateSpace::label_index(std::size_t agent_idx, const std::string& label) const {
  const auto& ls = labels_[agent_idx];
  auto it = std::find(ls.begin(), ls.end(), label);
  if (it == ls.end()) return -1;
  return static_cast<int>(it - ls.begin());
}

std::string StateSpace::state_name(uint32_t index) const {
  auto tuple = decode(index);
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += ',';
    out += labels_[i][tuple[i]];
  }
  out += ')';
  return out;
}

Relation Relation::identity(uint32_t n) {
  Relation r(n);
  for (uint32_t i = 0; i < n; ++i) r.rows_[i] = uint64_t{1} << i;
  return r;
}

Relation Relation::from_pairs(uint32_t n,
                              const std::vector<std::pair<uint32_t, uint32_t>>& pairs) {
  Relation r(n);
  for (auto [i, j] : pairs) r.add(i, j);
  return r;
}

void Relation::add(uint32_t i, uint32_t j) {
  if (i >= n_ || j >= n_) throw Error("relation: state index out of range");
  rows_[i] |= uint64_t{1} << j;
}

bool Relation::at(uint32_t i, uint32_t j) const {
  return (rows_[i] >> j) & 1;
}

bool Relation::left_total() const {
  for (uint32_t i = 0; i < n_; ++i)
    if (rows_[i] == 0) return false;
  return true;
}

Relation Relation::compose(const Relation& other) const {
  Relation out(n_);
  for (uint32_t i = 0; i < n_; ++i) {
    uint64_t row = rows_[i];
    uint64_t acc = 0;
    while (row) {
      uint32_t j = static_cast<uint32_t>(__builtin_ctzll(row));
      row &= row - 1;
      acc |= other.rows_[j];
    }
    out.rows_[i] = acc;
  }
  return out;
}

Relation Relation::union_with(const Relation& other) const {
  Relation out(n_);
  for (uint32_t i = 0; i < n_; ++i) out.rows_[i] = rows_[i] | other.rows_[i];
  return out;
}

Relation Relation::star() const {
  Relation out = *this;
  for (uint32_t i = 0; i < n_; ++i) out.rows_[i] |= uint64_t{1} << i;
  // Warshall over bitmask rows.
  for (uint32_t k = 0; k < n_; ++k) {
    for (uint32_t i = 0; i < n_; ++i) {
      if (out.at(i, k)) out.rows_[i] |= out.rows_[k];
    }
  }
  return out;
}

bool Relation::subset_of(const Relation& other) const {
  for (uint32_t i = 0; i < n_; ++i)
    if (rows_[i] & ~other.rows_[i]) return false;
  return true;
}

std::vector<std::pair<uint32_t, uint32_t>> Relation::pairs() const {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t i = 0; i < n_; ++i)
    for (uint32_t j = 0; j < n_; ++j)
      if (at(i, j)) out.emplace_back(i, j);
  return out;
}

std::size_t Relation::pair_count() const {
  std::size_t c = 0;
  for (uint32_t i = 0; i < n_; ++i) c += static_cast<std::size_t>(__builtin_popcountll(rows_[i]));
  return c;
}

}  // namespace neg
