#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace neg {

// Joint state space of all agents. Each agent contributes a finite list of
// state labels; a global state is one label per agent, encoded row-major in
// the canonical (sorted) agent order. The total number of global states is
// capped at 64 so that relations over them fit in one machine word per row.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(std::vector<std::string> agents,
             std::vector<std::vector<std::string>> labels);

  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<std::string>& labels_of(std::size_t agent_idx) const {
    return labels_[agent_idx];
  }
  std::size_t agent_count() const { return agents_.size(); }

  // Number of global states (product of the per-agent counts).
  uint32_t size() const { return size_; }

  uint32_t encode(const std::vector<uint32_t>& tuple) const;
  std::vector<uint32_t> decode(uint32_t index) const;

  // Index of an agent name in the canonical order; -1 when absent.
  int agent_index(const std::string& agent) const;
  // Index of a state label of the given agent; -1 when absent.
  int label_index(std::size_t agent_idx, const std::string& label) const;

  // Human-readable tuple, e.g. "(t1,bot,t2)".
  std::string state_name(uint32_t index) const;

  bool operator==(const StateSpace&) const = default;

 private:
  std::vector<std::string> agents_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<uint32_t> stride_;
  uint32_t size_ = 0;
};

// Binary relation over a global state space of up to 64 states, stored as one
// successor bitmask per state.
class Relation {
 public:
  Relation() = default;
  explicit Relation(uint32_t n) : n_(n), rows_(n, 0) {}

  static Relation identity(uint32_t n);
  static Relation from_pairs(uint32_t n,
                             const std::vector<std::pair<uint32_t, uint32_t>>& pairs);

  uint32_t size() const { return n_; }
  bool empty_domain() const { return n_ == 0; }

  void add(uint32_t i, uint32_t j);
  bool at(uint32_t i, uint32_t j) const;
  uint64_t row(uint32_t i) const { return rows_[i]; }

  // Successor mask of a single state.
  uint64_t apply(uint32_t state) const { return rows_[state]; }

  // True when every state has at least one successor.
  bool left_total() const;

  Relation compose(const Relation& other) const;
  Relation union_with(const Relation& other) const;
  // Reflexive-transitive closure.
  Relation star() const;

  bool subset_of(const Relation& other) const;

  std::vector<std::pair<uint32_t, uint32_t>> pairs() const;
  std::size_t pair_count() const;

  bool operator==(const Relation&) const = default;

 private:
  uint32_t n_ = 0;
  std::vector<uint64_t> rows_;
};

}  // namespace neg
