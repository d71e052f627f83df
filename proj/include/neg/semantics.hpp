#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neg/negotiation.hpp"

namespace neg {

// A marking: per agent (in canonical order), the sorted set of atoms that
// agent is currently ready to engage in. The run starts with every agent
// ready for the initial atom only and ends when every set is empty.
struct Marking {
  std::vector<std::vector<std::string>> ready;

  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;

  bool is_final() const;
  // Canonical text form, e.g. "D:n1|F:n1,n2|M:-" given agent names.
  std::string encode(const std::vector<std::string>& agents) const;
};

Marking initial_marking(const Negotiation& neg);

// An atom is enabled iff every party is ready to engage in it.
bool enables(const Negotiation& neg, const Marking& m, const std::string& atom);

// Fire an enabled atom with one of its outcomes: each party's readiness set is
// replaced by the outcome's target set; other agents are untouched.
Marking fire(const Negotiation& neg, const Marking& m, const std::string& atom,
             const std::string& outcome);

constexpr std::size_t default_node_limit = 1'000'000;

// Explicit graph of all reachable markings. Nodes are sorted by their encoded
// form; edges are sorted by (source, atom, outcome declaration index), which
// also fixes the traversal order used for shortest-witness searches.
struct ReachabilityGraph {
  struct Edge {
    int src = -1;
    int dst = -1;
    std::string atom;
    std::string outcome;
    int outcome_index = 0;
  };

  std::vector<Marking> nodes;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out;  // per node, edge indices in order
  int initial = -1;
  int final_node = -1;  // -1 when the final marking is unreachable

  int node_index(const Marking& m) const;
};

// Breadth-first exploration from the initial marking. Throws LimitError when
// more than `node_limit` markings are reached.
ReachabilityGraph reachability_graph(const Negotiation& neg,
                                     std::size_t node_limit = default_node_limit);

// One step of an occurrence sequence.
struct Step {
  std::string atom;
  std::string outcome;
  bool operator==(const Step&) const = default;
};

std::string format_steps(const std::vector<Step>& steps);

// Soundness by exhaustive search: every atom must be enabled somewhere, and
// the final marking must stay reachable from every reachable marking. The
// verdict carries a witness: either an atom that is never enabled, or a
// shortest occurrence sequence to a marking from which the final marking is
// unreachable (a deadlock when nothing is enabled there at all).
struct SoundnessVerdict {
  enum class Reason { sound, atom_never_enabled, final_unreachable };

  bool sound = false;
  Reason reason = Reason::sound;
  std::string never_enabled_atom;
  std::vector<Step> witness;
  std::string bad_marking;       // encoded marking the witness leads to
  bool bad_is_deadlock = false;  // no atom enabled at the bad marking

  std::string describe() const;
};

SoundnessVerdict soundness_oracle(const Negotiation& neg,
                                  std::size_t node_limit = default_node_limit);

// All reachable markings that enable no atom and are not final.
std::vector<Marking> deadlocks(const Negotiation& neg,
                               std::size_t node_limit = default_node_limit);

// Summary of a sound, concrete-backed negotiation computed directly on the
// reachability graph: least fixpoint of path relations, then one entry per
// final outcome. Keys are outcome names of the final atom.
std::map<std::string, Relation> summary_oracle(const Negotiation& neg,
                                               std::size_t node_limit = default_node_limit);

// Same fixpoint, but keyed by (atom, outcome) over every terminal outcome
// (empty target sets). Tolerates negotiations mid-reduction, where several
// atoms may carry terminal outcomes; requires soundness all the same.
std::map<std::pair<std::string, std::string>, Relation> terminal_summary_oracle(
    const Negotiation& neg, std::size_t node_limit = default_node_limit);

}  // namespace neg
