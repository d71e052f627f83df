#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "neg/semantics.hpp"

namespace neg {

// Static successor graph over atoms: n -> n' iff some outcome of n sends some
// party to n'.
std::map<std::string, std::set<std::string>> atom_graph(const Negotiation& neg);

bool graph_cyclic(const Negotiation& neg);

// Kahn topological order with lexicographic tie-break; throws on cycles.
std::vector<std::string> topological_order(const Negotiation& neg);

// A loop: an occurrence sequence that returns to the reachable marking it
// started from. Enumerated loops are elementary cycles of the reachability
// graph, rooted at their smallest node index.
struct Loop {
  int base = -1;
  std::vector<Step> steps;

  std::set<std::string> atoms() const;
};

constexpr std::size_t default_cycle_limit = 100'000;

// All elementary cycles (by edges, so parallel outcomes count separately).
// Throws LimitError beyond `cycle_limit` cycles.
std::vector<Loop> enumerate_loops(const ReachabilityGraph& g,
                                  std::size_t cycle_limit = default_cycle_limit);

// Loops whose atom sets are inclusion-minimal within `loops`.
std::vector<Loop> minimal_loops(const std::vector<Loop>& loops);

// Atoms s on the loop such that every atom on the loop has parties within
// P_s. Sorted.
std::vector<std::string> loop_synchronizers(const Negotiation& neg, const Loop& loop);

// Atoms that synchronize at least one loop. Sorted.
std::vector<std::string> synchronizers(const Negotiation& neg,
                                       const ReachabilityGraph& g);

// The union of all loops synchronized by s, collected as outcome sets per
// atom (declaration order). Computed without enumerating loops: restrict the
// reachability graph to steps whose atom's parties are within P_s; a strongly
// connected component of the restriction contributes all its steps iff it
// contains an s-step.
struct Fragment {
  std::string synchronizer;
  std::map<std::string, std::vector<std::string>> outcomes;

  bool empty() const { return outcomes.empty(); }
  std::size_t atom_count() const { return outcomes.size(); }
};

Fragment fragment(const Negotiation& neg, const ReachabilityGraph& g,
                  const std::string& s);

// The split of a deterministic negotiation at a synchronizer: agents P_s,
// atoms and outcomes of the fragment, s as initial atom, and a fresh
// placeholder final atom (identity transformer, one `done` outcome) standing
// in for "control returns to s". Split transformers are fresh symbolic
// labels; replays recompute parent transformers from parent outcomes.
struct SplitNegotiation {
  Negotiation neg;
  std::string synchronizer;
  std::string fresh_final;
};

SplitNegotiation split_negotiation(const Negotiation& neg, const Fragment& frag);

// The reduction's pivot choice: the synchronizer with the fewest fragment
// atoms (ties break on the atom name), preferring candidates whose split has
// an acyclic atom graph. When every candidate's split keeps an inner cycle —
// sibling loop regions that weave into each other's fragments — the smallest
// fragment is returned anyway and the caller reduces its split recursively.
// nullopt iff no atom synchronizes a loop.
std::optional<SplitNegotiation> select_synchronizer(const Negotiation& neg,
                                                    const ReachabilityGraph& g);

}  // namespace neg
