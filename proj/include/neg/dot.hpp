#pragma once

#include <string>

#include "neg/semantics.hpp"

namespace neg {

// Atom graph as GraphViz DOT: one box per atom (initial bold, final doubled),
// one edge per atom pair labeled with the outcomes that induce it.
std::string to_dot_structure(const Negotiation& neg);

// Reachability graph as DOT: one node per marking, one edge per step.
std::string to_dot_reachability(const Negotiation& neg, const ReachabilityGraph& g);

}  // namespace neg
