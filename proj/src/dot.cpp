#include "neg/dot.hpp"

#include <map>
#include <set>
#include <sstream>

namespace neg {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot_structure(const Negotiation& neg) {
  std::ostringstream os;
  os << "digraph negotiation {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& [name, atom] : neg.atoms) {
    os << "  \"" << escape(name) << "\" [label=\"" << escape(name) << "\\n";
    for (std::size_t i = 0; i < atom.parties.size(); ++i)
      os << (i ? "," : "") << escape(atom.parties[i]);
    os << '"';
    if (name == neg.initial) os << ", style=bold";
    if (name == neg.final_atom) os << ", peripheries=2";
    os << "];\n";
  }
  // One edge per (source, target), labeled by the outcomes inducing it in
  // declaration order.
  for (const auto& [name, atom] : neg.atoms) {
    std::map<std::string, std::vector<std::string>> labels;  // target -> outcomes
    for (const auto& o : atom.outcomes) {
      std::set<std::string> targets;
      for (const auto& [agent, ts] : o.next)
        for (const auto& t : ts) targets.insert(t);
      for (const auto& t : targets) {
        auto& l = labels[t];
        if (l.empty() || l.back() != o.name) l.push_back(o.name);
      }
    }
    for (const auto& [target, outs] : labels) {
      os << "  \"" << escape(name) << "\" -> \"" << escape(target) << "\" [label=\"";
      for (std::size_t i = 0; i < outs.size(); ++i) os << (i ? "," : "") << escape(outs[i]);
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_dot_reachability(const Negotiation& neg, const ReachabilityGraph& g) {
  std::ostringstream os;
  os << "digraph reachability {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    os << "  m" << i << " [label=\"" << escape(g.nodes[i].encode(neg.agents)) << '"';
    if (static_cast<int>(i) == g.initial) os << ", style=bold";
    if (static_cast<int>(i) == g.final_node) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  m" << e.src << " -> m" << e.dst << " [label=\"" << escape(e.atom) << ':'
       << escape(e.outcome) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace neg
