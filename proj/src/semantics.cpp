#include "neg/semantics.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "neg/errors.hpp"

namespace neg {

bool Marking::is_final() const {
  for (const auto& r : ready)
    if (!r.empty()) return false;
  return true;
}

std::string Marking::encode(const std::vector<std::string>& agents) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < ready.size(); ++i) {
    if (i) os << '|';
    os << agents[i] << ':';
    if (ready[i].empty()) {
      os << '-';
    } else {
      for (std::size_t j = 0; j < ready[i].size(); ++j) {
        if (j) os << ',';
        os << ready[i][j];
      }
    }
  }
  return os.str();
}

Marking initial_marking(const Negotiation& neg) {
  Marking m;
  m.ready.assign(neg.agents.size(), {neg.initial});
  return m;
}

namespace {

int agent_index(const Negotiation& neg, const std::string& agent) {
  auto it = std::lower_bound(neg.agents.begin(), neg.agents.end(), agent);
  if (it == neg.agents.end() || *it != agent)
    throw Error("unknown agent: " + agent);
  return static_cast<int>(it - neg.agents.begin());
}

}  // namespace

bool enables(const Negotiation& neg, const Marking& m, const std::string& atom) {
  const Atom& a = neg.atom(atom);
  for (const auto& p : a.parties) {
    const auto& ready = m.ready[agent_index(neg, p)];
    if (!std::binary_search(ready.begin(), ready.end(), atom)) return false;
  }
  return true;
}

Marking fire(const Negotiation& neg, const Marking& m, const std::string& atom,
             const std::string& outcome) {
  if (!enables(neg, m, atom)) throw Error("fire: atom '" + atom + "' not enabled");
  const Atom& a = neg.atom(atom);
  const Outcome* o = a.find_outcome(outcome);
  if (!o) throw Error("fire: unknown outcome '" + outcome + "' of atom '" + atom + "'");
  Marking next = m;
  for (const auto& p : a.parties) next.ready[agent_index(neg, p)] = o->targets(p);
  return next;
}

ReachabilityGraph reachability_graph(const Negotiation& neg, std::size_t node_limit) {
  struct RawEdge {
    int src, dst;
    std::string atom, outcome;
    int outcome_index;
  };
  std::map<Marking, int> seen;
  std::vector<Marking> nodes;
  std::vector<RawEdge> raw;
  std::deque<int> work;

  Marking m0 = initial_marking(neg);
  seen.emplace(m0, 0);
  nodes.push_back(m0);
  work.push_back(0);

  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    Marking cur = nodes[u];  // copy: nodes may reallocate below
    for (const auto& [aname, atom] : neg.atoms) {
      if (!enables(neg, cur, aname)) continue;
      for (std::size_t oi = 0; oi < atom.outcomes.size(); ++oi) {
        Marking nxt = fire(neg, cur, aname, atom.outcomes[oi].name);
        auto [it, fresh] = seen.emplace(nxt, static_cast<int>(nodes.size()));
        if (fresh) {
          if (nodes.size() >= node_limit)
            throw LimitError("reachability graph exceeds node limit");
          nodes.push_back(nxt);
          work.push_back(it->second);
        }
        raw.push_back({u, it->second, aname, atom.outcomes[oi].name, static_cast<int>(oi)});
      }
    }
  }

  // Renumber nodes by canonical encoding.
  std::vector<int> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> enc(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) enc[i] = nodes[i].encode(neg.agents);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return enc[a] < enc[b]; });
  std::vector<int> pos(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);

  ReachabilityGraph g;
  g.nodes.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) g.nodes[pos[i]] = std::move(nodes[i]);
  g.initial = pos[0];
  g.final_node = -1;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].is_final()) g.final_node = static_cast<int>(i);

  for (const auto& e : raw)
    g.edges.push_back({pos[e.src], pos[e.dst], e.atom, e.outcome, e.outcome_index});
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.atom != b.atom) return a.atom < b.atom;
    if (a.outcome_index != b.outcome_index) return a.outcome_index < b.outcome_index;
    return a.dst < b.dst;
  });
  g.out.assign(g.nodes.size(), {});
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    g.out[g.edges[i].src].push_back(static_cast<int>(i));
  return g;
}

int ReachabilityGraph::node_index(const Marking& m) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == m) return static_cast<int>(i);
  return -1;
}

std::string format_steps(const std::vector<Step>& steps) {
  std::string out;
  for (const auto& s : steps) {
    out += '(';
    out += s.atom;
    out += ',';
    out += s.outcome;
    out += ')';
  }
  return out;
}

namespace {

// Nodes from which the final marking is reachable (all nodes good when there
// is no final node only if there are no nodes at all).
std::vector<bool> can_reach_final(const ReachabilityGraph& g) {
  std::vector<bool> good(g.nodes.size(), false);
  if (g.final_node < 0) return good;
  std::vector<std::vector<int>> rev(g.nodes.size());
  for (const auto& e : g.edges) rev[e.dst].push_back(e.src);
  std::deque<int> work{g.final_node};
  good[g.final_node] = true;
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    for (int v : rev[u]) {
      if (!good[v]) {
        good[v] = true;
        work.push_back(v);
      }
    }
  }
  return good;
}

bool marking_enables_something(const Negotiation& neg, const Marking& m) {
  for (const auto& [aname, atom] : neg.atoms)
    if (enables(neg, m, aname)) return true;
  return false;
}

}  // namespace

std::string SoundnessVerdict::describe() const {
  if (sound) return "sound";
  if (reason == Reason::atom_never_enabled)
    return "atom '" + never_enabled_atom + "' is never enabled";
  std::string what = bad_is_deadlock ? "deadlock" : "no completion possible";
  return what + " at " + bad_marking + " after " +
         (witness.empty() ? std::string("<initial marking>") : format_steps(witness));
}

SoundnessVerdict soundness_oracle(const Negotiation& neg, std::size_t node_limit) {
  ReachabilityGraph g = reachability_graph(neg, node_limit);
  SoundnessVerdict v;

  // (a) every atom enabled at some reachable marking.
  for (const auto& [aname, atom] : neg.atoms) {
    bool enabled_somewhere = false;
    for (const auto& m : g.nodes) {
      if (enables(neg, m, aname)) {
        enabled_somewhere = true;
        break;
      }
    }
    if (!enabled_somewhere) {
      v.sound = false;
      v.reason = SoundnessVerdict::Reason::atom_never_enabled;
      v.never_enabled_atom = aname;
      return v;
    }
  }

  // (b) the final marking is reachable from every reachable marking.
  std::vector<bool> good = can_reach_final(g);
  bool all_good = true;
  for (bool b : good) all_good = all_good && b;
  if (all_good && !g.nodes.empty()) {
    v.sound = true;
    v.reason = SoundnessVerdict::Reason::sound;
    return v;
  }

  // Shortest occurrence sequence to a bad marking: breadth-first layers in
  // edge order; ties at the minimal depth break on the encoded marking.
  std::vector<int> parent_edge(g.nodes.size(), -1);
  std::vector<int> depth(g.nodes.size(), -1);
  std::deque<int> work{g.initial};
  depth[g.initial] = 0;
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    for (int ei : g.out[u]) {
      int w = g.edges[ei].dst;
      if (depth[w] < 0) {
        depth[w] = depth[u] + 1;
        parent_edge[w] = ei;
        work.push_back(w);
      }
    }
  }
  int best = -1;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (good[i] || depth[i] < 0) continue;
    if (best < 0 || depth[i] < depth[best] ||
        (depth[i] == depth[best] &&
         g.nodes[i].encode(neg.agents) < g.nodes[best].encode(neg.agents)))
      best = static_cast<int>(i);
  }
  v.sound = false;
  v.reason = SoundnessVerdict::Reason::final_unreachable;
  v.bad_marking = g.nodes[best].encode(neg.agents);
  v.bad_is_deadlock = !marking_enables_something(neg, g.nodes[best]);
  std::vector<Step> steps;
  for (int n = best; parent_edge[n] >= 0; n = g.edges[parent_edge[n]].src)
    steps.push_back({g.edges[parent_edge[n]].atom, g.edges[parent_edge[n]].outcome});
  std::reverse(steps.begin(), steps.end());
  v.witness = std::move(steps);
  return v;
}

std::vector<Marking> deadlocks(const Negotiation& neg, std::size_t node_limit) {
  ReachabilityGraph g = reachability_graph(neg, node_limit);
  std::vector<Marking> out;
  for (const auto& m : g.nodes)
    if (!m.is_final() && !marking_enables_something(neg, m)) out.push_back(m);
  return out;
}

namespace {

// Least fixpoint of path relations over the reachability graph, then one
// summary entry per edge into the final marking, keyed by (atom, outcome).
std::map<std::pair<std::string, std::string>, Relation> summary_fixpoint(
    const Negotiation& neg, std::size_t node_limit) {
  if (!neg.states) throw Error("summary oracle needs the concrete backend");
  ReachabilityGraph g = reachability_graph(neg, node_limit);

  std::vector<bool> good = can_reach_final(g);
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (!good[i]) throw Error("summary oracle requires a sound negotiation");
  for (const auto& [aname, atom] : neg.atoms) {
    bool enabled_somewhere = false;
    for (const auto& m : g.nodes)
      if (enables(neg, m, aname)) {
        enabled_somewhere = true;
        break;
      }
    if (!enabled_somewhere) throw Error("summary oracle requires a sound negotiation");
  }

  uint32_t n = neg.states->size();
  std::vector<Relation> reach(g.nodes.size(), Relation(n));
  reach[g.initial] = Relation::identity(n);
  std::deque<int> work{g.initial};
  std::vector<bool> queued(g.nodes.size(), false);
  queued[g.initial] = true;
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    queued[u] = false;
    for (int ei : g.out[u]) {
      const auto& e = g.edges[ei];
      if (e.dst == g.final_node) continue;  // summaries collected below
      const Relation& d = neg.atom(e.atom).find_outcome(e.outcome)->delta.rel();
      Relation cand = reach[u].compose(d).union_with(reach[e.dst]);
      if (!(cand == reach[e.dst])) {
        reach[e.dst] = std::move(cand);
        if (!queued[e.dst]) {
          queued[e.dst] = true;
          work.push_back(e.dst);
        }
      }
    }
  }

  std::map<std::pair<std::string, std::string>, Relation> result;
  for (const auto& e : g.edges) {
    if (e.dst != g.final_node) continue;
    const Relation& d = neg.atom(e.atom).find_outcome(e.outcome)->delta.rel();
    Relation r = reach[e.src].compose(d);
    auto key = std::make_pair(e.atom, e.outcome);
    auto it = result.find(key);
    if (it == result.end())
      result.emplace(key, std::move(r));
    else
      it->second = it->second.union_with(r);
  }
  return result;
}

}  // namespace

std::map<std::string, Relation> summary_oracle(const Negotiation& neg,
                                               std::size_t node_limit) {
  auto by_site = summary_fixpoint(neg, node_limit);
  std::map<std::string, Relation> out;
  for (auto& [key, rel] : by_site) {
    if (key.first != neg.final_atom)
      throw Error("terminal outcome outside the final atom; use terminal_summary_oracle");
    out.emplace(key.second, std::move(rel));
  }
  return out;
}

std::map<std::pair<std::string, std::string>, Relation> terminal_summary_oracle(
    const Negotiation& neg, std::size_t node_limit) {
  return summary_fixpoint(neg, node_limit);
}

}  // namespace neg
