#include "neg/structure.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "neg/errors.hpp"

namespace neg {

std::map<std::string, std::set<std::string>> atom_graph(const Negotiation& neg) {
  std::map<std::string, std::set<std::string>> g;
  for (const auto& [name, atom] : neg.atoms) {
    auto& succ = g[name];
    for (const auto& o : atom.outcomes)
      for (const auto& [agent, ts] : o.next)
        for (const auto& t : ts) succ.insert(t);
  }
  return g;
}

bool graph_cyclic(const Negotiation& neg) {
  auto g = atom_graph(neg);
  // Colors: 0 unvisited, 1 on stack, 2 done.
  std::map<std::string, int> color;
  std::function<bool(const std::string&)> visit = [&](const std::string& v) {
    color[v] = 1;
    for (const auto& w : g[v]) {
      if (color[w] == 1) return true;
      if (color[w] == 0 && visit(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (const auto& [v, succ] : g)
    if (color[v] == 0 && visit(v)) return true;
  return false;
}

std::vector<std::string> topological_order(const Negotiation& neg) {
  auto g = atom_graph(neg);
  std::map<std::string, int> indeg;
  for (const auto& [v, succ] : g) indeg[v];  // ensure key
  for (const auto& [v, succ] : g)
    for (const auto& w : succ) ++indeg[w];
  std::set<std::string> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.insert(v);
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& w : g[v])
      if (--indeg[w] == 0) ready.insert(w);
  }
  if (order.size() != g.size()) throw Error("topological order on a cyclic graph");
  return order;
}

std::set<std::string> Loop::atoms() const {
  std::set<std::string> out;
  for (const auto& s : steps) out.insert(s.atom);
  return out;
}

namespace {

// Tarjan strongly connected components over an integer adjacency list.
// Returns the component id of each vertex.
std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0, comps = 0;

  // Iterative DFS to keep large graphs off the call stack.
  struct Frame {
    int v;
    std::size_t next_child;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_child < adj[f.v].size()) {
        int w = adj[f.v][f.next_child++];
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        if (low[f.v] == idx[f.v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = comps;
            if (w == f.v) break;
          }
          ++comps;
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<Loop> enumerate_loops(const ReachabilityGraph& g, std::size_t cycle_limit) {
  int n = static_cast<int>(g.nodes.size());
  // Distinct-successor adjacency for the vertex search plus the parallel
  // edges of each vertex pair for the final expansion.
  std::map<std::pair<int, int>, std::vector<int>> parallel;
  std::vector<std::vector<int>> adj(n);
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    auto& p = parallel[{e.src, e.dst}];
    if (p.empty()) adj[e.src].push_back(e.dst);
    p.push_back(static_cast<int>(ei));
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<Loop> out;
  auto emit = [&](const std::vector<int>& cycle) {
    // Expand every combination of parallel edges along the vertex cycle.
    std::size_t k = cycle.size();
    std::vector<const std::vector<int>*> choices(k);
    for (std::size_t i = 0; i < k; ++i)
      choices[i] = &parallel.at({cycle[i], cycle[(i + 1) % k]});
    std::vector<std::size_t> pick(k, 0);
    while (true) {
      if (out.size() >= cycle_limit) throw LimitError("loop enumeration exceeds cycle limit");
      Loop l;
      l.base = cycle[0];
      for (std::size_t i = 0; i < k; ++i) {
        const auto& e = g.edges[(*choices[i])[pick[i]]];
        l.steps.push_back({e.atom, e.outcome});
      }
      out.push_back(std::move(l));
      std::size_t i = 0;
      for (; i < k; ++i) {
        if (++pick[i] < choices[i]->size()) break;
        pick[i] = 0;
      }
      if (i == k) break;
    }
  };

  // Johnson's elementary-cycle search, rooted at each vertex s over the
  // subgraph of vertices >= s restricted to the strongly connected component
  // of s.
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<int>> sub(n);
    for (int v = s; v < n; ++v)
      for (int w : adj[v])
        if (w >= s) sub[v].push_back(w);
    std::vector<int> comp = tarjan_scc(sub);
    std::vector<bool> blocked(n, false);
    std::vector<std::set<int>> blist(n);
    std::vector<int> path;

    std::function<void(int)> unblock = [&](int v) {
      blocked[v] = false;
      for (int w : std::set<int>(blist[v].begin(), blist[v].end())) {
        blist[v].erase(w);
        if (blocked[w]) unblock(w);
      }
    };
    std::function<bool(int)> circuit = [&](int v) -> bool {
      bool found = false;
      path.push_back(v);
      blocked[v] = true;
      for (int w : sub[v]) {
        if (comp[w] != comp[s]) continue;
        if (w == s) {
          emit(path);
          found = true;
        } else if (!blocked[w]) {
          if (circuit(w)) found = true;
        }
      }
      if (found) {
        unblock(v);
      } else {
        for (int w : sub[v])
          if (comp[w] == comp[s]) blist[w].insert(v);
      }
      path.pop_back();
      return found;
    };

    bool s_in_cycle = false;
    for (int w : sub[s])
      if (comp[w] == comp[s]) s_in_cycle = true;
    if (s_in_cycle) circuit(s);
  }
  return out;
}

std::vector<Loop> minimal_loops(const std::vector<Loop>& loops) {
  std::vector<std::set<std::string>> sets;
  sets.reserve(loops.size());
  for (const auto& l : loops) sets.push_back(l.atoms());
  std::vector<Loop> out;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    bool minimal = true;
    for (std::size_t j = 0; j < loops.size() && minimal; ++j) {
      if (i == j || sets[j].size() >= sets[i].size()) continue;
      minimal = !std::includes(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end());
    }
    if (minimal) out.push_back(loops[i]);
  }
  return out;
}

std::vector<std::string> loop_synchronizers(const Negotiation& neg, const Loop& loop) {
  auto atoms = loop.atoms();
  std::vector<std::string> out;
  for (const auto& s : atoms) {
    const Atom& sa = neg.atom(s);
    bool sync = true;
    for (const auto& j : atoms) {
      const Atom& ja = neg.atom(j);
      if (!std::includes(sa.parties.begin(), sa.parties.end(), ja.parties.begin(),
                         ja.parties.end())) {
        sync = false;
        break;
      }
    }
    if (sync) out.push_back(s);
  }
  return out;
}

std::vector<std::string> synchronizers(const Negotiation& neg,
                                       const ReachabilityGraph& g) {
  std::vector<std::string> out;
  for (const auto& [name, atom] : neg.atoms)
    if (!fragment(neg, g, name).empty()) out.push_back(name);
  return out;
}

Fragment fragment(const Negotiation& neg, const ReachabilityGraph& g,
                  const std::string& s) {
  const Atom& sa = neg.atom(s);
  int n = static_cast<int>(g.nodes.size());

  // Steps available to the loops synchronized by s: parties within P_s.
  std::vector<int> restricted;
  std::vector<std::vector<int>> adj(n);
  for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
    const auto& e = g.edges[ei];
    const Atom& ea = neg.atom(e.atom);
    if (!std::includes(sa.parties.begin(), sa.parties.end(), ea.parties.begin(),
                       ea.parties.end()))
      continue;
    restricted.push_back(static_cast<int>(ei));
    adj[e.src].push_back(e.dst);
  }
  std::vector<int> comp = tarjan_scc(adj);

  // A component carries loops synchronized by s iff an s-step closes a cycle
  // inside it; it then contributes every one of its steps (loops need not be
  // elementary, so any step in such a component rides some synchronized loop).
  std::set<int> hot;
  for (int ei : restricted) {
    const auto& e = g.edges[ei];
    if (e.atom == s && comp[e.src] == comp[e.dst]) hot.insert(comp[e.src]);
  }

  Fragment f;
  f.synchronizer = s;
  std::map<std::string, std::set<int>> picked;  // atom -> outcome indices
  for (int ei : restricted) {
    const auto& e = g.edges[ei];
    if (comp[e.src] != comp[e.dst] || !hot.count(comp[e.src])) continue;
    picked[e.atom].insert(e.outcome_index);
  }
  for (const auto& [atom, idxs] : picked) {
    auto& list = f.outcomes[atom];
    for (int i : idxs) list.push_back(neg.atom(atom).outcomes[i].name);
  }
  return f;
}

SplitNegotiation split_negotiation(const Negotiation& neg, const Fragment& frag) {
  if (frag.empty()) throw Error("split: empty fragment");
  const std::string& s = frag.synchronizer;
  const Atom& sa = neg.atom(s);

  std::string nsf = s + "_sf";
  while (frag.outcomes.count(nsf)) nsf += '\'';

  SplitNegotiation split;
  split.synchronizer = s;
  split.fresh_final = nsf;
  split.neg.agents = sa.parties;
  split.neg.initial = s;
  split.neg.final_atom = nsf;

  for (const auto& [aname, onames] : frag.outcomes) {
    const Atom& pa = neg.atom(aname);
    Atom a;
    a.name = aname;
    a.parties = pa.parties;
    for (const auto& oname : onames) {
      const Outcome* po = pa.find_outcome(oname);
      Outcome o;
      o.name = oname;
      o.delta = Transformer::label(aname, oname);
      for (const auto& p : pa.parties) {
        const auto& ts = po->targets(p);
        if (ts.size() != 1)
          throw Error("split: fragment outcome without a unique target");
        const std::string& t = ts[0];
        if (t != s && !frag.outcomes.count(t))
          throw Error("split: fragment not closed under targets");
        o.next[p] = {t == s ? nsf : t};
      }
      a.outcomes.push_back(std::move(o));
    }
    split.neg.atoms.emplace(aname, std::move(a));
  }

  Atom fin;
  fin.name = nsf;
  fin.parties = sa.parties;
  Outcome done;
  done.name = "done";
  done.delta = Transformer::identity_symbolic();
  for (const auto& p : sa.parties) done.next[p] = {};
  fin.outcomes.push_back(std::move(done));
  split.neg.atoms.emplace(nsf, std::move(fin));

  return split;
}

std::optional<SplitNegotiation> select_synchronizer(const Negotiation& neg,
                                                    const ReachabilityGraph& g) {
  std::vector<Fragment> frags;
  for (const auto& [name, atom] : neg.atoms) {
    Fragment f = fragment(neg, g, name);
    if (!f.empty()) frags.push_back(std::move(f));
  }
  std::sort(frags.begin(), frags.end(), [](const Fragment& a, const Fragment& b) {
    if (a.atom_count() != b.atom_count()) return a.atom_count() < b.atom_count();
    return a.synchronizer < b.synchronizer;
  });
  // Prefer a split whose graph is already acyclic. When sibling loop regions
  // reference each other, every candidate split keeps some inner cycle; the
  // smallest fragment is returned and the caller reduces its split
  // recursively, which collapses the inner cycles first.
  std::optional<SplitNegotiation> fallback;
  for (const auto& f : frags) {
    SplitNegotiation split = split_negotiation(neg, f);
    if (!graph_cyclic(split.neg)) return split;
    if (!fallback) fallback = std::move(split);
  }
  return fallback;
}

}  // namespace neg
