#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "neg/errors.hpp"
#include "neg/generator.hpp"
#include "neg/structure.hpp"

#include "helpers.hpp"

using namespace neg;

namespace {

// Node sequence of a loop, recovered by walking its edges from the base.
std::set<int> loop_nodes(const ReachabilityGraph& g, const Loop& loop) {
  std::set<int> nodes;
  int at = loop.base;
  nodes.insert(at);
  for (const auto& step : loop.steps) {
    bool moved = false;
    for (int ei : g.out[at]) {
      const auto& e = g.edges[ei];
      if (e.atom == step.atom && e.outcome == step.outcome) {
        at = e.dst;
        nodes.insert(at);
        moved = true;
        break;
      }
    }
    REQUIRE(moved);
  }
  REQUIRE(at == loop.base);
  return nodes;
}

// Independent route to the fragment of s: take the elementary cycles that
// stay within atoms whose parties are within P_s, seed with those containing
// an s-step, then saturate by shared reachability-graph nodes (two cycles
// through a common marking weave into one closed walk). Collect outcomes per
// atom from the saturated set.
std::map<std::string, std::set<std::string>> fragment_via_cycles(
    const Negotiation& neg, const ReachabilityGraph& g, const std::string& s) {
  const auto& ps = neg.atom(s).parties;
  auto within = [&](const std::string& atom) {
    for (const auto& p : neg.atom(atom).parties)
      if (!std::binary_search(ps.begin(), ps.end(), p)) return false;
    return true;
  };

  struct Cyc {
    std::set<int> nodes;
    std::vector<Step> steps;
    bool has_s = false;
  };
  std::vector<Cyc> cycles;
  for (const auto& loop : enumerate_loops(g)) {
    bool ok = true, has_s = false;
    for (const auto& step : loop.steps) {
      if (!within(step.atom)) ok = false;
      if (step.atom == s) has_s = true;
    }
    if (ok) cycles.push_back({loop_nodes(g, loop), loop.steps, has_s});
  }

  std::vector<bool> in(cycles.size(), false);
  std::set<int> reached;
  for (std::size_t i = 0; i < cycles.size(); ++i)
    if (cycles[i].has_s) {
      in[i] = true;
      reached.insert(cycles[i].nodes.begin(), cycles[i].nodes.end());
    }
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      if (in[i]) continue;
      bool touches = std::any_of(cycles[i].nodes.begin(), cycles[i].nodes.end(),
                                 [&](int v) { return reached.count(v) > 0; });
      if (touches) {
        in[i] = true;
        reached.insert(cycles[i].nodes.begin(), cycles[i].nodes.end());
        grew = true;
      }
    }
  }

  std::map<std::string, std::set<std::string>> out;
  for (std::size_t i = 0; i < cycles.size(); ++i)
    if (in[i])
      for (const auto& step : cycles[i].steps) out[step.atom].insert(step.outcome);
  return out;
}

std::map<std::string, std::set<std::string>> as_sets(const Fragment& f) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [atom, outs] : f.outcomes) out[atom] = {outs.begin(), outs.end()};
  return out;
}

}  // namespace

TEST_CASE("atom graph, cyclicity and topological order") {
  Negotiation acyc = test::load_fixture("fdm_acyclic.neg");
  auto g = atom_graph(acyc);
  CHECK(g.at("n0") == std::set<std::string>{"n_FD", "nf"});
  CHECK(g.at("n_FD") == std::set<std::string>{"nf"});
  CHECK(g.at("nf").empty());
  CHECK_FALSE(graph_cyclic(acyc));
  CHECK(topological_order(acyc) ==
        std::vector<std::string>{"n0", "n_FD", "nf"});

  Negotiation cyc = test::load_fixture("fdm_cyclic.neg");
  auto gc = atom_graph(cyc);
  CHECK(gc.at("n2") == std::set<std::string>{"n1", "n2", "nf"});
  CHECK(graph_cyclic(cyc));
  CHECK_THROWS_AS(topological_order(cyc), Error);
}

TEST_CASE("loop enumeration on the fixture corpus") {
  auto count = [](const std::string& f) {
    Negotiation n = test::load_fixture(f);
    return enumerate_loops(reachability_graph(n)).size();
  };
  CHECK(count("fdm_cyclic.neg") == 1);
  CHECK(count("reduction.neg") == 3);
  CHECK(count("one_agent.neg") == 1);
  CHECK(count("restart.neg") == 1);
  // A cyclic atom graph does not imply loops in the behaviour.
  CHECK(count("cyclic_noloops_left.neg") == 0);
  CHECK(count("cyclic_noloop_det.neg") == 0);
  CHECK(count("cyclic_noloops_right.neg") == 1);
}

TEST_CASE("loop steps and synchronizers on the cyclic three-agent fixture") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  auto rg = reachability_graph(n);
  auto loops = enumerate_loops(rg);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].steps == std::vector<Step>{{"n1", "pr"}, {"n2", "r"}});
  CHECK(loops[0].atoms() == std::set<std::string>{"n1", "n2"});
  // n1 lacks M, so it cannot cover the loop; n2 involves everyone.
  CHECK(loop_synchronizers(n, loops[0]) == std::vector<std::string>{"n2"});
  CHECK(synchronizers(n, rg) == std::vector<std::string>{"n2"});
}

TEST_CASE("minimal loops of the nested-loop fixture") {
  Negotiation n = test::load_fixture("reduction.neg");
  auto rg = reachability_graph(n);
  auto loops = enumerate_loops(rg);
  REQUIRE(loops.size() == 3);
  auto mins = minimal_loops(loops);
  REQUIRE(mins.size() == 2);
  std::set<std::set<std::string>> atom_sets;
  for (const auto& l : mins) atom_sets.insert(l.atoms());
  CHECK(atom_sets == std::set<std::set<std::string>>{{"n1", "n3", "n5"},
                                                     {"n2", "n4"}});
  // The long outer loop through n2 and n4 is covered by the short inner one.
  CHECK(synchronizers(n, rg) ==
        std::vector<std::string>{"n1", "n2", "n3", "n4", "n5"});
}

TEST_CASE("a loop can exist with no synchronizer at all") {
  Negotiation n = test::load_fixture("cyclic_noloops_right.neg");
  auto rg = reachability_graph(n);
  auto loops = enumerate_loops(rg);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].atoms() == std::set<std::string>{"n1", "n2"});
  CHECK(loop_synchronizers(n, loops[0]).empty());
  CHECK(synchronizers(n, rg).empty());
  CHECK(select_synchronizer(n, rg) == std::nullopt);
}

TEST_CASE("fragments collect the loops a synchronizer covers") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  auto rg = reachability_graph(n);
  Fragment f = fragment(n, rg, "n2");
  CHECK(as_sets(f) == std::map<std::string, std::set<std::string>>{
                          {"n1", {"pr"}}, {"n2", {"r"}}});
  // n0 sits on no loop, so nothing is collected for it.
  CHECK(fragment(n, rg, "n0").empty());
}

TEST_CASE("fragments absorb sibling loops woven through shared markings") {
  Negotiation n = test::load_fixture("reduction.neg");
  auto rg = reachability_graph(n);
  Fragment inner = fragment(n, rg, "n2");
  CHECK(as_sets(inner) == std::map<std::string, std::set<std::string>>{
                              {"n2", {"a"}}, {"n4", {"b"}}});
  // The n1 fragment also pulls in (n4,a): no elementary cycle through n1
  // uses that edge, but a closed walk weaving the inner n2/n4 cycle into
  // the outer one does.
  Fragment outer = fragment(n, rg, "n1");
  CHECK(as_sets(outer) == std::map<std::string, std::set<std::string>>{
                              {"n1", {"a", "b"}},
                              {"n2", {"a"}},
                              {"n3", {"a"}},
                              {"n4", {"a", "b"}},
                              {"n5", {"b"}}});
}

TEST_CASE("fragment equals the closed-walk closure of elementary cycles") {
  auto check = [](const std::string& f) {
    Negotiation n = test::load_fixture(f);
    auto rg = reachability_graph(n);
    for (const auto& s : synchronizers(n, rg)) {
      CAPTURE(f);
      CAPTURE(s);
      CHECK(as_sets(fragment(n, rg, s)) == fragment_via_cycles(n, rg, s));
    }
  };
  check("fdm_cyclic.neg");
  check("reduction.neg");
  check("restart.neg");
  check("one_agent.neg");

  // Same property across a spread of generated cyclic instances.
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    GenParams p;
    p.seed = seed;
    p.atoms = 10;
    p.agents = 3;
    p.loops = 2;
    Negotiation n = generate(p);
    auto rg = reachability_graph(n);
    for (const auto& s : synchronizers(n, rg)) {
      CAPTURE(seed);
      CAPTURE(s);
      CHECK(as_sets(fragment(n, rg, s)) == fragment_via_cycles(n, rg, s));
    }
  }
}

TEST_CASE("splitting a fragment yields a valid deterministic negotiation") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  auto rg = reachability_graph(n);
  SplitNegotiation sp = split_negotiation(n, fragment(n, rg, "n2"));
  CHECK(sp.synchronizer == "n2");
  CHECK(sp.fresh_final == "n2_sf");
  CHECK(sp.neg.initial == "n2");
  CHECK(sp.neg.final_atom == "n2_sf");
  CHECK(sp.neg.atom_count() == 3);
  CHECK(validate(sp.neg).empty());
  CHECK(is_deterministic(sp.neg));
  // One pass around the loop: edges back to the synchronizer now lead to
  // the fresh final instead, so the split is acyclic.
  CHECK_FALSE(graph_cyclic(sp.neg));
  CHECK(sp.neg.atom("n1").find_outcome("pr")->targets("D") ==
        std::vector<std::string>{"n2_sf"});
  CHECK(sp.neg.atom("n2").find_outcome("r")->targets("D") ==
        std::vector<std::string>{"n1"});
  CHECK(sp.neg.atom("n2").find_outcome("r")->targets("M") ==
        std::vector<std::string>{"n2_sf"});
  // Only the loop outcome survives on the synchronizer inside the split.
  CHECK(sp.neg.atom("n2").outcomes.size() == 1);
}

TEST_CASE("splits restrict the agent set to the synchronizer's parties") {
  Negotiation n = test::load_fixture("reduction.neg");
  auto rg = reachability_graph(n);
  SplitNegotiation sp = split_negotiation(n, fragment(n, rg, "n2"));
  CHECK(sp.neg.agents == std::vector<std::string>{"u"});
  CHECK(sp.neg.atom_count() == 3);
  CHECK(validate(sp.neg).empty());
  CHECK_FALSE(graph_cyclic(sp.neg));
}

TEST_CASE("synchronizer selection prefers the smallest acyclic split") {
  auto pick = [](const std::string& f) {
    Negotiation n = test::load_fixture(f);
    auto rg = reachability_graph(n);
    auto sp = select_synchronizer(n, rg);
    return sp ? sp->synchronizer : std::string("-");
  };
  CHECK(pick("fdm_cyclic.neg") == "n2");
  CHECK(pick("reduction.neg") == "n2");   // 2-atom fragment beats 5-atom ones
  CHECK(pick("restart.neg") == "a1");     // name tie-break between equals
  CHECK(pick("one_agent.neg") == "n1");
  CHECK(pick("cyclic_noloops_left.neg") == "-");
  CHECK(pick("cyclic_noloops_right.neg") == "-");
  CHECK(pick("cyclic_noloop_det.neg") == "-");
}

TEST_CASE("selection falls back to a cyclic split when no candidate is acyclic") {
  // Two sibling self-loop regions woven into one strongly connected
  // component: every candidate split keeps the other region's cycle.
  GenParams p;
  p.seed = 20;
  p.atoms = 12;
  p.agents = 3;
  p.loops = 2;
  Negotiation n = generate(p);
  auto rg = reachability_graph(n);
  auto sp = select_synchronizer(n, rg);
  REQUIRE(sp.has_value());
  CHECK(sp->synchronizer == "n0");
  CHECK(graph_cyclic(sp->neg));
  CHECK(validate(sp->neg).empty());
}
