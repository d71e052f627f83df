#include "doctest.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "neg/errors.hpp"
#include "neg/semantics.hpp"

#include "helpers.hpp"

using namespace neg;

TEST_CASE("markings, enabling and firing on the cyclic three-agent fixture") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  Marking m0 = initial_marking(n);
  CHECK(m0.encode(n.agents) == "D:n0|F:n0|M:n0");
  CHECK_FALSE(m0.is_final());

  CHECK(enables(n, m0, "n0"));
  CHECK_FALSE(enables(n, m0, "n1"));
  CHECK_FALSE(enables(n, m0, "nf"));

  Marking m1 = fire(n, m0, "n0", "yes");
  CHECK(m1.encode(n.agents) == "D:n1|F:n1|M:n2");
  CHECK(enables(n, m1, "n1"));
  CHECK_FALSE(enables(n, m1, "n2"));  // M is there, D and F are not

  Marking m2 = fire(n, m1, "n1", "pr");
  CHECK(m2.encode(n.agents) == "D:n2|F:n2|M:n2");
  Marking m3 = fire(n, m2, "n2", "yes");
  Marking mf = fire(n, m3, "nf", "end");
  CHECK(mf.is_final());
  CHECK(mf.encode(n.agents) == "D:-|F:-|M:-");
}

TEST_CASE("nondeterministic outcomes leave agents ready for several atoms") {
  Negotiation n = test::load_fixture("fdm_nondet.neg");
  Marking m1 = fire(n, initial_marking(n), "n0", "st");
  CHECK(m1.encode(n.agents) == "D:n_FD|F:n_FD|M:n_DM,nf");
  // M's readiness covers both continuations: the direct finish...
  Marking done = fire(n, m1, "n_FD", "yes");
  CHECK(enables(n, done, "nf"));
  // ...and the mediator round.
  Marking med = fire(n, m1, "n_FD", "am");
  CHECK(enables(n, med, "n_DM"));
}

TEST_CASE("reachability graph of the cyclic fixture, frozen shape") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  ReachabilityGraph g = reachability_graph(n);
  REQUIRE(g.nodes.size() == 5);
  REQUIRE(g.edges.size() == 6);

  // Nodes are sorted by marking; indices are therefore stable.
  CHECK(g.nodes[0].encode(n.agents) == "D:-|F:-|M:-");
  CHECK(g.nodes[1].encode(n.agents) == "D:n0|F:n0|M:n0");
  CHECK(g.nodes[2].encode(n.agents) == "D:n1|F:n1|M:n2");
  CHECK(g.nodes[3].encode(n.agents) == "D:n2|F:n2|M:n2");
  CHECK(g.nodes[4].encode(n.agents) == "D:nf|F:nf|M:nf");
  CHECK(g.initial == 1);
  CHECK(g.final_node == 0);
  CHECK(g.node_index(g.nodes[3]) == 3);

  std::set<std::tuple<int, int, std::string, std::string>> edges;
  for (const auto& e : g.edges) edges.insert({e.src, e.dst, e.atom, e.outcome});
  std::set<std::tuple<int, int, std::string, std::string>> expected = {
      {1, 2, "n0", "yes"}, {1, 4, "n0", "no"}, {2, 3, "n1", "pr"},
      {3, 2, "n2", "r"},   {3, 4, "n2", "yes"}, {4, 0, "nf", "end"}};
  CHECK(edges == expected);
}

TEST_CASE("reachability exploration respects the node limit") {
  Negotiation n = test::load_fixture("fdm_cyclic.neg");
  CHECK_THROWS_AS(reachability_graph(n, 2), LimitError);
}

TEST_CASE("soundness oracle verdicts across the fixture corpus") {
  auto sound = [](const std::string& f) {
    return soundness_oracle(test::load_fixture(f)).sound;
  };
  CHECK(sound("fdm_cyclic.neg"));
  CHECK(sound("fdm_acyclic.neg"));
  CHECK(sound("fdm_nondet.neg"));
  CHECK(sound("fdm_concrete.neg"));
  CHECK(sound("reduction.neg"));
  CHECK(sound("one_agent.neg"));
  CHECK(sound("restart.neg"));
  CHECK(sound("single.neg"));
  CHECK(sound("cyclic_noloops_left.neg"));
  CHECK(sound("cyclic_noloops_right.neg"));
  CHECK_FALSE(sound("fdm_deadlock.neg"));
  CHECK_FALSE(sound("fdm_unsound.neg"));
  CHECK_FALSE(sound("never_enabled.neg"));
  CHECK_FALSE(sound("only_selfloop.neg"));
  CHECK_FALSE(sound("cyclic_noloop_det.neg"));
}

TEST_CASE("deadlock witness: shortest run into a stuck marking") {
  auto v = soundness_oracle(test::load_fixture("fdm_deadlock.neg"));
  REQUIRE_FALSE(v.sound);
  CHECK(v.reason == SoundnessVerdict::Reason::final_unreachable);
  CHECK(v.bad_is_deadlock);
  CHECK(format_steps(v.witness) == "(n0,st)(n_FD,yes)");
  CHECK(v.bad_marking == "D:nf|F:nf|M:n_DM");
  CHECK(v.describe() == "deadlock at D:nf|F:nf|M:n_DM after (n0,st)(n_FD,yes)");

  auto dl = deadlocks(test::load_fixture("fdm_deadlock.neg"));
  bool found = false;
  for (const auto& m : dl)
    if (m.encode({"D", "F", "M"}) == "D:nf|F:nf|M:n_DM") found = true;
  CHECK(found);
  CHECK(deadlocks(test::load_fixture("fdm_cyclic.neg")).empty());
}

TEST_CASE("livelock witness: completion impossible without a deadlock") {
  auto v = soundness_oracle(test::load_fixture("fdm_unsound.neg"));
  REQUIRE_FALSE(v.sound);
  CHECK(v.reason == SoundnessVerdict::Reason::final_unreachable);
  CHECK_FALSE(v.bad_is_deadlock);
  CHECK(format_steps(v.witness) == "(n0,yes)(n1,pr)(n2,r)");
  CHECK(v.bad_marking == "D:n1|F:n1|M:nf");
}

TEST_CASE("never-enabled atoms are reported by name") {
  auto v = soundness_oracle(test::load_fixture("never_enabled.neg"));
  REQUIRE_FALSE(v.sound);
  CHECK(v.reason == SoundnessVerdict::Reason::atom_never_enabled);
  CHECK(v.never_enabled_atom == "lost");
  CHECK(v.describe() == "atom 'lost' is never enabled");
}

TEST_CASE("summary oracle equals the union of per-branch relations") {
  auto built = test::build_fdm_concrete();
  auto summary = summary_oracle(built.neg);
  REQUIRE(summary.size() == 1);
  REQUIRE(summary.count("end") == 1);

  // Complete runs are st.yes.end, st.no.end, st.am.yes.end and st.am.no.end;
  // st, am and end carry identity transformers, so the summary is the plain
  // union of the four decision relations.
  Relation expected = built.yes_fd.union_with(built.no_fd)
                          .union_with(built.yes_dm)
                          .union_with(built.no_dm);
  CHECK(summary.at("end") == expected);

  // Spot check: from (t2, t1, bot), a successful negotiation between D and F
  // can settle on any value between the two proposals.
  const StateSpace& sp = *built.neg.states;
  uint32_t src = sp.encode({2, 1, 0});
  CHECK(built.yes_fd.at(src, sp.encode({1, 1, 0})));
  CHECK(built.yes_fd.at(src, sp.encode({2, 2, 0})));
  CHECK(summary.at("end").at(src, sp.encode({1, 1, 0})));
  CHECK(summary.at("end").at(src, sp.encode({2, 2, 0})));

  auto by_terminal = terminal_summary_oracle(built.neg);
  REQUIRE(by_terminal.size() == 1);
  CHECK(by_terminal.at({"nf", "end"}) == expected);
}

TEST_CASE("summary oracle preconditions") {
  // Needs concrete relations.
  CHECK_THROWS_AS(summary_oracle(test::load_fixture("fdm_cyclic.neg")), Error);
  // Needs soundness.
  auto built = test::build_fdm_concrete();
  built.neg.atom("n0").outcomes[0].next["M"] = {"n_DM"};
  CHECK_THROWS_AS(summary_oracle(built.neg), Error);
}
