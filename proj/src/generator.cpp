#include "neg/generator.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "neg/errors.hpp"

namespace neg {

namespace {

// All randomness goes through rng() % k so results only depend on the
// standard-fixed mt19937_64 stream.
std::size_t pick(std::mt19937_64& rng, std::size_t k) { return rng() % k; }

struct Site {
  std::string atom, outcome;
};

std::vector<Site> non_terminal_sites(const Negotiation& neg) {
  std::vector<Site> out;
  for (const auto& [name, atom] : neg.atoms)
    for (const auto& o : atom.outcomes)
      if (!o.is_terminal()) out.push_back({name, o.name});
  return out;
}

std::vector<Site> all_sites(const Negotiation& neg) {
  std::vector<Site> out;
  for (const auto& [name, atom] : neg.atoms)
    for (const auto& o : atom.outcomes) out.push_back({name, o.name});
  return out;
}

}  // namespace

Negotiation generate(const GenParams& p) {
  if (p.agents < 1 || p.agents > 26) throw Error("generate: agents must be 1..26");
  if (p.atoms < 2) throw Error("generate: need at least two atoms");
  std::mt19937_64 rng(p.seed);

  Negotiation neg;
  for (int i = 0; i < p.agents; ++i) neg.agents.push_back(std::string(1, 'a' + i));

  int outcome_counter = 0;
  auto next_outcome_name = [&] { return "o" + std::to_string(++outcome_counter); };

  auto make_atom = [&](const std::string& name, std::vector<std::string> parties) {
    Atom a;
    a.name = name;
    a.parties = std::move(parties);
    neg.atoms.emplace(name, std::move(a));
  };

  make_atom("n0", neg.agents);
  make_atom("nf", neg.agents);
  neg.initial = "n0";
  neg.final_atom = "nf";
  {
    Outcome o;
    o.name = next_outcome_name();
    for (const auto& a : neg.agents) o.next[a] = {"nf"};
    o.delta = Transformer::label("n0", o.name);
    neg.atom("n0").outcomes.push_back(std::move(o));
  }
  {
    Outcome o;
    o.name = next_outcome_name();
    for (const auto& a : neg.agents) o.next[a] = {};
    o.delta = Transformer::label("nf", o.name);
    neg.atom("nf").outcomes.push_back(std::move(o));
  }

  enum class Op { split, duplicate, self_loop };
  std::vector<Op> ops;
  for (int i = 0; i < p.atoms - 2; ++i) ops.push_back(Op::split);
  int dups = p.extra_outcomes < 0 ? p.atoms / 2 : p.extra_outcomes;
  for (int i = 0; i < dups; ++i) ops.push_back(Op::duplicate);
  for (int i = 0; i < p.loops; ++i) ops.push_back(Op::self_loop);
  for (std::size_t i = ops.size(); i > 1; --i)
    std::swap(ops[i - 1], ops[pick(rng, i)]);

  int atom_counter = 0;
  for (Op op : ops) {
    switch (op) {
      case Op::split: {
        // Detour (n, r) through a fresh atom m for a nonempty party subset:
        // the subset walks n -> m -> old target, everyone else is unchanged.
        // m is enabled as soon as (n, r) fires, so this only delays the run.
        auto sites = non_terminal_sites(neg);
        const Site& s = sites[pick(rng, sites.size())];
        Atom& n = neg.atom(s.atom);
        Outcome& r = *n.find_outcome(s.outcome);
        uint64_t mask = 1 + pick(rng, (uint64_t{1} << n.parties.size()) - 1);
        std::vector<std::string> subset;
        for (std::size_t i = 0; i < n.parties.size(); ++i)
          if (mask >> i & 1) subset.push_back(n.parties[i]);

        std::string m = "n" + std::to_string(++atom_counter);
        make_atom(m, subset);
        Outcome o;
        o.name = next_outcome_name();
        for (const auto& a : subset) o.next[a] = r.next.at(a);
        o.delta = Transformer::label(m, o.name);
        neg.atom(m).outcomes.push_back(std::move(o));
        for (const auto& a : subset) neg.atom(s.atom).find_outcome(s.outcome)->next[a] = {m};
        break;
      }
      case Op::duplicate: {
        auto sites = all_sites(neg);
        const Site& s = sites[pick(rng, sites.size())];
        Atom& n = neg.atom(s.atom);
        Outcome o;
        o.name = next_outcome_name();
        o.next = n.find_outcome(s.outcome)->next;
        o.delta = Transformer::label(s.atom, o.name);
        n.outcomes.push_back(std::move(o));
        break;
      }
      case Op::self_loop: {
        std::vector<std::string> candidates;
        for (const auto& [name, atom] : neg.atoms)
          if (name != neg.final_atom) candidates.push_back(name);
        const std::string& s = candidates[pick(rng, candidates.size())];
        Atom& n = neg.atom(s);
        Outcome o;
        o.name = next_outcome_name();
        for (const auto& a : n.parties) o.next[a] = {s};
        o.delta = Transformer::label(s, o.name);
        n.outcomes.push_back(std::move(o));
        break;
      }
    }
  }

  if (p.states > 0) {
    std::vector<std::vector<std::string>> labels;
    for (int i = 0; i < p.agents; ++i) {
      std::vector<std::string> ls;
      for (int q = 0; q < p.states; ++q) ls.push_back("q" + std::to_string(q));
      labels.push_back(std::move(ls));
    }
    auto space = std::make_shared<StateSpace>(neg.agents, std::move(labels));
    // Random left-total relations on the parties' components, extended
    // identically across every non-party context so the move neither
    // touches nor depends on other agents' states.
    for (auto& [name, atom] : neg.atoms) {
      std::vector<int> pidx;
      for (const auto& a : atom.parties) pidx.push_back(space->agent_index(a));
      for (auto& o : atom.outcomes) {
        std::map<std::vector<uint32_t>, std::vector<std::vector<uint32_t>>> moves;
        std::vector<uint32_t> assign(pidx.size(), 0);
        while (true) {
          std::size_t samples = 1 + pick(rng, 2);
          std::vector<std::vector<uint32_t>> tgts;
          for (std::size_t k = 0; k < samples; ++k) {
            std::vector<uint32_t> t(pidx.size());
            for (auto& v : t) v = static_cast<uint32_t>(pick(rng, p.states));
            tgts.push_back(std::move(t));
          }
          moves.emplace(assign, std::move(tgts));
          std::size_t d = 0;
          for (; d < assign.size(); ++d) {
            if (++assign[d] < static_cast<uint32_t>(p.states)) break;
            assign[d] = 0;
          }
          if (d == assign.size()) break;
        }
        Relation rel(space->size());
        for (uint32_t i = 0; i < space->size(); ++i) {
          auto tuple = space->decode(i);
          std::vector<uint32_t> key(pidx.size());
          for (std::size_t k = 0; k < pidx.size(); ++k) key[k] = tuple[pidx[k]];
          for (const auto& t : moves.at(key)) {
            auto out = tuple;
            for (std::size_t k = 0; k < pidx.size(); ++k) out[pidx[k]] = t[k];
            rel.add(i, space->encode(out));
          }
        }
        o.delta = Transformer::concrete(std::move(rel));
      }
    }
    neg.states = std::move(space);
  }

  return neg;
}

}  // namespace neg
