#include "neg/negotiation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "neg/errors.hpp"

namespace neg {

const std::vector<std::string>& Outcome::targets(const std::string& agent) const {
  static const std::vector<std::string> none;
  auto it = next.find(agent);
  return it == next.end() ? none : it->second;
}

bool Outcome::is_terminal() const {
  for (const auto& [agent, ts] : next)
    if (!ts.empty()) return false;
  return true;
}

bool Atom::has_party(const std::string& agent) const {
  return std::binary_search(parties.begin(), parties.end(), agent);
}

const Outcome* Atom::find_outcome(const std::string& outcome) const {
  for (const auto& o : outcomes)
    if (o.name == outcome) return &o;
  return nullptr;
}

Outcome* Atom::find_outcome(const std::string& outcome) {
  for (auto& o : outcomes)
    if (o.name == outcome) return &o;
  return nullptr;
}

int Atom::outcome_index(const std::string& outcome) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i].name == outcome) return static_cast<int>(i);
  return -1;
}

const Atom& Negotiation::atom(const std::string& name) const {
  auto it = atoms.find(name);
  if (it == atoms.end()) throw Error("unknown atom: " + name);
  return it->second;
}

Atom& Negotiation::atom(const std::string& name) {
  auto it = atoms.find(name);
  if (it == atoms.end()) throw Error("unknown atom: " + name);
  return it->second;
}

std::size_t Negotiation::outcome_count() const {
  std::size_t c = 0;
  for (const auto& [name, a] : atoms) c += a.outcomes.size();
  return c;
}

bool valid_identifier(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    switch (c) {
      case '{': case '}': case '(': case ')': case ':': case ',':
      case '|': case '#': case ';':
        return false;
      default:
        break;
    }
  }
  return true;
}

std::vector<std::string> validate(const Negotiation& neg) {
  std::vector<std::string> out;
  auto bad = [&](const std::string& msg) { out.push_back(msg); };

  if (neg.agents.empty()) bad("no agents declared");
  if (!std::is_sorted(neg.agents.begin(), neg.agents.end()))
    bad("agents not in canonical order");
  std::set<std::string> agent_set(neg.agents.begin(), neg.agents.end());
  if (agent_set.size() != neg.agents.size()) bad("duplicate agent");
  for (const auto& a : neg.agents)
    if (!valid_identifier(a)) bad("invalid agent name '" + a + "'");

  if (!neg.has_atom(neg.initial)) bad("initial atom '" + neg.initial + "' not declared");
  if (!neg.has_atom(neg.final_atom)) bad("final atom '" + neg.final_atom + "' not declared");

  for (const auto& [name, atom] : neg.atoms) {
    if (name != atom.name) bad("atom key/name mismatch for '" + name + "'");
    if (!valid_identifier(name)) bad("invalid atom name '" + name + "'");
    if (atom.parties.empty()) bad("atom '" + name + "' has no parties");
    if (!std::is_sorted(atom.parties.begin(), atom.parties.end()))
      bad("atom '" + name + "' parties not sorted");
    std::set<std::string> pset(atom.parties.begin(), atom.parties.end());
    if (pset.size() != atom.parties.size()) bad("atom '" + name + "' duplicate party");
    for (const auto& p : atom.parties)
      if (!agent_set.count(p)) bad("atom '" + name + "' party '" + p + "' not an agent");

    std::set<std::string> onames;
    for (const auto& o : atom.outcomes) {
      if (!valid_identifier(o.name)) bad("invalid outcome name '" + o.name + "'");
      if (!onames.insert(o.name).second)
        bad("atom '" + name + "' duplicate outcome '" + o.name + "'");
      for (const auto& [agent, ts] : o.next) {
        if (!pset.count(agent))
          bad("atom '" + name + "' outcome '" + o.name + "' gives targets to non-party '" +
              agent + "'");
        if (!std::is_sorted(ts.begin(), ts.end()))
          bad("atom '" + name + "' outcome '" + o.name + "' targets not sorted");
        for (const auto& t : ts) {
          if (!neg.has_atom(t)) {
            bad("atom '" + name + "' outcome '" + o.name + "' targets unknown atom '" + t + "'");
          } else if (!neg.atom(t).has_party(agent)) {
            bad("atom '" + name + "' outcome '" + o.name + "' sends '" + agent +
                "' to atom '" + t + "' it does not participate in");
          }
        }
      }
      // Target sets are empty exactly at the final atom.
      for (const auto& p : atom.parties) {
        bool empty = o.targets(p).empty();
        if (name == neg.final_atom && !empty)
          bad("final atom outcome '" + o.name + "' has targets");
        if (name != neg.final_atom && empty)
          bad("atom '" + name + "' outcome '" + o.name + "' gives no target to party '" + p +
              "'");
      }
    }
  }

  // Every agent takes part in the first and the last decision.
  if (neg.has_atom(neg.initial)) {
    const Atom& ini = neg.atom(neg.initial);
    for (const auto& a : neg.agents)
      if (!ini.has_party(a)) bad("agent '" + a + "' not a party of the initial atom");
  }
  if (neg.has_atom(neg.final_atom)) {
    const Atom& fin = neg.atom(neg.final_atom);
    for (const auto& a : neg.agents)
      if (!fin.has_party(a)) bad("agent '" + a + "' not a party of the final atom");
  }

  // Backend consistency.
  for (const auto& [name, atom] : neg.atoms) {
    for (const auto& o : atom.outcomes) {
      if (o.delta.is_concrete() != (neg.states != nullptr)) {
        bad("atom '" + name + "' outcome '" + o.name + "' transformer backend mismatch");
        continue;
      }
      if (!neg.states) continue;
      const Relation& r = o.delta.rel();
      if (r.size() != neg.states->size()) {
        bad("atom '" + name + "' outcome '" + o.name + "' relation over wrong state count");
        continue;
      }
      if (!r.left_total())
        bad("atom '" + name + "' outcome '" + o.name + "' relation not left-total");
      // Only party components may change.
      for (auto [i, j] : r.pairs()) {
        auto ti = neg.states->decode(i), tj = neg.states->decode(j);
        for (std::size_t k = 0; k < neg.agents.size(); ++k) {
          if (ti[k] != tj[k] && !atom.has_party(neg.agents[k])) {
            bad("atom '" + name + "' outcome '" + o.name + "' relation moves non-party '" +
                neg.agents[k] + "'");
            break;
          }
        }
      }
      // Party moves may not depend on non-party components either: sources
      // that agree on every party state must offer identical party
      // transitions, or steps on disjoint parties stop commuting.
      {
        std::vector<std::size_t> pidx;
        for (std::size_t k = 0; k < neg.agents.size(); ++k)
          if (atom.has_party(neg.agents[k])) pidx.push_back(k);
        auto proj = [&](uint32_t s) {
          auto t = neg.states->decode(s);
          std::vector<uint32_t> out(pidx.size());
          for (std::size_t k = 0; k < pidx.size(); ++k) out[k] = t[pidx[k]];
          return out;
        };
        std::map<std::vector<uint32_t>, std::set<std::vector<uint32_t>>> by_proj;
        bool reads = false;
        for (uint32_t i = 0; i < r.size() && !reads; ++i) {
          std::set<std::vector<uint32_t>> tgts;
          for (uint32_t j = 0; j < r.size(); ++j)
            if (r.at(i, j)) tgts.insert(proj(j));
          auto [it, fresh] = by_proj.try_emplace(proj(i), tgts);
          if (!fresh && it->second != tgts) reads = true;
        }
        if (reads)
          bad("atom '" + name + "' outcome '" + o.name +
              "' relation reads non-party state");
      }
    }
  }

  if (neg.states) {
    if (neg.states->agents() != neg.agents)
      bad("state space declared for different agents");
  }

  return out;
}

bool is_deterministic(const Negotiation& neg) {
  for (const auto& [name, atom] : neg.atoms) {
    if (name == neg.final_atom) continue;
    for (const auto& o : atom.outcomes)
      for (const auto& p : atom.parties)
        if (o.targets(p).size() != 1) return false;
  }
  return true;
}

bool is_deterministic_up_to_terminals(const Negotiation& neg) {
  for (const auto& [name, atom] : neg.atoms) {
    for (const auto& o : atom.outcomes) {
      bool all_single = true, all_empty = true;
      for (const auto& p : atom.parties) {
        std::size_t k = o.targets(p).size();
        if (k != 1) all_single = false;
        if (k != 0) all_empty = false;
      }
      if (!all_single && !all_empty) return false;
    }
  }
  return true;
}

std::string target_key(const Outcome& out) {
  std::ostringstream os;
  bool first_agent = true;
  for (const auto& [agent, ts] : out.next) {
    if (!first_agent) os << ';';
    first_agent = false;
    os << agent << "->";
    if (ts.empty()) {
      os << '-';
    } else {
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) os << ',';
        os << ts[i];
      }
    }
  }
  return os.str();
}

std::string fresh_outcome_name(const Atom& atom, std::string base) {
  while (atom.find_outcome(base)) base += '\'';
  return base;
}

}  // namespace neg
