#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "neg/transformer.hpp"

namespace neg {

// One outcome of an atom: a name, a state transformer and, per party, the set
// of atoms that party is ready to engage in next. Final outcomes have empty
// target sets for every party; deterministic negotiations have singletons
// everywhere else. Target vectors are kept sorted.
struct Outcome {
  std::string name;
  Transformer delta;
  std::map<std::string, std::vector<std::string>> next;

  const std::vector<std::string>& targets(const std::string& agent) const;
  bool is_terminal() const;  // all target sets empty
};

// An atom: the set of parties that must jointly engage in it, plus its
// outcomes in declaration order (rule applications preserve this order, so it
// doubles as the deterministic tie-break order throughout).
struct Atom {
  std::string name;
  std::vector<std::string> parties;  // sorted, unique, nonempty
  std::vector<Outcome> outcomes;

  bool has_party(const std::string& agent) const;
  const Outcome* find_outcome(const std::string& outcome) const;
  Outcome* find_outcome(const std::string& outcome);
  int outcome_index(const std::string& outcome) const;
};

// A negotiation over a fixed set of agents. Atoms are kept in a name-keyed
// map, so every iteration over them is in canonical (sorted) order. The state
// space is present exactly when the outcome transformers are concrete.
struct Negotiation {
  std::vector<std::string> agents;  // sorted, unique
  std::map<std::string, Atom> atoms;
  std::string initial;
  std::string final_atom;
  std::shared_ptr<const StateSpace> states;

  const Atom& atom(const std::string& name) const;
  Atom& atom(const std::string& name);
  bool has_atom(const std::string& name) const { return atoms.count(name) != 0; }

  std::size_t atom_count() const { return atoms.size(); }
  std::size_t outcome_count() const;
};

// Structural and well-formedness checks; returns human-readable violations
// (empty means valid):
//   - agents / parties / initial / final exist and are consistent,
//   - every agent is a party of both the initial and the final atom,
//   - targets reference existing atoms in which that agent participates,
//   - target sets are empty exactly at the final atom,
//   - concrete transformers are left-total and only alter party components.
std::vector<std::string> validate(const Negotiation& neg);

// True when every non-final outcome gives every party exactly one successor
// atom.
bool is_deterministic(const Negotiation& neg);

// Relaxed variant used while rules are running: an outcome may instead have
// uniformly empty targets (it then plays the final role for its atom).
bool is_deterministic_up_to_terminals(const Negotiation& neg);

// Canonical encoding of an outcome's target map, e.g. "F->n1;M->n2,nf" with
// "-" for an empty set. Two outcomes of one atom are mergeable iff their keys
// are equal.
std::string target_key(const Outcome& out);

// `base`, with apostrophes appended until the name is unused in `atom`.
std::string fresh_outcome_name(const Atom& atom, std::string base);

// True when the identifier is usable in the text format: nonempty and free of
// whitespace and reserved punctuation.
bool valid_identifier(const std::string& name);

}  // namespace neg
