#pragma once

// Shared plumbing for the unit tests: fixture loading and the hand-built
// concrete negotiation that tests/fixtures/fdm_concrete.neg serializes.

#include <memory>
#include <stdexcept>
#include <string>

#include "neg/format.hpp"
#include "neg/negotiation.hpp"
#include "neg/relation.hpp"
#include "neg/transformer.hpp"

namespace neg::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(NEG_FIXTURE_DIR) + "/" + name;
}

inline Negotiation load_fixture(const std::string& name) {
  ParseResult pr = parse_negotiation_file(fixture_path(name));
  if (!pr.negotiation) {
    std::string why = "fixture " + name + " failed to parse";
    for (const auto& d : pr.diagnostics)
      why += "\n  line " + std::to_string(d.line) + ": " + d.message;
    throw std::runtime_error(why);
  }
  return std::move(*pr.negotiation);
}

// The three-agent negotiation with concrete transformers over states
// {bot, t1, t2} per agent. Kept in sync with fdm_concrete.neg by a
// serialization-equality test.
struct FdmConcrete {
  Negotiation neg;
  Relation yes_fd, no_fd, yes_dm, no_dm;
};

inline FdmConcrete build_fdm_concrete() {
  auto space = std::make_shared<StateSpace>(
      std::vector<std::string>{"D", "F", "M"},
      std::vector<std::vector<std::string>>{
          {"bot", "t1", "t2"}, {"bot", "t1", "t2"}, {"bot", "t1", "t2"}});
  const uint32_t bot = 0;
  auto identity = Transformer::concrete(Relation::identity(space->size()));

  // yes at n_FD: if F's slot and D's slot hold proposals with F <= D, both
  // move to every value in between; otherwise both drop to bot. M untouched.
  Relation yes_fd(space->size());
  Relation no_fd(space->size());
  for (uint32_t d = 0; d < 3; ++d)
    for (uint32_t f = 0; f < 3; ++f)
      for (uint32_t m = 0; m < 3; ++m) {
        uint32_t src = space->encode({d, f, m});
        no_fd.add(src, space->encode({bot, bot, m}));
        if (f >= 1 && d >= 1 && f <= d) {
          for (uint32_t t = f; t <= d; ++t)
            yes_fd.add(src, space->encode({t, t, m}));
        } else {
          yes_fd.add(src, space->encode({bot, bot, m}));
        }
      }

  // yes at n_DM: the mediator adopts D's slot; no: D and M drop to bot.
  Relation yes_dm(space->size());
  Relation no_dm(space->size());
  for (uint32_t d = 0; d < 3; ++d)
    for (uint32_t f = 0; f < 3; ++f)
      for (uint32_t m = 0; m < 3; ++m) {
        uint32_t src = space->encode({d, f, m});
        yes_dm.add(src, space->encode({d, f, d}));
        no_dm.add(src, space->encode({bot, f, bot}));
      }

  Negotiation n;
  n.agents = {"D", "F", "M"};
  n.states = space;
  n.initial = "n0";
  n.final_atom = "nf";

  Atom n0{"n0", {"D", "F", "M"}, {}};
  n0.outcomes.push_back(Outcome{
      "st", identity, {{"D", {"n_FD"}}, {"F", {"n_FD"}}, {"M", {"n_DM", "nf"}}}});
  Atom nfd{"n_FD", {"D", "F"}, {}};
  nfd.outcomes.push_back(Outcome{
      "yes", Transformer::concrete(yes_fd), {{"D", {"nf"}}, {"F", {"nf"}}}});
  nfd.outcomes.push_back(Outcome{
      "no", Transformer::concrete(no_fd), {{"D", {"nf"}}, {"F", {"nf"}}}});
  nfd.outcomes.push_back(Outcome{"am", identity, {{"D", {"n_DM"}}, {"F", {"nf"}}}});
  Atom ndm{"n_DM", {"D", "M"}, {}};
  ndm.outcomes.push_back(Outcome{
      "yes", Transformer::concrete(yes_dm), {{"D", {"nf"}}, {"M", {"nf"}}}});
  ndm.outcomes.push_back(Outcome{
      "no", Transformer::concrete(no_dm), {{"D", {"nf"}}, {"M", {"nf"}}}});
  Atom nf{"nf", {"D", "F", "M"}, {}};
  nf.outcomes.push_back(Outcome{"end", identity, {}});

  n.atoms["n0"] = n0;
  n.atoms["n_FD"] = nfd;
  n.atoms["n_DM"] = ndm;
  n.atoms["nf"] = nf;
  return {std::move(n), yes_fd, no_fd, yes_dm, no_dm};
}

}  // namespace neg::test
