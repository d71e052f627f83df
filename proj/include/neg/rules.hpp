#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "neg/negotiation.hpp"

namespace neg {

// One reduction-rule application, with enough bookkeeping to replay it, trace
// it, and map outcome names across it (each produced entry pairs the fresh
// outcome name with the outcome it was built from).
struct RuleApplication {
  enum class Kind { merge, shortcut, iteration };

  Kind kind{};
  std::string atom;                   // site n
  std::vector<std::string> outcomes;  // merge: {r1, r2}; otherwise {r}
  std::string target;                 // shortcut target n'
  std::vector<std::pair<std::string, std::string>> produced;
  std::string removed;                // atom removed by a shortcut, if any

  std::string to_line() const;
};

using Transcript = std::vector<RuleApplication>;

struct MergeRedex {
  std::string atom, r1, r2;
};
struct ShortcutRedex {
  std::string atom, outcome, target;
};
struct IterationRedex {
  std::string atom, outcome;
};

// (n, r) unconditionally enables n': n covers n'`s parties and sends each of
// them exactly to n'.
bool unconditionally_enables(const Negotiation& neg, const std::string& atom,
                             const std::string& outcome, const std::string& target);

// Redex enumeration in deterministic order: atoms by name, outcomes by
// declaration index (merge pairs by index pairs, shortcut targets by name).
std::vector<MergeRedex> find_merges(const Negotiation& neg);
std::vector<ShortcutRedex> find_shortcuts(const Negotiation& neg);
std::vector<IterationRedex> find_iterations(const Negotiation& neg);

// Merge two outcomes with identical target maps into a fresh one (`r1+r2`)
// carrying the union transformer.
RuleApplication apply_merge(Negotiation& neg, const std::string& atom,
                            const std::string& r1, const std::string& r2);

// Fuse (n, r) with every outcome r' of the unconditionally enabled n' into
// fresh outcomes `r.r'` (composed transformers; targets from n' inside its
// parties, kept from r outside). Removes n' when nothing references it
// anymore — except when n' is the current initial atom, which must survive
// even unreferenced. When the removed atom carried the final role, the site
// atom inherits it.
RuleApplication apply_shortcut(Negotiation& neg, const std::string& atom,
                               const std::string& outcome, const std::string& target);

// Fold a self-loop outcome r into every sibling: R_n becomes
// { `r*.r'` | r' != r } with star(delta_r) prepended. Throws when r is the
// only outcome.
RuleApplication apply_iteration(Negotiation& neg, const std::string& atom,
                                const std::string& outcome);

// Replay a split's summarization transcript on the parent negotiation.
// Split outcome names are translated to lists of parent outcome names; a
// shortcut into the split's placeholder final atom either becomes a genuine
// shortcut onto the synchronizer (site != synchronizer) or a no-op (site ==
// synchronizer, whose parent outcomes are self-loops that the iteration rule
// folds later). Every guard is re-checked on the parent; any mismatch stops
// the replay with ok == false.
struct ReplayResult {
  bool ok = true;
  std::string failure;
  Transcript applied;
};

ReplayResult replay_split_transcript(
    Negotiation& parent, const Transcript& split_transcript,
    const std::string& synchronizer, const std::string& fresh_final,
    const std::function<void(const Negotiation&, const Negotiation&,
                             const RuleApplication&)>& on_apply = {});

}  // namespace neg
