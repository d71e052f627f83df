#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neg/rules.hpp"
#include "neg/structure.hpp"

namespace neg {

struct SummarizeOptions {
  std::size_t node_limit = default_node_limit;
  // Observer invoked after every rule application with the negotiation before
  // and after it; used by the per-application equivalence checks.
  std::function<void(const Negotiation&, const Negotiation&, const RuleApplication&)>
      on_apply;
  // When set, the observer also fires inside split summarizations (which run
  // on scratch negotiations, not on the input).
  bool hook_in_splits = false;
};

// Per-round measurements of the main loop, taken at the round head (before
// the synchronizer is picked) and as the round progresses. The *_le_bound and
// monotonicity fields record whether this run stayed within the expected
// complexity envelope.
struct IterationStats {
  int index = 0;
  int atoms = 0, outcomes = 0, sync = 0;
  bool merge_free = true;
  std::string selected;
  int fragment_atoms = 0;
  int split_apps = 0;
  int replay_apps = 0, self_merges = 0, iteration_apps = 0, post_merges = 0;
  int outcomes_post_iteration = 0;
  bool sync_decreased = true;
  bool ta_subset_prev = true;
  bool apps_le_bound = true;
  bool out_post_le_bound = true;
};

struct RunStats {
  int atoms_initial = 0, outcomes_initial = 0;
  int initial_merges = 0;
  std::vector<IterationStats> iterations;
  int final_apps = 0;
  long long total_apps = 0;
  bool iterations_le_atoms = true;
  bool total_le_bound = true;

  bool all_ok() const;
};

std::string render_stats(const RunStats& stats, bool sound);

struct SummaryResult {
  bool sound = false;
  Negotiation reduced;     // single atom when sound; the state at abort otherwise
  std::string evidence;    // why the reduction gave up
  Transcript transcript;   // applications performed on the input negotiation
  RunStats stats;
};

// Reduce a deterministic negotiation with an acyclic atom graph by exhausting
// merges and shortcutting, always into the target that comes first in
// topological order. A single remaining atom is the summary; a stuck state
// with several atoms means the negotiation is unsound.
SummaryResult summarize_acyclic(const Negotiation& neg,
                                const SummarizeOptions& opts = {});

// Full reduction for deterministic negotiations: exhaust merges, then per
// round pick the synchronizer with the smallest fragment (preferring one
// whose split is acyclic), summarize the split — recursing with the same
// pipeline when the split still has inner cycles — replay that on the input,
// fold the resulting self-loops with the iteration rule and exhaust merges
// again; finish with the acyclic reduction. Returns a summary iff the
// negotiation is sound; every give-up path reports Unsound with evidence.
SummaryResult summarize(const Negotiation& neg, const SummarizeOptions& opts = {});

// True iff `summarize` produces a summary.
bool check_sound_reduction(const Negotiation& neg, const SummarizeOptions& opts = {});

}  // namespace neg
