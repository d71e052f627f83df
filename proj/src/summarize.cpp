#include "neg/summarize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "neg/errors.hpp"

namespace neg {

bool RunStats::all_ok() const {
  if (!iterations_le_atoms || !total_le_bound) return false;
  for (const auto& it : iterations) {
    if (!it.merge_free || !it.sync_decreased || !it.ta_subset_prev ||
        !it.out_post_le_bound)
      return false;
  }
  return true;
}

std::string render_stats(const RunStats& s, bool sound) {
  std::ostringstream os;
  os << "input atoms=" << s.atoms_initial << " outcomes=" << s.outcomes_initial << '\n';
  os << "initial merges=" << s.initial_merges << '\n';
  for (const auto& it : s.iterations) {
    os << "iter " << it.index << " atoms=" << it.atoms << " outcomes=" << it.outcomes
       << " sync=" << it.sync << " merge_free=" << it.merge_free
       << " selected=" << (it.selected.empty() ? "-" : it.selected)
       << " fragment_atoms=" << it.fragment_atoms << " split_apps=" << it.split_apps
       << " replay=" << it.replay_apps << " self_merges=" << it.self_merges
       << " iteration=" << it.iteration_apps
       << " out_post_iter=" << it.outcomes_post_iteration
       << " post_merges=" << it.post_merges << " sync_decreased=" << it.sync_decreased
       << " ta_subset_prev=" << it.ta_subset_prev << " apps_le_bound=" << it.apps_le_bound
       << " out_post_le_bound=" << it.out_post_le_bound << '\n';
  }
  os << "final phase apps=" << s.final_apps << '\n';
  os << "total apps=" << s.total_apps << " iterations=" << s.iterations.size()
     << " iterations_le_atoms=" << s.iterations_le_atoms
     << " total_le_bound=" << s.total_le_bound << '\n';
  os << "verdict=" << (sound ? "sound" : "unsound") << '\n';
  return os.str();
}

namespace {

// Applies one rule through the observer hook and appends it to the transcript.
template <class F>
RuleApplication run_rule(Negotiation& work, const SummarizeOptions& opts,
                         Transcript& transcript, F&& mutate) {
  if (opts.on_apply) {
    Negotiation before = work;
    RuleApplication app = mutate();
    opts.on_apply(before, work, app);
    transcript.push_back(app);
    return transcript.back();
  }
  RuleApplication app = mutate();
  transcript.push_back(app);
  return transcript.back();
}

int exhaust_merges(Negotiation& work, const SummarizeOptions& opts,
                   Transcript& transcript) {
  int count = 0;
  while (true) {
    auto redexes = find_merges(work);
    if (redexes.empty()) return count;
    const auto& m = redexes.front();
    run_rule(work, opts, transcript,
             [&] { return apply_merge(work, m.atom, m.r1, m.r2); });
    ++count;
  }
}

// Shared by summarize_acyclic and the endgame of summarize. Returns true on
// success (one atom left); on false, `evidence` says where it got stuck.
bool acyclic_phase(Negotiation& work, const SummarizeOptions& opts,
                   Transcript& transcript, int& apps, std::string& evidence) {
  // Generous safety net; the expected ceiling is |N|^2 + |Out|.
  long long cap = 16 + 8 * (static_cast<long long>(work.atom_count()) * work.atom_count() +
                            work.outcome_count());
  long long used = 0;
  while (true) {
    int merged = exhaust_merges(work, opts, transcript);
    apps += merged;
    used += merged;
    if (work.atom_count() == 1) return true;

    auto redexes = find_shortcuts(work);
    if (redexes.empty()) {
      std::ostringstream os;
      os << "no merge or shortcut applicable with " << work.atom_count() << " atoms left";
      evidence = os.str();
      return false;
    }
    // Collapse front to back: prefer the target earliest in topological
    // order; find_shortcuts order (atom name, declaration index) breaks ties.
    auto topo = topological_order(work);
    std::map<std::string, int> pos;
    for (std::size_t i = 0; i < topo.size(); ++i) pos[topo[i]] = static_cast<int>(i);
    const ShortcutRedex* best = &redexes.front();
    for (const auto& r : redexes)
      if (pos[r.target] < pos[best->target]) best = &r;
    ShortcutRedex chosen = *best;
    run_rule(work, opts, transcript,
             [&] { return apply_shortcut(work, chosen.atom, chosen.outcome, chosen.target); });
    ++apps;
    if (++used > cap) throw Error("acyclic reduction exceeded its application cap");
  }
}

void require_reducible(const Negotiation& neg) {
  auto problems = validate(neg);
  if (!problems.empty()) throw Error("invalid negotiation: " + problems.front());
  if (!is_deterministic(neg)) throw Error("reduction requires a deterministic negotiation");
}

SummaryResult unsound(Negotiation work, Transcript transcript, RunStats stats,
                      std::string why) {
  SummaryResult res;
  res.sound = false;
  res.reduced = std::move(work);
  res.evidence = std::move(why);
  res.transcript = std::move(transcript);
  res.stats = std::move(stats);
  res.stats.total_apps = static_cast<long long>(res.transcript.size());
  return res;
}

std::set<std::string> target_key_set(const Negotiation& neg) {
  std::set<std::string> keys;
  for (const auto& [name, atom] : neg.atoms)
    for (const auto& o : atom.outcomes) keys.insert(target_key(o));
  return keys;
}

std::vector<std::string> self_loop_outcomes(const Negotiation& neg, const std::string& s) {
  std::vector<std::string> out;
  const Atom& a = neg.atom(s);
  for (const auto& o : a.outcomes) {
    bool self = true;
    for (const auto& p : a.parties) {
      const auto& ts = o.targets(p);
      if (ts.size() != 1 || ts[0] != s) {
        self = false;
        break;
      }
    }
    if (self) out.push_back(o.name);
  }
  return out;
}

// Index of the application that collapses a split to one atom; the replayed
// prefix stops strictly before it.
std::size_t replay_cut(const Transcript& t, std::size_t initial_atoms) {
  std::size_t atoms_left = initial_atoms;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!t[i].removed.empty() && --atoms_left == 1) return i;
  return t.size();
}

// Reduces `work` all the way to a single atom and appends every application to
// `transcript`. Cyclic graphs are handled round by round: pick a synchronizer,
// summarize its split (recursing when sibling loop regions leave the split
// cyclic), replay the prefix on `work`, then fold the resulting self-loops
// with the iteration rule. Returns false with `evidence` when stuck.
bool reduce_full(Negotiation& work, const SummarizeOptions& opts, Transcript& transcript,
                 int depth, std::string& evidence) {
  if (depth > 64) {
    evidence = "split recursion deeper than 64 levels";
    return false;
  }
  exhaust_merges(work, opts, transcript);

  int rounds = 0;
  const int cap = static_cast<int>(work.atom_count());
  while (graph_cyclic(work)) {
    if (++rounds > cap) {
      evidence = "round cap exceeded inside a split";
      return false;
    }
    ReachabilityGraph rg = reachability_graph(work, opts.node_limit);
    auto split = select_synchronizer(work, rg);
    if (!split) {
      evidence = "cyclic split with no synchronizer";
      return false;
    }
    const std::string s = split->synchronizer;

    std::size_t split_atoms = split->neg.atom_count();
    Transcript sub;
    if (!reduce_full(split->neg, opts, sub, depth + 1, evidence)) return false;

    std::size_t cut = replay_cut(sub, split_atoms);
    Transcript prefix(sub.begin(), sub.begin() + cut);
    ReplayResult replay =
        replay_split_transcript(work, prefix, s, split->fresh_final, opts.on_apply);
    transcript.insert(transcript.end(), replay.applied.begin(), replay.applied.end());
    if (!replay.ok) {
      evidence = replay.failure;
      return false;
    }

    while (true) {
      auto loops = self_loop_outcomes(work, s);
      if (loops.size() < 2) break;
      run_rule(work, opts, transcript,
               [&] { return apply_merge(work, s, loops[0], loops[1]); });
    }
    auto loops = self_loop_outcomes(work, s);
    if (loops.empty()) {
      evidence = "no self-loop to iterate at " + s;
      return false;
    }
    if (work.atom(s).outcomes.size() < 2) {
      evidence = "self-loop is the only outcome of " + s;
      return false;
    }
    run_rule(work, opts, transcript, [&] { return apply_iteration(work, s, loops[0]); });
    exhaust_merges(work, opts, transcript);
  }

  int apps = 0;
  return acyclic_phase(work, opts, transcript, apps, evidence);
}

}  // namespace

SummaryResult summarize_acyclic(const Negotiation& neg, const SummarizeOptions& opts) {
  require_reducible(neg);
  if (graph_cyclic(neg)) throw Error("summarize_acyclic requires an acyclic atom graph");

  SummaryResult res;
  res.reduced = neg;
  res.stats.atoms_initial = static_cast<int>(neg.atom_count());
  res.stats.outcomes_initial = static_cast<int>(neg.outcome_count());

  std::string evidence;
  int apps = 0;
  bool ok = acyclic_phase(res.reduced, opts, res.transcript, apps, evidence);
  res.stats.final_apps = apps;
  res.stats.total_apps = static_cast<long long>(res.transcript.size());
  res.sound = ok;
  if (!ok) res.evidence = evidence;
  return res;
}

SummaryResult summarize(const Negotiation& neg, const SummarizeOptions& opts) {
  require_reducible(neg);

  Negotiation work = neg;
  Transcript transcript;
  RunStats stats;
  stats.atoms_initial = static_cast<int>(neg.atom_count());
  stats.outcomes_initial = static_cast<int>(neg.outcome_count());

  stats.initial_merges = exhaust_merges(work, opts, transcript);

  int prev_sync = -1;
  std::set<std::string> prev_ta;
  int round = 0;

  while (graph_cyclic(work)) {
    if (++round > stats.atoms_initial) {
      stats.iterations_le_atoms = false;
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     "round cap exceeded: more rounds than input atoms");
    }

    IterationStats it;
    it.index = round;
    it.atoms = static_cast<int>(work.atom_count());
    it.outcomes = static_cast<int>(work.outcome_count());
    it.merge_free = find_merges(work).empty();

    ReachabilityGraph rg = reachability_graph(work, opts.node_limit);
    it.sync = static_cast<int>(synchronizers(work, rg).size());
    it.sync_decreased = (round == 1) || it.sync < prev_sync;
    std::set<std::string> ta = target_key_set(work);
    it.ta_subset_prev =
        (round == 1) || std::includes(prev_ta.begin(), prev_ta.end(), ta.begin(), ta.end());
    prev_sync = it.sync;
    prev_ta = std::move(ta);

    auto split = select_synchronizer(work, rg);
    if (!split) {
      stats.iterations.push_back(it);
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     "cyclic but no atom synchronizes a loop");
    }
    const std::string s = split->synchronizer;
    it.selected = s;
    it.fragment_atoms = static_cast<int>(split->neg.atom_count()) - 1;  // minus placeholder

    SummarizeOptions sub_opts;
    sub_opts.node_limit = opts.node_limit;
    if (opts.hook_in_splits) sub_opts.on_apply = opts.on_apply;
    std::size_t split_atoms = split->neg.atom_count();
    Transcript sub;
    std::string sub_evidence;
    bool sub_ok = reduce_full(split->neg, sub_opts, sub, 1, sub_evidence);
    it.split_apps = static_cast<int>(sub.size());
    if (!sub_ok) {
      stats.iterations.push_back(it);
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     "split summarization at " + s + " got stuck: " + sub_evidence);
    }

    // Replay everything before the application that collapsed the split to a
    // single atom (that one, and any merges after it, happen on the parent in
    // other clothes: the iteration rule and the post-merges below).
    std::size_t cut = replay_cut(sub, split_atoms);
    Transcript prefix(sub.begin(), sub.begin() + cut);
    ReplayResult replay = replay_split_transcript(work, prefix, s, split->fresh_final,
                                                  opts.on_apply);
    transcript.insert(transcript.end(), replay.applied.begin(), replay.applied.end());
    it.replay_apps = static_cast<int>(replay.applied.size());
    if (!replay.ok) {
      stats.iterations.push_back(it);
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     replay.failure);
    }

    // The replay leaves the round's loop summaries as self-loops on s. They
    // all share the same target map, so fold them into one, then iterate.
    while (true) {
      auto loops = self_loop_outcomes(work, s);
      if (loops.size() < 2) break;
      run_rule(work, opts, transcript,
               [&] { return apply_merge(work, s, loops[0], loops[1]); });
      ++it.self_merges;
    }
    auto loops = self_loop_outcomes(work, s);
    if (loops.empty()) {
      stats.iterations.push_back(it);
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     "no self-loop to iterate at " + s);
    }
    if (work.atom(s).outcomes.size() < 2) {
      stats.iterations.push_back(it);
      return unsound(std::move(work), std::move(transcript), std::move(stats),
                     "self-loop is the only outcome of " + s);
    }
    run_rule(work, opts, transcript, [&] { return apply_iteration(work, s, loops[0]); });
    it.iteration_apps = 1;
    it.outcomes_post_iteration = static_cast<int>(work.outcome_count());
    it.out_post_le_bound =
        it.outcomes_post_iteration <= it.outcomes + it.atoms * it.outcomes;

    it.post_merges = exhaust_merges(work, opts, transcript);

    long long apps_this_round =
        it.replay_apps + it.self_merges + it.iteration_apps + it.post_merges;
    it.apps_le_bound = apps_this_round <=
                       static_cast<long long>(it.atoms) * it.atoms + it.outcomes + 1 +
                           it.outcomes_post_iteration;
    stats.iterations.push_back(it);
  }

  std::string evidence;
  if (!acyclic_phase(work, opts, transcript, stats.final_apps, evidence))
    return unsound(std::move(work), std::move(transcript), std::move(stats), evidence);

  stats.total_apps = static_cast<long long>(transcript.size());
  long long n0 = stats.atoms_initial;
  stats.total_le_bound = stats.total_apps <= n0 * n0 * n0 * n0 * stats.outcomes_initial;

  SummaryResult res;
  res.sound = true;
  res.reduced = std::move(work);
  res.transcript = std::move(transcript);
  res.stats = std::move(stats);
  return res;
}

bool check_sound_reduction(const Negotiation& neg, const SummarizeOptions& opts) {
  return summarize(neg, opts).sound;
}

}  // namespace neg
