#include "neg/rules.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "neg/errors.hpp"

namespace neg {

std::string RuleApplication::to_line() const {
  std::string out;
  switch (kind) {
    case Kind::merge:
      out = "merge " + atom + " " + outcomes[0] + " " + outcomes[1] + " -> " +
            produced[0].first;
      return out;
    case Kind::shortcut: {
      out = "shortcut " + atom + " " + outcomes[0] + " " + target + " ->";
      for (std::size_t i = 0; i < produced.size(); ++i)
        out += (i ? "," : " ") + produced[i].first;
      out += " removed=" + (removed.empty() ? std::string("-") : removed);
      return out;
    }
    case Kind::iteration: {
      out = "iteration " + atom + " " + outcomes[0] + " ->";
      for (std::size_t i = 0; i < produced.size(); ++i)
        out += (i ? "," : " ") + produced[i].first;
      return out;
    }
  }
  return out;
}

bool unconditionally_enables(const Negotiation& neg, const std::string& atom,
                             const std::string& outcome, const std::string& target) {
  if (!neg.has_atom(atom) || !neg.has_atom(target) || atom == target) return false;
  const Atom& n = neg.atom(atom);
  const Atom& np = neg.atom(target);
  const Outcome* o = n.find_outcome(outcome);
  if (!o) return false;
  if (!std::includes(n.parties.begin(), n.parties.end(), np.parties.begin(),
                     np.parties.end()))
    return false;
  for (const auto& p : np.parties) {
    const auto& ts = o->targets(p);
    if (ts.size() != 1 || ts[0] != target) return false;
  }
  return true;
}

std::vector<MergeRedex> find_merges(const Negotiation& neg) {
  std::vector<MergeRedex> out;
  for (const auto& [name, atom] : neg.atoms) {
    for (std::size_t i = 0; i < atom.outcomes.size(); ++i)
      for (std::size_t j = i + 1; j < atom.outcomes.size(); ++j)
        if (atom.outcomes[i].next == atom.outcomes[j].next)
          out.push_back({name, atom.outcomes[i].name, atom.outcomes[j].name});
  }
  return out;
}

std::vector<ShortcutRedex> find_shortcuts(const Negotiation& neg) {
  std::vector<ShortcutRedex> out;
  for (const auto& [name, atom] : neg.atoms) {
    for (const auto& o : atom.outcomes) {
      std::set<std::string> targets;
      for (const auto& [agent, ts] : o.next)
        for (const auto& t : ts) targets.insert(t);
      for (const auto& t : targets)
        if (unconditionally_enables(neg, name, o.name, t))
          out.push_back({name, o.name, t});
    }
  }
  return out;
}

std::vector<IterationRedex> find_iterations(const Negotiation& neg) {
  std::vector<IterationRedex> out;
  for (const auto& [name, atom] : neg.atoms) {
    for (const auto& o : atom.outcomes) {
      bool self_loop = !atom.parties.empty();
      for (const auto& p : atom.parties) {
        const auto& ts = o.targets(p);
        if (ts.size() != 1 || ts[0] != name) {
          self_loop = false;
          break;
        }
      }
      if (self_loop) out.push_back({name, o.name});
    }
  }
  return out;
}

namespace {

// Fresh within the atom and within the batch of names being created.
std::string fresh_name(const Atom& atom, const std::set<std::string>& pending,
                       std::string base) {
  while (atom.find_outcome(base) || pending.count(base)) base += '\'';
  return base;
}

bool references(const Negotiation& neg, const std::string& target) {
  for (const auto& [name, atom] : neg.atoms)
    for (const auto& o : atom.outcomes)
      for (const auto& [agent, ts] : o.next)
        for (const auto& t : ts)
          if (t == target) return true;
  return false;
}

}  // namespace

RuleApplication apply_merge(Negotiation& neg, const std::string& atom,
                            const std::string& r1, const std::string& r2) {
  Atom& n = neg.atom(atom);
  int i1 = n.outcome_index(r1), i2 = n.outcome_index(r2);
  if (i1 < 0 || i2 < 0 || i1 == i2) throw Error("merge: bad outcomes");
  if (n.outcomes[i1].next != n.outcomes[i2].next)
    throw Error("merge: target maps differ");

  Outcome merged;
  merged.name = fresh_name(n, {}, r1 + "+" + r2);
  merged.delta = union_of(n.outcomes[i1].delta, n.outcomes[i2].delta);
  merged.next = n.outcomes[i1].next;

  RuleApplication app;
  app.kind = RuleApplication::Kind::merge;
  app.atom = atom;
  app.outcomes = {r1, r2};
  app.produced = {{merged.name, r1}, {merged.name, r2}};

  // The merged outcome takes the earlier declaration slot.
  int keep = std::min(i1, i2), drop = std::max(i1, i2);
  n.outcomes.erase(n.outcomes.begin() + drop);
  n.outcomes[keep] = std::move(merged);
  return app;
}

RuleApplication apply_shortcut(Negotiation& neg, const std::string& atom,
                               const std::string& outcome, const std::string& target) {
  if (!unconditionally_enables(neg, atom, outcome, target))
    throw Error("shortcut: (" + atom + "," + outcome + ") does not unconditionally enable " +
                target);
  Atom& n = neg.atom(atom);
  const Atom& np = neg.atom(target);
  int ri = n.outcome_index(outcome);
  const Outcome site = n.outcomes[ri];  // copy; the slot is replaced below

  RuleApplication app;
  app.kind = RuleApplication::Kind::shortcut;
  app.atom = atom;
  app.outcomes = {outcome};
  app.target = target;

  std::vector<Outcome> fused;
  std::set<std::string> pending;
  for (const Outcome& rp : np.outcomes) {
    Outcome o;
    o.name = fresh_name(n, pending, outcome + "." + rp.name);
    pending.insert(o.name);
    o.delta = compose(site.delta, rp.delta);
    for (const auto& p : n.parties)
      o.next[p] = np.has_party(p) ? rp.targets(p) : site.targets(p);
    app.produced.emplace_back(o.name, rp.name);
    fused.push_back(std::move(o));
  }

  n.outcomes.erase(n.outcomes.begin() + ri);
  n.outcomes.insert(n.outcomes.begin() + ri,
                    std::make_move_iterator(fused.begin()),
                    std::make_move_iterator(fused.end()));

  // Drop the target atom once nothing points at it; the initial atom stays
  // even when unreferenced (removing it would change the negotiation's start).
  if (target != neg.initial && !references(neg, target)) {
    bool was_final = (target == neg.final_atom);
    neg.atoms.erase(target);
    app.removed = target;
    if (was_final) neg.final_atom = atom;
  }
  return app;
}

RuleApplication apply_iteration(Negotiation& neg, const std::string& atom,
                                const std::string& outcome) {
  Atom& n = neg.atom(atom);
  int ri = n.outcome_index(outcome);
  if (ri < 0) throw Error("iteration: unknown outcome");
  for (const auto& p : n.parties) {
    const auto& ts = n.outcomes[ri].targets(p);
    if (ts.size() != 1 || ts[0] != atom)
      throw Error("iteration: outcome is not a self-loop");
  }
  if (n.outcomes.size() < 2)
    throw Error("iteration: self-loop is the only outcome of " + atom);

  Transformer looped = star(n.outcomes[ri].delta);

  RuleApplication app;
  app.kind = RuleApplication::Kind::iteration;
  app.atom = atom;
  app.outcomes = {outcome};

  std::vector<Outcome> replaced;
  std::set<std::string> pending;
  for (int i = 0; i < static_cast<int>(n.outcomes.size()); ++i) {
    if (i == ri) continue;
    const Outcome& rp = n.outcomes[i];
    Outcome o;
    o.name = fresh_name(n, pending, outcome + "*." + rp.name);
    pending.insert(o.name);
    o.delta = compose(looped, rp.delta);
    o.next = rp.next;
    app.produced.emplace_back(o.name, rp.name);
    replaced.push_back(std::move(o));
  }
  n.outcomes = std::move(replaced);
  return app;
}

namespace {

// Outcome-name translation from split names to parent names. Entries are
// created as rules produce fresh names; original names translate to
// themselves.
class NameMap {
 public:
  explicit NameMap(const Negotiation& parent) : parent_(parent) {}

  // nullptr when the outcome is unknown on the parent side.
  const std::vector<std::string>* lookup(const std::string& atom,
                                         const std::string& name) {
    auto it = map_.find({atom, name});
    if (it != map_.end()) return &it->second;
    if (parent_.has_atom(atom) && parent_.atom(atom).find_outcome(name)) {
      auto [fresh, _] = map_.emplace(std::make_pair(atom, name),
                                     std::vector<std::string>{name});
      return &fresh->second;
    }
    return nullptr;
  }

  void set(const std::string& atom, const std::string& name,
           std::vector<std::string> parents) {
    map_[{atom, name}] = std::move(parents);
  }

 private:
  const Negotiation& parent_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> map_;
};

}  // namespace

ReplayResult replay_split_transcript(
    Negotiation& parent, const Transcript& split_transcript,
    const std::string& synchronizer, const std::string& fresh_final,
    const std::function<void(const Negotiation&, const Negotiation&,
                             const RuleApplication&)>& on_apply) {
  ReplayResult res;
  NameMap names(parent);

  auto fail = [&](const std::string& why) {
    res.ok = false;
    res.failure = why;
    return res;
  };
  auto run = [&](auto&& mutate) {
    if (on_apply) {
      Negotiation before = parent;
      RuleApplication app = mutate();
      on_apply(before, parent, app);
      res.applied.push_back(app);
    } else {
      res.applied.push_back(mutate());
    }
  };

  for (const auto& app : split_transcript) {
    switch (app.kind) {
      case RuleApplication::Kind::merge: {
        auto* l1 = names.lookup(app.atom, app.outcomes[0]);
        auto* l2 = names.lookup(app.atom, app.outcomes[1]);
        if (!l1 || !l2)
          return fail("replay: merge sources missing on parent at " + app.atom);
        std::vector<std::string> combined = *l1;
        for (const auto& x : *l2)
          if (std::find(combined.begin(), combined.end(), x) == combined.end())
            combined.push_back(x);
        // Parent counterparts may carry different continuations, so they only
        // merge within groups of equal target maps.
        const Atom& a = parent.atom(app.atom);
        std::vector<std::string> reps;
        std::vector<std::vector<std::string>> groups;
        for (const auto& name : combined) {
          const Outcome* o = a.find_outcome(name);
          if (!o) return fail("replay: outcome '" + name + "' missing on parent " + app.atom);
          bool placed = false;
          for (std::size_t g = 0; g < groups.size(); ++g) {
            if (a.find_outcome(groups[g][0])->next == o->next) {
              groups[g].push_back(name);
              placed = true;
              break;
            }
          }
          if (!placed) groups.push_back({name});
        }
        std::vector<std::string> result_names;
        for (auto& g : groups) {
          std::string acc = g[0];
          for (std::size_t i = 1; i < g.size(); ++i) {
            std::string next = g[i];
            run([&] { return apply_merge(parent, app.atom, acc, next); });
            acc = res.applied.back().produced[0].first;
          }
          result_names.push_back(acc);
        }
        names.set(app.atom, app.produced[0].first, std::move(result_names));
        break;
      }

      case RuleApplication::Kind::shortcut: {
        auto* sources = names.lookup(app.atom, app.outcomes[0]);
        if (!sources)
          return fail("replay: shortcut source missing on parent at " + app.atom);
        std::vector<std::string> site_names = *sources;

        if (app.target == fresh_final && app.atom == synchronizer) {
          // The split says "this outcome of s returns to s and finishes the
          // round". On the parent these are self-loops on s; they stay in
          // place for the iteration rule. Only the name moves forward.
          const Atom& s = parent.atom(synchronizer);
          for (const auto& name : site_names) {
            const Outcome* o = s.find_outcome(name);
            if (!o) return fail("replay: outcome '" + name + "' missing on parent " + synchronizer);
            for (const auto& p : s.parties) {
              const auto& ts = o->targets(p);
              if (ts.size() != 1 || ts[0] != synchronizer)
                return fail("replay: expected self-loop on " + synchronizer + " for '" + name + "'");
            }
          }
          names.set(app.atom, app.produced[0].first, site_names);
          break;
        }

        // A shortcut onto the placeholder final means "onto the synchronizer"
        // on the parent; everything else shortcuts the same atom.
        std::string target = app.target == fresh_final ? synchronizer : app.target;
        std::map<std::string, std::vector<std::string>> produced_by_source;
        for (const auto& name : site_names) {
          if (!unconditionally_enables(parent, app.atom, name, target))
            return fail("replay: (" + app.atom + ",'" + name + "') does not unconditionally enable " +
                        target + " on parent");
          run([&] { return apply_shortcut(parent, app.atom, name, target); });
          for (const auto& [fresh, src] : res.applied.back().produced)
            produced_by_source[src].push_back(fresh);
        }
        if (app.target == fresh_final) {
          // One split name ("r.done") covers every parent continuation.
          std::vector<std::string> all;
          for (const auto& [src, freshes] : produced_by_source)
            all.insert(all.end(), freshes.begin(), freshes.end());
          names.set(app.atom, app.produced[0].first, std::move(all));
        } else {
          for (const auto& [fresh_split, src_split] : app.produced) {
            auto it = produced_by_source.find(src_split);
            if (it == produced_by_source.end())
              return fail("replay: parent produced nothing for split outcome '" + src_split + "'");
            names.set(app.atom, fresh_split, it->second);
          }
        }
        break;
      }

      case RuleApplication::Kind::iteration: {
        auto* sources = names.lookup(app.atom, app.outcomes[0]);
        if (!sources)
          return fail("replay: iteration source missing on parent at " + app.atom);
        if (!parent.has_atom(app.atom))
          return fail("replay: atom " + app.atom + " missing on parent");

        // The split iterated a self-loop away. Its parent counterparts are
        // self-loops too (with identical target maps), so fold them into one
        // outcome and iterate that.
        std::vector<std::string> loop_names = *sources;
        const Atom& a = parent.atom(app.atom);
        for (const auto& name : loop_names) {
          const Outcome* o = a.find_outcome(name);
          if (!o) return fail("replay: outcome '" + name + "' missing on parent " + app.atom);
          for (const auto& p : a.parties) {
            const auto& ts = o->targets(p);
            if (ts.size() != 1 || ts[0] != app.atom)
              return fail("replay: expected self-loop on " + app.atom + " for '" + name + "'");
          }
        }
        std::string acc = loop_names[0];
        for (std::size_t i = 1; i < loop_names.size(); ++i) {
          std::string next = loop_names[i];
          run([&] { return apply_merge(parent, app.atom, acc, next); });
          acc = res.applied.back().produced[0].first;
        }

        // Resolve the surviving outcomes' parent names before the iteration
        // renames every one of them.
        std::vector<std::pair<std::string, std::vector<std::string>>> slots;
        for (const auto& [fresh_split, src_split] : app.produced) {
          auto* srcs = names.lookup(app.atom, src_split);
          if (!srcs)
            return fail("replay: outcome '" + src_split + "' missing on parent " + app.atom);
          slots.emplace_back(fresh_split, *srcs);
        }
        if (parent.atom(app.atom).outcomes.size() < 2)
          return fail("replay: self-loop is the only outcome of " + app.atom + " on parent");
        run([&] { return apply_iteration(parent, app.atom, acc); });
        std::map<std::string, std::vector<std::string>> produced_by_source;
        for (const auto& [fresh, src] : res.applied.back().produced)
          produced_by_source[src].push_back(fresh);
        for (auto& [fresh_split, srcs] : slots) {
          std::vector<std::string> parents;
          for (const auto& src : srcs) {
            auto found = produced_by_source.find(src);
            if (found == produced_by_source.end())
              return fail("replay: parent produced nothing for split outcome '" + src + "'");
            parents.insert(parents.end(), found->second.begin(), found->second.end());
          }
          names.set(app.atom, fresh_split, std::move(parents));
        }
        break;
      }
    }
    if (!res.ok) return res;
  }
  return res;
}

}  // namespace neg
