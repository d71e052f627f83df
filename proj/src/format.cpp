#include "neg/format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "neg/errors.hpp"

namespace neg {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;  // comment until end of line
    out.push_back(tok);
  }
  return out;
}

// --- transformer expressions ------------------------------------------------

struct ExprParser {
  const std::string& s;
  std::size_t pos = 0;
  std::string error;

  explicit ExprParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  SymExprPtr parse_alt() {
    SymExprPtr left = parse_cat();
    if (!left) return nullptr;
    while (eat('|')) {
      SymExprPtr right = parse_cat();
      if (!right) return nullptr;
      left = SymExpr::alt(left, right);
    }
    return left;
  }

  SymExprPtr parse_cat() {
    SymExprPtr left = parse_star();
    if (!left) return nullptr;
    while (eat('.')) {
      SymExprPtr right = parse_star();
      if (!right) return nullptr;
      left = SymExpr::concat(left, right);
    }
    return left;
  }

  SymExprPtr parse_star() {
    SymExprPtr e = parse_prim();
    if (!e) return nullptr;
    while (eat('*')) e = SymExpr::star(e);
    return e;
  }

  SymExprPtr parse_prim() {
    skip_ws();
    if (pos >= s.size()) {
      error = "unexpected end of expression";
      return nullptr;
    }
    if (s[pos] == '1') {
      ++pos;
      return SymExpr::identity();
    }
    if (s[pos] == '(') {
      ++pos;
      SymExprPtr e = parse_alt();
      if (!e) return nullptr;
      if (!eat(')')) {
        error = "missing ')'";
        return nullptr;
      }
      return e;
    }
    if (s[pos] == '{') {
      ++pos;
      std::size_t colon = s.find(':', pos);
      if (colon == std::string::npos) {
        error = "label missing ':'";
        return nullptr;
      }
      std::size_t close = s.find('}', colon);
      if (close == std::string::npos) {
        error = "label missing '}'";
        return nullptr;
      }
      std::string atom = s.substr(pos, colon - pos);
      std::string outcome = s.substr(colon + 1, close - colon - 1);
      pos = close + 1;
      if (atom.empty() || outcome.empty()) {
        error = "empty label component";
        return nullptr;
      }
      return SymExpr::label(atom, outcome);
    }
    error = std::string("unexpected character '") + s[pos] + "'";
    return nullptr;
  }
};

// --- parsing ----------------------------------------------------------------

struct OutcomeLine {
  int line;
  std::string atom, name;
  std::vector<std::pair<std::string, std::string>> targets;  // (agent, atom)
  std::string delta;  // raw expression text; empty = default label
};

struct PairsLine {
  int line;
  std::string atom, name;
  std::vector<std::string> entries;  // "(..)->(..)" tokens
};

}  // namespace

SymExprPtr parse_expr(const std::string& text, std::string& error) {
  ExprParser p(text);
  SymExprPtr e = p.parse_alt();
  if (!e) {
    error = p.error;
    return nullptr;
  }
  p.skip_ws();
  if (p.pos != text.size()) {
    error = "trailing characters in expression";
    return nullptr;
  }
  return e;
}

ParseResult parse_negotiation(const std::string& text) {
  ParseResult res;
  auto bad = [&](int line, const std::string& msg) {
    res.diagnostics.push_back({line, msg});
  };

  Negotiation neg;
  std::vector<std::pair<int, std::vector<std::string>>> state_lines;
  std::vector<OutcomeLine> outcome_lines;
  std::vector<PairsLine> pairs_lines;
  bool agents_seen = false;

  // Pass 1: structure (agents, states, atoms). Outcome and pairs lines are
  // collected and resolved afterwards so declaration order never matters.
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0];

    if (head == "agents") {
      if (agents_seen) {
        bad(lineno, "duplicate agents line");
        continue;
      }
      agents_seen = true;
      neg.agents.assign(toks.begin() + 1, toks.end());
      std::sort(neg.agents.begin(), neg.agents.end());
      if (neg.agents.empty()) bad(lineno, "agents line lists no agents");
    } else if (head == "states") {
      if (toks.size() < 3) {
        bad(lineno, "states line needs an agent and at least one state");
        continue;
      }
      state_lines.push_back({lineno, toks});
    } else if (head == "atom") {
      // atom NAME parties P... [initial] [final]
      if (toks.size() < 4 || toks[2] != "parties") {
        bad(lineno, "atom line must be: atom NAME parties P... [initial] [final]");
        continue;
      }
      Atom a;
      a.name = toks[1];
      std::size_t i = 3;
      for (; i < toks.size() && toks[i] != "initial" && toks[i] != "final"; ++i)
        a.parties.push_back(toks[i]);
      std::sort(a.parties.begin(), a.parties.end());
      a.parties.erase(std::unique(a.parties.begin(), a.parties.end()), a.parties.end());
      for (; i < toks.size(); ++i) {
        if (toks[i] == "initial") {
          if (!neg.initial.empty()) bad(lineno, "second initial atom");
          neg.initial = a.name;
        } else if (toks[i] == "final") {
          if (!neg.final_atom.empty()) bad(lineno, "second final atom");
          neg.final_atom = a.name;
        } else {
          bad(lineno, "unexpected token '" + toks[i] + "'");
        }
      }
      if (!neg.atoms.emplace(a.name, std::move(a)).second)
        bad(lineno, "duplicate atom '" + toks[1] + "'");
    } else if (head == "outcome") {
      if (toks.size() < 3) {
        bad(lineno, "outcome line needs an atom and an outcome name");
        continue;
      }
      OutcomeLine o;
      o.line = lineno;
      o.atom = toks[1];
      o.name = toks[2];
      std::size_t i = 3;
      if (i < toks.size() && toks[i] == "->") {
        ++i;
        for (; i < toks.size() && toks[i] != "delta"; ++i) {
          auto colon = toks[i].find(':');
          if (colon == std::string::npos) {
            bad(lineno, "target '" + toks[i] + "' is not agent:atom");
            continue;
          }
          o.targets.emplace_back(toks[i].substr(0, colon), toks[i].substr(colon + 1));
        }
      }
      if (i < toks.size()) {
        if (toks[i] != "delta") {
          bad(lineno, "expected 'delta', got '" + toks[i] + "'");
          continue;
        }
        ++i;
        std::string expr;
        for (; i < toks.size(); ++i) expr += toks[i];
        if (expr.empty()) {
          bad(lineno, "empty delta expression");
          continue;
        }
        o.delta = expr;
      }
      outcome_lines.push_back(std::move(o));
    } else if (head == "pairs") {
      if (toks.size() < 4) {
        bad(lineno, "pairs line needs atom, outcome and at least one pair");
        continue;
      }
      PairsLine p;
      p.line = lineno;
      p.atom = toks[1];
      p.name = toks[2];
      p.entries.assign(toks.begin() + 3, toks.end());
      pairs_lines.push_back(std::move(p));
    } else {
      bad(lineno, "unknown directive '" + head + "'");
    }
  }

  if (!agents_seen) bad(0, "missing agents line");
  if (neg.initial.empty()) bad(0, "no atom marked initial");
  if (neg.final_atom.empty()) bad(0, "no atom marked final");

  // State space.
  if (!state_lines.empty()) {
    std::map<std::string, std::vector<std::string>> per_agent;
    for (const auto& [ln, toks] : state_lines) {
      const std::string& agent = toks[1];
      if (!std::binary_search(neg.agents.begin(), neg.agents.end(), agent)) {
        bad(ln, "states for unknown agent '" + agent + "'");
        continue;
      }
      if (!per_agent.emplace(agent, std::vector<std::string>(toks.begin() + 2, toks.end()))
               .second)
        bad(ln, "duplicate states line for agent '" + agent + "'");
    }
    if (per_agent.size() == neg.agents.size()) {
      std::vector<std::vector<std::string>> labels;
      for (const auto& a : neg.agents) labels.push_back(per_agent.at(a));
      try {
        neg.states = std::make_shared<StateSpace>(neg.agents, std::move(labels));
      } catch (const Error& e) {
        bad(0, e.what());
      }
    } else {
      bad(0, "states declared for some agents but not all");
    }
  }

  // Pass 2: outcomes.
  for (const auto& o : outcome_lines) {
    if (!neg.has_atom(o.atom)) {
      bad(o.line, "outcome for unknown atom '" + o.atom + "'");
      continue;
    }
    Atom& a = neg.atom(o.atom);
    if (a.find_outcome(o.name)) {
      bad(o.line, "duplicate outcome '" + o.name + "' of atom '" + o.atom + "'");
      continue;
    }
    Outcome out;
    out.name = o.name;
    bool ok = true;
    for (const auto& [agent, target] : o.targets) {
      if (!a.has_party(agent)) {
        bad(o.line, "target for '" + agent + "', which is not a party of '" + o.atom + "'");
        ok = false;
        continue;
      }
      if (!neg.has_atom(target)) {
        bad(o.line, "target atom '" + target + "' not declared");
        ok = false;
        continue;
      }
      out.next[agent].push_back(target);
    }
    if (!ok) continue;
    for (const auto& p : a.parties) {
      auto& ts = out.next[p];  // ensure every party has an entry
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    }
    if (!o.delta.empty()) {
      if (neg.states) {
        bad(o.line, "delta expression not allowed with a declared state space");
        continue;
      }
      std::string err;
      SymExprPtr e = parse_expr(o.delta, err);
      if (!e) {
        bad(o.line, "bad delta expression: " + err);
        continue;
      }
      out.delta = Transformer::symbolic(e);
    } else if (!neg.states) {
      out.delta = Transformer::label(o.atom, o.name);
    } else {
      out.delta = Transformer::concrete(Relation(neg.states->size()));
    }
    a.outcomes.push_back(std::move(out));
  }

  // Pass 3: concrete relations.
  for (const auto& p : pairs_lines) {
    if (!neg.states) {
      bad(p.line, "pairs line without a states declaration");
      continue;
    }
    if (!neg.has_atom(p.atom)) {
      bad(p.line, "pairs for unknown atom '" + p.atom + "'");
      continue;
    }
    Outcome* o = neg.atom(p.atom).find_outcome(p.name);
    if (!o) {
      bad(p.line, "pairs for unknown outcome '" + p.name + "' of atom '" + p.atom + "'");
      continue;
    }
    Relation rel = o->delta.is_concrete() ? o->delta.rel() : Relation(neg.states->size());
    auto parse_tuple = [&](const std::string& t, uint32_t& out_idx) {
      if (t.size() < 2 || t.front() != '(' || t.back() != ')') return false;
      std::vector<std::string> comps;
      std::string cur;
      for (char c : t.substr(1, t.size() - 2)) {
        if (c == ',') {
          comps.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      comps.push_back(cur);
      if (comps.size() != neg.agents.size()) return false;
      std::vector<uint32_t> tuple(comps.size());
      for (std::size_t i = 0; i < comps.size(); ++i) {
        int li = neg.states->label_index(i, comps[i]);
        if (li < 0) return false;
        tuple[i] = static_cast<uint32_t>(li);
      }
      out_idx = neg.states->encode(tuple);
      return true;
    };
    for (const auto& entry : p.entries) {
      auto arrow = entry.find("->");
      uint32_t from = 0, to = 0;
      if (arrow == std::string::npos || !parse_tuple(entry.substr(0, arrow), from) ||
          !parse_tuple(entry.substr(arrow + 2), to)) {
        bad(p.line, "bad pair '" + entry + "'");
        continue;
      }
      rel.add(from, to);
    }
    o->delta = Transformer::concrete(rel);
  }

  if (!res.diagnostics.empty()) return res;

  for (const auto& v : validate(neg)) bad(0, v);
  if (!res.diagnostics.empty()) return res;

  res.negotiation = std::move(neg);
  return res;
}

ParseResult parse_negotiation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult res;
    res.diagnostics.push_back({0, "cannot open '" + path + "'"});
    return res;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_negotiation(buf.str());
}

std::string serialize(const Negotiation& neg) {
  std::ostringstream os;
  os << "agents";
  for (const auto& a : neg.agents) os << ' ' << a;
  os << '\n';

  if (neg.states) {
    for (std::size_t i = 0; i < neg.agents.size(); ++i) {
      os << "states " << neg.agents[i];
      for (const auto& l : neg.states->labels_of(i)) os << ' ' << l;
      os << '\n';
    }
  }

  for (const auto& [name, atom] : neg.atoms) {
    os << "atom " << name << " parties";
    for (const auto& p : atom.parties) os << ' ' << p;
    if (name == neg.initial) os << " initial";
    if (name == neg.final_atom) os << " final";
    os << '\n';
  }

  for (const auto& [name, atom] : neg.atoms) {
    for (const auto& o : atom.outcomes) {
      os << "outcome " << name << ' ' << o.name;
      if (!o.is_terminal()) {
        os << " ->";
        for (const auto& [agent, ts] : o.next)
          for (const auto& t : ts) os << ' ' << agent << ':' << t;
      }
      if (!o.delta.is_concrete()) {
        SymExprPtr def = SymExpr::label(name, o.name);
        if (!SymExpr::equal(o.delta.expr(), def))
          os << " delta " << SymExpr::to_string(o.delta.expr());
      }
      os << '\n';
    }
  }

  if (neg.states) {
    for (const auto& [name, atom] : neg.atoms) {
      for (const auto& o : atom.outcomes) {
        auto ps = o.delta.rel().pairs();
        if (ps.empty()) continue;
        os << "pairs " << name << ' ' << o.name;
        for (auto [i, j] : ps) {
          os << ' ' << neg.states->state_name(i) << "->" << neg.states->state_name(j);
        }
        os << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace neg
