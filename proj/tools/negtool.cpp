// negtool: inspect, reduce and generate negotiation files.
//
// Exit codes: 0 success (or sound), 1 unsound, 2 usage/parse/input error,
// 3 exploration limit exceeded, 4 soundness methods disagree.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "neg/dot.hpp"
#include "neg/errors.hpp"
#include "neg/format.hpp"
#include "neg/generator.hpp"
#include "neg/semantics.hpp"
#include "neg/structure.hpp"
#include "neg/summarize.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_unsound = 1;
constexpr int exit_usage = 2;
constexpr int exit_limit = 3;
constexpr int exit_disagree = 4;

neg::Negotiation load(const std::string& path) {
  auto res = neg::parse_negotiation_file(path);
  if (!res.negotiation) {
    for (const auto& d : res.diagnostics) {
      if (d.line > 0)
        std::cerr << path << ":" << d.line << ": " << d.message << '\n';
      else
        std::cerr << path << ": " << d.message << '\n';
    }
    throw neg::Error("cannot load '" + path + "'");
  }
  return std::move(*res.negotiation);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw neg::Error("cannot write '" + path + "'");
  out << content;
}

// Replace concrete transformers by canonical labels (keeps the structure,
// drops the relations).
neg::Negotiation strip_to_symbolic(const neg::Negotiation& in) {
  neg::Negotiation out = in;
  out.states = nullptr;
  for (auto& [name, atom] : out.atoms)
    for (auto& o : atom.outcomes) o.delta = neg::Transformer::label(name, o.name);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negotiation soundness and summaries"};
  app.require_subcommand(1);

  std::size_t node_limit = neg::default_node_limit;
  app.add_option("--node-limit", node_limit, "reachable-marking budget");

  std::string file, out_path, trace_path, stats_path;
  std::string backend = "auto", method = "reduction";
  bool want_reachability = false;

  auto* c_validate = app.add_subcommand("validate", "parse and check a file");
  c_validate->add_option("file", file)->required();

  auto* c_summarize = app.add_subcommand("summarize", "reduce to a one-atom summary");
  c_summarize->add_option("file", file)->required();
  c_summarize->add_option("--trace", trace_path, "write rule applications to a file");
  c_summarize->add_option("--stats", stats_path, "write run statistics to a file");
  c_summarize->add_option("--backend", backend, "auto|symbolic|concrete")
      ->check(CLI::IsMember({"auto", "symbolic", "concrete"}));

  auto* c_sound = app.add_subcommand("sound", "decide soundness");
  c_sound->add_option("file", file)->required();
  c_sound->add_option("--method", method, "reduction|oracle|both")
      ->check(CLI::IsMember({"reduction", "oracle", "both"}));

  auto* c_graph = app.add_subcommand("graph", "emit GraphViz DOT");
  c_graph->add_option("file", file)->required();
  c_graph->add_option("--dot", out_path, "output path (default stdout)");
  c_graph->add_flag("--reachability", want_reachability, "reachability graph instead of atom graph");

  auto* c_gen = app.add_subcommand("gen", "generate a random sound negotiation");
  neg::GenParams gp;
  c_gen->add_option("--seed", gp.seed);
  c_gen->add_option("--atoms", gp.atoms);
  c_gen->add_option("--agents", gp.agents);
  c_gen->add_option("--loops", gp.loops);
  c_gen->add_option("--extra", gp.extra_outcomes, "extra duplicated outcomes");
  c_gen->add_option("--states", gp.states, "per-agent state count (concrete backend)");
  c_gen->add_option("-o,--out", out_path, "output path (default stdout)");

  auto* c_stats = app.add_subcommand("stats", "reduce and print run statistics");
  c_stats->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*c_validate) {
      auto res = neg::parse_negotiation_file(file);
      if (!res.negotiation) {
        for (const auto& d : res.diagnostics) {
          if (d.line > 0)
            std::cout << "line " << d.line << ": " << d.message << '\n';
          else
            std::cout << d.message << '\n';
        }
        return exit_usage;
      }
      std::cout << "ok\n";
      return exit_ok;
    }

    if (*c_summarize || *c_stats) {
      neg::Negotiation n = load(file);
      if (*c_summarize) {
        if (backend == "concrete" && !n.states)
          throw neg::Error("--backend concrete needs states/pairs in the file");
        if (backend == "symbolic" && n.states) n = strip_to_symbolic(n);
      }
      neg::SummarizeOptions opts;
      opts.node_limit = node_limit;
      neg::SummaryResult res = neg::summarize(n, opts);
      if (!trace_path.empty()) {
        std::string lines;
        for (const auto& a : res.transcript) lines += a.to_line() + '\n';
        write_output(trace_path, lines);
      }
      if (!stats_path.empty())
        write_output(stats_path, neg::render_stats(res.stats, res.sound));
      if (*c_stats) {
        std::cout << neg::render_stats(res.stats, res.sound);
        return res.sound ? exit_ok : exit_unsound;
      }
      if (res.sound) {
        std::cout << "sound\n" << neg::serialize(res.reduced);
        return exit_ok;
      }
      std::cout << "unsound: " << res.evidence << '\n';
      return exit_unsound;
    }

    if (*c_sound) {
      neg::Negotiation n = load(file);
      std::optional<bool> by_reduction, by_oracle;
      std::string oracle_detail;
      if (method == "reduction" || method == "both") {
        neg::SummarizeOptions opts;
        opts.node_limit = node_limit;
        by_reduction = neg::summarize(n, opts).sound;
      }
      if (method == "oracle" || method == "both") {
        auto v = neg::soundness_oracle(n, node_limit);
        by_oracle = v.sound;
        if (!v.sound) {
          if (v.reason == neg::SoundnessVerdict::Reason::atom_never_enabled)
            oracle_detail = "witness: atom " + v.never_enabled_atom + " never enabled";
          else
            oracle_detail = "witness: " + neg::format_steps(v.witness) + " (" +
                            (v.bad_is_deadlock ? "deadlock" : "no completion") + " at " +
                            v.bad_marking + ")";
        }
      }
      if (by_reduction && by_oracle && *by_reduction != *by_oracle) {
        std::cout << "methods disagree: reduction says "
                  << (*by_reduction ? "sound" : "unsound") << ", oracle says "
                  << (*by_oracle ? "sound" : "unsound") << '\n';
        return exit_disagree;
      }
      bool sound = by_reduction ? *by_reduction : *by_oracle;
      std::cout << (sound ? "sound" : "unsound") << '\n';
      if (!oracle_detail.empty()) std::cout << oracle_detail << '\n';
      return sound ? exit_ok : exit_unsound;
    }

    if (*c_graph) {
      neg::Negotiation n = load(file);
      if (want_reachability) {
        auto g = neg::reachability_graph(n, node_limit);
        write_output(out_path, neg::to_dot_reachability(n, g));
      } else {
        write_output(out_path, neg::to_dot_structure(n));
      }
      return exit_ok;
    }

    if (*c_gen) {
      write_output(out_path, neg::serialize(neg::generate(gp)));
      return exit_ok;
    }
  } catch (const neg::LimitError& e) {
    std::cerr << "limit exceeded: " << e.what() << '\n';
    return exit_limit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
