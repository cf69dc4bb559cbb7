#include <algorithm>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "kep/abb/prg.hpp"
#include "kep/datagen/datagen.hpp"
#include "kep/dynsim/dynsim.hpp"
#include "kep/error.hpp"

namespace kep::cli {

namespace {

struct GraphOpts {
  std::string graph;
  std::string quotes;
  std::string policy = "constant";
  unsigned kappa = 3;
  std::string out = "-";
};

void add_graph_options(CLI::App* cmd, GraphOpts& o) {
  auto* g = cmd->add_option("-g,--graph", o.graph, "Graph file ('N' then 'u v weight' lines)");
  auto* q = cmd->add_option("-q,--quotes", o.quotes, "Quote file; the graph is built in the clear");
  g->excludes(q);
  cmd->add_option("--policy", o.policy, "Priority policy used with --quotes");
  cmd->add_option("--kappa", o.kappa, "Maximum cycle length")->check(CLI::IsMember({2, 3}));
  cmd->add_option("-o,--out", o.out, "Output solution file");
}

oracle::PlainGraph input_graph(const GraphOpts& o) {
  if (!o.graph.empty()) return load_graph(o.graph);
  if (!o.quotes.empty()) return compat::plain_graph(load_quotes(o.quotes).quotes, load_policy(o.policy));
  throw InvalidArgument("one of --graph or --quotes is required");
}

void emit(const GraphOpts& o, const oracle::PlainGraph& g, const oracle::CyclePacking& p) {
  const auto report = oracle::validate(g, p, o.kappa);
  if (!report.ok()) throw Error("solver produced an invalid packing: " + report.detail);
  write_solution(*open_out(o.out), oracle::to_assignment(p, g.size()), &g);
}

}  // namespace

void add_greedy(CLI::App& app) {
  auto opts = std::make_shared<GraphOpts>();
  auto* cmd = app.add_subcommand("greedy", "Plaintext greedy cycle packing");
  add_graph_options(cmd, *opts);
  cmd->callback([opts] {
    const auto g = input_graph(*opts);
    emit(*opts, g, oracle::greedy_solve(g, opts->kappa));
  });
}

void add_exact(CLI::App& app) {
  auto opts = std::make_shared<GraphOpts>();
  auto large = std::make_shared<bool>(false);
  auto* cmd = app.add_subcommand("exact", "Maximum-weight cycle packing");
  add_graph_options(cmd, *opts);
  cmd->add_flag("--large", *large,
                "Use the decomposing branch and bound solver instead of the subset DP");
  cmd->callback([opts, large] {
    const auto g = input_graph(*opts);
    emit(*opts, g,
         *large ? oracle::optimal_packing(g, opts->kappa) : oracle::exact_solve(g, opts->kappa));
  });
}

void add_quality(CLI::App& app) {
  struct Opts {
    std::size_t n = 10;
    std::size_t reps = 100;
    unsigned kappa = 3;
    std::uint64_t seed = 1;
    std::optional<double> density;
    std::string policy = "constant";
    std::string out = "-";
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("quality", "Greedy against exact on random instances");
  cmd->add_option("-n,--pairs", opts->n, "Pairs per instance")->check(CLI::Range(2, 1000));
  cmd->add_option("--reps", opts->reps, "Number of instances")->check(CLI::PositiveNumber);
  cmd->add_option("--kappa", opts->kappa, "Maximum cycle length")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--seed", opts->seed, "Base seed");
  cmd->add_option("--density", opts->density,
                  "Use random graphs with this edge probability instead of sampled pairs")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--policy", opts->policy, "Priority policy for sampled pairs");
  cmd->add_option("-o,--out", opts->out, "Output CSV");
  cmd->callback([opts] {
    if (opts->n > oracle::kExactMaxNodes)
      throw SizeLimit("quality needs the exact solver, which handles at most " +
                      std::to_string(oracle::kExactMaxNodes) + " pairs");
    const auto policy = load_policy(opts->policy);
    const datagen::PopulationModel model;
    auto out = open_out(opts->out);
    *out << "# quality n=" << opts->n << " reps=" << opts->reps << " kappa=" << opts->kappa
         << " seed=" << opts->seed << " source="
         << (opts->density ? "random:" + std::to_string(*opts->density) : "pairs") << '\n';
    *out << "rep,seed,greedy_pairs,exact_pairs,pair_ratio,greedy_weight,exact_weight,weight_ratio\n";
    double sum = 0, lowest = 1;
    for (std::size_t r = 0; r < opts->reps; ++r) {
      const auto seed = dynsim::repetition_seed(opts->seed, r);
      oracle::PlainGraph g(opts->n);
      if (opts->density) {
        abb::Prg prg(abb::Prg::derive_key(seed, 0x6772617068000000ull), 0);
        for (std::size_t i = 0; i < opts->n; ++i)
          for (std::size_t j = 0; j < opts->n; ++j)
            if (i != j && datagen::uniform01(prg) < *opts->density) g.set_edge(i, j, 1);
      } else {
        g = compat::plain_graph(datagen::gen_pairs(opts->n, model, seed), policy);
      }
      const auto greedy = oracle::greedy_solve(g, opts->kappa);
      const auto exact = oracle::exact_solve(g, opts->kappa);
      auto ratio = [](double a, double b) { return b == 0 ? 1.0 : a / b; };
      const double pair_ratio = ratio(greedy.matched_pairs(), exact.matched_pairs());
      const double weight_ratio = ratio(greedy.total_weight, exact.total_weight);
      sum += pair_ratio;
      lowest = std::min(lowest, pair_ratio);
      *out << r << ',' << seed << ',' << greedy.matched_pairs() << ',' << exact.matched_pairs()
           << ',' << std::setprecision(10) << pair_ratio << ',' << greedy.total_weight << ','
           << exact.total_weight << ',' << weight_ratio << '\n';
    }
    const double mean = sum / static_cast<double>(opts->reps);
    *out << "# summary mean_ratio=" << mean << " min_ratio=" << lowest << '\n';
    spdlog::info("mean ratio {:.4f}, min ratio {:.4f}", mean, lowest);
  });
}

}  // namespace kep::cli
