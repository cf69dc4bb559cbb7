#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "kep/abb/prg.hpp"
#include "kep/datagen/datagen.hpp"
#include "kep/dynsim/dynsim.hpp"
#include "kep/error.hpp"
#include "kep/protocol/client.hpp"

namespace kep::cli {

namespace {

constexpr std::uint64_t kDealLabel = 0x6465616c00000000ull;

}  // namespace

void add_gen(CLI::App& app) {
  struct Opts {
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string config;
    std::string out = "-";
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("gen", "Sample synthetic patient-donor pairs into a quote file");
  cmd->add_option("-n,--pairs", opts->n, "Number of pairs")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "Sampling seed");
  cmd->add_option("--config", opts->config, "Simulation config whose population model is used")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opts->out, "Output quote file ('-' for stdout)");
  cmd->callback([opts] {
    datagen::PopulationModel model;
    if (!opts->config.empty()) model = dynsim::read_config(*open_in(opts->config)).population;
    compat::QuoteFile file{model.antigens, datagen::gen_pairs(opts->n, model, opts->seed)};
    compat::write_quotes(*open_out(opts->out), file);
    spdlog::info("wrote {} pairs", opts->n);
  });
}

void add_deal(CLI::App& app) {
  struct Opts {
    std::string quotes;
    std::string prefix;
    std::optional<std::uint64_t> seed;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "deal", "Secret-share a quote file into one view per computing peer");
  cmd->add_option("-q,--quotes", opts->quotes, "Quote file")->required();
  cmd->add_option("-o,--out", opts->prefix, "Output prefix; writes PREFIX.0.json to PREFIX.2.json")
      ->required();
  cmd->add_option("--seed", opts->seed, "Deterministic dealing (insecure, for testing)");
  cmd->callback([opts] {
    const auto file = load_quotes(opts->quotes);
    std::vector<abb::Ring> flat;
    for (const auto& q : file.quotes) {
      const auto f = compat::flatten(q);
      flat.insert(flat.end(), f.begin(), f.end());
    }
    abb::Prg prg(opts->seed ? abb::Prg::derive_key(*opts->seed, kDealLabel) : abb::Prg::random_key(),
                 0);
    const auto views = protocol::deal(flat, prg);
    for (std::uint32_t p = 0; p < 3; ++p) {
      write_shares(opts->prefix + "." + std::to_string(p) + ".json",
                   {"quotes", p, file.antigens, file.quotes.size(), views[p]});
    }
    spdlog::info("dealt {} pairs to three peers", file.quotes.size());
  });
}

void add_reveal(CLI::App& app) {
  struct Opts {
    std::vector<std::string> views;
    std::string quotes;
    std::string policy = "constant";
    std::string out = "-";
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("reveal", "Reconstruct a solution from the three peers' views");
  cmd->add_option("views", opts->views, "Solution views of peers 0, 1 and 2")
      ->required()
      ->expected(3);
  cmd->add_option("--quotes", opts->quotes, "Quote file, to report cycles and weight");
  cmd->add_option("--policy", opts->policy, "Priority policy used with --quotes");
  cmd->add_option("-o,--out", opts->out, "Output solution file");
  cmd->callback([opts] {
    std::array<abb::ShareVector, 3> views;
    std::size_t count = 0;
    for (std::uint32_t p = 0; p < 3; ++p) {
      auto f = read_shares(opts->views[p]);
      if (f.kind != "solution") throw InvalidArgument(opts->views[p] + ": not a solution view");
      if (f.peer != p) throw InvalidArgument(opts->views[p] + ": expected the view of peer " +
                                             std::to_string(p));
      if (p > 0 && f.count != count) throw InvalidArgument("views disagree on the pair count");
      count = f.count;
      if (f.shares.size() != 2 * count) throw InvalidArgument(opts->views[p] + ": wrong length");
      views[p] = std::move(f.shares);
    }
    const auto values = protocol::reconstruct(views);
    oracle::Assignment a;
    for (auto v : values)
      if (v > count) throw InconsistentShares("revealed index out of range");
    for (std::size_t i = 0; i < count; ++i) {
      a.donor.push_back(static_cast<std::uint32_t>(values[i]));
      a.recipient.push_back(static_cast<std::uint32_t>(values[count + i]));
    }
    std::optional<oracle::PlainGraph> graph;
    if (!opts->quotes.empty())
      graph = compat::plain_graph(load_quotes(opts->quotes).quotes, load_policy(opts->policy));
    write_solution(*open_out(opts->out), a, graph ? &*graph : nullptr);
  });
}

}  // namespace kep::cli
