#include <chrono>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "kep/abb/session.hpp"
#include "kep/error.hpp"
#include "kep/protocol/client.hpp"
#include "kep/protocol/protocol.hpp"
#include "kep/transport/tcp.hpp"

namespace kep::cli {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kDealLabel = 0x6465616c00000000ull;

struct ProtocolOpts {
  unsigned kappa = 3;
  std::string policy = "constant";
  std::string shuffle = "random";
  bool shuffle_subsets = false;
  std::optional<std::uint64_t> seed;
};

void add_protocol_options(CLI::App* cmd, ProtocolOpts& o) {
  cmd->add_option("--kappa", o.kappa, "Maximum cycle length")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--policy", o.policy,
                  "Priority policy: constant, extended, a JSON object or a JSON file");
  cmd->add_option("--shuffle", o.shuffle, "Node shuffle")
      ->check(CLI::IsMember({"random", "seeded", "identity"}));
  cmd->add_flag("--shuffle-subsets", o.shuffle_subsets,
                "Secretly permute the subset list before the greedy loop");
}

protocol::ProtocolConfig make_config(const ProtocolOpts& o) {
  protocol::ProtocolConfig c;
  c.kappa = o.kappa;
  c.policy = load_policy(o.policy);
  c.shuffle.mode = parse_shuffle(o.shuffle);
  if (c.shuffle.mode == gates::ShuffleMode::kSeeded) {
    if (!o.seed) throw InvalidArgument("--shuffle seeded needs --seed");
    c.shuffle.seed = *o.seed;
  }
  c.shuffle_subsets = o.shuffle_subsets;
  c.validate();
  return c;
}

std::vector<compat::SharedQuote> unflatten_all(const abb::ShareVector& flat, std::size_t count,
                                               std::size_t antigens) {
  const std::size_t width = compat::flat_size(antigens);
  if (flat.size() != count * width) throw InvalidArgument("share view has the wrong length");
  std::vector<compat::SharedQuote> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(compat::unflatten(std::span(flat).subspan(i * width, width), antigens));
  return out;
}

struct PeerOutcome {
  protocol::SharedSolution solution;
  oracle::Assignment opened;
  transport::Transcript transcript;
  abb::PartyStats party;
  protocol::ProtocolStats protocol;
};

PeerOutcome run_peer(abb::Party& party, const protocol::ProtocolConfig& config,
                     const abb::ShareVector& view, std::size_t count, std::size_t antigens,
                     bool open) {
  PeerOutcome out;
  const auto quotes = unflatten_all(view, count, antigens);
  out.solution = protocol::run_protocol(party, config, quotes, &out.protocol);
  if (open) out.opened = protocol::open_solution(party, out.solution);
  out.transcript = party.channel().transcript();
  out.party = party.stats();
  return out;
}

json stats_json(const std::array<PeerOutcome, 3>& peers) {
  std::vector<const transport::Transcript*> transcripts;
  json sent = json::array();
  for (const auto& p : peers) {
    transcripts.push_back(&p.transcript);
    sent.push_back(p.transcript.bytes_sent());
  }
  const auto summary = transport::transcript_summary(transcripts);
  const auto& s = peers[0].protocol;
  return {{"total_bytes", transport::total_bytes(summary)},
          {"bytes_sent", sent},
          {"rounds", peers[0].party.rounds},
          {"multiplications", peers[0].party.multiplications},
          {"subsets", s.subsets},
          {"iterations", s.iterations},
          {"phase_seconds",
           {{"construction", s.phase_time[0].count()},
            {"evaluation", s.phase_time[1].count()},
            {"approximation", s.phase_time[2].count()},
            {"resolution", s.phase_time[3].count()}}},
          {"summary", summary}};
}

}  // namespace

void add_run_local(CLI::App& app) {
  struct Opts {
    std::string quotes;
    std::string out = "-";
    std::string stats;
    ProtocolOpts protocol;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "run-local", "Deal a quote file and run the secure protocol with three in-process peers");
  cmd->add_option("-q,--quotes", opts->quotes, "Quote file")->required();
  add_protocol_options(cmd, opts->protocol);
  cmd->add_option("--seed", opts->protocol.seed,
                  "Derive dealing, peer keys and seeded shuffles from this seed (insecure)");
  cmd->add_option("-o,--out", opts->out, "Output solution file");
  cmd->add_option("--stats", opts->stats, "Write transcript and timing statistics as JSON");
  cmd->callback([opts] {
    const auto file = load_quotes(opts->quotes);
    const auto config = make_config(opts->protocol);
    const std::size_t n = file.quotes.size();
    if (n < 2) throw InvalidArgument("at least two pairs are needed");

    std::vector<abb::Ring> flat;
    for (const auto& q : file.quotes) {
      const auto f = compat::flatten(q);
      flat.insert(flat.end(), f.begin(), f.end());
    }
    const auto& seed = opts->protocol.seed;
    abb::Prg prg(seed ? abb::Prg::derive_key(*seed, kDealLabel) : abb::Prg::random_key(), 0);
    const auto views = protocol::deal(flat, prg);

    abb::PartyOptions party_options;
    party_options.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    auto peers = abb::run_local(party_options, [&](abb::Party& party) {
      return run_peer(party, config, views[party.id()], n, file.antigens, true);
    });
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const auto graph = compat::plain_graph(file.quotes, config.policy);
    write_solution(*open_out(opts->out), peers[0].opened, &graph);
    auto stats = stats_json(peers);
    stats["pairs"] = n;
    stats["kappa"] = config.kappa;
    stats["seconds"] = elapsed.count();
    if (!opts->stats.empty()) *open_out(opts->stats) << stats.dump(2) << '\n';
    spdlog::info("{} pairs, {} subsets, {} rounds, {} bytes, {:.3f} s", n,
                 stats["subsets"].get<std::size_t>(), stats["rounds"].get<std::uint64_t>(),
                 stats["total_bytes"].get<std::uint64_t>(), elapsed.count());
  });
}

void add_peer(CLI::App& app) {
  struct Opts {
    std::uint32_t id = 0;
    std::vector<std::string> peers;
    std::string shares;
    std::string out;
    unsigned timeout_s = 30;
    ProtocolOpts protocol;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("peer", "Run one computing peer over TCP");
  cmd->add_option("--id", opts->id, "This peer's id")->required()->check(CLI::Range(0, 2));
  cmd->add_option("--peers", opts->peers, "host:port of peers 0, 1 and 2")
      ->required()
      ->expected(3)
      ->delimiter(',');
  cmd->add_option("-s,--shares", opts->shares, "This peer's quote view from 'deal'")->required();
  cmd->add_option("-o,--out", opts->out, "Output solution view for 'reveal'")->required();
  cmd->add_option("--timeout", opts->timeout_s, "Seconds to wait for the other peers");
  add_protocol_options(cmd, opts->protocol);
  cmd->add_option("--seed", opts->protocol.seed, "Seed of the seeded shuffle");
  cmd->callback([opts] {
    const auto view = read_shares(opts->shares);
    if (view.kind != "quotes") throw InvalidArgument(opts->shares + ": not a quote view");
    if (view.peer != opts->id)
      throw InvalidArgument(opts->shares + ": view belongs to peer " + std::to_string(view.peer));
    const auto config = make_config(opts->protocol);

    std::vector<transport::Endpoint> endpoints;
    for (const auto& p : opts->peers) endpoints.push_back(transport::Endpoint::parse(p));
    transport::TcpListener listener(endpoints[opts->id].port);
    spdlog::info("peer {} listening on port {}", opts->id, listener.port());
    auto channel = transport::tcp_connect(opts->id, std::move(listener), endpoints,
                                          std::chrono::seconds(opts->timeout_s));
    abb::Party party(*channel);
    const auto outcome = run_peer(party, config, view.shares, view.count, view.antigens, false);

    abb::ShareVector both = outcome.solution.donor;
    both.insert(both.end(), outcome.solution.recipient.begin(), outcome.solution.recipient.end());
    write_shares(opts->out, {"solution", opts->id, 0, view.count, both});
    spdlog::info("peer {} done: {} rounds, {} bytes sent", opts->id, outcome.party.rounds,
                 outcome.transcript.bytes_sent());
  });
}

}  // namespace kep::cli
