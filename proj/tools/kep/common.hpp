#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kep/abb/share.hpp"
#include "kep/compat/compat.hpp"
#include "kep/compat/quote.hpp"
#include "kep/gates/gates.hpp"
#include "kep/oracle/oracle.hpp"

namespace CLI {
class App;
}

namespace kep::cli {

/// "-" is stdin / stdout.
using InStream = std::unique_ptr<std::istream, void (*)(std::istream*)>;
using OutStream = std::unique_ptr<std::ostream, void (*)(std::ostream*)>;

InStream open_in(const std::string& path);
OutStream open_out(const std::string& path);

/// Parse errors carry the file name in front of the line number.
compat::QuoteFile load_quotes(const std::string& path);
oracle::PlainGraph load_graph(const std::string& path);

/// "constant", "extended" (unit coefficients), a JSON object, or a path to a
/// JSON file.
compat::PrioPolicy load_policy(const std::string& spec);

gates::ShuffleMode parse_shuffle(const std::string& text);

/// Solution as JSON: donor/recipient vectors (1-based, 0 = unmatched) plus the
/// cycles and their weight when a graph is known.
void write_solution(std::ostream& out, const oracle::Assignment& a,
                    const oracle::PlainGraph* graph);

/// One peer's view of shared values.
struct ShareFile {
  std::string kind;  // "quotes" or "solution"
  std::uint32_t peer = 0;
  std::size_t antigens = 0;
  std::size_t count = 0;
  abb::ShareVector shares;
};

void write_shares(const std::string& path, const ShareFile& file);
ShareFile read_shares(const std::string& path);

void add_gen(CLI::App& app);
void add_deal(CLI::App& app);
void add_reveal(CLI::App& app);
void add_peer(CLI::App& app);
void add_run_local(CLI::App& app);
void add_greedy(CLI::App& app);
void add_exact(CLI::App& app);
void add_quality(CLI::App& app);
void add_simulate(CLI::App& app);
void add_plot(CLI::App& app);

}  // namespace kep::cli
