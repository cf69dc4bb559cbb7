#include "common.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kep/error.hpp"

namespace kep::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kShareSchema = "kep-shares";

}  // namespace

InStream open_in(const std::string& path) {
  if (path == "-") return {&std::cin, [](std::istream*) {}};
  InStream in(new std::ifstream(path), [](std::istream* p) { delete p; });
  if (!*in) throw InvalidArgument("cannot open '" + path + "'");
  return in;
}

OutStream open_out(const std::string& path) {
  if (path == "-") return {&std::cout, [](std::ostream* p) { p->flush(); }};
  OutStream out(new std::ofstream(path), [](std::ostream* p) { delete p; });
  if (!*out) throw InvalidArgument("cannot write '" + path + "'");
  return out;
}

compat::QuoteFile load_quotes(const std::string& path) {
  auto in = open_in(path);
  try {
    return compat::read_quotes(*in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

oracle::PlainGraph load_graph(const std::string& path) {
  auto in = open_in(path);
  try {
    return oracle::read_graph(*in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

compat::PrioPolicy load_policy(const std::string& spec) {
  if (spec == "constant") return compat::PrioPolicy::constant_one();
  if (spec == "extended") {
    compat::PrioPolicy p;
    p.kind = compat::PrioPolicy::Kind::kExtended;
    p.base = p.blood_identical = p.region_match = p.pediatric = p.prior_living_donor =
        p.age_difference = p.high_cpra = 1;
    return p;
  }
  if (!spec.empty() && spec.front() == '{') return compat::parse_policy(spec);
  auto in = open_in(spec);
  std::stringstream text;
  text << in->rdbuf();
  return compat::parse_policy(text.str());
}

gates::ShuffleMode parse_shuffle(const std::string& text) {
  if (text == "random") return gates::ShuffleMode::kRandom;
  if (text == "seeded") return gates::ShuffleMode::kSeeded;
  if (text == "identity") return gates::ShuffleMode::kIdentity;
  throw InvalidArgument("unknown shuffle mode '" + text + "'");
}

void write_solution(std::ostream& out, const oracle::Assignment& a,
                    const oracle::PlainGraph* graph) {
  json obj{{"pairs", a.donor.size()}, {"donor", a.donor}, {"recipient", a.recipient}};
  if (graph) {
    const auto packing = oracle::from_assignment(*graph, a);
    obj["cycles"] = packing.cycles;
    obj["weight"] = packing.total_weight;
    obj["matched_pairs"] = packing.matched_pairs();
  }
  out << obj.dump() << '\n';
}

void write_shares(const std::string& path, const ShareFile& file) {
  json first = json::array(), second = json::array();
  for (const auto& s : file.shares) {
    first.push_back(s.first);
    second.push_back(s.second);
  }
  json obj{{"schema", kShareSchema}, {"version", 1},       {"kind", file.kind},
           {"peer", file.peer},      {"count", file.count}, {"antigens", file.antigens},
           {"first", first},         {"second", second}};
  *open_out(path) << obj.dump() << '\n';
}

ShareFile read_shares(const std::string& path) {
  auto in = open_in(path);
  json obj;
  try {
    obj = json::parse(*in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path + ": not a share file: " + e.what());
  }
  try {
    if (obj.at("schema") != kShareSchema || obj.at("version") != 1)
      throw InvalidArgument(path + ": unsupported share file");
    ShareFile f;
    f.kind = obj.at("kind").get<std::string>();
    f.peer = obj.at("peer").get<std::uint32_t>();
    f.count = obj.at("count").get<std::size_t>();
    f.antigens = obj.at("antigens").get<std::size_t>();
    const auto first = obj.at("first").get<std::vector<abb::Ring>>();
    const auto second = obj.at("second").get<std::vector<abb::Ring>>();
    if (first.size() != second.size()) throw InvalidArgument(path + ": share columns differ");
    for (std::size_t i = 0; i < first.size(); ++i) f.shares.push_back({first[i], second[i]});
    if (f.peer > 2) throw InvalidArgument(path + ": peer id must be 0, 1 or 2");
    return f;
  } catch (const json::exception& e) {
    throw ParseError(0, path + ": malformed share file: " + e.what());
  }
}

}  // namespace kep::cli
