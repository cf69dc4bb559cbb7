#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kep/abb/prg.hpp"
#include "kep/compat/compat.hpp"
#include "kep/compat/quote.hpp"
#include "kep/oracle/oracle.hpp"
#include "kep/protocol/client.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace kep;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kep_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Outcome cli(const std::string& args) const {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(KEP_BINARY) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), slurp(out), slurp(err)};
  }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
};

// Directed triangle 1 -> 2 -> 3 -> 1: donor i carries antigen i, patient i
// has antibodies against every antigen except its predecessor's.
compat::QuoteFile triangle() {
  compat::QuoteFile f;
  f.antigens = 3;
  for (std::size_t i = 0; i < 3; ++i) {
    compat::Quote q;
    q.donor_blood = compat::one_hot(compat::BloodType::kO);
    q.patient_accepts = compat::accepted_donors(compat::BloodType::kO);
    q.donor_antigens.assign(3, 0);
    q.donor_antigens[i] = 1;
    q.patient_antibodies.assign(3, 1);
    q.patient_antibodies[(i + 2) % 3] = 0;
    f.quotes.push_back(q);
  }
  return f;
}

std::size_t count_rows(const std::string& csv) {
  std::size_t rows = 0;
  std::stringstream in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_F(Cli, RunLocalTriangleMatchesOracle) {
  const auto f = triangle();
  {
    std::ofstream out(path("tri.jsonl"));
    compat::write_quotes(out, f);
  }
  const auto r = cli("run-local -q " + path("tri.jsonl") + " --shuffle identity --seed 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sol = json::parse(r.out);
  const auto g = compat::plain_graph(f.quotes, compat::PrioPolicy::constant_one());
  const auto expected = oracle::to_assignment(oracle::greedy_solve(g, 3), 3);
  EXPECT_EQ(sol["donor"].get<std::vector<std::uint32_t>>(), expected.donor);
  EXPECT_EQ(sol["recipient"].get<std::vector<std::uint32_t>>(), expected.recipient);
  EXPECT_EQ(sol["donor"], json({3, 1, 2}));
  EXPECT_EQ(sol["recipient"], json({2, 3, 1}));

  const auto two = cli("run-local -q " + path("tri.jsonl") + " --kappa 2 --seed 1");
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_EQ(json::parse(two.out)["donor"], json({0, 0, 0}));
  EXPECT_EQ(json::parse(two.out)["recipient"], json({0, 0, 0}));
}

TEST_F(Cli, MalformedQuoteFileReportsLine) {
  write("bad.jsonl",
        "{\"schema\":\"kep-quotes\",\"version\":1,\"antigens\":2}\n{\"donor_blood\":[1,0,0,0]}\n");
  const auto r = cli("run-local -q " + path("bad.jsonl"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(Cli, DealPeersReveal) {
  ASSERT_EQ(cli("gen -n 9 --seed 4 -o " + path("q.jsonl")).code, 0);
  ASSERT_EQ(cli("deal -q " + path("q.jsonl") + " -o " + path("d") + " --seed 2").code, 0);
  const int base = 30000 + static_cast<int>(::getpid() % 20000);
  std::string peers;
  for (int i = 0; i < 3; ++i) peers += (i ? "," : "") + std::string("127.0.0.1:") + std::to_string(base + i);
  std::string cmd;
  for (int i = 0; i < 3; ++i) {
    cmd += std::string(KEP_BINARY) + " peer --id " + std::to_string(i) + " --peers " + peers +
           " -s " + path("d." + std::to_string(i) + ".json") + " -o " +
           path("s." + std::to_string(i) + ".json") + " --shuffle identity --timeout 20 & ";
  }
  cmd += "wait";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto revealed = cli("reveal " + path("s.0.json") + " " + path("s.1.json") + " " +
                            path("s.2.json"));
  ASSERT_EQ(revealed.code, 0) << revealed.err;
  const auto local = cli("run-local -q " + path("q.jsonl") + " --shuffle identity");
  ASSERT_EQ(local.code, 0) << local.err;
  EXPECT_EQ(json::parse(revealed.out)["donor"], json::parse(local.out)["donor"]);
  EXPECT_EQ(json::parse(revealed.out)["recipient"], json::parse(local.out)["recipient"]);
}

TEST_F(Cli, RevealChecksViews) {
  // Solution of two pairs in a crossover: donor = [2, 1], recipient = [2, 1].
  const std::vector<abb::Ring> values = {2, 1, 2, 1};
  abb::Prg prg(abb::Prg::derive_key(5, 0), 0);
  const auto views = protocol::deal(values, prg);
  auto save = [&](int p, const abb::ShareVector& v) {
    json first = json::array(), second = json::array();
    for (const auto& s : v) {
      first.push_back(s.first);
      second.push_back(s.second);
    }
    write("v" + std::to_string(p) + ".json",
          json{{"schema", "kep-shares"}, {"version", 1}, {"kind", "solution"}, {"peer", p},
               {"count", 2}, {"antigens", 0}, {"first", first}, {"second", second}}
              .dump());
  };
  for (int p = 0; p < 3; ++p) save(p, views[p]);
  const std::string args = path("v0.json") + " " + path("v1.json") + " " + path("v2.json");
  const auto ok = cli("reveal " + args);
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(json::parse(ok.out)["donor"], json({2, 1}));

  auto tampered = views[1];
  tampered[0].first += 1;
  save(1, tampered);
  const auto bad = cli("reveal " + args);
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("error"), std::string::npos);

  save(1, views[1]);
  EXPECT_NE(cli("reveal " + path("v1.json") + " " + path("v0.json") + " " + path("v2.json")).code, 0);
}

TEST_F(Cli, GreedyAndExactOnGraphFile) {
  write("g.txt", "4\n0 1 1\n1 0 1\n1 2 5\n2 3 5\n3 1 5\n");
  const auto greedy = cli("greedy -g " + path("g.txt"));
  ASSERT_EQ(greedy.code, 0) << greedy.err;
  EXPECT_EQ(json::parse(greedy.out)["weight"], 15);
  const auto exact = cli("exact -g " + path("g.txt") + " --kappa 2");
  ASSERT_EQ(exact.code, 0) << exact.err;
  EXPECT_EQ(json::parse(exact.out)["weight"], 2);
  write("bad.txt", "3\n0 1 1\n0 7 1\n");
  const auto bad = cli("greedy -g " + path("bad.txt"));
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.err.find("line 3"), std::string::npos) << bad.err;
}

TEST_F(Cli, Quality) {
  const auto a = cli("quality -n 8 --reps 1 --seed 7");
  const auto b = cli("quality -n 8 --reps 1 --seed 7");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(count_rows(a.out), 1u);

  for (const char* source : {"", " --density 0.3"}) {
    const auto r = cli(std::string("quality -n 10 --reps 100 --seed 3") + source);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_rows(r.out), 100u);
    const auto at = r.out.find("min_ratio=");
    ASSERT_NE(at, std::string::npos);
    EXPECT_GE(std::stod(r.out.substr(at + 10)), 1.0 / 3);
  }

  const auto big = cli("quality -n 40 --reps 1");
  EXPECT_NE(big.code, 0);
  EXPECT_NE(big.err.find("at most"), std::string::npos);
}

TEST_F(Cli, SimulateAndPlot) {
  const auto one = cli("simulate --arrival 7 --interval 14 --reps 1 --horizon 200 --seed 3");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(count_rows(one.out), 1u);
  EXPECT_EQ(one.out.rfind("# config {", 0), 0u);

  const auto grid = cli("simulate --reps 1 --horizon 40 -o " + path("grid.csv"));
  ASSERT_EQ(grid.code, 0) << grid.err;
  EXPECT_EQ(count_rows(slurp(path("grid.csv"))), 40u);
  const auto plot = cli("plot " + path("grid.csv") + " --svg " + path("grid.svg"));
  ASSERT_EQ(plot.code, 0) << plot.err;
  std::stringstream table(plot.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(table, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "arrival_rate_days,1,2,4,7,14,30,60,120");
  EXPECT_EQ(std::count(lines[1].begin(), lines[1].end(), ','), 8);
  EXPECT_NE(slurp(path("grid.svg")).find("<svg"), std::string::npos);

  write("empty.csv", "");
  EXPECT_NE(cli("plot " + path("empty.csv")).code, 0);
  write("header.csv", "# config {}\narrival_rate_days,match_run_interval_days,ratio\n");
  EXPECT_NE(cli("plot " + path("header.csv")).code, 0);
}

TEST_F(Cli, SimulateRejectsOutOfDomain) {
  write("c.json", R"({"arrival_rate_days": 3})");
  const auto r = cli("simulate -c " + path("c.json"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("arrival rate"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(cli("").code, 0);
  EXPECT_NE(cli("run-local").code, 0);
  EXPECT_NE(cli("run-local -q x --kappa 4").code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
}
