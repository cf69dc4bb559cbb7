#include "kep/dynsim/dynsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>

#include "kep/error.hpp"
#include "kep/oracle/oracle.hpp"

namespace kep::dynsim {

namespace {

constexpr std::uint64_t kArrivalLabel = 0x6172726976000000ull;
constexpr std::uint64_t kDepartureLabel = 0x6465706172000000ull;
constexpr std::uint64_t kOutcomeLabel = 0x6f7574636f000000ull;
constexpr std::uint64_t kShuffleLabel = 0x7368756666100000ull;

double draw(abb::Prg& prg, Distribution d, double mean) {
  // Both shapes consume one draw so the streams stay aligned.
  const double u = datagen::uniform01(prg);
  return d == Distribution::kFixed ? mean : -mean * std::log1p(-u);
}

enum class State { kWaiting, kLocked, kReentering, kDeparted, kTransplanted };

struct Pair {
  compat::Quote quote;
  double departure = 0;
  State state = State::kWaiting;
  bool fresh = true;
  abb::Prg outcomes;
};

// Event kinds in processing order for equal times.
enum class Kind { kSolveDone = 0, kReentry = 1, kArrival = 2, kMatchRun = 3 };

struct Event {
  double time;
  Kind kind;
  std::uint64_t seq;
  std::uint32_t payload;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

bool in_set(double v, std::initializer_list<double> allowed) {
  return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

class Simulation {
 public:
  Simulation(const SimConfig& config, const PairSource& source)
      : config_(config),
        source_(source),
        arrivals_(abb::Prg::derive_key(config.seed, kArrivalLabel), 0),
        departures_(abb::Prg::derive_key(config.seed, kDepartureLabel), 0),
        shuffles_(abb::Prg::derive_key(config.seed, kShuffleLabel), 0),
        outcome_key_(abb::Prg::derive_key(config.seed, kOutcomeLabel)) {}

  SimResult run(const std::vector<compat::Quote>& initial) {
    for (const auto& q : initial) admit(q, 0);
    if (std::isfinite(config_.arrival_rate_days))
      push(draw(arrivals_, config_.arrival_distribution, config_.arrival_rate_days), Kind::kArrival, 0);
    push(config_.match_run_interval_days, Kind::kMatchRun, 0);

    while (!events_.empty() && events_.top().time <= config_.horizon_days) {
      const Event e = events_.top();
      events_.pop();
      switch (e.kind) {
        case Kind::kArrival:
          admit(source_(), e.time);
          push(e.time + draw(arrivals_, config_.arrival_distribution, config_.arrival_rate_days), Kind::kArrival, 0);
          break;
        case Kind::kMatchRun:
          match_run(e.time);
          break;
        case Kind::kReentry:
          reenter(e.payload, e.time);
          break;
        case Kind::kSolveDone:
          finish_solve(e.payload, e.time);
          break;
      }
    }

    for (auto& p : pairs_) {
      if (p.state == State::kWaiting && p.departure <= config_.horizon_days) {
        p.state = State::kDeparted;
        ++result_.departed;
      }
      if (p.state == State::kWaiting) ++result_.waiting;
      if (p.state == State::kLocked || p.state == State::kReentering) ++result_.in_flight;
    }
    return std::move(result_);
  }

 private:
  void push(double time, Kind kind, std::uint32_t payload) {
    events_.push({time, kind, seq_++, payload});
  }

  void admit(compat::Quote q, double now) {
    const auto id = static_cast<std::uint32_t>(pairs_.size());
    Pair p;
    p.departure = now + draw(departures_, config_.departure_distribution, config_.departure_rate_days);
    p.outcomes = abb::Prg(outcome_key_, id);
    p.quote = std::move(q);
    pairs_.push_back(std::move(p));
    ++result_.arrived;
  }

  // Waiting pairs still present at `now`, in arrival order.
  std::vector<std::uint32_t> snapshot(double now) {
    std::vector<std::uint32_t> pool;
    for (std::uint32_t id = 0; id < pairs_.size(); ++id) {
      auto& p = pairs_[id];
      if (p.state != State::kWaiting) continue;
      if (p.departure <= now) {
        p.state = State::kDeparted;
        ++result_.departed;
        continue;
      }
      pool.push_back(id);
    }
    return pool;
  }

  bool edge(std::uint32_t from, std::uint32_t to) const {
    return compat::compatible(pairs_[from].quote, pairs_[to].quote);
  }

  void match_run(double now) {
    push(now + config_.match_run_interval_days, Kind::kMatchRun, 0);
    const auto pool = snapshot(now);
    ++result_.match_runs;
    result_.pool.push_back({now, pool.size()});

    // Every earlier run left the rest of the pool without a cycle, so every
    // cycle passes through a pair that arrived or came back since. Cycles
    // have at most three nodes, so the fresh pairs and their neighbours hold
    // all of them.
    std::vector<std::uint32_t> fresh;
    for (auto id : pool)
      if (pairs_[id].fresh) fresh.push_back(id);
    std::vector<std::uint32_t> local;
    for (auto id : pool) {
      const bool keep = !config_.restrict_to_fresh || pairs_[id].fresh || std::any_of(fresh.begin(), fresh.end(), [&](auto f) {
                          return edge(f, id) || edge(id, f);
                        });
      if (keep) local.push_back(id);
    }
    for (auto id : pool) pairs_[id].fresh = false;

    // Greedy tie-breaking follows a random node order, drawn over the whole
    // pool so it does not depend on the restriction above.
    std::vector<std::uint32_t> rank;
    if (config_.model == Model::kGreedy && config_.greedy_shuffle) {
      const auto perm = abb::random_permutation(shuffles_, pool.size());
      std::vector<std::uint32_t> keys;
      for (std::size_t i = 0, j = 0; i < pool.size() && j < local.size(); ++i)
        if (pool[i] == local[j]) keys.push_back(perm[i]), ++j;
      std::vector<std::uint32_t> order(local.size());
      for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
      rank.resize(local.size());
      for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    }

    oracle::CyclePacking packing;
    if (!fresh.empty() && local.size() >= 2) {
      oracle::PlainGraph g(local.size());
      for (std::size_t i = 0; i < local.size(); ++i)
        for (std::size_t j = 0; j < local.size(); ++j) {
          if (i == j || !edge(local[i], local[j])) continue;
          const auto w = compat::priority(config_.policy, pairs_[local[i]].quote,
                                          pairs_[local[j]].quote);
          if (w > 0) g.set_edge(i, j, w);
        }
      if (config_.model == Model::kConventional) {
        packing = oracle::optimal_packing(g, config_.kappa);
      } else if (rank.empty()) {
        packing = oracle::greedy_solve(g, config_.kappa);
      } else {
        packing = oracle::greedy_solve(g, config_.kappa, rank);
      }
    }
    result_.run_weight.push_back(packing.total_weight);

    const auto batch = static_cast<std::uint32_t>(pending_.size());
    std::vector<std::vector<std::uint32_t>> cycles;
    for (const auto& c : packing.cycles) {
      std::vector<std::uint32_t> ids;
      for (auto v : c) {
        ids.push_back(local[v]);
        pairs_[local[v]].state = State::kLocked;
      }
      cycles.push_back(std::move(ids));
    }
    pending_.push_back(std::move(cycles));
    const double runtime = config_.solver_runtime.days(pool.size());
    if (runtime <= 0) {
      finish_solve(batch, now);
    } else {
      push(now + runtime, Kind::kSolveDone, batch);
    }
  }

  void finish_solve(std::uint32_t batch, double now) {
    const double refusal = config_.match_refusal_pct / 100;
    for (const auto& cycle : pending_[batch]) {
      const bool lost = std::any_of(cycle.begin(), cycle.end(),
                                    [&](auto id) { return pairs_[id].departure <= now; });
      if (lost) {
        // A pair left while the solve was running; the rest stay in the pool.
        for (auto id : cycle) {
          auto& p = pairs_[id];
          if (p.departure <= now) {
            p.state = State::kDeparted;
            ++result_.departed;
          } else {
            p.state = State::kWaiting;
            p.fresh = true;
          }
        }
        continue;
      }
      result_.offers += cycle.size();
      std::size_t failed = 0, refused = 0;
      for (auto id : cycle) {
        auto& p = pairs_[id];
        const double fail = p.quote.cpra >= config_.sensitized_cpra ? config_.crossmatch_fail_high
                                                                    : config_.crossmatch_fail_other;
        if (datagen::uniform01(p.outcomes) < fail) ++failed;
        if (datagen::uniform01(p.outcomes) < refusal) ++refused;
      }
      result_.crossmatch_failures += failed;
      if (failed == 0) result_.refusals += refused;
      if (failed == 0 && refused == 0) {
        for (auto id : cycle) pairs_[id].state = State::kTransplanted;
        result_.transplanted += cycle.size();
        continue;
      }
      const double delay = failed ? config_.reentry_fail_days : config_.reentry_refusal_days;
      for (auto id : cycle) {
        pairs_[id].state = State::kReentering;
        push(now + delay, Kind::kReentry, id);
      }
    }
    pending_[batch].clear();
  }

  void reenter(std::uint32_t id, double now) {
    auto& p = pairs_[id];
    if (p.departure <= now) {
      p.state = State::kDeparted;
      ++result_.departed;
      return;
    }
    p.state = State::kWaiting;
    p.fresh = true;
  }

  const SimConfig& config_;
  const PairSource& source_;
  abb::Prg arrivals_;
  abb::Prg departures_;
  abb::Prg shuffles_;
  abb::PrgKey outcome_key_;
  std::vector<Pair> pairs_;
  std::vector<std::vector<std::vector<std::uint32_t>>> pending_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  SimResult result_;
};

double log_binomial_tail(std::size_t n, std::size_t k) {
  // log P(X >= k) for X ~ Binomial(n, 1/2), by log-sum-exp.
  std::vector<double> terms;
  for (std::size_t i = k; i <= n; ++i)
    terms.push_back(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                    static_cast<double>(n) * std::log(2.0));
  if (terms.empty()) return -INFINITY;
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

}  // namespace

std::string to_string(Model m) { return m == Model::kConventional ? "conventional" : "greedy"; }

Model parse_model(const std::string& text) {
  if (text == "conventional") return Model::kConventional;
  if (text == "greedy") return Model::kGreedy;
  throw InvalidArgument("unknown model '" + text + "'");
}

std::string to_string(Distribution d) {
  return d == Distribution::kExponential ? "exponential" : "fixed";
}

Distribution parse_distribution(const std::string& text) {
  if (text == "exponential") return Distribution::kExponential;
  if (text == "fixed") return Distribution::kFixed;
  throw InvalidArgument("unknown distribution '" + text + "'");
}

double RuntimeModel::days(std::size_t pool) const {
  if (points.empty()) return 0;
  if (pool <= points.front().first) return points.front().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto [x1, y1] = points[i];
    if (pool <= x1) {
      const auto [x0, y0] = points[i - 1];
      return y0 + (y1 - y0) * static_cast<double>(pool - x0) / static_cast<double>(x1 - x0);
    }
  }
  return points.back().second;
}

void SimConfig::validate() const {
  auto prob = [](double p) { return p >= 0 && p <= 1; };
  if (!(arrival_rate_days > 0)) throw InvalidArgument("arrival rate must be positive");
  if (!(match_run_interval_days > 0) || !std::isfinite(match_run_interval_days))
    throw InvalidArgument("match run interval must be positive");
  if (!(departure_rate_days > 0)) throw InvalidArgument("departure rate must be positive");
  if (!(match_refusal_pct >= 0 && match_refusal_pct <= 100))
    throw InvalidArgument("match refusal must lie in [0, 100] percent");
  if (!prob(crossmatch_fail_high) || !prob(crossmatch_fail_other))
    throw InvalidArgument("crossmatch failure probabilities must lie in [0, 1]");
  if (reentry_fail_days < 0 || reentry_refusal_days < 0)
    throw InvalidArgument("reentry delays must be non-negative");
  if (!(horizon_days > 0) || !std::isfinite(horizon_days))
    throw InvalidArgument("horizon must be positive");
  if (repetitions == 0) throw InvalidArgument("at least one repetition is required");
  if (kappa != 2 && kappa != 3) throw InvalidArgument("kappa must be 2 or 3");
  for (std::size_t i = 1; i < solver_runtime.points.size(); ++i)
    if (solver_runtime.points[i].first <= solver_runtime.points[i - 1].first)
      throw InvalidArgument("runtime points must have increasing pool sizes");
  policy.validate();
  population.validate();
  if (!strict_domains) return;
  if (!in_set(arrival_rate_days, {1, 2, 4, 7, 14}))
    throw InvalidArgument("arrival rate must be one of 1, 2, 4, 7, 14 days");
  if (!in_set(match_run_interval_days, {1, 2, 4, 7, 14, 30, 60, 120}))
    throw InvalidArgument("match run interval must be one of 1, 2, 4, 7, 14, 30, 60, 120 days");
  if (!in_set(departure_rate_days, {400, 800, 1200}))
    throw InvalidArgument("departure rate must be one of 400, 800, 1200 days");
  if (!in_set(match_refusal_pct, {0, 10, 20, 30, 40}))
    throw InvalidArgument("match refusal must be one of 0, 10, 20, 30, 40 percent");
  if (crossmatch_fail_high != 0.35 || crossmatch_fail_other != 0.10)
    throw InvalidArgument("crossmatch failure probabilities are fixed at 35% and 10%");
  if (reentry_fail_days != 7 || reentry_refusal_days != 2)
    throw InvalidArgument("reentry delays are fixed at 7 and 2 days");
}

SimResult run_sim(const SimConfig& config, const PairSource& source,
                  const std::vector<compat::Quote>& initial) {
  config.validate();
  Simulation sim(config, source);
  return sim.run(initial);
}

SimResult run_sim(const SimConfig& config) {
  datagen::PairStream stream(config.population, config.seed);
  return run_sim(config, [&] { return stream.next(); });
}

std::uint64_t repetition_seed(std::uint64_t base, std::size_t rep) {
  // splitmix64 finalizer.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (rep + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<double> CellResult::ratios() const {
  std::vector<double> out;
  for (std::size_t r = 0; r < conventional.size(); ++r) {
    if (conventional[r] == 0) {
      out.push_back(greedy[r] == 0 ? 1.0 : INFINITY);
    } else {
      out.push_back(static_cast<double>(greedy[r]) / static_cast<double>(conventional[r]));
    }
  }
  return out;
}

double CellResult::mean_ratio() const {
  const auto r = ratios();
  if (r.empty()) return 0;
  double sum = 0;
  for (double x : r) sum += x;
  return sum / static_cast<double>(r.size());
}

std::vector<CellResult> compare_models(const SimConfig& base, const Grid& grid,
                                       unsigned threads) {
  base.validate();
  std::vector<CellResult> cells;
  for (double a : grid.arrival_rates)
    for (double m : grid.match_run_intervals) {
      CellResult c;
      c.arrival_rate_days = a;
      c.match_run_interval_days = m;
      c.conventional.assign(base.repetitions, 0);
      c.greedy.assign(base.repetitions, 0);
      cells.push_back(std::move(c));
    }
  for (auto& c : cells) {
    SimConfig probe = base;
    probe.arrival_rate_days = c.arrival_rate_days;
    probe.match_run_interval_days = c.match_run_interval_days;
    probe.validate();
  }

  const std::size_t tasks = cells.size() * base.repetitions * 2;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t cell = t / (base.repetitions * 2);
      const std::size_t rep = (t / 2) % base.repetitions;
      const bool greedy = t % 2 == 1;
      SimConfig cfg = base;
      cfg.arrival_rate_days = cells[cell].arrival_rate_days;
      cfg.match_run_interval_days = cells[cell].match_run_interval_days;
      cfg.model = greedy ? Model::kGreedy : Model::kConventional;
      cfg.seed = repetition_seed(base.seed, rep);
      try {
        const auto r = run_sim(cfg);
        (greedy ? cells[cell].greedy : cells[cell].conventional)[rep] = r.transplanted;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = tasks;
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return cells;
}

SignTest sign_test(const std::vector<double>& first, const std::vector<double>& second) {
  if (first.size() != second.size()) throw InvalidArgument("sign test needs paired samples");
  SignTest t;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] > second[i]) ++t.wins;
    else if (first[i] < second[i]) ++t.losses;
    else ++t.ties;
  }
  const std::size_t n = t.wins + t.losses;
  t.p_value = n == 0 ? 1.0 : std::exp(log_binomial_tail(n, t.wins));
  return t;
}

}  // namespace kep::dynsim
