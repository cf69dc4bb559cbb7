#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kep/dynsim/dynsim.hpp"
#include "kep/error.hpp"

namespace kep::dynsim {

namespace {

using json = nlohmann::json;

constexpr const char* kSchema = "kep-sim-config";
constexpr int kVersion = 1;

template <typename T>
void take(const json& obj, const char* name, T& out) {
  auto it = obj.find(name);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("config field '") + name + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, value] : obj.items())
    if (!names.count(key))
      throw InvalidArgument(std::string("unknown ") + where + " field '" + key + "'");
}

json population_json(const datagen::PopulationModel& m) {
  json bands = json::array();
  for (const auto& b : m.cpra_bands) bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"weight", b.weight}});
  return {{"blood", m.blood},
          {"antigens", m.antigens},
          {"antigen_frequency", m.antigen_frequency},
          {"cpra_bands", bands},
          {"pediatric", m.pediatric},
          {"prior_living_donor", m.prior_living_donor},
          {"regions", m.regions},
          {"require_incompatible", m.require_incompatible},
          {"max_attempts", m.max_attempts}};
}

datagen::PopulationModel population_from(const json& obj) {
  if (!obj.is_object()) throw InvalidArgument("config field 'population' must be an object");
  reject_unknown(obj,
                 {"blood", "antigens", "antigen_frequency", "cpra_bands", "pediatric",
                  "prior_living_donor", "regions", "require_incompatible", "max_attempts"},
                 "population");
  datagen::PopulationModel m;
  take(obj, "blood", m.blood);
  take(obj, "antigens", m.antigens);
  take(obj, "antigen_frequency", m.antigen_frequency);
  if (auto it = obj.find("cpra_bands"); it != obj.end()) {
    if (!it->is_array()) throw InvalidArgument("config field 'cpra_bands' must be an array");
    m.cpra_bands.clear();
    for (const auto& b : *it) {
      datagen::CpraBand band;
      take(b, "lo", band.lo);
      take(b, "hi", band.hi);
      take(b, "weight", band.weight);
      m.cpra_bands.push_back(band);
    }
  }
  take(obj, "pediatric", m.pediatric);
  take(obj, "prior_living_donor", m.prior_living_donor);
  take(obj, "regions", m.regions);
  take(obj, "require_incompatible", m.require_incompatible);
  take(obj, "max_attempts", m.max_attempts);
  return m;
}

json config_json(const SimConfig& c) {
  json runtime = json::array();
  for (const auto& [pool, days] : c.solver_runtime.points) runtime.push_back({pool, days});
  json arrival = std::isfinite(c.arrival_rate_days) ? json(c.arrival_rate_days) : json(nullptr);
  return {{"schema", kSchema},
          {"version", kVersion},
          {"arrival_rate_days", arrival},
          {"arrival_distribution", to_string(c.arrival_distribution)},
          {"match_run_interval_days", c.match_run_interval_days},
          {"departure_rate_days", c.departure_rate_days},
          {"departure_distribution", to_string(c.departure_distribution)},
          {"match_refusal_pct", c.match_refusal_pct},
          {"crossmatch_fail_high", c.crossmatch_fail_high},
          {"crossmatch_fail_other", c.crossmatch_fail_other},
          {"sensitized_cpra", c.sensitized_cpra},
          {"reentry_fail_days", c.reentry_fail_days},
          {"reentry_refusal_days", c.reentry_refusal_days},
          {"horizon_days", c.horizon_days},
          {"repetitions", c.repetitions},
          {"model", to_string(c.model)},
          {"kappa", c.kappa},
          {"solver_runtime", runtime},
          {"greedy_shuffle", c.greedy_shuffle},
          {"restrict_to_fresh", c.restrict_to_fresh},
          {"seed", c.seed},
          {"strict_domains", c.strict_domains},
          {"policy", json::parse(compat::policy_json(c.policy))},
          {"population", population_json(c.population)}};
}

}  // namespace

SimConfig read_config(std::istream& in) {
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("config is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw InvalidArgument("config must be a JSON object");
  reject_unknown(obj,
                 {"schema", "version", "arrival_rate_days", "arrival_distribution",
                  "match_run_interval_days", "departure_rate_days", "departure_distribution",
                  "match_refusal_pct", "crossmatch_fail_high", "crossmatch_fail_other",
                  "sensitized_cpra", "reentry_fail_days", "reentry_refusal_days", "horizon_days",
                  "repetitions", "model", "kappa", "solver_runtime", "greedy_shuffle",
                  "restrict_to_fresh", "seed", "strict_domains", "policy", "population"},
                 "config");
  if (obj.contains("schema") && obj["schema"] != kSchema)
    throw InvalidArgument("config schema must be '" + std::string(kSchema) + "'");
  if (obj.contains("version") && obj["version"] != kVersion)
    throw InvalidArgument("unsupported config version");

  SimConfig c;
  if (auto it = obj.find("arrival_rate_days"); it != obj.end() && it->is_null()) {
    c.arrival_rate_days = INFINITY;
  } else {
    take(obj, "arrival_rate_days", c.arrival_rate_days);
  }
  std::string text;
  if (obj.contains("arrival_distribution")) {
    take(obj, "arrival_distribution", text);
    c.arrival_distribution = parse_distribution(text);
  }
  take(obj, "match_run_interval_days", c.match_run_interval_days);
  take(obj, "departure_rate_days", c.departure_rate_days);
  if (obj.contains("departure_distribution")) {
    take(obj, "departure_distribution", text);
    c.departure_distribution = parse_distribution(text);
  }
  take(obj, "match_refusal_pct", c.match_refusal_pct);
  take(obj, "crossmatch_fail_high", c.crossmatch_fail_high);
  take(obj, "crossmatch_fail_other", c.crossmatch_fail_other);
  take(obj, "sensitized_cpra", c.sensitized_cpra);
  take(obj, "reentry_fail_days", c.reentry_fail_days);
  take(obj, "reentry_refusal_days", c.reentry_refusal_days);
  take(obj, "horizon_days", c.horizon_days);
  take(obj, "repetitions", c.repetitions);
  if (obj.contains("model")) {
    take(obj, "model", text);
    c.model = parse_model(text);
  }
  take(obj, "kappa", c.kappa);
  if (auto it = obj.find("solver_runtime"); it != obj.end()) {
    c.solver_runtime.points.clear();
    try {
      for (const auto& p : *it)
        c.solver_runtime.points.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<double>());
    } catch (const json::exception&) {
      throw InvalidArgument("solver_runtime must be a list of [pool size, days] pairs");
    }
  }
  take(obj, "greedy_shuffle", c.greedy_shuffle);
  take(obj, "restrict_to_fresh", c.restrict_to_fresh);
  take(obj, "seed", c.seed);
  take(obj, "strict_domains", c.strict_domains);
  if (auto it = obj.find("policy"); it != obj.end()) c.policy = compat::parse_policy(it->dump());
  if (auto it = obj.find("population"); it != obj.end()) c.population = population_from(*it);
  c.validate();
  return c;
}

void write_config(std::ostream& out, const SimConfig& config) {
  out << config_json(config).dump(2) << '\n';
}

void write_csv(std::ostream& out, const SimConfig& base, const std::vector<CellResult>& cells) {
  out << "# config " << config_json(base).dump() << '\n';
  out << "arrival_rate_days,match_run_interval_days,departure_rate_days,match_refusal_pct,"
         "repetition,seed,conventional,greedy,ratio\n";
  for (const auto& c : cells) {
    const auto ratios = c.ratios();
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      std::ostringstream ratio;
      ratio << std::setprecision(17) << ratios[r];
      out << c.arrival_rate_days << ',' << c.match_run_interval_days << ','
          << base.departure_rate_days << ',' << base.match_refusal_pct << ',' << r << ','
          << repetition_seed(base.seed, r) << ',' << c.conventional[r] << ',' << c.greedy[r] << ','
          << ratio.str() << '\n';
    }
  }
}

}  // namespace kep::dynsim
