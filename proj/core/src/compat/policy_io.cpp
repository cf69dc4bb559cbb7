#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "kep/compat/compat.hpp"
#include "kep/error.hpp"

namespace kep::compat {

namespace {

using json = nlohmann::json;

template <typename T>
void take(const json& obj, const char* name, T& out) {
  auto it = obj.find(name);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("policy field '") + name + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, value] : obj.items())
    if (!names.count(key))
      throw InvalidArgument(std::string("unknown ") + where + " field '" + key + "'");
}

json policy_object(const PrioPolicy& p) {
  return {{"kind", p.kind == PrioPolicy::Kind::kConstant ? "constant" : "extended"},
          {"constant", p.constant},
          {"base", p.base},
          {"blood_identical", p.blood_identical},
          {"region_match", p.region_match},
          {"pediatric", p.pediatric},
          {"prior_living_donor", p.prior_living_donor},
          {"age_difference", p.age_difference},
          {"age_window", p.age_window},
          {"high_cpra", p.high_cpra},
          {"sensitized_cpra", p.sensitized_cpra},
          {"max_weight", p.max_weight}};
}

PrioPolicy policy_from(const json& obj) {
  if (!obj.is_object()) throw InvalidArgument("policy must be a JSON object");
  reject_unknown(obj,
                 {"kind", "constant", "base", "blood_identical", "region_match", "pediatric",
                  "prior_living_donor", "age_difference", "age_window", "high_cpra",
                  "sensitized_cpra", "max_weight"},
                 "policy");
  PrioPolicy p;
  std::string kind = "constant";
  take(obj, "kind", kind);
  if (kind == "constant") p.kind = PrioPolicy::Kind::kConstant;
  else if (kind == "extended") p.kind = PrioPolicy::Kind::kExtended;
  else throw InvalidArgument("unknown policy kind '" + kind + "'");
  take(obj, "constant", p.constant);
  take(obj, "base", p.base);
  take(obj, "blood_identical", p.blood_identical);
  take(obj, "region_match", p.region_match);
  take(obj, "pediatric", p.pediatric);
  take(obj, "prior_living_donor", p.prior_living_donor);
  take(obj, "age_difference", p.age_difference);
  take(obj, "age_window", p.age_window);
  take(obj, "high_cpra", p.high_cpra);
  take(obj, "sensitized_cpra", p.sensitized_cpra);
  take(obj, "max_weight", p.max_weight);
  return p;
}

}  // namespace

PrioPolicy parse_policy(const std::string& json_text) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("policy is not valid JSON: ") + e.what());
  }
  auto p = policy_from(obj);
  p.validate();
  return p;
}

std::string policy_json(const PrioPolicy& policy) { return policy_object(policy).dump(); }

}  // namespace kep::compat
