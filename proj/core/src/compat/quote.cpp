#include "kep/compat/quote.hpp"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kep/error.hpp"

namespace kep::compat {

namespace {

constexpr const char* kSchema = "kep-quotes";
constexpr int kVersion = 1;

constexpr std::uint32_t kMaxAge = 150;
constexpr std::uint32_t kMaxRegion = 1u << 16;

using json = nlohmann::json;

template <typename T>
T field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw InvalidArgument(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("field '") + name + "' has the wrong type");
  }
}

// Parsed wide so out-of-range entries are rejected instead of wrapping.
template <typename Out>
Out small_ints(const json& obj, const char* name) {
  auto wide = field<std::vector<std::int64_t>>(obj, name);
  Out out{};
  if constexpr (requires { out.resize(0); }) out.resize(wide.size());
  else if (wide.size() != out.size())
    throw InvalidArgument(std::string("field '") + name + "' must have " +
                          std::to_string(out.size()) + " entries");
  for (std::size_t i = 0; i < wide.size(); ++i) {
    if (wide[i] < 0 || wide[i] > 1)
      throw InvalidArgument(std::string(name) + " entries must be 0 or 1");
    out[i] = static_cast<std::uint8_t>(wide[i]);
  }
  return out;
}

Quote quote_from_json(const json& obj) {
  if (!obj.is_object()) throw InvalidArgument("quote must be a JSON object");
  Quote q;
  q.donor_blood = small_ints<BloodVector>(obj, "donor_blood");
  q.patient_accepts = small_ints<BloodVector>(obj, "patient_accepts");
  q.donor_antigens = small_ints<std::vector<std::uint8_t>>(obj, "donor_antigens");
  q.patient_antibodies = small_ints<std::vector<std::uint8_t>>(obj, "patient_antibodies");
  q.cpra = field<std::uint32_t>(obj, "cpra");
  const json attrs = field<json>(obj, "prio_attrs");
  if (!attrs.is_object()) throw InvalidArgument("field 'prio_attrs' must be an object");
  q.prio.age = field<std::uint32_t>(attrs, "age");
  q.prio.pediatric = field<std::uint32_t>(attrs, "pediatric");
  q.prio.prior_living_donor = field<std::uint32_t>(attrs, "prior_living_donor");
  q.prio.region = field<std::uint32_t>(attrs, "region");
  q.prio.donor_age = field<std::uint32_t>(attrs, "donor_age");
  return q;
}

json quote_to_json(const Quote& q) {
  return json{{"donor_blood", q.donor_blood},
              {"patient_accepts", q.patient_accepts},
              {"donor_antigens", q.donor_antigens},
              {"patient_antibodies", q.patient_antibodies},
              {"cpra", q.cpra},
              {"prio_attrs",
               {{"age", q.prio.age},
                {"pediatric", q.prio.pediatric},
                {"prior_living_donor", q.prio.prior_living_donor},
                {"region", q.prio.region},
                {"donor_age", q.prio.donor_age}}}};
}

void check_bits(const std::vector<std::uint8_t>& v, std::size_t antigens, const char* name) {
  if (v.size() != antigens)
    throw InvalidArgument(std::string(name) + " has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(antigens));
  for (auto b : v)
    if (b > 1) throw InvalidArgument(std::string(name) + " entries must be 0 or 1");
}

}  // namespace

std::string to_string(BloodType t) {
  switch (t) {
    case BloodType::kO: return "O";
    case BloodType::kA: return "A";
    case BloodType::kB: return "B";
    case BloodType::kAB: return "AB";
  }
  return "?";
}

BloodType parse_blood_type(const std::string& text) {
  if (text == "O") return BloodType::kO;
  if (text == "A") return BloodType::kA;
  if (text == "B") return BloodType::kB;
  if (text == "AB") return BloodType::kAB;
  throw InvalidArgument("unknown blood type '" + text + "'");
}

BloodVector one_hot(BloodType t) {
  BloodVector v{};
  v[static_cast<std::size_t>(t)] = 1;
  return v;
}

BloodVector accepted_donors(BloodType t) {
  switch (t) {
    case BloodType::kO: return {1, 0, 0, 0};
    case BloodType::kA: return {1, 1, 0, 0};
    case BloodType::kB: return {1, 0, 1, 0};
    case BloodType::kAB: return {1, 1, 1, 1};
  }
  return {};
}

void validate(const Quote& q, std::size_t antigens) {
  unsigned ones = 0;
  for (auto b : q.donor_blood) {
    if (b > 1) throw InvalidArgument("donor_blood entries must be 0 or 1");
    ones += b;
  }
  if (ones != 1) throw InvalidArgument("donor_blood must be one-hot");
  bool known = false;
  for (auto t : {BloodType::kO, BloodType::kA, BloodType::kB, BloodType::kAB})
    known = known || q.patient_accepts == accepted_donors(t);
  if (!known) throw InvalidArgument("patient_accepts is not a row of the ABO table");
  check_bits(q.donor_antigens, antigens, "donor_antigens");
  check_bits(q.patient_antibodies, antigens, "patient_antibodies");
  if (q.cpra > 100) throw InvalidArgument("cpra must be in [0, 100]");
  if (q.prio.pediatric > 1) throw InvalidArgument("pediatric must be 0 or 1");
  if (q.prio.prior_living_donor > 1) throw InvalidArgument("prior_living_donor must be 0 or 1");
  if (q.prio.age > kMaxAge || q.prio.donor_age > kMaxAge)
    throw InvalidArgument("ages must be at most " + std::to_string(kMaxAge));
  if (q.prio.region >= kMaxRegion)
    throw InvalidArgument("region must be below " + std::to_string(kMaxRegion));
}

std::size_t flat_size(std::size_t antigens) { return 2 * antigens + 14; }

std::vector<abb::Ring> flatten(const Quote& q) {
  std::vector<abb::Ring> out;
  out.reserve(flat_size(q.donor_antigens.size()));
  out.insert(out.end(), q.donor_blood.begin(), q.donor_blood.end());
  out.insert(out.end(), q.patient_accepts.begin(), q.patient_accepts.end());
  out.insert(out.end(), q.donor_antigens.begin(), q.donor_antigens.end());
  out.insert(out.end(), q.patient_antibodies.begin(), q.patient_antibodies.end());
  out.push_back(q.cpra);
  out.push_back(q.prio.age);
  out.push_back(q.prio.pediatric);
  out.push_back(q.prio.prior_living_donor);
  out.push_back(q.prio.region);
  out.push_back(q.prio.donor_age);
  return out;
}

SharedQuote unflatten(std::span<const abb::Share> flat, std::size_t antigens) {
  if (flat.size() != flat_size(antigens))
    throw InvalidArgument("shared quote has wrong length");
  SharedQuote q;
  auto take = [&](std::size_t n) {
    abb::ShareVector v(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n));
    flat = flat.subspan(n);
    return v;
  };
  q.donor_blood = take(4);
  q.patient_accepts = take(4);
  q.donor_antigens = take(antigens);
  q.patient_antibodies = take(antigens);
  q.cpra = flat[0];
  q.age = flat[1];
  q.pediatric = flat[2];
  q.prior_living_donor = flat[3];
  q.region = flat[4];
  q.donor_age = flat[5];
  return q;
}

QuoteFile read_quotes(std::istream& in) {
  QuoteFile file;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
      if (!header) {
        if (!obj.is_object() || obj.value("schema", "") != kSchema)
          throw InvalidArgument(std::string("expected header with schema '") + kSchema + "'");
        if (field<int>(obj, "version") != kVersion)
          throw InvalidArgument("unsupported quote file version");
        file.antigens = field<std::size_t>(obj, "antigens");
        if (file.antigens == 0) throw InvalidArgument("antigens must be positive");
        header = true;
        continue;
      }
      Quote q = quote_from_json(obj);
      validate(q, file.antigens);
      file.quotes.push_back(std::move(q));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!header) throw ParseError(line_no, "missing quote file header");
  return file;
}

void write_quotes(std::ostream& out, const QuoteFile& file) {
  out << json{{"schema", kSchema}, {"version", kVersion}, {"antigens", file.antigens}}.dump()
      << '\n';
  for (const auto& q : file.quotes) {
    validate(q, file.antigens);
    out << quote_to_json(q).dump() << '\n';
  }
}

}  // namespace kep::compat
