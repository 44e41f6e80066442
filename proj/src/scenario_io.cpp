#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>

#include "poslab/cli_io.hpp"
#include "poslab/error.hpp"

namespace poslab {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      parse_fail(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

std::uint64_t get_u64(const json& obj, const std::string& key,
                      const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(path, "missing");
  if (!it->is_number_unsigned()) {
    parse_fail(path, "expected a non-negative integer, got " + it->dump());
  }
  return it->get<std::uint64_t>();
}

std::optional<std::uint64_t> get_optional_u64(const json& obj,
                                              const std::string& key,
                                              const std::string& path) {
  if (!obj.contains(key)) return std::nullopt;
  return get_u64(obj, key, path);
}

}  // namespace

Scenario parse_scenario(std::string_view json_text,
                        std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object()) parse_fail("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"name", "mechanism", "master_seed", "miners", "lottery"});

  Scenario scenario;
  if (!doc.contains("name") || !doc["name"].is_string()) {
    parse_fail("name", "expected a string");
  }
  scenario.name = doc["name"].get<std::string>();

  if (!doc.contains("mechanism") || !doc["mechanism"].is_string()) {
    parse_fail("mechanism", "expected a string");
  }
  const auto mech_name = doc["mechanism"].get<std::string>();
  const auto mechanism = parse_mechanism(mech_name);
  if (!mechanism) {
    parse_fail("mechanism",
               "unknown mechanism '" + mech_name +
                   "' (expected PeercoinAge, BlackcoinNxt, Ouroboros, "
                   "Algorand, SaadModel or ProportionalModel)");
  }
  scenario.mechanism = *mechanism;
  scenario.master_seed = get_u64(doc, "master_seed", "master_seed");
  if (seed_override) scenario.master_seed = *seed_override;

  if (!doc.contains("miners") || !doc["miners"].is_array()) {
    parse_fail("miners", "expected an array");
  }
  const auto& miners = doc["miners"];
  for (std::size_t i = 0; i < miners.size(); ++i) {
    const std::string path = "miners[" + std::to_string(i) + "]";
    const auto& m = miners[i];
    if (!m.is_object()) parse_fail(path, "expected an object");
    reject_unknown(m, path, {"id", "stake", "coin_age", "seed"});
    MinerAccount miner;
    miner.id = get_u64(m, "id", path + ".id");
    miner.stake = get_u64(m, "stake", path + ".stake");
    miner.coin_age =
        get_optional_u64(m, "coin_age", path + ".coin_age").value_or(1);
    miner.seed = get_optional_u64(m, "seed", path + ".seed")
                     .value_or(default_miner_seed(scenario.master_seed, miner.id));
    scenario.miners.push_back(miner);
  }

  if (doc.contains("lottery")) {
    const auto& l = doc["lottery"];
    if (!l.is_object()) parse_fail("lottery", "expected an object");
    reject_unknown(l, "lottery", {"difficulty", "tick_limit"});
    LotteryParams params;
    params.difficulty = get_u64(l, "difficulty", "lottery.difficulty");
    params.tick_limit = get_optional_u64(l, "tick_limit", "lottery.tick_limit")
                            .value_or(kDefaultTickLimit);
    scenario.lottery = params;
  }
  return validate_scenario(std::move(scenario));
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot read scenario file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str(), seed_override);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["name"] = scenario.name;
  doc["mechanism"] = std::string(to_string(scenario.mechanism));
  doc["master_seed"] = scenario.master_seed;
  doc["miners"] = json::array();
  for (const auto& m : scenario.miners) {
    doc["miners"].push_back(
        {{"id", m.id}, {"stake", m.stake}, {"coin_age", m.coin_age}, {"seed", m.seed}});
  }
  if (scenario.lottery) {
    doc["lottery"] = {{"difficulty", scenario.lottery->difficulty},
                      {"tick_limit", scenario.lottery->tick_limit}};
  }
  return doc;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string result_to_csv(const EmpiricalResult& r) {
  std::ostringstream out;
  out << "miner_id,stake,coin_age,theoretical_p,empirical_p,wins,ci99_low,ci99_high\n";
  for (std::size_t i = 0; i < r.miners.size(); ++i) {
    out << r.miners[i].id << ',' << r.miners[i].stake << ','
        << r.miners[i].coin_age << ',' << format_number(r.theoretical[i]) << ','
        << format_number(r.frequencies[i]) << ',' << r.wins[i].count << ','
        << format_number(r.ci99[i].low) << ',' << format_number(r.ci99[i].high)
        << '\n';
  }
  out << "# chi_square=" << format_number(r.chi_square)
      << " df=" << r.chi_square_df << " p_value=" << format_number(r.p_value)
      << " gof_pass=" << (r.gof_pass ? "true" : "false")
      << " trials=" << r.trials << " empty_slots=" << r.empty_slots
      << " seed=" << r.master_seed << '\n';
  return out.str();
}

json result_to_json(const EmpiricalResult& r) {
  json doc;
  doc["scenario_name"] = r.scenario_name;
  doc["mechanism"] = std::string(to_string(r.mechanism));
  doc["master_seed"] = r.master_seed;
  doc["trials"] = r.trials;
  doc["empty_slots"] = r.empty_slots;
  doc["miners"] = json::array();
  for (const auto& m : r.miners) {
    doc["miners"].push_back(
        {{"id", m.id}, {"stake", m.stake}, {"coin_age", m.coin_age}, {"seed", m.seed}});
  }
  doc["wins"] = json::array();
  for (const auto& w : r.wins) {
    doc["wins"].push_back({{"miner_id", w.miner_id}, {"count", w.count}});
  }
  doc["frequencies"] = r.frequencies;
  doc["theoretical"] = r.theoretical;
  doc["ci99"] = json::array();
  for (const auto& ci : r.ci99) {
    doc["ci99"].push_back({{"low", ci.low}, {"high", ci.high}});
  }
  // nlohmann writes a non-finite statistic as null; result_from_json maps it
  // back to +inf.
  doc["chi_square"] = r.chi_square;
  doc["chi_square_df"] = r.chi_square_df;
  doc["p_value"] = r.p_value;
  doc["gof_pass"] = r.gof_pass;
  return doc;
}

EmpiricalResult result_from_json(const json& doc) {
  try {
    EmpiricalResult r;
    r.scenario_name = doc.at("scenario_name").get<std::string>();
    const auto mech = parse_mechanism(doc.at("mechanism").get<std::string>());
    if (!mech) parse_fail("mechanism", "unknown mechanism");
    r.mechanism = *mech;
    r.master_seed = doc.at("master_seed").get<std::uint64_t>();
    r.trials = doc.at("trials").get<std::uint64_t>();
    r.empty_slots = doc.at("empty_slots").get<std::uint64_t>();
    for (const auto& m : doc.at("miners")) {
      r.miners.push_back({m.at("id").get<std::uint64_t>(),
                          m.at("stake").get<std::uint64_t>(),
                          m.at("coin_age").get<std::uint64_t>(),
                          m.at("seed").get<std::uint64_t>()});
    }
    for (const auto& w : doc.at("wins")) {
      r.wins.push_back({w.at("miner_id").get<std::uint64_t>(),
                        w.at("count").get<std::uint64_t>()});
    }
    r.frequencies = doc.at("frequencies").get<std::vector<double>>();
    r.theoretical = doc.at("theoretical").get<std::vector<double>>();
    for (const auto& ci : doc.at("ci99")) {
      r.ci99.push_back({ci.at("low").get<double>(), ci.at("high").get<double>()});
    }
    const auto& chi = doc.at("chi_square");
    r.chi_square = chi.is_null() ? std::numeric_limits<double>::infinity()
                                 : chi.get<double>();
    r.chi_square_df = doc.at("chi_square_df").get<int>();
    r.p_value = doc.at("p_value").get<double>();
    r.gof_pass = doc.at("gof_pass").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

void write_text(const std::optional<std::filesystem::path>& path,
                std::string_view text, std::ostream& fallback) {
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::kIoError, "cannot open " + path->string() + " for writing");
  }
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) {
    throw Error(ErrorCode::kIoError, "write to " + path->string() + " failed");
  }
}

void write_results(const EmpiricalResult& result, const RunConfig& config,
                   std::ostream& fallback) {
  const std::string text = config.output_format == OutputFormat::kJson
                               ? result_to_json(result).dump(2) + "\n"
                               : result_to_csv(result);
  write_text(config.output_path, text, fallback);
}

}  // namespace poslab
