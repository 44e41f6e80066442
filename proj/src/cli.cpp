#include <charconv>
#include <exception>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "poslab/cli_io.hpp"
#include "poslab/error.hpp"
#include "poslab/hash_lottery.hpp"
#include "poslab/probability_models.hpp"

namespace poslab {

using nlohmann::json;

namespace {

struct CommonFlags {
  std::string scenario;
  std::uint64_t trials = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";

  RunConfig config() const {
    RunConfig c;
    c.scenario_path = scenario;
    c.trials = trials;
    c.seed_override = seed;
    if (!out.empty()) c.output_path = out;
    c.output_format = format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
    return c;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", flags.scenario, "Scenario JSON file");
  if (scenario_required) opt->required();
  cmd->add_option("--trials", flags.trials, "Number of election slots")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Override the scenario master_seed");
  cmd->add_option("--out", flags.out, "Output file (default: stdout)");
  cmd->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

// Lottery parameters for `mechanism` when the scenario does not carry any
// suitable ones: default target rate and tick limit.
Scenario with_lottery_for(Scenario scenario, Mechanism mechanism,
                          Mechanism original) {
  scenario.mechanism = mechanism;
  if (!is_hash_lottery(mechanism)) return scenario;
  const bool reuse = scenario.lottery &&
                     lottery_mode_for(original) == lottery_mode_for(mechanism) &&
                     is_hash_lottery(original);
  if (!reuse) {
    LotteryParams params;
    params.tick_limit =
        scenario.lottery ? scenario.lottery->tick_limit : kDefaultTickLimit;
    params.difficulty = calibrate_difficulty(scenario, kDefaultTargetRate,
                                             lottery_mode_for(mechanism));
    scenario.lottery = params;
  }
  return scenario;
}

int run_simulate(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = flags.config();
  const Scenario scenario = load_scenario(config.scenario_path, config.seed_override);
  const EmpiricalResult result = run_experiment(scenario, config.trials);
  write_results(result, config, out);
  return 0;
}

int run_compare(const CommonFlags& flags, std::ostream& out) {
  const RunConfig config = flags.config();
  const Scenario base = load_scenario(config.scenario_path, config.seed_override);
  const std::uint64_t beta = total_stake(base);

  std::ostringstream csv;
  csv << "mechanism,miner_id,stake,coin_age,eq1_p,eq2_p,theoretical_p,"
         "empirical_p,wins,empty_slots,p_value,gof_pass\n";
  json doc;
  doc["scenario_name"] = base.name;
  doc["results"] = json::array();
  for (Mechanism mechanism : kAllMechanisms) {
    const Scenario scenario = with_lottery_for(base, mechanism, base.mechanism);
    const EmpiricalResult r = run_experiment(scenario, config.trials);
    doc["results"].push_back(result_to_json(r));
    for (std::size_t i = 0; i < scenario.miners.size(); ++i) {
      const auto& m = scenario.miners[i];
      const StakeQuery q(m.stake, beta);
      csv << to_string(mechanism) << ',' << m.id << ',' << m.stake << ','
          << m.coin_age << ','
          << format_number(to_double(saad_next_block_probability(q))) << ','
          << format_number(to_double(proportional_next_block_probability(q)))
          << ',' << format_number(r.theoretical[i]) << ','
          << format_number(r.frequencies[i]) << ',' << r.wins[i].count << ','
          << r.empty_slots << ',' << format_number(r.p_value) << ','
          << (r.gof_pass ? "true" : "false") << '\n';
    }
  }
  write_text(config.output_path,
             config.output_format == OutputFormat::kJson ? doc.dump(2) + "\n"
                                                         : csv.str(),
             out);
  return 0;
}

// "0.51" -> (51, 100); at least two decimal places of resolution.
std::pair<std::uint64_t, std::uint64_t> parse_ratio(const std::string& text) {
  static const std::regex kDecimal(R"(^(\d{1,9})(?:\.(\d{1,9}))?$)");
  std::smatch match;
  if (!std::regex_match(text, match, kDecimal)) {
    throw Error(ErrorCode::kParseError,
                "field '--ratio': expected a decimal in (0, 1], got '" + text + "'");
  }
  std::string frac = match[2].matched ? match[2].str() : "";
  while (frac.size() < 2) frac += '0';
  std::uint64_t beta = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) beta *= 10;
  const std::uint64_t alpha =
      std::stoull(match[1].str()) * beta + std::stoull(frac);
  if (alpha == 0 || alpha > beta) {
    throw Error(ErrorCode::kParseError,
                "field '--ratio': must lie in (0, 1], got '" + text + "'");
  }
  return {alpha, beta};
}

struct AttackFlags {
  std::string ratio;
  std::string mechanism = "BlackcoinNxt";
  std::optional<std::uint64_t> attacker;
};

int run_attack(const CommonFlags& flags, const AttackFlags& attack,
               std::ostream& out) {
  const RunConfig config = flags.config();
  Scenario scenario;
  std::uint64_t attacker_id = 0;
  if (!attack.ratio.empty()) {
    const auto mechanism = parse_mechanism(attack.mechanism);
    if (!mechanism) {
      throw Error(ErrorCode::kParseError,
                  "field '--mechanism': unknown mechanism '" + attack.mechanism + "'");
    }
    const auto [alpha, beta] = parse_ratio(attack.ratio);
    scenario.name = "attack-" + attack.ratio;
    scenario.master_seed = config.seed_override.value_or(1);
    scenario.miners.push_back({0, alpha, 1, default_miner_seed(scenario.master_seed, 0)});
    // Honest stake is held by two miners so that, below one half, nobody
    // else is a majority staker either.
    const std::uint64_t honest = beta - alpha;
    const std::uint64_t shares[] = {honest - honest / 2, honest / 2};
    for (std::uint64_t k = 0; k < 2; ++k) {
      if (shares[k] == 0) continue;
      scenario.miners.push_back({k + 1, shares[k], 1,
                                 default_miner_seed(scenario.master_seed, k + 1)});
    }
    scenario = with_lottery_for(scenario, *mechanism, Mechanism::kSaadModel);
  } else if (!config.scenario_path.empty()) {
    scenario = load_scenario(config.scenario_path, config.seed_override);
    scenario = with_lottery_for(scenario, scenario.mechanism, scenario.mechanism);
    if (!attack.attacker) {
      throw Error(ErrorCode::kParseError,
                  "field '--attacker': required together with --scenario");
    }
    attacker_id = *attack.attacker;
  } else {
    throw Error(ErrorCode::kParseError,
                "attack needs --ratio, or --scenario with --attacker");
  }

  const AttackReport report =
      attacker_dominance(scenario, attacker_id, config.trials);
  std::string text;
  if (config.output_format == OutputFormat::kJson) {
    json doc = {{"attacker_id", report.attacker_id},
                {"stake_ratio", report.stake_ratio},
                {"dominance_eq1", report.dominance_eq1},
                {"dominance_mechanism", report.dominance_mechanism},
                {"mechanism", std::string(to_string(report.mechanism))},
                {"trials", report.trials}};
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "attacker_id,stake_ratio,mechanism,dominance_eq1,dominance_mechanism,trials\n"
        << report.attacker_id << ',' << format_number(report.stake_ratio) << ','
        << to_string(report.mechanism) << ','
        << format_number(report.dominance_eq1) << ','
        << format_number(report.dominance_mechanism) << ',' << report.trials
        << '\n';
    text = csv.str();
  }
  write_text(config.output_path, text, out);
  return 0;
}

int run_calibrate(const CommonFlags& flags, double rate,
                  const std::string& mode_name, std::ostream& out) {
  const RunConfig config = flags.config();
  const Scenario scenario = load_scenario(config.scenario_path, config.seed_override);
  LotteryMode mode = lottery_mode_for(scenario.mechanism);
  if (mode_name == "peercoin") mode = LotteryMode::kPeercoin;
  if (mode_name == "blackcoin") mode = LotteryMode::kBlackcoinNxt;
  const std::uint64_t difficulty = calibrate_difficulty(scenario, rate, mode);
  const std::uint64_t tick_limit =
      scenario.lottery ? scenario.lottery->tick_limit : kDefaultTickLimit;
  const char* mode_label = mode == LotteryMode::kPeercoin ? "peercoin" : "blackcoin";

  std::string text;
  if (config.output_format == OutputFormat::kJson) {
    json doc = {{"mode", mode_label},
                {"target_rate", rate},
                {"difficulty", difficulty},
                {"tick_limit", tick_limit}};
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "mode,target_rate,difficulty,tick_limit\n"
        << mode_label << ',' << format_number(rate) << ',' << difficulty << ','
        << tick_limit << '\n';
    text = csv.str();
  }
  write_text(config.output_path, text, out);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Proof-of-stake leader election lab", "pos_lab"};
  app.require_subcommand(1);

  CommonFlags sim_flags, cmp_flags, atk_flags, cal_flags;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario");
  add_common(simulate, sim_flags, true);

  auto* compare = app.add_subcommand(
      "compare", "Run one stake distribution under every mechanism and model");
  add_common(compare, cmp_flags, true);

  AttackFlags attack_flags;
  auto* attack = app.add_subcommand(
      "attack", "Attacker win share under the Saad model versus a mechanism");
  add_common(attack, atk_flags, false);
  attack->add_option("--ratio", attack_flags.ratio, "Attacker stake share in (0, 1]");
  attack->add_option("--mechanism", attack_flags.mechanism,
                     "Mechanism to contrast (with --ratio)");
  attack->add_option("--attacker", attack_flags.attacker,
                     "Attacker miner id (with --scenario)");

  double rate = kDefaultTargetRate;
  std::string mode_name;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Difficulty for a target eligible-miners-per-tick rate");
  add_common(calibrate, cal_flags, true);
  calibrate->add_option("--rate", rate, "Target rate in (0, 1]");
  calibrate->add_option("--mode", mode_name, "Lottery weighting")
      ->check(CLI::IsMember({"peercoin", "blackcoin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 1;
  }

  try {
    if (*simulate) return run_simulate(sim_flags, out);
    if (*compare) return run_compare(cmp_flags, out);
    if (*attack) return run_attack(atk_flags, attack_flags, out);
    if (*calibrate) return run_calibrate(cal_flags, rate, mode_name, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace poslab
