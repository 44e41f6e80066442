// Python bindings for the simulation core. Exact probabilities cross the
// boundary as (numerator, denominator) decimal strings; the package wrapper
// turns them into fractions.Fraction.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <utility>

#include "poslab/cli_io.hpp"
#include "poslab/error.hpp"
#include "poslab/experiment.hpp"
#include "poslab/hash_lottery.hpp"
#include "poslab/prf.hpp"
#include "poslab/probability_models.hpp"
#include "poslab/statistics.hpp"

namespace py = pybind11;
using namespace poslab;

namespace {

using RationalParts = std::pair<std::string, std::string>;

RationalParts split(const Rational& r) {
  return {boost::multiprecision::numerator(r).str(),
          boost::multiprecision::denominator(r).str()};
}

std::vector<RationalParts> split_all(const std::vector<Rational>& v) {
  std::vector<RationalParts> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(split(r));
  return out;
}

Rational join(const RationalParts& parts) {
  return Rational(BigInt(parts.first), BigInt(parts.second));
}

LotteryMode parse_mode(const std::string& mode) {
  if (mode == "peercoin") return LotteryMode::kPeercoin;
  if (mode == "blackcoin") return LotteryMode::kBlackcoinNxt;
  throw Error(ErrorCode::kInvalidParameter, "mode must be peercoin or blackcoin");
}

ExperimentOptions make_options(unsigned workers, std::vector<std::uint64_t> split_units,
                               std::optional<std::uint64_t> preferred) {
  ExperimentOptions options;
  options.workers = workers;
  options.split_units = std::move(split_units);
  options.saad_preferred_id = preferred;
  return options;
}

}  // namespace

PYBIND11_MODULE(_poslab, m) {
  m.doc() = "Proof-of-stake leader election simulator";

  static py::exception<Error> pos_error(m, "PosLabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(pos_error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(pos_error.ptr(), exc.ptr());
    }
  });

  py::enum_<Mechanism> mech(m, "Mechanism");
  for (Mechanism value : kAllMechanisms) {
    mech.value(std::string(to_string(value)).c_str(), value);
  }

  py::class_<MinerAccount>(m, "MinerAccount")
      .def(py::init([](std::uint64_t id, std::uint64_t stake, std::uint64_t coin_age,
                       std::uint64_t seed) { return MinerAccount{id, stake, coin_age, seed}; }),
           py::arg("id"), py::arg("stake"), py::arg("coin_age") = 1, py::arg("seed") = 0)
      .def_readwrite("id", &MinerAccount::id)
      .def_readwrite("stake", &MinerAccount::stake)
      .def_readwrite("coin_age", &MinerAccount::coin_age)
      .def_readwrite("seed", &MinerAccount::seed)
      .def("__repr__", [](const MinerAccount& a) {
        return "MinerAccount(id=" + std::to_string(a.id) + ", stake=" +
               std::to_string(a.stake) + ", coin_age=" + std::to_string(a.coin_age) + ")";
      });

  py::class_<LotteryParams>(m, "LotteryParams")
      .def(py::init([](std::uint64_t difficulty, std::uint64_t tick_limit) {
             return LotteryParams{difficulty, tick_limit};
           }),
           py::arg("difficulty"), py::arg("tick_limit") = kDefaultTickLimit)
      .def_readwrite("difficulty", &LotteryParams::difficulty)
      .def_readwrite("tick_limit", &LotteryParams::tick_limit);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("miners", &Scenario::miners)
      .def_readwrite("mechanism", &Scenario::mechanism)
      .def_readwrite("lottery", &Scenario::lottery)
      .def_readwrite("master_seed", &Scenario::master_seed)
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(2); })
      .def("validate", [](const Scenario& s) { validate_scenario(s); });

  py::class_<Interval>(m, "Interval")
      .def_readonly("low", &Interval::low)
      .def_readonly("high", &Interval::high)
      .def("__iter__", [](const Interval& i) {
        return py::iter(py::make_tuple(i.low, i.high));
      });

  py::class_<ChiSquareResult>(m, "ChiSquareResult")
      .def_readonly("statistic", &ChiSquareResult::statistic)
      .def_readonly("df", &ChiSquareResult::df)
      .def_readonly("p_value", &ChiSquareResult::p_value);

  py::class_<EmpiricalResult>(m, "EmpiricalResult")
      .def_readonly("scenario_name", &EmpiricalResult::scenario_name)
      .def_readonly("mechanism", &EmpiricalResult::mechanism)
      .def_readonly("master_seed", &EmpiricalResult::master_seed)
      .def_readonly("trials", &EmpiricalResult::trials)
      .def_readonly("empty_slots", &EmpiricalResult::empty_slots)
      .def_readonly("miners", &EmpiricalResult::miners)
      .def_property_readonly("wins",
                             [](const EmpiricalResult& r) {
                               py::dict d;
                               for (const auto& w : r.wins) d[py::int_(w.miner_id)] = w.count;
                               return d;
                             })
      .def_readonly("frequencies", &EmpiricalResult::frequencies)
      .def_readonly("theoretical", &EmpiricalResult::theoretical)
      .def_readonly("ci99", &EmpiricalResult::ci99)
      .def_readonly("chi_square", &EmpiricalResult::chi_square)
      .def_readonly("chi_square_df", &EmpiricalResult::chi_square_df)
      .def_readonly("p_value", &EmpiricalResult::p_value)
      .def_readonly("gof_pass", &EmpiricalResult::gof_pass)
      .def("to_csv", &result_to_csv)
      .def("to_json", [](const EmpiricalResult& r) { return result_to_json(r).dump(2); });

  py::class_<AttackReport>(m, "AttackReport")
      .def_readonly("attacker_id", &AttackReport::attacker_id)
      .def_readonly("stake_ratio", &AttackReport::stake_ratio)
      .def_readonly("dominance_eq1", &AttackReport::dominance_eq1)
      .def_readonly("dominance_mechanism", &AttackReport::dominance_mechanism)
      .def_readonly("mechanism", &AttackReport::mechanism)
      .def_readonly("trials", &AttackReport::trials);

  py::class_<FairnessReport>(m, "FairnessReport")
      .def_readonly("max_abs_deviation", &FairnessReport::max_abs_deviation)
      .def_readonly("gini_stake", &FairnessReport::gini_stake)
      .def_readonly("gini_wins", &FairnessReport::gini_wins)
      .def_readonly("nakamoto_coefficient", &FairnessReport::nakamoto_coefficient);

  m.def("prf64", [](std::uint64_t k, std::uint64_t s, std::uint64_t c) { return prf64(k, s, c); },
        py::arg("key"), py::arg("stream"), py::arg("counter"));
  m.def("default_miner_seed", &default_miner_seed, py::arg("master_seed"), py::arg("id"));

  m.def("parse_scenario",
        [](const std::string& text, std::optional<std::uint64_t> seed) {
          return parse_scenario(text, seed);
        },
        py::arg("text"), py::arg("seed") = py::none());
  m.def("load_scenario",
        [](const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
          return load_scenario(path, seed);
        },
        py::arg("path"), py::arg("seed") = py::none());

  m.def("normalize_stakes",
        [](const Scenario& s) { return normalize_stakes(s.miners, weighting_for(s.mechanism)); },
        py::arg("scenario"));
  m.def("_saad_next_block_probability",
        [](std::uint64_t a, std::uint64_t b) {
          return split(saad_next_block_probability(StakeQuery(a, b)));
        });
  m.def("_proportional_next_block_probability",
        [](std::uint64_t a, std::uint64_t b) {
          return split(proportional_next_block_probability(StakeQuery(a, b)));
        });
  m.def("_theoretical_selection_probabilities",
        [](const Scenario& s) { return split_all(theoretical_selection_probabilities(s)); });
  m.def("_chi_square_gof",
        [](const std::vector<std::uint64_t>& counts, const std::vector<RationalParts>& probs,
           std::uint64_t n) {
          std::vector<Rational> expected;
          for (const auto& p : probs) expected.push_back(join(p));
          return chi_square_gof(counts, expected, n);
        });
  m.def("chi_square_survival", &chi_square_survival, py::arg("statistic"), py::arg("df"));
  m.def("binomial_ci99", &binomial_ci99, py::arg("count"), py::arg("n"));
  m.def("gini_coefficient",
        [](const std::vector<double>& v) { return gini_coefficient(v); }, py::arg("values"));

  m.def("calibrate_difficulty",
        [](const Scenario& s, double rate, const std::string& mode) {
          return calibrate_difficulty(s, rate, parse_mode(mode));
        },
        py::arg("scenario"), py::arg("target_rate") = kDefaultTargetRate,
        py::arg("mode") = "blackcoin");

  m.def("run_experiment",
        [](const Scenario& s, std::uint64_t trials, unsigned workers,
           std::vector<std::uint64_t> split_units, std::optional<std::uint64_t> preferred) {
          const auto options = make_options(workers, std::move(split_units), preferred);
          py::gil_scoped_release release;
          return run_experiment(s, trials, options);
        },
        py::arg("scenario"), py::arg("trials"), py::arg("workers") = 0,
        py::arg("split_units") = std::vector<std::uint64_t>{},
        py::arg("saad_preferred_id") = py::none());

  m.def("attacker_dominance",
        [](const Scenario& s, std::uint64_t attacker, std::uint64_t trials, unsigned workers) {
          const auto options = make_options(workers, {}, std::nullopt);
          py::gil_scoped_release release;
          return attacker_dominance(s, attacker, trials, options);
        },
        py::arg("scenario"), py::arg("attacker_id"), py::arg("trials"),
        py::arg("workers") = 0);

  m.def("fairness_report", &fairness_report, py::arg("result"));

  m.def("main",
        [](std::vector<std::string> args) {
          std::vector<const char*> argv{"pos_lab"};
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
