#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "poslab/experiment.hpp"
#include "poslab/stake_model.hpp"

namespace poslab {

enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  std::filesystem::path scenario_path;
  std::uint64_t trials = 1'000'000;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> output_path;
  OutputFormat output_format = OutputFormat::kCsv;
};

/// Parses a scenario document and validates it. Unknown fields are rejected.
/// A seed override replaces master_seed before default miner seeds are
/// derived. Throws kParseError (naming the field) or a validation error.
Scenario parse_scenario(std::string_view json_text,
                        std::optional<std::uint64_t> seed_override = {});

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {});

nlohmann::json scenario_to_json(const Scenario& scenario);

/// printf "%.12g"; "inf"/"nan" for non-finite values.
std::string format_number(double value);

std::string result_to_csv(const EmpiricalResult& result);
nlohmann::json result_to_json(const EmpiricalResult& result);
EmpiricalResult result_from_json(const nlohmann::json& doc);

/// Writes to config.output_path, or to `fallback` when no path is set.
/// Throws kIoError.
void write_results(const EmpiricalResult& result, const RunConfig& config,
                   std::ostream& fallback);

/// Writes `text` to `path` (binary mode), or to `fallback`. Throws kIoError.
void write_text(const std::optional<std::filesystem::path>& path,
                std::string_view text, std::ostream& fallback);

/// The pos_lab command line. Returns 0 on success, 1 on usage, parse or
/// validation errors, 2 on internal errors.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace poslab
