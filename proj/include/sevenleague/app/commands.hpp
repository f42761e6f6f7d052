#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sevenleague/app/config.hpp"

namespace sl {

/// 0 success, 2 a tolerance check failed. Errors are reported by exceptions.
struct CommandOutcome {
  int exit_code = 0;
  nlohmann::json report;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTolerance = 2;

CommandOutcome cmd_gen_dataset(const RunConfig& cfg, std::ostream& out);
CommandOutcome cmd_train(const RunConfig& cfg, const std::filesystem::path& dataset, std::ostream& out);
/// Pairs CSV with header a,b. Each pair is sampled cfg.sample.n_per_pair times.
CommandOutcome cmd_sample(const RunConfig& cfg, const std::filesystem::path& weights,
                          const std::filesystem::path& pairs_csv, std::ostream& out);
CommandOutcome cmd_validate_abm(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out);
CommandOutcome cmd_bench_heston(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out);
CommandOutcome cmd_sabr_iv(const RunConfig& cfg, const std::filesystem::path& weights, std::ostream& out);

/// Parses "name=value,name=value".
std::map<std::string, double> parse_assignments(const std::string& text);

/// Left-aligned text table with a header rule.
void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

}  // namespace sl
