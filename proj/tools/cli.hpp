#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltail/aggregate.hpp"
#include "ltail/report.hpp"

namespace ltail::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kDomainError = 3 };

/// Bad or inconsistent run configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct McSettings {
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::string model;
  std::vector<double> weights;
  std::vector<double> grid;
  std::vector<double> tau;
  McSettings mc;
  std::optional<FnMethod> fn_method;
  std::string format = "csv";
  std::string out;  // empty = stdout
  int bootstrap = 200;
};

/// Reads a JSON config document; missing keys keep their defaults.
RunConfig parse_config_json(const std::string& text);

std::vector<double> parse_list(const std::string& text, const char* what);
FnMethod parse_fn_method(const std::string& text);

RiskReport cmd_tail(const RunConfig& cfg);
RiskReport cmd_concentration(const RunConfig& cfg);
RiskReport cmd_ratios(const RunConfig& cfg);
RiskReport cmd_premium(const RunConfig& cfg);
RiskReport cmd_stoploss(const RunConfig& cfg);
/// Built-in self-check suite; the last column says pass or fail.
RiskReport cmd_validate(const RunConfig& cfg);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ltail::cli
