#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pdmpkit {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Runs one property suite. Throws ValidationError for unknown names (the
/// message lists the available suites).
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 0);

nlohmann::json to_json(const SuiteReport& report);

}  // namespace pdmpkit
