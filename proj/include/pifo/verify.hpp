#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pifo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst observed error or the property that held
};

struct VerifyReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Suites: structure, spanjump, minimizers, geo, nonconvex, all.
std::vector<std::string> verify_suites();

VerifyReport run_suite(const std::string& suite, std::uint64_t seed, int jobs);

std::string report_json(const VerifyReport& report);

}  // namespace pifo
