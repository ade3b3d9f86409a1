#pragma once

#include <string>
#include <vector>

// Fast oracle suites behind the `validate` subcommand: field axioms, kernel
// stochasticity, Bellman operator properties, chain analysis and packet
// anonymity. Each suite reports pass/fail with a short detail string.

namespace netform::selfcheck {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// fault = "" for a clean run; fault = "gf" corrupts the multiplication used
// by the field-axiom suite, proving the suite can fail.
std::vector<SuiteResult> run_all(const std::string& fault = "");

}  // namespace netform::selfcheck
