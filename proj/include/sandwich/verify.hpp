#pragma once

// Desk-scale property suite over every module, used by `sandwich verify`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sandwich::verify {

/// Deliberate defects for checking that the suite notices them.
enum class Mutation { None, Lambda2Sign };

/// "none" or "lambda2-sign".
Mutation parse_mutation(const std::string& text);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  Mutation mutation = Mutation::None;
  std::uint64_t seed = 2024;
};

std::vector<PropertyResult> run_property_suite(const SuiteOptions& options = {});

/// Fixed-width PASS/FAIL table followed by a summary line.
void print_table(std::ostream& os, const std::vector<PropertyResult>& results);

}  // namespace sandwich::verify
