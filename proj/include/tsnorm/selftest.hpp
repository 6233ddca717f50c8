#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tsnorm {

struct SelftestConfig {
    std::uint64_t seed = 0;
    int n = 0;          // per-suite case count override; 0 keeps defaults
    std::string suite;  // run a single suite by name; empty runs all
};

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure; // serialized replay note for the first failure
};

struct SelftestReport {
    std::vector<SuiteResult> suites;
    bool ok = true;
};

/// Runs the invariant suites at reduced size. Deterministic for a fixed seed.
SelftestReport run_selftest(const SelftestConfig& config);

std::vector<std::string> selftest_suite_names();

} // namespace tsnorm
