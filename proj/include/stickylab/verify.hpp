#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stickylab/report.hpp"

namespace stickylab {

struct CheckResult {
    std::string name;
    bool pass = false;
    /// The budget was too small to evaluate the check at all (for example no
    /// resolved trials). Reported as INSUFFICIENT, not as a failure; the
    /// acceptance budgets are sized so this can never trigger there.
    bool insufficient = false;
    json details;
};

struct VerifyOptions {
    std::uint64_t seed = 20260823;  // acceptance master seed
    int workers = 1;
    bool full = false;    // full sample budgets (slow path) instead of defaults
    double scale = 1.0;   // trial-count multiplier for quick development runs
};

/// suite in {analytic, construction, convergence, coupling, determinism, all}.
/// Throws std::invalid_argument for unknown suite names.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt);

/// Byte-stable report. Deliberately excludes the worker count and any other
/// scheduling detail: identical (suite, seed, budgets) must serialize
/// identically regardless of parallelism.
json report_json(const std::string& suite, const VerifyOptions& opt,
                 const std::vector<CheckResult>& checks);

/// True when no check failed outright (insufficient-budget checks are
/// flagged in the report but are not failures).
bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace stickylab
