#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rtp {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double elapsed; ///< seconds
    double budget;  ///< seconds; infinity when unbounded
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    int workers = 1;
    /// Criteria to run; empty runs all of 1..9.
    std::vector<int> only;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& options);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3 occupation vs analytic: ... (12.1 s / 60 s)"
std::string format_result(const CriterionResult& r);

} // namespace rtp
