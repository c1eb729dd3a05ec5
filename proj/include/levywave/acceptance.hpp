#ifndef LEVYWAVE_ACCEPTANCE_HPP
#define LEVYWAVE_ACCEPTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace levywave {

enum class CheckBudget { Quick, Full };

struct CriterionResult {
    std::string id;
    std::string description;
    bool pass = false;
    std::string details;
};

struct AcceptanceOptions {
    CheckBudget budget = CheckBudget::Full;
    int threads = 1;
    std::uint64_t seed = 20260809;
};

// The eleven acceptance checks, in order. Quick budget shrinks the Monte
// Carlo sizes for smoke runs; thresholds stay as stated. A nonempty `only`
// (e.g. "C7") runs that single criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::string& only = "");

// Deterministic one-page summary of a result list (used for the determinism
// check and by the CLI).
std::string acceptance_summary_json(const std::vector<CriterionResult>& results,
                                    const AcceptanceOptions& opt);

} // namespace levywave

#endif
