#pragma once

#include "selfish_lb/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace slb {

/// Calls f for every length-n load vector summing to m (all compositions).
void for_each_assignment(std::size_t m, std::size_t n, const std::function<void(const Assignment&)>& f);

struct CheckOutcome {
    std::string name;
    bool passed = true;
    std::uint64_t cases = 0;
    std::string detail;  // first counterexample, if any
};

/// Phi - u >= 0 for every assignment with m <= max_m, n <= max_n (exact integers).
CheckOutcome check_drift_bound_exhaustive(std::size_t max_m, std::size_t max_n);

/// Phi >= r(1 - r/n) with equality iff Nash, and Phi <= m^2, exhaustively.
CheckOutcome check_nash_potential_exhaustive(std::size_t max_m, std::size_t max_n);

/// check_lemma5_identity(n) for n = 1..max_n.
CheckOutcome check_lemma5_range(std::size_t max_n);

/// Exact Pr(Phi changes) >= 0.4/n^2 for every non-Nash state with m <= max_m, n <= max_n.
CheckOutcome check_variance_exact(std::size_t max_m, std::size_t max_n);

/// Exact E[Phi(X(t+1)) | x] <= n + 2 sqrt(n Phi(x)) for every state with m <= max_m, n <= max_n.
CheckOutcome check_sqrt_bound_exact(std::size_t max_m, std::size_t max_n);

/// Exact E[Phi(X(t+1)) | x] <= u(x) <= Phi(x) for every state (strict protocol).
CheckOutcome check_supermartingale_exact(std::size_t max_m, std::size_t max_n);

/// The verify-lemmas battery used by the CLI.
std::vector<CheckOutcome> verify_lemmas();

}  // namespace slb
