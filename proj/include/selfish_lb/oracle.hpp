#pragma once

#include "selfish_lb/core.hpp"
#include "selfish_lb/numeric.hpp"
#include "selfish_lb/protocol.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace slb {

/// Markov chain of the protocol quotiented by resource relabeling. States
/// are non-increasing load vectors (partitions of m into at most n parts).
class LumpedChain {
public:
    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    ProtocolVariant variant() const noexcept { return variant_; }

    const std::vector<Assignment>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }
    std::optional<std::size_t> index_of(const Assignment& sorted) const;

    /// Sparse row: target index -> exact probability.
    const std::map<std::size_t, Rational>& row(std::size_t s) const { return kernel_.at(s); }
    Rational probability(std::size_t from, std::size_t to) const;

    bool is_absorbing_nash(std::size_t s) const { return nash_[s]; }

    friend LumpedChain build_chain(std::size_t m, std::size_t n, ProtocolVariant variant, std::uint64_t budget);

private:
    std::size_t m_ = 0;
    std::size_t n_ = 1;
    ProtocolVariant variant_ = ProtocolVariant::NeutralDisallowed;
    std::vector<Assignment> states_;
    std::map<Assignment, std::size_t> index_;
    std::vector<std::map<std::size_t, Rational>> kernel_;
    std::vector<bool> nash_;
};

/// All non-increasing length-n vectors summing to m, in lexicographically
/// decreasing order.
std::vector<Assignment> sorted_states(std::size_t m, std::size_t n);

/// Each unsorted outcome of exact_step_distribution is accumulated into its
/// sorted representative. BudgetError when n^m exceeds the budget.
LumpedChain build_chain(std::size_t m, std::size_t n, ProtocolVariant variant,
                        std::uint64_t budget = kDefaultEnumerationBudget);

/// Sorted projection of the one-step distribution from an arbitrary
/// (unsorted) state.
std::map<Assignment, Rational> lumped_step_distribution(const Assignment& x, ProtocolVariant variant,
                                                        std::uint64_t budget = kDefaultEnumerationBudget);

/// E[first round in the Nash set], for every state, by exact Gaussian
/// elimination over the rationals. Nash states are treated as absorbing, so
/// under the neutral variant this is a first hitting time.
std::vector<Rational> expected_hitting_times(const LumpedChain& chain);

Rational expected_hitting_time(const LumpedChain& chain, const Assignment& start);

/// Closed form n^2 / (2(n-1)) for the start (2, 0, 1, ..., 1) with m = n
/// under the strict protocol, from the two-state reduction.
Rational two_zero_ones_hitting_time(std::size_t n);

/// JSON dump: states, kernel rows and hitting times; probabilities as "num/den".
nlohmann::json chain_to_json(const LumpedChain& chain, bool include_hitting_times = true);

}  // namespace slb
