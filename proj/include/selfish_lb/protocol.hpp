#pragma once

#include "selfish_lb/core.hpp"
#include "selfish_lb/numeric.hpp"
#include "selfish_lb/rng.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace slb {

enum class ProtocolVariant : std::uint8_t {
    NeutralAllowed,     // migrate i -> j when x_i > x_j
    NeutralDisallowed,  // migrate i -> j when x_i > x_j + 1
};

std::string_view to_string(ProtocolVariant v) noexcept;
/// Accepts "neutral" / "strict".
ProtocolVariant parse_variant(std::string_view s);

/// True when a task on a resource of load `from` may consider moving to one of load `to`.
constexpr bool migration_allowed(ProtocolVariant v, Load from, Load to) noexcept {
    return v == ProtocolVariant::NeutralAllowed ? from > to : from > to + 1;
}

/// Per-source migration probabilities p_{i,j}(x) evaluated on the round-start snapshot.
class TransitionKernel {
public:
    TransitionKernel(const Assignment& x, ProtocolVariant variant);

    std::size_t n() const noexcept { return n_; }
    ProtocolVariant variant() const noexcept { return variant_; }
    const Assignment& source_state() const noexcept { return source_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return p_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {p_.data() + i * n_, n_}; }

    /// sum_l x_l p_{l,i}(x), the expected load of resource i after one round.
    double expected_load(std::size_t i) const noexcept;

private:
    Assignment source_;
    ProtocolVariant variant_;
    std::size_t n_;
    std::vector<double> p_;
};

inline TransitionKernel kernel(const Assignment& x, ProtocolVariant variant) { return TransitionKernel(x, variant); }

/// Exact p_{i,j}(x) as a rational.
Rational exact_kernel_entry(const Assignment& x, ProtocolVariant variant, std::size_t i, std::size_t j);

/// y[i][j] = tasks moving i -> j in one round, stored row-major.
struct MigrationMatrix {
    std::size_t n = 0;
    std::vector<Load> y;

    Load operator()(std::size_t i, std::size_t j) const noexcept { return y[i * n + j]; }
};

struct StepResult {
    Assignment next;
    MigrationMatrix moves;
};

/// One synchronous round: each row is an independent multinomial draw
/// (count x_i, probabilities p_{i,.}(x)) realised by sequential binomials.
StepResult step(const Assignment& x, ProtocolVariant variant, RngStream& rng);

/// Same transition as step() without materialising the migration matrix;
/// the hot loop of the experiment harness. Writes the new loads into `next`.
void step_loads(std::span<const Load> x, ProtocolVariant variant, RngStream& rng, std::vector<Load>& next);

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 20;

using StepDistribution = std::map<Assignment, Rational>;

/// Exact one-round distribution obtained by folding in every task's
/// independent choice (stay, or move to each j) with rational probabilities.
/// Refuses (BudgetError) when n^m exceeds `budget`.
StepDistribution exact_step_distribution(const Assignment& x, ProtocolVariant variant,
                                         std::uint64_t budget = kDefaultEnumerationBudget);

/// n^m, saturating at UINT64_MAX.
std::uint64_t outcome_count(Load m, std::size_t n) noexcept;

}  // namespace slb
