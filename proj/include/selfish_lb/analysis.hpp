#pragma once

#include "selfish_lb/core.hpp"
#include "selfish_lb/numeric.hpp"
#include "selfish_lb/protocol.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace slb {

/// One-step drift quantities of the strict protocol at a state x.
///
/// s_i / l_i count resources exactly one below / above resource i;
/// u1 sums |x_i - x_j| over ordered pairs differing by more than one;
/// u2 = sum_i (s_i - l_i)^2; u = u1/n + u2/n^2 bounds E[Phi(X(t+1)) | x].
struct DriftReport {
    Rational phi;
    Int128 u1 = 0;
    Int128 u2 = 0;
    Rational u;
    std::vector<Rational> d;          // (s_i - l_i) / n
    std::vector<Rational> var_upper;  // per-resource variance bound
    Rational slack;                   // phi - u
};

DriftReport drift_report(const Assignment& x);

Int128 drift_u1(const Assignment& x);
Int128 drift_u2(const Assignment& x);

/// n^2 (Phi(x) - u(x)) = n * n_phi - (n * u1 + u2), in exact integers.
Int128 scaled_slack(const Assignment& x);

/// (1/n) sum_{l: x_l > x_i + 1} (x_l - x_i) + (1/n) sum_{j: x_j < x_i - 1} (x_i - x_j)
std::vector<Rational> variance_upper_bounds(const Assignment& x);

/// n + 2 sqrt(n Phi(x)).
double expected_next_potential_bound(const Assignment& x);

/// Exact test of expected <= n + 2 sqrt(n Phi(x)) without square roots.
bool within_sqrt_bound(const Rational& expected, const Assignment& x);

/// Exact E[Phi(X(t+1)) | x] under the given variant, by enumeration.
Rational exact_expected_next_potential(const Assignment& x, ProtocolVariant variant,
                                       std::uint64_t budget = kDefaultEnumerationBudget);

/// Exact Pr(Phi(X(t+1)) != Phi(x)) under the strict protocol, by enumeration.
Rational exact_change_probability(const Assignment& x, std::uint64_t budget = kDefaultEnumerationBudget);

/// 0.4 / n^2
Rational variance_constant(std::size_t n);

struct SupermartingaleCheck {
    double mc_mean = 0.0;
    double std_err = 0.0;
    Rational bound;  // u(x)
    bool holds() const { return mc_mean <= to_double(bound) + 3.0 * std_err; }
};

/// Monte Carlo estimate of E[Phi(X(t+1)) | x] under the strict protocol.
/// Trial k draws from RngStream(seed, k, 0). Requires trials >= 1000.
SupermartingaleCheck check_supermartingale(const Assignment& x, std::uint64_t trials, std::uint64_t seed);

struct VarianceCheck {
    double p_change = 0.0;
    Rational v;
    std::uint64_t trials = 0;
    double std_err() const;
    bool holds() const { return p_change >= to_double(v) - 3.0 * std_err(); }
};

/// Monte Carlo estimate of Pr(Phi changes in one strict round). x must not
/// be Nash (std::invalid_argument otherwise); trials >= 10^4.
VarianceCheck check_variance_lemma(const Assignment& x, std::uint64_t trials, std::uint64_t seed);

/// The sixteen-term polynomial equal to n^2 (Phi - u) for an assignment
/// whose loads lie in {z, ..., z+4} with counts n0..n4.
Int128 lemma5_polynomial(const std::array<Int128, 5>& counts);

/// Verifies n^2 Phi - n^2 u == lemma5_polynomial for every composition of
/// n into five parts and base loads z in {0, 1}.
bool check_lemma5_identity(std::size_t n);

}  // namespace slb
