#pragma once

#include "selfish_lb/numeric.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace slb {

/// Load vector of anonymous tasks over n resources.
///
/// Loads are bounded by kMaxLoad so that the potential and the drift
/// quantities stay within checked 128-bit arithmetic.
class Assignment {
public:
    explicit Assignment(std::vector<Load> loads);
    Assignment(std::initializer_list<Load> loads) : Assignment(std::vector<Load>(loads)) {}

    /// (m, 0, ..., 0)
    static Assignment all_on_one(Load m, std::size_t n);
    /// (2, 0, 1, ..., 1); requires n >= 2 and has m == n.
    static Assignment two_zero_ones(std::size_t n);

    std::size_t n() const noexcept { return loads_.size(); }
    Load m() const noexcept { return m_; }
    std::span<const Load> loads() const noexcept { return loads_; }
    Load operator[](std::size_t i) const noexcept { return loads_[i]; }
    Load max_load() const noexcept;
    Load min_load() const noexcept;

    /// Non-increasing rearrangement; canonical representative under relabeling.
    Assignment sorted_desc() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment& a, const Assignment& b) { return a.loads_ <=> b.loads_; }

private:
    std::vector<Load> loads_;
    Load m_ = 0;
};

/// n * Phi(x), which is always a non-negative integer.
struct PotentialValue {
    Int128 n_phi = 0;
    std::size_t n = 1;

    Rational exact() const { return Rational(to_bigint(n_phi), BigInt(n)); }
    double as_real() const { return static_cast<double>(n_phi) / static_cast<double>(n); }

    friend bool operator==(const PotentialValue&, const PotentialValue&) = default;
};

/// Phi(x) = sum_i (x_i - m/n)^2 via the integer form n*sum x_i^2 - m^2.
/// Throws OverflowError if the exact value does not fit in 128 bits.
PotentialValue potential(const Assignment& x);

bool is_nash(const Assignment& x) noexcept;

/// max - min <= eps * m / n. Requires eps in (0, 1].
bool is_eps_nash(const Assignment& x, double eps);

struct PhiBounds {
    Rational min_phi;  // r (1 - r/n), r = m mod n; attained exactly at Nash assignments
    Rational max_phi;  // m^2
};

PhiBounds phi_bounds(Load m, std::size_t n);

std::string format_loads(std::span<const Load> loads);

}  // namespace slb
