#include "selfish_lb/core.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace slb {

Assignment::Assignment(std::vector<Load> loads) : loads_(std::move(loads)) {
    if (loads_.empty()) throw std::invalid_argument("assignment needs at least one resource");
    for (Load v : loads_) {
        if (v < 0) throw std::invalid_argument("negative load");
        if (v > kMaxLoad) throw OverflowError("load exceeds 2^50");
        m_ += v;
        if (m_ > kMaxLoad) throw OverflowError("task count exceeds 2^50");
    }
}

Assignment Assignment::all_on_one(Load m, std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::vector<Load> v(n, 0);
    v[0] = m;
    return Assignment(std::move(v));
}

Assignment Assignment::two_zero_ones(std::size_t n) {
    if (n < 2) throw std::invalid_argument("two-zero-ones start needs n >= 2");
    std::vector<Load> v(n, 1);
    v[0] = 2;
    v[1] = 0;
    return Assignment(std::move(v));
}

Load Assignment::max_load() const noexcept { return *std::max_element(loads_.begin(), loads_.end()); }

Load Assignment::min_load() const noexcept { return *std::min_element(loads_.begin(), loads_.end()); }

Assignment Assignment::sorted_desc() const {
    auto v = loads_;
    std::sort(v.begin(), v.end(), std::greater<>());
    return Assignment(std::move(v));
}

PotentialValue potential(const Assignment& x) {
    Int128 sum_sq = 0;
    for (Load v : x.loads()) sum_sq = checked_add(sum_sq, checked_mul(v, v));
    const Int128 m = x.m();
    const Int128 n_phi = checked_sub(checked_mul(static_cast<Int128>(x.n()), sum_sq), checked_mul(m, m));
    return {n_phi, x.n()};
}

bool is_nash(const Assignment& x) noexcept { return x.max_load() - x.min_load() <= 1; }

bool is_eps_nash(const Assignment& x, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
    // gap <= eps*m/n  <=>  n*gap <= eps*m, avoids dividing
    const long double gap = static_cast<long double>(x.max_load() - x.min_load());
    return gap * static_cast<long double>(x.n()) <= static_cast<long double>(eps) * static_cast<long double>(x.m());
}

PhiBounds phi_bounds(Load m, std::size_t n) {
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    if (n == 0) throw std::invalid_argument("n must be positive");
    const Load r = m % static_cast<Load>(n);
    Rational lo = Rational(r) * (Rational(1) - Rational(BigInt(r), BigInt(n)));
    Rational hi = Rational(BigInt(m) * BigInt(m));
    return {lo, hi};
}

std::string format_loads(std::span<const Load> loads) {
    std::string s = "(";
    for (std::size_t i = 0; i < loads.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(loads[i]);
    }
    return s + ")";
}

}  // namespace slb
