#pragma once

#include "selfish_lb/core.hpp"
#include "selfish_lb/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cstdint>
#include <map>
#include <vector>

namespace slb::test {

inline std::uint64_t uniform_int(RngStream& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}

inline Assignment random_assignment(RngStream& rng, std::size_t min_n, std::size_t max_n, Load max_load) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, min_n, max_n));
    std::vector<Load> v(n);
    for (auto& x : v) x = static_cast<Load>(uniform_int(rng, 0, static_cast<std::uint64_t>(max_load)));
    return Assignment(std::move(v));
}

/// Pearson statistic over cells with expected count >= 5 (smaller cells pooled).
struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double critical = 0.0;
    bool accept() const { return statistic <= critical; }
};

inline ChiSquare chi_square(const std::vector<double>& expected_prob, const std::vector<std::uint64_t>& observed,
                            std::uint64_t total, double significance) {
    ChiSquare c;
    double pooled_e = 0.0, pooled_o = 0.0;
    int cells = 0;
    for (std::size_t k = 0; k < expected_prob.size(); ++k) {
        const double e = expected_prob[k] * static_cast<double>(total);
        const auto o = static_cast<double>(observed[k]);
        if (e < 5.0) {
            pooled_e += e;
            pooled_o += o;
            continue;
        }
        c.statistic += (o - e) * (o - e) / e;
        ++cells;
    }
    if (pooled_e > 0.0) {
        c.statistic += (pooled_o - pooled_e) * (pooled_o - pooled_e) / std::max(pooled_e, 1e-300);
        ++cells;
    }
    c.dof = std::max(1, cells - 1);
    boost::math::chi_squared dist(c.dof);
    c.critical = boost::math::quantile(boost::math::complement(dist, significance));
    return c;
}

}  // namespace slb::test
