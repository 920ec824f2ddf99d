#include "selfish_lb/oracle.hpp"

#include <functional>
#include <stdexcept>

namespace slb {

std::optional<std::size_t> LumpedChain::index_of(const Assignment& sorted) const {
    auto it = index_.find(sorted);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Rational LumpedChain::probability(std::size_t from, std::size_t to) const {
    const auto& r = kernel_.at(from);
    auto it = r.find(to);
    return it == r.end() ? Rational(0) : it->second;
}

std::vector<Assignment> sorted_states(std::size_t m, std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    std::vector<Assignment> out;
    std::vector<Load> parts(n, 0);
    std::function<void(std::size_t, Load, Load)> rec = [&](std::size_t pos, Load left, Load cap) {
        if (pos == n - 1) {
            if (left <= cap) {
                parts[pos] = left;
                out.emplace_back(parts);
            }
            return;
        }
        for (Load v = std::min(left, cap); v >= 0; --v) {
            // remaining n-pos-1 slots hold at most v each
            if (static_cast<Load>(n - pos - 1) * v < left - v) break;
            parts[pos] = v;
            rec(pos + 1, left - v, v);
        }
    };
    rec(0, static_cast<Load>(m), static_cast<Load>(m));
    return out;
}

std::map<Assignment, Rational> lumped_step_distribution(const Assignment& x, ProtocolVariant variant,
                                                        std::uint64_t budget) {
    std::map<Assignment, Rational> out;
    for (const auto& [next, p] : exact_step_distribution(x, variant, budget)) out[next.sorted_desc()] += p;
    return out;
}

LumpedChain build_chain(std::size_t m, std::size_t n, ProtocolVariant variant, std::uint64_t budget) {
    if (outcome_count(static_cast<Load>(m), n) > budget) {
        throw BudgetError("chain for m=" + std::to_string(m) + ", n=" + std::to_string(n) +
                          " exceeds the enumeration budget of " + std::to_string(budget) + " outcomes");
    }
    LumpedChain c;
    c.m_ = m;
    c.n_ = n;
    c.variant_ = variant;
    c.states_ = sorted_states(m, n);
    for (std::size_t s = 0; s < c.states_.size(); ++s) c.index_.emplace(c.states_[s], s);
    c.kernel_.resize(c.states_.size());
    c.nash_.resize(c.states_.size());
    for (std::size_t s = 0; s < c.states_.size(); ++s) {
        c.nash_[s] = is_nash(c.states_[s]);
        for (auto& [next, p] : lumped_step_distribution(c.states_[s], variant, budget))
            c.kernel_[s][c.index_.at(next)] += p;
    }
    return c;
}

std::vector<Rational> expected_hitting_times(const LumpedChain& chain) {
    // Unknowns are the non-Nash states; h(s) - sum_{s' transient} K(s,s') h(s') = 1.
    std::vector<std::size_t> transient;
    std::vector<std::ptrdiff_t> slot(chain.size(), -1);
    for (std::size_t s = 0; s < chain.size(); ++s) {
        if (!chain.is_absorbing_nash(s)) {
            slot[s] = static_cast<std::ptrdiff_t>(transient.size());
            transient.push_back(s);
        }
    }
    const std::size_t k = transient.size();
    std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k + 1, Rational(0)));
    for (std::size_t r = 0; r < k; ++r) {
        a[r][r] = 1;
        a[r][k] = 1;
        for (const auto& [to, p] : chain.row(transient[r])) {
            if (slot[to] >= 0) a[r][static_cast<std::size_t>(slot[to])] -= p;
        }
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        while (piv < k && a[piv][col] == 0) ++piv;
        if (piv == k) throw std::runtime_error("hitting-time system is singular: Nash set unreachable");
        std::swap(a[piv], a[col]);
        const Rational inv = 1 / a[col][col];
        for (std::size_t j = col; j <= k; ++j) a[col][j] *= inv;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t j = col; j <= k; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<Rational> h(chain.size(), Rational(0));
    for (std::size_t r = 0; r < k; ++r) h[transient[r]] = a[r][k];
    return h;
}

Rational expected_hitting_time(const LumpedChain& chain, const Assignment& start) {
    if (start.n() != chain.n() || static_cast<std::size_t>(start.m()) != chain.m())
        throw std::invalid_argument("start state does not belong to this chain");
    const auto idx = chain.index_of(start.sorted_desc());
    return expected_hitting_times(chain)[*idx];
}

Rational two_zero_ones_hitting_time(std::size_t n) {
    if (n < 2) throw std::invalid_argument("two-zero-ones start needs n >= 2");
    // Each of the two top tasks moves to the empty resource w.p. 1/n; exactly
    // one moving reaches Nash, both moving gives a relabeled copy.
    const Rational q = Rational(1, BigInt(n));
    const Rational absorb = 2 * q * (1 - q);
    return 1 / absorb;
}

nlohmann::json chain_to_json(const LumpedChain& chain, bool include_hitting_times) {
    nlohmann::json j;
    j["m"] = chain.m();
    j["n"] = chain.n();
    j["protocol"] = std::string(to_string(chain.variant()));
    auto states = nlohmann::json::array();
    std::vector<Rational> h;
    if (include_hitting_times) h = expected_hitting_times(chain);
    for (std::size_t s = 0; s < chain.size(); ++s) {
        nlohmann::json st;
        st["loads"] = std::vector<Load>(chain.states()[s].loads().begin(), chain.states()[s].loads().end());
        st["nash"] = static_cast<bool>(chain.is_absorbing_nash(s));
        auto row = nlohmann::json::array();
        for (const auto& [to, p] : chain.row(s)) row.push_back({{"to", to}, {"p", rational_string(p)}});
        st["transitions"] = row;
        if (include_hitting_times) st["expected_hitting_time"] = rational_string(h[s]);
        states.push_back(st);
    }
    j["states"] = states;
    return j;
}

}  // namespace slb
