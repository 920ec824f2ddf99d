#include "selfish_lb/protocol.hpp"

#include "selfish_lb/binomial.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace slb {

std::string_view to_string(ProtocolVariant v) noexcept {
    return v == ProtocolVariant::NeutralAllowed ? "neutral" : "strict";
}

ProtocolVariant parse_variant(std::string_view s) {
    if (s == "neutral") return ProtocolVariant::NeutralAllowed;
    if (s == "strict") return ProtocolVariant::NeutralDisallowed;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "' (expected neutral|strict)");
}

TransitionKernel::TransitionKernel(const Assignment& x, ProtocolVariant variant)
    : source_(x), variant_(variant), n_(x.n()), p_(x.n() * x.n(), 0.0) {
    const double nd = static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const Load xi = x[i];
        double off = 0.0;
        if (xi > 0) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (j == i || !migration_allowed(variant, xi, x[j])) continue;
                const double pij = static_cast<double>(xi - x[j]) / (nd * static_cast<double>(xi));
                p_[i * n_ + j] = pij;
                off += pij;
            }
        }
        p_[i * n_ + i] = 1.0 - off;
    }
}

double TransitionKernel::expected_load(std::size_t i) const noexcept {
    // Off-diagonal inflow x_l p_{l,i} = (x_l - x_i)/n exactly; keep the
    // diagonal as x_i minus its outflow so large loads do not cancel badly.
    const double nd = static_cast<double>(n_);
    const Load xi = source_[i];
    long double inflow = 0.0L;
    long double outflow = 0.0L;
    for (std::size_t l = 0; l < n_; ++l) {
        if (l == i) continue;
        if ((*this)(l, i) > 0.0) inflow += static_cast<long double>(source_[l] - xi) / nd;
        if ((*this)(i, l) > 0.0) outflow += static_cast<long double>(xi - source_[l]) / nd;
    }
    return static_cast<double>(static_cast<long double>(xi) - outflow + inflow);
}

Rational exact_kernel_entry(const Assignment& x, ProtocolVariant variant, std::size_t i, std::size_t j) {
    const std::size_t n = x.n();
    const Load xi = x[i];
    if (xi == 0) return i == j ? Rational(1) : Rational(0);
    auto off = [&](std::size_t k) {
        if (k == i || !migration_allowed(variant, xi, x[k])) return Rational(0);
        return Rational(BigInt(xi - x[k]), BigInt(n) * BigInt(xi));
    };
    if (i != j) return off(j);
    Rational stay(1);
    for (std::size_t k = 0; k < n; ++k) stay -= off(k);
    return stay;
}

namespace {

// Draws one round row by row. For each source i with movable tasks the
// multinomial over (targets..., stay) is split into sequential binomials,
// each conditioned on the tasks not yet placed. sink(i, j, count) receives
// every cell, including the diagonal.
template <class Sink>
void draw_round(std::span<const Load> x, ProtocolVariant variant, RngStream& rng, Sink&& sink) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    std::vector<std::size_t> targets;
    std::vector<double> probs;
    std::vector<double> tail;  // tail[k] = stay + sum_{k' >= k} probs[k']
    targets.reserve(n);
    probs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Load xi = x[i];
        if (xi == 0) continue;
        targets.clear();
        probs.clear();
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !migration_allowed(variant, xi, x[j])) continue;
            const double pij = static_cast<double>(xi - x[j]) / (nd * static_cast<double>(xi));
            targets.push_back(j);
            probs.push_back(pij);
            off += pij;
        }
        Load remaining = xi;
        if (!targets.empty()) {
            tail.assign(probs.size() + 1, 1.0 - off);
            for (std::size_t k = probs.size(); k-- > 0;) tail[k] = tail[k + 1] + probs[k];
            for (std::size_t k = 0; k < targets.size() && remaining > 0; ++k) {
                const Load moved = binomial(rng, remaining, std::min(1.0, probs[k] / tail[k]));
                if (moved != 0) sink(i, targets[k], moved);
                remaining -= moved;
            }
        }
        sink(i, i, remaining);
    }
}

}  // namespace

void step_loads(std::span<const Load> x, ProtocolVariant variant, RngStream& rng, std::vector<Load>& next) {
    next.assign(x.size(), 0);
    draw_round(x, variant, rng, [&](std::size_t, std::size_t j, Load c) { next[j] += c; });
}

StepResult step(const Assignment& x, ProtocolVariant variant, RngStream& rng) {
    const std::size_t n = x.n();
    MigrationMatrix moves{n, std::vector<Load>(n * n, 0)};
    std::vector<Load> next(n, 0);
    draw_round(x.loads(), variant, rng, [&](std::size_t i, std::size_t j, Load c) {
        moves.y[i * n + j] = c;
        next[j] += c;
    });
    return {Assignment(std::move(next)), std::move(moves)};
}

std::uint64_t outcome_count(Load m, std::size_t n) noexcept {
    std::uint64_t total = 1;
    for (Load k = 0; k < m; ++k) {
        if (n != 0 && total > std::numeric_limits<std::uint64_t>::max() / n) return std::numeric_limits<std::uint64_t>::max();
        total *= n;
    }
    return total;
}

StepDistribution exact_step_distribution(const Assignment& x, ProtocolVariant variant, std::uint64_t budget) {
    const std::size_t n = x.n();
    const std::uint64_t outcomes = outcome_count(x.m(), n);
    if (outcomes > budget) {
        throw BudgetError("exact step distribution needs n^m = " +
                          (outcomes == std::numeric_limits<std::uint64_t>::max() ? std::string("> 2^64")
                                                                                 : std::to_string(outcomes)) +
                          " outcomes, budget is " + std::to_string(budget));
    }

    std::map<std::vector<Load>, Rational> partial;
    partial.emplace(std::vector<Load>(n, 0), Rational(1));
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] == 0) continue;
        std::vector<std::pair<std::size_t, Rational>> choices;
        for (std::size_t j = 0; j < n; ++j) {
            Rational p = exact_kernel_entry(x, variant, i, j);
            if (p != 0) choices.emplace_back(j, std::move(p));
        }
        for (Load task = 0; task < x[i]; ++task) {
            std::map<std::vector<Load>, Rational> folded;
            for (const auto& [loads, prob] : partial) {
                for (const auto& [j, p] : choices) {
                    auto out = loads;
                    ++out[j];
                    folded[std::move(out)] += prob * p;
                }
            }
            partial = std::move(folded);
        }
    }

    StepDistribution dist;
    for (auto& [loads, prob] : partial) dist.emplace(Assignment(loads), prob);
    return dist;
}

}  // namespace slb
