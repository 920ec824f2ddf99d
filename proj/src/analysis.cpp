#include "selfish_lb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace slb {

namespace {

// Number of resources at each load.
std::map<Load, Int128> load_histogram(const Assignment& x) {
    std::map<Load, Int128> h;
    for (Load v : x.loads()) ++h[v];
    return h;
}

Int128 count_at(const std::map<Load, Int128>& h, Load v) {
    auto it = h.find(v);
    return it == h.end() ? 0 : it->second;
}

}  // namespace

Int128 drift_u1(const Assignment& x) {
    // All ordered-pair distances, minus the pairs at distance exactly one.
    std::vector<Load> v(x.loads().begin(), x.loads().end());
    std::sort(v.begin(), v.end());
    Int128 prefix = 0;
    Int128 total = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        total = checked_add(total, checked_sub(checked_mul(static_cast<Int128>(k), v[k]), prefix));
        prefix = checked_add(prefix, v[k]);
    }
    total = checked_mul(total, 2);
    const auto h = load_histogram(x);
    Int128 unit_pairs = 0;
    for (const auto& [load, c] : h) unit_pairs = checked_add(unit_pairs, checked_mul(c, count_at(h, load + 1)));
    return checked_sub(total, checked_mul(unit_pairs, 2));
}

Int128 drift_u2(const Assignment& x) {
    const auto h = load_histogram(x);
    Int128 u2 = 0;
    for (const auto& [load, c] : h) {
        const Int128 diff = count_at(h, load - 1) - count_at(h, load + 1);
        u2 = checked_add(u2, checked_mul(c, checked_mul(diff, diff)));
    }
    return u2;
}

Int128 scaled_slack(const Assignment& x) {
    const Int128 n = static_cast<Int128>(x.n());
    const Int128 lhs = checked_mul(n, potential(x).n_phi);
    const Int128 rhs = checked_add(checked_mul(n, drift_u1(x)), drift_u2(x));
    return checked_sub(lhs, rhs);
}

std::vector<Rational> variance_upper_bounds(const Assignment& x) {
    const std::size_t n = x.n();
    std::vector<Rational> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        BigInt acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const Load diff = x[j] - x[i];
            if (diff > 1 || diff < -1) acc += BigInt(diff < 0 ? -diff : diff);
        }
        out[i] = Rational(acc, BigInt(n));
    }
    return out;
}

DriftReport drift_report(const Assignment& x) {
    const std::size_t n = x.n();
    DriftReport r;
    r.phi = potential(x).exact();
    r.u1 = drift_u1(x);
    r.u2 = drift_u2(x);
    r.u = Rational(to_bigint(r.u1), BigInt(n)) + Rational(to_bigint(r.u2), BigInt(n) * BigInt(n));
    const auto h = load_histogram(x);
    r.d.reserve(n);
    for (Load v : x.loads()) {
        const Int128 s = count_at(h, v - 1);
        const Int128 l = count_at(h, v + 1);
        r.d.emplace_back(to_bigint(s - l), BigInt(n));
    }
    r.var_upper = variance_upper_bounds(x);
    r.slack = r.phi - r.u;
    return r;
}

double expected_next_potential_bound(const Assignment& x) {
    const double n = static_cast<double>(x.n());
    return n + 2.0 * std::sqrt(n * potential(x).as_real());
}

bool within_sqrt_bound(const Rational& expected, const Assignment& x) {
    const Rational excess = expected - Rational(BigInt(x.n()));
    if (excess <= 0) return true;
    // excess^2 <= 4 n Phi = 4 n_phi
    return excess * excess <= Rational(4) * to_rational(potential(x).n_phi);
}

Rational exact_expected_next_potential(const Assignment& x, ProtocolVariant variant, std::uint64_t budget) {
    Rational e = 0;
    for (const auto& [next, p] : exact_step_distribution(x, variant, budget)) e += p * potential(next).exact();
    return e;
}

Rational exact_change_probability(const Assignment& x, std::uint64_t budget) {
    const Int128 phi = potential(x).n_phi;
    Rational pr = 0;
    for (const auto& [next, p] : exact_step_distribution(x, ProtocolVariant::NeutralDisallowed, budget)) {
        if (potential(next).n_phi != phi) pr += p;
    }
    return pr;
}

Rational variance_constant(std::size_t n) { return Rational(2, 5) / (Rational(BigInt(n)) * BigInt(n)); }

SupermartingaleCheck check_supermartingale(const Assignment& x, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("supermartingale check needs at least 1000 trials");
    double mean = 0.0;
    double m2 = 0.0;
    std::vector<Load> next;
    for (std::uint64_t k = 0; k < trials; ++k) {
        RngStream rng(seed, k, 0);
        step_loads(x.loads(), ProtocolVariant::NeutralDisallowed, rng, next);
        const double phi = potential(Assignment(next)).as_real();
        const double delta = phi - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (phi - mean);
    }
    const double var = m2 / static_cast<double>(trials - 1);
    return {mean, std::sqrt(var / static_cast<double>(trials)), drift_report(x).u};
}

double VarianceCheck::std_err() const {
    // standard error of a Bernoulli(V) frequency
    const double v_d = to_double(v);
    return std::sqrt(v_d * (1.0 - v_d) / static_cast<double>(trials));
}

VarianceCheck check_variance_lemma(const Assignment& x, std::uint64_t trials, std::uint64_t seed) {
    if (is_nash(x)) throw std::invalid_argument("variance lemma applies only to non-Nash states");
    if (trials < 10000) throw std::invalid_argument("variance check needs at least 10^4 trials");
    const Int128 phi = potential(x).n_phi;
    std::uint64_t changed = 0;
    std::vector<Load> next;
    for (std::uint64_t k = 0; k < trials; ++k) {
        RngStream rng(seed, k, 0);
        step_loads(x.loads(), ProtocolVariant::NeutralDisallowed, rng, next);
        if (potential(Assignment(next)).n_phi != phi) ++changed;
    }
    return {static_cast<double>(changed) / static_cast<double>(trials), variance_constant(x.n()), trials};
}

Int128 lemma5_polynomial(const std::array<Int128, 5>& c) {
    const auto [n0, n1, n2, n3, n4] = c;
    return 4 * n0 * n1 * n2 + 3 * n0 * n0 * n3 + 4 * n0 * n1 * n3 + 4 * n0 * n2 * n3 + 4 * n1 * n2 * n3 +
           3 * n0 * n3 * n3 + 8 * n0 * n0 * n4 + 12 * n0 * n1 * n4 + 3 * n1 * n1 * n4 + 8 * n0 * n2 * n4 +
           4 * n1 * n2 * n4 + 12 * n0 * n3 * n4 + 4 * n1 * n3 * n4 + 4 * n2 * n3 * n4 + 8 * n0 * n4 * n4 +
           3 * n1 * n4 * n4;
}

bool check_lemma5_identity(std::size_t n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (n > 64) throw BudgetError("lemma 5 exhaustion is limited to n <= 64");
    const auto nn = static_cast<Int128>(n);
    bool ok = true;
    std::array<Int128, 5> c{};
    for (c[0] = 0; c[0] <= nn; ++c[0])
        for (c[1] = 0; c[0] + c[1] <= nn; ++c[1])
            for (c[2] = 0; c[0] + c[1] + c[2] <= nn; ++c[2])
                for (c[3] = 0; c[0] + c[1] + c[2] + c[3] <= nn; ++c[3]) {
                    c[4] = nn - c[0] - c[1] - c[2] - c[3];
                    const Int128 poly = lemma5_polynomial(c);
                    for (Load z : {Load{0}, Load{1}}) {
                        std::vector<Load> loads;
                        for (int level = 0; level < 5; ++level)
                            loads.insert(loads.end(), static_cast<std::size_t>(c[level]), z + level);
                        if (scaled_slack(Assignment(std::move(loads))) != poly) ok = false;
                    }
                }
    return ok;
}

}  // namespace slb
