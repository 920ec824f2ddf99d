#include "selfish_lb/lemma_checks.hpp"

#include "selfish_lb/analysis.hpp"
#include "selfish_lb/protocol.hpp"

namespace slb {

void for_each_assignment(std::size_t m, std::size_t n, const std::function<void(const Assignment&)>& f) {
    std::vector<Load> loads(n, 0);
    std::function<void(std::size_t, Load)> rec = [&](std::size_t pos, Load left) {
        if (pos + 1 == n) {
            loads[pos] = left;
            f(Assignment(loads));
            return;
        }
        for (Load v = 0; v <= left; ++v) {
            loads[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, static_cast<Load>(m));
}

namespace {

void fail(CheckOutcome& out, const Assignment& x, const std::string& why) {
    if (out.passed) out.detail = format_loads(x.loads()) + ": " + why;
    out.passed = false;
}

template <class F>
void sweep(std::size_t max_m, std::size_t max_n, F&& f) {
    for (std::size_t n = 1; n <= max_n; ++n)
        for (std::size_t m = 0; m <= max_m; ++m) for_each_assignment(m, n, f);
}

}  // namespace

CheckOutcome check_drift_bound_exhaustive(std::size_t max_m, std::size_t max_n) {
    CheckOutcome out;
    out.name = "drift bound Phi - u >= 0";
    sweep(max_m, max_n, [&](const Assignment& x) {
        ++out.cases;
        if (scaled_slack(x) < 0) fail(out, x, "n^2 (Phi - u) = " + to_string(scaled_slack(x)));
    });
    return out;
}

CheckOutcome check_nash_potential_exhaustive(std::size_t max_m, std::size_t max_n) {
    CheckOutcome out;
    out.name = "Nash potential bounds";
    sweep(max_m, max_n, [&](const Assignment& x) {
        ++out.cases;
        const auto b = phi_bounds(x.m(), x.n());
        const Rational phi = potential(x).exact();
        if (phi < b.min_phi) fail(out, x, "Phi below r(1 - r/n)");
        if ((phi == b.min_phi) != is_nash(x)) fail(out, x, "equality at the minimum does not match is_nash");
        if (phi > b.max_phi) fail(out, x, "Phi above m^2");
    });
    return out;
}

CheckOutcome check_lemma5_range(std::size_t max_n) {
    CheckOutcome out;
    out.name = "lemma 5 polynomial identity";
    for (std::size_t n = 1; n <= max_n; ++n) {
        ++out.cases;
        if (!check_lemma5_identity(n)) {
            if (out.passed) out.detail = "n = " + std::to_string(n);
            out.passed = false;
        }
    }
    return out;
}

CheckOutcome check_variance_exact(std::size_t max_m, std::size_t max_n) {
    CheckOutcome out;
    out.name = "variance lemma (exact)";
    sweep(max_m, max_n, [&](const Assignment& x) {
        if (is_nash(x)) return;
        ++out.cases;
        const Rational p = exact_change_probability(x);
        if (p < variance_constant(x.n())) fail(out, x, "Pr(Phi changes) = " + rational_string(p));
    });
    return out;
}

CheckOutcome check_sqrt_bound_exact(std::size_t max_m, std::size_t max_n) {
    CheckOutcome out;
    out.name = "E[Phi'] <= n + 2 sqrt(n Phi) (exact)";
    sweep(max_m, max_n, [&](const Assignment& x) {
        ++out.cases;
        const Rational e = exact_expected_next_potential(x, ProtocolVariant::NeutralDisallowed);
        if (!within_sqrt_bound(e, x)) fail(out, x, "E[Phi'] = " + rational_string(e));
    });
    return out;
}

CheckOutcome check_supermartingale_exact(std::size_t max_m, std::size_t max_n) {
    CheckOutcome out;
    out.name = "E[Phi'] <= u <= Phi (exact)";
    sweep(max_m, max_n, [&](const Assignment& x) {
        ++out.cases;
        const Rational e = exact_expected_next_potential(x, ProtocolVariant::NeutralDisallowed);
        const auto r = drift_report(x);
        if (e > r.u) fail(out, x, "E[Phi'] = " + rational_string(e) + " > u = " + rational_string(r.u));
        if (r.u > r.phi) fail(out, x, "u > Phi");
    });
    return out;
}

std::vector<CheckOutcome> verify_lemmas() {
    return {
        check_drift_bound_exhaustive(8, 4), check_nash_potential_exhaustive(8, 4), check_lemma5_range(8),
        check_variance_exact(6, 3),         check_sqrt_bound_exact(6, 3),          check_supermartingale_exact(6, 3),
    };
}

}  // namespace slb
