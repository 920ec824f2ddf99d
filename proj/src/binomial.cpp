#include "selfish_lb/binomial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slb {

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n)
double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x/np) + np - x, evaluated by series when x is close to np
double deviance_term(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

}  // namespace detail

double binomial_log_pmf(Load k, Load count, double p) {
    if (k < 0 || k > count) return -INFINITY;
    const double q = 1.0 - p;
    const auto n = static_cast<double>(count);
    const auto kd = static_cast<double>(k);
    if (p == 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p == 1.0) return k == count ? 0.0 : -INFINITY;
    if (k == 0) return n * std::log1p(-p);
    if (k == count) return n * std::log(p);
    const double nk = static_cast<double>(count - k);
    const double lc = detail::stirling_error(n) - detail::stirling_error(kd) - detail::stirling_error(nk) -
                      detail::deviance_term(kd, n * p) - detail::deviance_term(nk, n * q);
    const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / n);
    return lc - 0.5 * lf;
}

namespace {

Load binomial_inversion(RngStream& rng, Load count, double p) {
    const double q = 1.0 - p;
    const double ratio = p / q;
    const double p0 = std::exp(static_cast<double>(count) * std::log1p(-p));
    for (;;) {
        double u = rng.uniform();
        double pk = p0;
        Load k = 0;
        while (u > pk) {
            u -= pk;
            ++k;
            if (k > count) break;
            pk *= ratio * static_cast<double>(count - k + 1) / static_cast<double>(k);
            // remaining tail mass is below double resolution
            if (pk == 0.0 && static_cast<double>(k) > static_cast<double>(count) * p) break;
        }
        if (k <= count && u <= pk) return k;
    }
}

// BTRD, for count * p >= 10 and p <= 1/2.
Load binomial_btrd(RngStream& rng, Load count, double p) {
    const double n = static_cast<double>(count);
    const double q = 1.0 - p;
    const double r = p / q;
    const double nr = (n + 1.0) * r;
    const double npq = n * p * q;
    const double spq = std::sqrt(npq);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double vr = 0.92 - 4.2 / b;
    const double urvr = 0.86 * vr;
    const Load mode = static_cast<Load>(std::floor((n + 1.0) * p));
    const double log_pmf_mode = binomial_log_pmf(mode, count, p);

    for (;;) {
        double v = rng.uniform_pos();
        double u;
        if (v <= urvr) {
            u = v / vr - 0.43;
            return static_cast<Load>(std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + c));
        }
        if (v >= vr) {
            u = rng.uniform_pos() - 0.5;
        } else {
            u = v / vr - 0.93;
            u = std::copysign(0.5, u) - u;
            v = rng.uniform_pos() * vr;
        }
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + c);
        if (kf < 0.0 || kf > n) continue;
        const auto k = static_cast<Load>(kf);
        v = v * alpha / (a / (us * us) + b);
        const Load km = k > mode ? k - mode : mode - k;
        if (km <= 15) {
            // f(k)/f(mode) by the pmf recurrence
            double f = 1.0;
            if (mode < k) {
                for (Load i = mode + 1; i <= k; ++i) f *= nr / static_cast<double>(i) - r;
            } else if (mode > k) {
                for (Load i = k + 1; i <= mode; ++i) v *= nr / static_cast<double>(i) - r;
            }
            if (v <= f) return k;
            continue;
        }
        v = std::log(v);
        const double kmd = static_cast<double>(km);
        const double rho = (kmd / npq) * (((kmd / 3.0 + 0.625) * kmd + 1.0 / 6.0) / npq + 0.5);
        const double t = -kmd * kmd / (2.0 * npq);
        if (v < t - rho) return k;
        if (v > t + rho) continue;
        if (v <= binomial_log_pmf(k, count, p) - log_pmf_mode) return k;
    }
}

}  // namespace

Load binomial(RngStream& rng, Load count, double p) {
    if (count < 0) throw std::invalid_argument("binomial count must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial probability outside [0, 1]");
    if (count == 0 || p == 0.0) return 0;
    if (p == 1.0) return count;
    if (p > 0.5) return count - binomial(rng, count, 1.0 - p);
    if (static_cast<double>(count) * p < 10.0) return binomial_inversion(rng, count, p);
    return binomial_btrd(rng, count, p);
}

}  // namespace slb
