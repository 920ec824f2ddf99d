#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slb {

using Load = std::int64_t;
using Int128 = __int128;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest per-resource load (and task count) the simulator accepts.
inline constexpr Load kMaxLoad = Load{1} << 50;

/// Raised when an exact integer quantity would not fit its representation.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Raised when an exhaustive computation would exceed its enumeration budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Int128 checked_mul(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit multiply overflow");
    return r;
}

inline Int128 checked_add(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit add overflow");
    return r;
}

inline Int128 checked_sub(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("128-bit subtract overflow");
    return r;
}

std::string to_string(Int128 v);
BigInt to_bigint(Int128 v);
Rational to_rational(Int128 v);

/// "num/den" in lowest terms; integers are printed as "k/1".
std::string rational_string(const Rational& q);
Rational parse_rational(const std::string& s);
double to_double(const Rational& q);

}  // namespace slb
