#include "selfish_lb/numeric.hpp"

#include <algorithm>

namespace slb {

std::string to_string(Int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    // negate through unsigned so INT128_MIN is handled
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

BigInt to_bigint(Int128 v) { return BigInt(to_string(v)); }

Rational to_rational(Int128 v) { return Rational(to_bigint(v)); }

std::string rational_string(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace slb
