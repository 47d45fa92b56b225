#include "intdc/digamma.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace intdc {

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B2/2, B4/4, ... B12/12 terms of the asymptotic expansion.
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
    return shift + std::log(x) - 0.5 * inv - series;
}

namespace {

constexpr long kTableSize = 8192;

const std::array<double, kTableSize>& table() {
    static const std::array<double, kTableSize> t = [] {
        std::array<double, kTableSize> a{};
        a[0] = 0.0;  // unused
        for (long n = 1; n < kTableSize; ++n) a[static_cast<std::size_t>(n)] = digamma(static_cast<double>(n));
        return a;
    }();
    return t;
}

}  // namespace

double digamma_int(long n) {
    if (n < 1) throw std::domain_error("digamma_int: argument must be >= 1");
    if (n < kTableSize) return table()[static_cast<std::size_t>(n)];
    return digamma(static_cast<double>(n));
}

}  // namespace intdc
