#pragma once

namespace intdc {

// Digamma for x > 0: upward recurrence to x >= 10, then the asymptotic
// Bernoulli series. Absolute error below 1e-12 on [1, inf).
double digamma(double x);

// Integer-argument digamma, tabulated for the small counts KSG produces.
double digamma_int(long n);

}  // namespace intdc
