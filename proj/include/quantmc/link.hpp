#pragma once

#include <cmath>

namespace quantmc {

/// Logistic CDF 1/(1+e^-x). Total on the extended reals: -inf maps to 0,
/// +inf to 1, and no |x| overflows.
inline double inverse_logit(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double t = std::exp(x);
    return t / (1.0 + t);
}

/// Derivative of the logistic CDF, in (0, 1/4] with maximum at 0; the limit
/// at +-inf is 0. Evaluated as e^-|x| / (1+e^-|x|)^2, which is even in x and
/// keeps precision in the tails where 1-Phi(x) would round to 0.
inline double inverse_logit_deriv(double x) {
    const double t = std::exp(-std::abs(x));
    const double u = 1.0 + t;
    return t / (u * u);
}

}  // namespace quantmc
