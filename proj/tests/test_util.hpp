#pragma once

#include <functional>

namespace parosc_test {

// 7-point sixth-order second derivative; residual gates at 1e-8/1e-9 need the
// truncation error a few orders below the stencil's working scale.
inline double second_derivative(const std::function<double(double)>& f, double t,
                                double h = 0.004) {
    return (f(t - 3 * h) / 90 - 3 * f(t - 2 * h) / 20 + 1.5 * f(t - h) - 49 * f(t) / 18 +
            1.5 * f(t + h) - 3 * f(t + 2 * h) / 20 + f(t + 3 * h) / 90) /
           (h * h);
}

}  // namespace parosc_test
