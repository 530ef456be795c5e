#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tiltpump::detail {

// Composite Simpson rule on [a, b] with n intervals (n even, n >= 2).
template <class F>
double simpson(F&& f, double a, double b, long n) {
    if (n < 2)
        n = 2;
    if (n % 2 != 0)
        ++n;
    const double h = (b - a) / static_cast<double>(n);
    double odd = 0.0;
    double even = 0.0;
    for (long i = 1; i < n; ++i) {
        const double v = f(a + h * static_cast<double>(i));
        if (i % 2 == 1)
            odd += v;
        else
            even += v;
    }
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

struct RefinedIntegral {
    double value = 0.0;
    double change = 0.0; ///< |S(n) - S(n/2)| at the accepted n
    long intervals = 0;
};

// Doubles n until the Simpson estimates with n and n/2 intervals agree to tol.
template <class F>
RefinedIntegral refined_simpson(F&& f, double a, double b, long n, double tol,
                                int max_doublings = 6) {
    n = std::max<long>(4, n + (n % 4 == 0 ? 0 : 4 - n % 4));
    double coarse = simpson(f, a, b, n / 2);
    for (int i = 0;; ++i) {
        const double fine = simpson(f, a, b, n);
        const double change = std::abs(fine - coarse);
        if (change <= tol || i == max_doublings)
            return {fine, change, n};
        coarse = fine;
        n *= 2;
    }
}

} // namespace tiltpump::detail
