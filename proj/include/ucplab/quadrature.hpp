#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace ucplab {

/// Composite 20-point Gauss-Legendre rule on [a, b]; one panel per unit
/// length by default.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                             int panels = 0) {
    static constexpr std::array<double, 10> nodes = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
        0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
        0.9639719272779138, 0.9931285991850949};
    static constexpr std::array<double, 10> weights = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
        0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
        0.0406014298003869, 0.0176140071391521};
    if (panels <= 0) panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a))));
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * (f(mid + half * nodes[i]) + f(mid - half * nodes[i]));
        total += acc * half;
    }
    return total;
}

}  // namespace ucplab
