#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <span>
#include <vector>

namespace radsol::quad {

/// Composite 10-point Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
double gauss_composite(F&& f, double a, double b, int panels) {
    if (b <= a) return 0.0;
    const double w = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * w;
        const double hi = (k + 1 == panels) ? b : lo + w;
        sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, hi);
    }
    return sum;
}

/// Composite Gauss-Legendre on [a, b] with the panel grid split at `breaks`.
template <class F>
double gauss_with_breaks(F&& f, double a, double b, int panels, std::span<const double> breaks) {
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    const double total = b - a;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const int p = std::max(1, static_cast<int>(panels * len / total + 0.5));
        sum += gauss_composite(f, cuts[i], cuts[i + 1], p);
    }
    return sum;
}

/// Visits every node (y, weight) of the composite 10-point Gauss-Legendre rule
/// on [a, b] split at `breaks`. Lets callers accumulate several integrals
/// from one evaluation per node.
template <class Visit>
void for_each_node(double a, double b, int panels, std::span<const double> breaks, Visit&& visit) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    const double total = b - a;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const int p = std::max(1, static_cast<int>(panels * len / total + 0.5));
        const double w = len / p;
        for (int k = 0; k < p; ++k) {
            const double mid = cuts[i] + (k + 0.5) * w;
            const double half = 0.5 * w;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                if (xs[j] == 0.0) {
                    visit(mid, ws[j] * half);
                } else {
                    visit(mid - half * xs[j], ws[j] * half);
                    visit(mid + half * xs[j], ws[j] * half);
                }
            }
        }
    }
}

/// Composite Simpson weights for an odd number of equally spaced samples.
double simpson(std::span<const double> values, double h);

}  // namespace radsol::quad
