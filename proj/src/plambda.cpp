#include "radsol/plambda.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radsol {

double contact_boundary(const RadialPotential& phi, double lambda) {
    if (!(lambda > phi.lambda0()))
        throw std::invalid_argument("lambda must exceed lambda0 = " + std::to_string(phi.lambda0()));
    const double slope = 2.0 * (lambda + phi.n());
    const std::size_t m = phi.size();
    const double x_last = phi.x(m - 1);

    if (phi.slope_upsilon(m - 1) <= slope) {
        const double edge = x_last + kRightTailValidity;
        if (phi.upsilon_jet(edge).d1 <= slope) {
            if (phi.right_tail() == RightTail::Affine && !phi.has_source()) return std::numeric_limits<double>::infinity();
            if (phi.has_source()) {
                const double x = slope_inverse(phi.upsilon_fn(), slope, edge);
                if (std::isfinite(x)) return x;
                return std::numeric_limits<double>::infinity();
            }
            throw std::domain_error("lambda = " + std::to_string(lambda) +
                                    " exceeds h at the right tail validity bound x = " + std::to_string(edge));
        }
        return slope_inverse(phi.upsilon_fn(), slope, x_last);
    }
    // first sample above the threshold
    std::size_t lo = 0, hi = m - 1;
    if (phi.slope_upsilon(0) > slope) return slope_inverse(phi.upsilon_fn(), slope, phi.x(0));
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (phi.slope_upsilon(mid) <= slope)
            lo = mid;
        else
            hi = mid;
    }
    const double x = slope_inverse(phi.upsilon_fn(), slope, phi.x(lo));
    return x;
}

PLambdaResult p_lambda(const RadialPotential& phi, double lambda) {
    const double xl = contact_boundary(phi, lambda);
    const double slope = 2.0 * (lambda + phi.n());
    const ClassBounds bounds = phi.class_bounds();
    const double radius = support_radius(bounds, phi.n(), lambda);
    if (!std::isfinite(xl)) return {phi, lambda, xl, radius};

    const Jet at = phi.upsilon_jet(xl);
    const double base = at.v;
    const ProfileFn src = phi.upsilon_fn();
    ProfileFn capped = [src, xl, base, slope](double x) {
        if (x <= xl) return src(x);
        return Jet{base + slope * (x - xl), slope, 0.0};
    };
    std::vector<double> kinks;
    for (double k : phi.kinks())
        if (k < xl) kinks.push_back(k);
    kinks.push_back(xl);
    std::vector<double> grid(phi.grid().begin(), phi.grid().end());

    if (phi.has_source() || xl >= grid.back()) {
        auto result = RadialPotential::from_function(phi.model(), capped, std::move(grid), bounds, std::move(kinks),
                                                     RightTail::Affine);
        return {std::move(result), lambda, xl, radius};
    }
    const std::size_t m = grid.size();
    std::vector<double> v(m), d1(m), d2(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (grid[i] <= xl) {
            v[i] = phi.phi_upsilon(i);
            d1[i] = phi.slope_upsilon(i);
            d2[i] = phi.curvature(i);
        } else {
            v[i] = base + slope * (grid[i] - xl);
            d1[i] = slope;
            d2[i] = 0.0;
        }
    }
    auto result = RadialPotential::from_jets(phi.model(), std::move(grid), std::move(v), std::move(d1), std::move(d2),
                                             bounds, RightTail::Affine);
    return {std::move(result), lambda, xl, radius};
}

double support_radius_base(ClassBounds bounds, int n) {
    const double a = bounds.a, b = bounds.b;
    if (!(a > 0.0) || !(b >= a)) throw std::invalid_argument("class bounds must satisfy 0 < a <= b");
    const double t = 0.5 * std::log(2.0 * b / a);
    const double r2 = (2.0 / a) * (2.0 * t * (1.0 + n) + 1.0 / a + b);
    return std::sqrt(r2);
}

double support_radius(ClassBounds bounds, int n, double lambda) {
    return support_radius_base(bounds, n) * std::sqrt(std::max(lambda, 1.0));
}

}  // namespace radsol
