#include "radsol/functionals.hpp"

#include "radsol/measures.hpp"
#include "radsol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radsol {

namespace {

void require_common_class(const RadialPotential& p0, const RadialPotential& p1) {
    if (p0.n() != p1.n()) throw std::invalid_argument("potentials live in different dimensions");
    const double a = std::min(p0.class_bounds().a, p1.class_bounds().a);
    const double b = std::max(p0.class_bounds().b, p1.class_bounds().b);
    for (const auto* p : {&p0, &p1}) {
        const auto c = check_class(*p, a, b);
        if (!c.ok) throw std::invalid_argument("class mismatch: potential leaves the common class at x = " +
                                               std::to_string(*c.witness));
    }
}

void require_odd(int t_points) {
    if (t_points < 9 || t_points % 2 == 0) throw std::invalid_argument("time quadrature needs an odd node count >= 9");
}

std::vector<double> merged_kinks(const RadialPotential& a, const RadialPotential& b) {
    std::vector<double> k = a.kinks();
    k.insert(k.end(), b.kinks().begin(), b.kinks().end());
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

// Neglected mass beyond the u-truncation, scaled by the integrand there.
double ma_x_tail(int n, double fmax) {
    const double U = 60.0 + 2.0 * n;
    return std::abs(fmax) * std::exp(n - U) * n * std::pow(U, n);
}

struct FIntegrals {
    double mass = 0.0;
    double weighted = 0.0;   // int g e^{-phi} dV
    double edge = 0.0;
};

FIntegrals f_integrals(const ProfileFn& phi, int n, std::span<const double> kinks,
                       const std::function<double(double)>* g) {
    const GeometryModel model(n);
    const double lo = -25.0;
    double hi = 0.0;
    auto integrand = [&](double x) { return std::exp(-phi(x).v) * reference_volume_density(model, x); };
    while (hi < 60.0 && (integrand(hi) > 1e-40 || phi(hi).v < 2.0 * n * hi + 10.0)) hi += 0.5;
    FIntegrals out;
    const int panels = static_cast<int>(24.0 * (hi - lo));
    quad::for_each_node(lo, hi, panels, kinks, [&](double x, double w) {
        const double v = integrand(x);
        out.mass += w * v;
        if (g) out.weighted += w * v * (*g)(x);
    });
    out.edge = integrand(lo) + integrand(hi);
    return out;
}

double richardson(double d1, double d2, double d4) { return (8.0 * d1 - 6.0 * d2 + d4) / 3.0; }

std::size_t row_for(const GeodesicSlab& s, double t) {
    for (std::size_t i = 0; i < s.nt(); ++i)
        if (std::abs(s.t_grid[i] - t) <= 1e-12) return i;
    throw std::invalid_argument("slab time grid lacks t = " + std::to_string(t));
}

}  // namespace

FunctionalValue energy_ex(const RadialPotential& phi1, const RadialPotential& phi0, int t_points) {
    require_common_class(phi0, phi1);
    require_odd(t_points);
    const int n = phi0.n();
    const auto kinks = merged_kinks(phi0, phi1);
    const ProfileFn f0 = phi0.upsilon_fn(), f1 = phi1.upsilon_fn();
    auto diff = [&](double x) { return f1(x).v - f0(x).v; };
    std::vector<double> inner(static_cast<std::size_t>(t_points));
    FunctionalValue out;
    out.t_points = t_points;
    double fmax = 0.0;
    for (int k = 0; k < t_points; ++k) {
        const double t = static_cast<double>(k) / (t_points - 1);
        const ProfileFn slice = [&, t](double x) { return t * f1(x) + (1.0 - t) * f0(x); };
        inner[static_cast<std::size_t>(k)] = integrate_ma_x(slice, n, diff, kinks);
        out.max_integrand = std::max(out.max_integrand, std::abs(inner[static_cast<std::size_t>(k)]));
        const double xu = slope_inverse(slice, 2.0 * (60.0 + 2.0 * n), 0.0);
        if (std::isfinite(xu)) fmax = std::max(fmax, std::abs(diff(xu)));
    }
    out.value = quad::simpson(inner, 1.0 / (t_points - 1));
    out.tail_estimate = ma_x_tail(n, fmax);
    return out;
}

FunctionalValue energy_along_path(const RadialPotential& phi0, const RadialPotential& phi1, const SliceFn& path,
                                  const VelocityFn& velocity, int t_points, std::vector<double> kinks) {
    require_common_class(phi0, phi1);
    require_odd(t_points);
    const int n = phi0.n();
    const ProfileFn start = path(0.0), end = path(1.0);
    for (std::size_t i = 0; i < phi0.size(); i += 16) {
        const double x = phi0.x(i);
        const double a = phi0.phi_upsilon(i), b = phi1.upsilon_jet(x).v;
        if (std::abs(start(x).v - a) > 1e-8 * (1.0 + std::abs(a)))
            throw std::invalid_argument("path does not start at phi0 (x = " + std::to_string(x) + ")");
        if (std::abs(end(x).v - b) > 1e-8 * (1.0 + std::abs(b)))
            throw std::invalid_argument("path does not end at phi1 (x = " + std::to_string(x) + ")");
    }
    const double h = 1e-4;
    for (double t : {0.25, 0.5, 0.75}) {
        const ProfileFn lo = path(t - h), hi = path(t + h);
        const auto v = velocity(t);
        for (double x : {-2.0, 0.0, 1.0}) {
            const double fd = (hi(x).v - lo(x).v) / (2.0 * h);
            if (std::abs(fd - v(x)) > 1e-5 * (1.0 + std::abs(fd)))
                throw std::invalid_argument("inconsistent path derivative at t = " + std::to_string(t));
        }
    }
    std::vector<double> inner(static_cast<std::size_t>(t_points));
    FunctionalValue out;
    out.t_points = t_points;
    for (int k = 0; k < t_points; ++k) {
        const double t = static_cast<double>(k) / (t_points - 1);
        inner[static_cast<std::size_t>(k)] = integrate_ma_x(path(t), n, velocity(t), kinks);
        out.max_integrand = std::max(out.max_integrand, std::abs(inner[static_cast<std::size_t>(k)]));
    }
    out.value = quad::simpson(inner, 1.0 / (t_points - 1));
    return out;
}

FunctionalValue f_functional(const ProfileFn& upsilon, int n, std::span<const double> kinks) {
    const FIntegrals I = f_integrals(upsilon, n, kinks, nullptr);
    if (!(I.mass > 0.0) || !std::isfinite(I.mass)) throw std::domain_error("F integral is not finite and positive");
    FunctionalValue out;
    out.value = -std::log(I.mass);
    out.tail_estimate = I.edge;
    out.max_integrand = I.mass;
    return out;
}

FunctionalValue f_functional(const RadialPotential& phi) {
    return f_functional(phi.upsilon_fn(), phi.n(), phi.kinks());
}

FunctionalValue ding(const RadialPotential& phi1, const RadialPotential& phi0, int t_points) {
    const FunctionalValue e = energy_ex(phi1, phi0, t_points);
    const FunctionalValue f = f_functional(phi1);
    FunctionalValue out = e;
    out.value = e.value / weighted_volume(phi1.model()) - f.value;
    out.tail_estimate = e.tail_estimate + f.tail_estimate;
    return out;
}

EndpointDerivatives endpoint_derivatives(const GeodesicSlab& slab, int t_points) {
    if (!slab.has_t_derivatives()) throw std::invalid_argument("endpoint derivatives need the time-derivative field");
    const int n = slab.n;
    const std::size_t last = slab.nt() - 1;
    const RadialPotential p0 = slab.slice(0), p1 = slab.slice(last);
    const double hs[3] = {1.0 / 64, 1.0 / 32, 1.0 / 16};
    double de[3], de1[3], df[3], df1[3];
    const double F0 = f_functional(p0).value, F1 = f_functional(p1).value;
    for (int k = 0; k < 3; ++k) {
        const RadialPotential a = slab.slice(row_for(slab, hs[k]));
        const RadialPotential b = slab.slice(row_for(slab, 1.0 - hs[k]));
        de[k] = energy_ex(a, p0, t_points).value / hs[k];
        de1[k] = energy_ex(p1, b, t_points).value / hs[k];
        df[k] = (f_functional(a).value - F0) / hs[k];
        df1[k] = (F1 - f_functional(b).value) / hs[k];
    }
    EndpointDerivatives out;
    out.energy_right_at_0 = richardson(de[0], de[1], de[2]);
    out.energy_left_at_1 = richardson(de1[0], de1[1], de1[2]);
    out.f_right_at_0 = richardson(df[0], df[1], df[2]);
    out.f_left_at_1 = richardson(df1[0], df1[1], df1[2]);

    const std::function<double(double)> v0 = [&](double x) { return slab.phi_t_at(0, x); };
    const std::function<double(double)> v1 = [&](double x) { return slab.phi_t_at(last, x); };
    out.energy_ref_at_0 = integrate_ma_x(p0.upsilon_fn(), n, v0);
    out.energy_ref_at_1 = integrate_ma_x(p1.upsilon_fn(), n, v1);
    const FIntegrals i0 = f_integrals(p0.upsilon_fn(), n, {}, &v0);
    const FIntegrals i1 = f_integrals(p1.upsilon_fn(), n, {}, &v1);
    out.f_ref_at_0 = i0.weighted / i0.mass;
    out.f_ref_at_1 = i1.weighted / i1.mass;
    return out;
}

ShrinkerReport shrinker_residual(const RadialPotential& phi) {
    const int n = phi.n();
    std::vector<double> gaps;
    ShrinkerReport rep;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double u = phi.u(i), du = 0.5 * phi.curvature(i);
        if (!(u > 0.0) || !(du > 0.0)) {
            ++rep.excluded;
            continue;
        }
        const double x = phi.x(i);
        const double lhs = -(u - n) + std::log(n) + (n - 1) * std::log(u) + std::log(du);
        const double rhs = -phi.phi_upsilon(i) + std::log(n) + (n - 1) * (2.0 * x - std::log(2.0)) + 2.0 * x;
        gaps.push_back(lhs - rhs);
    }
    rep.used = gaps.size();
    if (gaps.empty()) throw std::domain_error("Monge-Ampere measure vanishes on the whole grid");
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    rep.offset = sorted[sorted.size() / 2];
    for (double g : gaps) rep.residual = std::max(rep.residual, std::abs(g - rep.offset));
    return rep;
}

ConvexityProfile convexity_profile(const GeodesicSlab& slab, Functional which, std::size_t stride, int t_points) {
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < slab.nt(); i += stride) rows.push_back(i);
    if (rows.back() != slab.nt() - 1) rows.push_back(slab.nt() - 1);
    if (rows.size() < 3) throw std::invalid_argument("convexity profile needs at least 3 slices");
    ConvexityProfile out;
    const RadialPotential p0 = slab.slice(0);
    const double vol = weighted_volume(p0.model());
    for (std::size_t i : rows) {
        const RadialPotential p = slab.slice(i);
        double v = 0.0;
        switch (which) {
            case Functional::EnergyX: v = energy_ex(p, p0, t_points).value; break;
            case Functional::F: v = f_functional(p).value; break;
            case Functional::Ding: v = energy_ex(p, p0, t_points).value / vol - f_functional(p).value; break;
        }
        out.t.push_back(slab.t_grid[i]);
        out.values.push_back(v);
    }
    out.min_second_difference = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < out.values.size(); ++k) {
        const double d = out.values[k - 1] - 2.0 * out.values[k] + out.values[k + 1];
        out.second_differences.push_back(d);
        out.min_second_difference = std::min(out.min_second_difference, d);
    }
    return out;
}

}  // namespace radsol
