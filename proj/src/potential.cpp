#include "radsol/potential.hpp"

#include "radsol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radsol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double hermite(double t, double h, double f0, double df0, double f1, double df1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * df0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * h * df1;
}

void validate_grid(std::span<const double> grid) {
    if (grid.size() < 8) throw std::invalid_argument("grid needs at least 8 points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || !std::isfinite(grid[i + 1]))
            throw std::invalid_argument("grid contains non-finite values");
        if (grid[i + 1] == grid[i]) throw std::invalid_argument("duplicate grid point");
        if (grid[i + 1] < grid[i]) throw std::invalid_argument("grid must be strictly increasing");
    }
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) throw std::invalid_argument("invalid uniform grid");
    std::vector<double> g(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

std::vector<double> default_grid() { return uniform_grid(-8.0, 4.0, 4097); }

Jet ProfileTerm::eval(Jet y) const {
    switch (kind) {
        case Kind::Softplus: return amplitude * width * softplus((y - center) / width);
        case Kind::Tanh: return amplitude * tanh((y - center) / width);
        case Kind::Kink: return amplitude * relu(y - center);
        case Kind::Exp: return amplitude * exp(2.0 * y);
    }
    return {};
}

Jet PotentialSpec::upsilon(int n, double x) const {
    const Jet y = Jet::variable(x) - 0.5 * shift;
    Jet out = 0.5 * cone * exp(2.0 * y) + (constant + n * shift);
    for (const auto& t : terms) out = out + t.eval(y);
    return out;
}

std::vector<double> PotentialSpec::kinks() const {
    std::vector<double> k;
    for (const auto& t : terms)
        if (t.kind == ProfileTerm::Kind::Kink) k.push_back(t.center + 0.5 * shift);
    std::sort(k.begin(), k.end());
    return k;
}

double PotentialSpec::cone_coefficient() const {
    double a = cone;
    for (const auto& t : terms)
        if (t.kind == ProfileTerm::Kind::Exp) a += 2.0 * t.amplitude;
    return a * std::exp(-shift);
}

FiniteDifferenceJets finite_difference_jets(std::span<const double> x, std::span<const double> f) {
    const std::size_t m = x.size();
    if (m < 3 || f.size() != m) throw std::invalid_argument("finite differences need matching samples");
    FiniteDifferenceJets out;
    out.d1.resize(m);
    out.d2.resize(m);
    auto three_point = [&](std::size_t i, double& d1, double& d2) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        d1 = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
        d2 = 2.0 * (f[i - 1] / (h1 * (h1 + h2)) - f[i] / (h1 * h2) + f[i + 1] / (h2 * (h1 + h2)));
    };
    for (std::size_t i = 1; i + 1 < m; ++i) {
        double d1 = 0, d2 = 0;
        three_point(i, d1, d2);
        if (i >= 2 && i + 2 < m) {
            const double h = x[i + 1] - x[i];
            bool uniform = true;
            for (std::size_t k = i - 2; k < i + 2; ++k)
                if (std::abs((x[k + 1] - x[k]) - h) > 1e-9 * std::abs(h)) uniform = false;
            if (uniform) {
                const double d1h = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
                const double d2h = (-f[i + 2] + 16 * f[i + 1] - 30 * f[i] + 16 * f[i - 1] - f[i - 2]) / (12 * h * h);
                out.max_discrepancy = std::max(out.max_discrepancy, std::abs(d1h - d1) / (1.0 + std::abs(d1h)));
                d1 = d1h;
                d2 = d2h;
            }
        }
        out.d1[i] = d1;
        out.d2[i] = d2;
    }
    auto one_sided = [&](std::size_t a, std::size_t b, std::size_t c, double sign, double& d1, double& d2) {
        const double h1 = std::abs(x[b] - x[a]);
        const double h2 = std::abs(x[c] - x[b]);
        d1 = sign * (-(2 * h1 + h2) / (h1 * (h1 + h2)) * f[a] + (h1 + h2) / (h1 * h2) * f[b] -
                     h1 / (h2 * (h1 + h2)) * f[c]);
        d2 = 2.0 * (f[a] / (h1 * (h1 + h2)) - f[b] / (h1 * h2) + f[c] / (h2 * (h1 + h2)));
    };
    one_sided(0, 1, 2, 1.0, out.d1[0], out.d2[0]);
    one_sided(m - 1, m - 2, m - 3, -1.0, out.d1[m - 1], out.d2[m - 1]);
    return out;
}

bool is_discretely_convex(std::span<const double> x, std::span<const double> v) {
    for (std::size_t k = 0; k + 2 < x.size(); ++k) {
        const double h0 = x[k + 1] - x[k];
        const double h1 = x[k + 2] - x[k + 1];
        const double dd0 = (v[k + 1] - v[k]) / h0;
        const double dd1 = (v[k + 2] - v[k + 1]) / h1;
        // values of the form a + s x round relative to |a| + |s x|, not to the (possibly cancelled) |v|
        const double scale = std::abs(v[k]) + std::abs(v[k + 1]) + std::abs(v[k + 2]) +
                             (std::abs(dd0) + std::abs(dd1)) * (std::abs(x[k]) + std::abs(x[k + 2]));
        const double tol = 64.0 * kEps * scale / std::min(h0, h1);
        if (dd1 - dd0 < -tol) return false;
    }
    return true;
}

void RadialPotential::finalize() {
    validate_grid(grid_);
    const std::size_t m = grid_.size();
    if (values_.size() != m || slopes_.size() != m || curvatures_.size() != m)
        throw std::invalid_argument("sample arrays do not match the grid");
    for (std::size_t i = 0; i < m; ++i)
        if (!std::isfinite(values_[i]) || !std::isfinite(slopes_[i]) || !std::isfinite(curvatures_[i]))
            throw std::invalid_argument("non-finite potential samples");
    if (!is_discretely_convex(grid_, values_)) throw std::invalid_argument("not plurisubharmonic: profile is not convex");
    // left tail: slope of phi_Omega is at least 2 lambda0, i.e. phi_Upsilon is nondecreasing there
    const double dd = (values_[1] - values_[0]) / (grid_[1] - grid_[0]);
    if (dd < -1e-8 * (1.0 + std::abs(values_[0])))
        throw std::invalid_argument("left tail slope below 2 lambda0");
    if (!spec_) {
        if (tail_ == RightTail::Exponential)
            cone_coefficient_ = slopes_.back() * std::exp(-2.0 * grid_.back());
        else
            cone_coefficient_ = 0.0;
    }
}

RadialPotential RadialPotential::from_function(const GeometryModel& model, ProfileFn upsilon, std::vector<double> grid,
                                               ClassBounds bounds, std::vector<double> kinks, RightTail tail) {
    if (!model.is_round()) throw std::invalid_argument("radial potentials require the round Euler field");
    RadialPotential p(model);
    p.grid_ = std::move(grid);
    validate_grid(p.grid_);
    p.source_ = std::move(upsilon);
    p.bounds_ = bounds;
    p.kinks_ = std::move(kinks);
    p.tail_ = tail;
    const std::size_t m = p.grid_.size();
    p.values_.resize(m);
    p.slopes_.resize(m);
    p.curvatures_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Jet j = p.source_(p.grid_[i]);
        p.values_[i] = j.v;
        p.slopes_[i] = j.d1;
        p.curvatures_[i] = j.d2;
    }
    p.finalize();
    return p;
}

RadialPotential RadialPotential::from_spec(const GeometryModel& model, const PotentialSpec& spec, std::vector<double> grid,
                                           ClassBounds bounds) {
    const int n = model.n();
    auto p = from_function(model, [spec, n](double x) { return spec.upsilon(n, x); }, std::move(grid), bounds,
                           spec.kinks());
    p.spec_ = spec;
    p.cone_coefficient_ = spec.cone_coefficient();
    return p;
}

RadialPotential RadialPotential::from_omega_samples(const GeometryModel& model, std::vector<double> grid,
                                                    std::vector<double> omega_values, ClassBounds bounds) {
    if (!model.is_round()) throw std::invalid_argument("radial potentials require the round Euler field");
    validate_grid(grid);
    if (omega_values.size() != grid.size()) throw std::invalid_argument("sample arrays do not match the grid");
    std::vector<double> up(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) up[i] = omega_values[i] + 2.0 * model.n() * grid[i];
    auto fd = finite_difference_jets(grid, up);
    RadialPotential p(model);
    p.grid_ = std::move(grid);
    p.values_ = std::move(up);
    p.slopes_ = std::move(fd.d1);
    p.curvatures_ = std::move(fd.d2);
    p.bounds_ = bounds;
    if (fd.max_discrepancy > 1e-6)
        p.warning_ = "finite-difference slope estimates disagree by " + std::to_string(fd.max_discrepancy) +
                     " (relative); grid too coarse for the derivative tolerance";
    p.finalize();
    return p;
}

RadialPotential RadialPotential::from_jets(const GeometryModel& model, std::vector<double> grid,
                                           std::vector<double> values, std::vector<double> slopes,
                                           std::vector<double> curvatures, ClassBounds bounds, RightTail tail) {
    if (!model.is_round()) throw std::invalid_argument("radial potentials require the round Euler field");
    RadialPotential p(model);
    p.grid_ = std::move(grid);
    p.values_ = std::move(values);
    p.slopes_ = std::move(slopes);
    p.curvatures_ = std::move(curvatures);
    p.bounds_ = bounds;
    p.tail_ = tail;
    p.finalize();
    return p;
}

RadialPotential RadialPotential::with_bounds(ClassBounds b) const {
    RadialPotential p = *this;
    p.bounds_ = b;
    return p;
}

Jet RadialPotential::interpolate(double x) const {
    const std::size_t m = grid_.size();
    const double x0 = grid_.front();
    const double xm = grid_.back();
    if (x < x0) {
        const double s = slopes_.front();
        if (s <= 0.0) return {values_.front() + s * (x - x0), s, 0.0};
        const double e = 0.5 * s * std::exp(2.0 * (x - x0));  // kappa e^{2x}
        return {values_.front() - 0.5 * s + e, 2.0 * e, 4.0 * e};
    }
    if (x > xm) {
        const double s = slopes_.back();
        if (tail_ == RightTail::Affine || s <= 0.0) return {values_.back() + s * (x - xm), s, 0.0};
        const double e = 0.5 * s * std::exp(2.0 * (x - xm));
        return {values_.back() - 0.5 * s + e, 2.0 * e, 4.0 * e};
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
    if (i >= m - 1) i = m - 2;
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    Jet out;
    out.v = hermite(t, h, values_[i], slopes_[i], values_[i + 1], slopes_[i + 1]);
    out.d1 = hermite(t, h, slopes_[i], curvatures_[i], slopes_[i + 1], curvatures_[i + 1]);
    out.d2 = (1.0 - t) * curvatures_[i] + t * curvatures_[i + 1];
    return out;
}

Jet RadialPotential::upsilon_jet(double x) const { return source_ ? source_(x) : interpolate(x); }

Jet RadialPotential::omega_jet(double x) const {
    const Jet j = upsilon_jet(x);
    return {j.v - 2.0 * n() * x, j.d1 - 2.0 * n(), j.d2};
}

ProfileFn RadialPotential::upsilon_fn() const {
    if (source_) return source_;
    return [self = *this](double x) { return self.interpolate(x); };
}

RadialPotential gaussian(const GeometryModel& model, std::vector<double> grid) {
    if (!model.is_reeb() || !model.is_round()) throw std::invalid_argument("Gaussian requires the round Reeb model");
    return RadialPotential::from_spec(model, PotentialSpec::gaussian(), std::move(grid));
}

MomentProfile moment_profile(const RadialPotential& phi) {
    MomentProfile mp;
    mp.grid.assign(phi.grid().begin(), phi.grid().end());
    mp.h_values.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) mp.h_values[i] = phi.h(i);
    mp.lambda0 = lambda_at_fixed_point(phi.model().weights());
    mp.warning = phi.derivative_warning();

    auto feasible = [&](double eps) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            if (mp.grid[i] < 0.0) continue;
            const double y = std::exp(2.0 * mp.grid[i]);
            const double h = mp.h_values[i];
            if (eps * y - 1.0 / eps > h || h > y / eps) return false;
        }
        return true;
    };
    double lo = 0.0, hi = 1.0;
    if (feasible(1.0)) {
        lo = 1.0;
    } else {
        for (int k = 0; k < 80; ++k) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
        }
    }
    mp.epsilon = lo;
    return mp;
}

RadialPotential pullback_flow(const RadialPotential& phi, double s) {
    const int n = phi.n();
    const ClassBounds b = phi.class_bounds();
    ClassBounds nb;
    const double inv = 1.0 / b.a - n * s;
    nb.a = std::min(b.a * std::exp(-s), inv > 0.0 ? 1.0 / inv : std::numeric_limits<double>::infinity());
    nb.b = std::max(b.b * std::exp(-s), b.b + n * s);
    std::vector<double> grid(phi.grid().begin(), phi.grid().end());
    if (phi.spec()) {
        PotentialSpec sp = *phi.spec();
        sp.shift += s;
        return RadialPotential::from_spec(phi.model(), sp, std::move(grid), nb);
    }
    std::vector<double> kinks = phi.kinks();
    for (double& k : kinks) k += 0.5 * s;
    if (phi.has_source()) {
        auto src = phi.upsilon_fn();
        return RadialPotential::from_function(
            phi.model(),
            [src, s, n](double x) {
                Jet j = src(x - 0.5 * s);
                j.v += n * s;
                return j;
            },
            std::move(grid), nb, std::move(kinks));
    }
    std::vector<double> v(grid.size()), d1(grid.size()), d2(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Jet j = phi.upsilon_jet(grid[i] - 0.5 * s);
        v[i] = j.v + n * s;
        d1[i] = j.d1;
        d2[i] = j.d2;
    }
    return RadialPotential::from_jets(phi.model(), std::move(grid), std::move(v), std::move(d1), std::move(d2), nb,
                                      phi.right_tail());
}

ClassCheck check_class(const RadialPotential& phi, double a, double b) {
    ClassCheck out;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double y = std::exp(2.0 * phi.x(i));
        const double v = phi.phi_upsilon(i);
        if (!(a * y - 1.0 / a < v && v < b * y + b)) {
            out.ok = false;
            out.witness = phi.x(i);
            return out;
        }
    }
    return out;
}

RadialPotential add(const RadialPotential& phi, const ProfileFn& u, std::vector<double> u_kinks) {
    std::vector<double> kinks = phi.kinks();
    kinks.insert(kinks.end(), u_kinks.begin(), u_kinks.end());
    std::sort(kinks.begin(), kinks.end());
    std::vector<double> grid(phi.grid().begin(), phi.grid().end());

    // Convexity and positivity are checked before construction so the error names the cause.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Jet a = phi.upsilon_jet(grid[i]);
        const Jet b = u(grid[i]);
        if (a.d2 + b.d2 < -1e-12 * (1.0 + std::abs(a.d2)) || a.d1 + b.d1 < 0.0)
            throw std::invalid_argument("not plurisubharmonic");
    }
    RadialPotential out = [&] {
        try {
            if (phi.has_source()) {
                auto src = phi.upsilon_fn();
                return RadialPotential::from_function(
                    phi.model(), [src, u](double x) { return src(x) + u(x); }, grid, phi.class_bounds(), kinks);
            }
            std::vector<double> v(grid.size()), d1(grid.size()), d2(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const Jet b = u(grid[i]);
                v[i] = phi.phi_upsilon(i) + b.v;
                d1[i] = phi.slope_upsilon(i) + b.d1;
                d2[i] = phi.curvature(i) + b.d2;
            }
            return RadialPotential::from_jets(phi.model(), grid, v, d1, d2, phi.class_bounds(), phi.right_tail());
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("not plurisubharmonic");
        }
    }();
    const auto cc = check_class(out, phi.class_bounds().a, phi.class_bounds().b);
    if (!cc.ok) throw std::invalid_argument("outside growth class at x = " + std::to_string(*cc.witness));
    return out;
}

double slope_inverse(const ProfileFn& f, double slope, double guess, double limit) {
    if (!(slope > 0.0)) return -std::numeric_limits<double>::infinity();
    auto below = [&](double x) { return f(x).d1 <= slope; };
    double lo = 0, hi = 0;
    double step = 0.25;
    if (below(guess)) {
        lo = guess;
        hi = guess + step;
        while (below(hi)) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            if (hi > limit) return std::numeric_limits<double>::infinity();
        }
    } else {
        hi = guess;
        lo = guess - step;
        while (!below(lo)) {
            hi = lo;
            step *= 2.0;
            lo = hi - step;
            if (lo < -limit) return -std::numeric_limits<double>::infinity();
        }
    }
    const double target = std::log(slope);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const Jet j = f(x);
        if (j.d1 <= slope)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 4.0 * kEps * (1.0 + std::abs(lo))) break;
        double next = 0.5 * (lo + hi);
        if (j.d1 > 0.0 && j.d2 > 0.0) {
            const double g = std::log(j.d1) - target;
            const double newton = x - g * j.d1 / j.d2;
            if (newton > lo && newton < hi) {
                next = newton;
                if (std::abs(newton - x) <= 2.0 * kEps * (1.0 + std::abs(x))) return newton;
            }
        }
        x = next;
    }
    return lo;
}

double smoothing_width(int nu, const SmoothingOptions& opt) { return opt.initial_width * std::ldexp(1.0, -nu); }

namespace {

double bump(double y) { return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0; }

double bump_mass() {
    static const double mass = quad::gauss_composite(bump, -1.0, 1.0, 64);
    return mass;
}

}  // namespace

RadialPotential smooth_decreasing_approx(const RadialPotential& rough, int nu, const SmoothingOptions& opt) {
    if (nu < 0) throw std::invalid_argument("smoothing index must be nonnegative");
    const double delta = smoothing_width(nu, opt);
    const double corr = opt.correction * delta;
    const double norm = 1.0 / bump_mass();
    auto src = rough.upsilon_fn();
    std::vector<double> kinks = rough.kinks();

    ProfileFn smooth = [src, kinks, delta, corr, norm](double x) {
        std::vector<double> breaks;
        for (double k : kinks) breaks.push_back((x - k) / delta);
        double v = 0, d1 = 0, d2 = 0;
        quad::for_each_node(-1.0, 1.0, 24, breaks, [&](double y, double w) {
            const double rho = bump(y) * norm;
            if (rho == 0.0) return;
            const Jet j = src(x - delta * y);
            const double drho = rho * (-2.0 * y / ((1.0 - y * y) * (1.0 - y * y)));
            v += w * j.v * rho;
            d1 += w * j.d1 * rho;
            d2 += w * j.d1 * drho / delta;
        });
        const double e = std::exp(2.0 * x);
        return Jet{v + corr * (1.0 + e), d1 + 2.0 * corr * e, d2 + 4.0 * corr * e};
    };
    // the curvature of the result is concentrated in [k - delta, k + delta]; quadratures split there
    std::vector<double> breaks;
    for (double k : kinks)
        for (double c : {k - delta, k, k + delta}) breaks.push_back(c);
    const ClassBounds b = rough.class_bounds();
    return RadialPotential::from_function(rough.model(), std::move(smooth),
                                          std::vector<double>(rough.grid().begin(), rough.grid().end()),
                                          ClassBounds{0.5 * b.a, 2.0 * b.b}, std::move(breaks));
}

}  // namespace radsol
