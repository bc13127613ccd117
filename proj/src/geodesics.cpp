#include "radsol/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace radsol {

namespace {

void validate_grids(const std::vector<double>& t, const std::vector<double>& x) {
    if (t.size() < 3) throw std::invalid_argument("time grid needs at least 3 points");
    if (t.front() != 0.0 || t.back() != 1.0) throw std::invalid_argument("time grid must span [0, 1]");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("time grid must increase");
    if (x.size() < 8) throw std::invalid_argument("space grid needs at least 8 points");
    for (std::size_t j = 1; j < x.size(); ++j)
        if (!(x[j] > x[j - 1])) throw std::invalid_argument("space grid must increase");
}

ClassBounds common_class(const RadialPotential& p0, const RadialPotential& p1) {
    if (p0.n() != p1.n()) throw std::invalid_argument("endpoints live in different dimensions");
    const ClassBounds b{std::min(p0.class_bounds().a, p1.class_bounds().a),
                        std::max(p0.class_bounds().b, p1.class_bounds().b)};
    for (const auto* p : {&p0, &p1}) {
        const auto c = check_class(*p, b.a, b.b);
        if (!c.ok)
            throw std::invalid_argument("endpoint outside the common growth class at x = " + std::to_string(*c.witness));
    }
    return b;
}

GeodesicSlab empty_slab(int n, SlabKind kind, std::vector<double> t, std::vector<double> x, ClassBounds b) {
    GeodesicSlab s;
    s.n = n;
    s.kind = kind;
    s.t_grid = std::move(t);
    s.x_grid = std::move(x);
    s.bounds = b;
    const std::size_t total = s.nt() * s.nx();
    s.values.resize(total);
    s.phi_x.resize(total);
    s.phi_xx.resize(total);
    s.phi_t.resize(total);
    s.phi_tx.resize(total);
    return s;
}

// Newton on log phi'(X) = log v from a nearby guess; falls back to the bracketed solver.
double invert_near(const ProfileFn& f, double v, double guess) {
    const double target = std::log(v);
    double x = guess;
    for (int it = 0; it < 30; ++it) {
        const Jet j = f(x);
        if (!(j.d1 > 0.0) || !(j.d2 > 0.0)) break;
        const double step = -(std::log(j.d1) - target) * j.d1 / j.d2;
        if (!std::isfinite(step) || std::abs(step) > 2.0) break;
        x += step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) return x;
    }
    return slope_inverse(f, v, guess);
}

struct LegendrePoint {
    double value, slope, curvature, dt, dtx;
};

// Phi(t, x) for the Legendre interpolation of the duals, solved in w = log v.
LegendrePoint legendre_point(const ProfileFn& f0, const ProfileFn& f1, double t, double x, double& x0, double& x1,
                             double& w) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    Jet j0{}, j1{};
    for (int it = 0; it < 100; ++it) {
        const double v = std::exp(w);
        x0 = invert_near(f0, v, x0);
        x1 = invert_near(f1, v, x1);
        j0 = f0(x0);
        j1 = f1(x1);
        const double F = (1.0 - t) * x0 + t * x1 - x;
        if (F > 0.0)
            hi = std::min(hi, w);
        else
            lo = std::max(lo, w);
        if (std::abs(F) <= 1e-14 * (1.0 + std::abs(x))) break;
        const double dF = v * ((1.0 - t) / j0.d2 + t / j1.d2);
        double next = w - F / dF;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            if (std::isfinite(lo) && std::isfinite(hi))
                next = 0.5 * (lo + hi);
            else
                next = w + (F > 0.0 ? -1.0 : 1.0);
        }
        const bool done = std::abs(next - w) <= 1e-15;
        w = next;
        if (done) break;
    }
    const double v = std::exp(w);
    x0 = invert_near(f0, v, x0);
    x1 = invert_near(f1, v, x1);
    j0 = f0(x0);
    j1 = f1(x1);
    const double F = (1.0 - t) * x0 + t * x1 - x;
    const double curv = 1.0 / ((1.0 - t) / j0.d2 + t / j1.d2);
    LegendrePoint p;
    p.value = (1.0 - t) * j0.v + t * j1.v - v * F;
    p.slope = v;
    p.curvature = curv;
    p.dt = v * (x0 - x1) - j0.v + j1.v;
    p.dtx = (x0 - x1) * curv;
    return p;
}

double smoothstep(double z) {
    z = std::clamp(z, 0.0, 1.0);
    return z * z * (3.0 - 2.0 * z);
}
double smoothstep_d1(double z) { return (z <= 0.0 || z >= 1.0) ? 0.0 : 6.0 * z * (1.0 - z); }
double smoothstep_d2(double z) { return (z <= 0.0 || z >= 1.0) ? 0.0 : 6.0 - 12.0 * z; }

struct Hessian {
    double tt, tx, xx;
};

double first_diff(double fm, double fp, double dm, double dp) { return (fp - fm) / (dm + dp); }

Hessian slab_hessian(const GeodesicSlab& s, std::size_t i, std::size_t j, bool fields) {
    const double dtm = s.t_grid[i] - s.t_grid[i - 1], dtp = s.t_grid[i + 1] - s.t_grid[i];
    const double dxm = s.x_grid[j] - s.x_grid[j - 1], dxp = s.x_grid[j + 1] - s.x_grid[j];
    Hessian h{};
    if (fields) {
        h.tt = first_diff(s.phi_t[s.index(i - 1, j)], s.phi_t[s.index(i + 1, j)], dtm, dtp);
        h.xx = first_diff(s.phi_x[s.index(i, j - 1)], s.phi_x[s.index(i, j + 1)], dxm, dxp);
        h.tx = first_diff(s.phi_t[s.index(i, j - 1)], s.phi_t[s.index(i, j + 1)], dxm, dxp);
        return h;
    }
    auto v = [&](std::size_t a, std::size_t b) { return s.values[s.index(a, b)]; };
    const double c = v(i, j);
    h.tt = 2.0 * ((v(i + 1, j) - c) / dtp - (c - v(i - 1, j)) / dtm) / (dtm + dtp);
    h.xx = 2.0 * ((v(i, j + 1) - c) / dxp - (c - v(i, j - 1)) / dxm) / (dxm + dxp);
    h.tx = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1)) / ((dtm + dtp) * (dxm + dxp));
    return h;
}

struct Normalized {
    bool convex_trace;
    double det, lmin;
};

Normalized normalize(const Hessian& h) {
    const double tr = h.tt + h.xx;
    if (!(tr > 0.0)) return {false, -1.0, -1.0};
    const double a = h.tt / tr, c = h.xx / tr, b = h.tx / tr;
    const double det = a * c - b * b;
    const double lmax = 0.5 * (1.0 + std::sqrt((a - c) * (a - c) + 4.0 * b * b));
    return {true, det, det / lmax};
}

}  // namespace

std::string to_string(SlabKind k) {
    switch (k) {
        case SlabKind::Geodesic: return "geodesic";
        case SlabKind::Translation: return "translation";
        case SlabKind::AffineLine: return "affine-line";
        case SlabKind::Barrier: return "barrier";
        case SlabKind::Sampled: return "sampled";
    }
    return "sampled";
}

std::vector<double> default_t_grid() { return uniform_grid(0.0, 1.0, 65); }
std::vector<double> default_x_grid() { return uniform_grid(-8.0, 4.0, 2049); }

RadialPotential GeodesicSlab::slice(std::size_t i) const {
    if (i >= nt()) throw std::out_of_range("time slice index");
    const GeometryModel model(n);
    const auto b = values.begin() + static_cast<std::ptrdiff_t>(index(i, 0));
    std::vector<double> v(b, b + static_cast<std::ptrdiff_t>(nx()));
    if (has_x_derivatives()) {
        const auto bx = phi_x.begin() + static_cast<std::ptrdiff_t>(index(i, 0));
        const auto bxx = phi_xx.begin() + static_cast<std::ptrdiff_t>(index(i, 0));
        return RadialPotential::from_jets(model, x_grid, std::move(v),
                                          std::vector<double>(bx, bx + static_cast<std::ptrdiff_t>(nx())),
                                          std::vector<double>(bxx, bxx + static_cast<std::ptrdiff_t>(nx())), bounds);
    }
    for (std::size_t j = 0; j < nx(); ++j) v[j] -= 2.0 * n * x_grid[j];
    return RadialPotential::from_omega_samples(model, x_grid, std::move(v), bounds);
}

double GeodesicSlab::phi_t_at(std::size_t i, double x) const {
    if (!has_t_derivatives()) throw std::logic_error("slab carries no time-derivative field");
    const std::size_t m = nx();
    if (x <= x_grid.front()) return phi_t[index(i, 0)];
    if (x >= x_grid.back()) return phi_t[index(i, m - 1)];
    const auto it = std::upper_bound(x_grid.begin(), x_grid.end(), x);
    std::size_t k = static_cast<std::size_t>(it - x_grid.begin());
    // four-point Lagrange stencil around the cell [k-1, k]
    std::size_t s = (k >= 2) ? k - 2 : 0;
    if (s + 4 > m) s = m - 4;
    double sum = 0.0;
    for (std::size_t a = s; a < s + 4; ++a) {
        double w = 1.0;
        for (std::size_t b = s; b < s + 4; ++b)
            if (b != a) w *= (x - x_grid[b]) / (x_grid[a] - x_grid[b]);
        sum += w * phi_t[index(i, a)];
    }
    return sum;
}

DualProfile legendre_dual(const RadialPotential& phi, std::span<const double> slopes) {
    const std::size_t m = phi.size();
    const double lo = phi.slope_omega(0), hi = phi.slope_omega(m - 1);
    DualProfile out;
    std::size_t j = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (double p : slopes) {
        if (!(p > lo && p < hi))
            throw std::domain_error("slope " + std::to_string(p) + " outside the grid slope range");
        if (!(p > prev)) throw std::invalid_argument("slopes must increase");
        prev = p;
        auto obj = [&](std::size_t k) { return p * phi.x(k) - phi.phi_omega(k); };
        while (j + 1 < m && obj(j + 1) >= obj(j)) ++j;
        out.slopes.push_back(p);
        out.values.push_back(obj(j));
    }
    return out;
}

double lipschitz_certificate(const GeodesicSlab& s) {
    if (!s.has_t_derivatives()) {
        double L = 0.0;
        const std::size_t last = s.nt() - 1;
        for (std::size_t j = 0; j < s.nx(); ++j) {
            const double w = 1.0 + std::exp(2.0 * s.x_grid[j]);
            const double d0 = (s.values[s.index(1, j)] - s.values[s.index(0, j)]) / s.t_grid[1];
            const double d1 = (s.values[s.index(last, j)] - s.values[s.index(last - 1, j)]) /
                              (s.t_grid[last] - s.t_grid[last - 1]);
            L = std::max({L, std::abs(d0) / w, std::abs(d1) / w});
        }
        return L;
    }
    double L = 0.0;
    for (std::size_t j = 0; j < s.nx(); ++j) {
        const double w = 1.0 + std::exp(2.0 * s.x_grid[j]);
        L = std::max({L, std::abs(s.phi_t[s.index(0, j)]) / w, std::abs(s.phi_t[s.index(s.nt() - 1, j)]) / w});
    }
    return L;
}

GeodesicSlab geodesic(const RadialPotential& phi0, const RadialPotential& phi1, std::vector<double> t_grid,
                      std::vector<double> x_grid) {
    validate_grids(t_grid, x_grid);
    const ClassBounds b = common_class(phi0, phi1);
    GeodesicSlab s = empty_slab(phi0.n(), SlabKind::Geodesic, std::move(t_grid), std::move(x_grid), b);
    const ProfileFn f0 = phi0.upsilon_fn(), f1 = phi1.upsilon_fn();
    for (std::size_t i = 0; i < s.nt(); ++i) {
        const double t = s.t_grid[i];
        double x0 = s.x_grid[0], x1 = s.x_grid[0];
        double w = std::log((1.0 - t) * f0(x0).d1 + t * f1(x1).d1);
        for (std::size_t j = 0; j < s.nx(); ++j) {
            const LegendrePoint p = legendre_point(f0, f1, t, s.x_grid[j], x0, x1, w);
            const std::size_t k = s.index(i, j);
            s.values[k] = p.value;
            s.phi_x[k] = p.slope;
            s.phi_xx[k] = p.curvature;
            s.phi_t[k] = p.dt;
            s.phi_tx[k] = p.dtx;
        }
    }
    s.lipschitz = lipschitz_certificate(s);
    return s;
}

GeodesicSlab translation_geodesic(const RadialPotential& phi, double c, std::vector<double> t_grid,
                                  std::vector<double> x_grid) {
    validate_grids(t_grid, x_grid);
    const int n = phi.n();
    const ClassBounds b = pullback_flow(phi, c).class_bounds();
    const ClassBounds common{std::min(b.a, phi.class_bounds().a), std::max(b.b, phi.class_bounds().b)};
    GeodesicSlab s = empty_slab(n, SlabKind::Translation, std::move(t_grid), std::move(x_grid), common);
    for (std::size_t i = 0; i < s.nt(); ++i) {
        const double t = s.t_grid[i];
        for (std::size_t j = 0; j < s.nx(); ++j) {
            const Jet p = phi.upsilon_jet(s.x_grid[j] - 0.5 * t * c);
            const std::size_t k = s.index(i, j);
            s.values[k] = p.v + n * t * c;
            s.phi_x[k] = p.d1;
            s.phi_xx[k] = p.d2;
            s.phi_t[k] = -0.5 * c * p.d1 + n * c;
            s.phi_tx[k] = -0.5 * c * p.d2;
        }
    }
    s.lipschitz = lipschitz_certificate(s);
    return s;
}

GeodesicSlab affine_line(const RadialPotential& phi0, const RadialPotential& phi1, std::vector<double> t_grid,
                         std::vector<double> x_grid) {
    validate_grids(t_grid, x_grid);
    const ClassBounds b = common_class(phi0, phi1);
    GeodesicSlab s = empty_slab(phi0.n(), SlabKind::AffineLine, std::move(t_grid), std::move(x_grid), b);
    for (std::size_t j = 0; j < s.nx(); ++j) {
        const Jet a = phi0.upsilon_jet(s.x_grid[j]);
        const Jet c = phi1.upsilon_jet(s.x_grid[j]);
        for (std::size_t i = 0; i < s.nt(); ++i) {
            const double t = s.t_grid[i];
            const std::size_t k = s.index(i, j);
            s.values[k] = (1.0 - t) * a.v + t * c.v;
            s.phi_x[k] = (1.0 - t) * a.d1 + t * c.d1;
            s.phi_xx[k] = (1.0 - t) * a.d2 + t * c.d2;
            s.phi_t[k] = c.v - a.v;
            s.phi_tx[k] = c.d1 - a.d1;
        }
    }
    s.lipschitz = lipschitz_certificate(s);
    return s;
}

GeodesicSlab barrier_with(const RadialPotential& phi0, const RadialPotential& phi1, const BarrierParams& prm,
                          std::vector<double> t_grid, std::vector<double> x_grid) {
    validate_grids(t_grid, x_grid);
    const ClassBounds b = common_class(phi0, phi1);
    GeodesicSlab s = empty_slab(phi0.n(), SlabKind::Barrier, std::move(t_grid), std::move(x_grid), b);
    const double A0 = std::exp(prm.psi0), A1 = std::exp(prm.psi1);
    for (std::size_t j = 0; j < s.nx(); ++j) {
        const double x = s.x_grid[j];
        const Jet j0 = phi0.upsilon_jet(x), j1 = phi1.upsilon_jet(x);
        const Jet r = exp(Jet::variable(x));
        const Jet y = 0.5 * exp(2.0 * Jet::variable(x));
        const double z = r.v - 1.0;
        const Jet g = chain(r, smoothstep(z), smoothstep_d1(z), smoothstep_d2(z));
        const Jet G = g * y;
        // roll-off 1 - smoothstep((r - R)/L)
        const double zr = (r.v - prm.R) / prm.L;
        const Jet sigma =
            chain(r, 1.0 - smoothstep(zr), -smoothstep_d1(zr) / prm.L, -smoothstep_d2(zr) / (prm.L * prm.L));
        const Jet Q = y * sigma;
        for (std::size_t i = 0; i < s.nt(); ++i) {
            const double t = s.t_grid[i];
            const double e = std::exp(-prm.A * t * (1.0 - t));
            const double a = (1.0 - t) * A0 + t * A1;
            const double m = a * (e - 1.0);
            const double mt = (A1 - A0) * (e - 1.0) - a * e * prm.A * (1.0 - 2.0 * t);
            const Jet val = (1.0 - t) * j0 + t * j1 + m * G + 2.0 * prm.B * t * (t - 1.0) + prm.D * t * (1.0 - t) * Q;
            const Jet dt = (j1 - j0) + mt * G + 2.0 * prm.B * (2.0 * t - 1.0) + prm.D * (1.0 - 2.0 * t) * Q;
            const std::size_t k = s.index(i, j);
            s.values[k] = val.v;
            s.phi_x[k] = val.d1;
            s.phi_xx[k] = val.d2;
            s.phi_t[k] = dt.v;
            s.phi_tx[k] = dt.d1;
        }
    }
    s.barrier = prm;
    s.lipschitz = lipschitz_certificate(s);
    return s;
}

GeodesicSlab barrier(const RadialPotential& phi0, const RadialPotential& phi1, std::vector<double> t_grid,
                     std::vector<double> x_grid) {
    const double A0 = phi0.cone_coefficient(), A1 = phi1.cone_coefficient();
    if (!(A0 > 0.0) || !(A1 > 0.0)) throw std::invalid_argument("barrier needs endpoints with a positive cone tail");
    BarrierParams prm;
    prm.psi0 = std::log(A0);
    prm.psi1 = std::log(A1);
    double sup_psi_dd = 0.0;
    for (double t : t_grid) {
        const double a = (1.0 - t) * A0 + t * A1;
        sup_psi_dd = std::max(sup_psi_dd, (A1 - A0) * (A1 - A0) / (a * a));
    }
    prm.A = 0.5 * sup_psi_dd + 1.0;
    constexpr double kTol = 1e-10;
    for (int attempt = 1; attempt <= 80; ++attempt) {
        prm.attempts = attempt;
        GeodesicSlab s = barrier_with(phi0, phi1, prm, t_grid, x_grid);
        bool changed = false;
        // spatial convexity and positive slope on every slice
        for (std::size_t i = 0; i < s.nt() && !changed; ++i) {
            for (std::size_t j = 0; j < s.nx(); ++j) {
                const std::size_t k = s.index(i, j);
                if (s.phi_xx[k] < -kTol * (1.0 + std::abs(s.phi_x[k])) || !(s.phi_x[k] > 0.0)) {
                    const double r = std::exp(s.x_grid[j]);
                    if (r >= prm.R && r <= prm.R + prm.L)
                        prm.L *= 2.0;
                    else
                        prm.D *= 2.0;
                    changed = true;
                    break;
                }
            }
        }
        if (changed) continue;
        for (std::size_t i = 1; i + 1 < s.nt() && !changed; ++i) {
            for (std::size_t j = 1; j + 1 < s.nx(); ++j) {
                const Normalized h = normalize(slab_hessian(s, i, j, true));
                if (!h.convex_trace || h.lmin < -kTol) {
                    const double r = std::exp(s.x_grid[j]);
                    if (r > prm.R + prm.L)
                        prm.A *= 1.5;
                    else
                        prm.B *= 2.0;
                    changed = true;
                    break;
                }
            }
        }
        if (!changed) return s;
    }
    throw std::runtime_error("barrier parameter search did not certify a subgeodesic");
}

HmaReport hma_residual(const GeodesicSlab& s) {
    if (s.nt() < 7) throw std::invalid_argument("hma residual needs at least 5 interior time points");
    if (s.values.size() != s.nt() * s.nx()) throw std::invalid_argument("slab value array has the wrong size");
    HmaReport rep;
    rep.from_derivative_fields = s.has_t_derivatives() && !s.phi_x.empty();
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.max_det = -std::numeric_limits<double>::infinity();
    rep.min_det = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < s.nt(); ++i) {
        for (std::size_t j = 1; j + 1 < s.nx(); ++j) {
            const Normalized h = normalize(slab_hessian(s, i, j, rep.from_derivative_fields));
            const double res = h.convex_trace ? std::max(std::abs(h.det), std::max(0.0, -h.lmin)) : 1.0;
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, h.lmin);
            rep.max_det = std::max(rep.max_det, h.det);
            rep.min_det = std::min(rep.min_det, h.det);
            if (res > rep.residual) {
                rep.residual = res;
                rep.worst_t = s.t_grid[i];
                rep.worst_x = s.x_grid[j];
            }
        }
    }
    return rep;
}

SandwichReport sandwich_check(const GeodesicSlab& g, const GeodesicSlab& b, double tol) {
    if (g.t_grid != b.t_grid || g.x_grid != b.x_grid) throw std::invalid_argument("slabs live on different grids");
    const std::size_t last = g.nt() - 1;
    for (std::size_t j = 0; j < g.nx(); ++j) {
        for (std::size_t i : {std::size_t{0}, last}) {
            const double a = g.upsilon(i, j), c = b.upsilon(i, j);
            if (std::abs(a - c) > 1e-8 * (1.0 + std::abs(a)))
                throw std::invalid_argument("slabs have different boundary values at x = " +
                                            std::to_string(g.x_grid[j]));
        }
    }
    SandwichReport rep;
    for (std::size_t i = 0; i < g.nt(); ++i) {
        const double t = g.t_grid[i];
        for (std::size_t j = 0; j < g.nx(); ++j) {
            const double phi = g.upsilon(i, j);
            const double chord = (1.0 - t) * g.upsilon(0, j) + t * g.upsilon(last, j);
            const double lower = b.upsilon(i, j) - phi;
            const double upper = phi - chord;
            rep.max_gap_to_chord = std::max(rep.max_gap_to_chord, -upper);
            const double worst = std::max(lower, upper);
            if (lower > tol) rep.lower_ok = false;
            if (upper > tol) rep.upper_ok = false;
            if (worst > rep.worst_violation) {
                rep.worst_violation = worst;
                rep.worst_t = t;
                rep.worst_x = g.x_grid[j];
            }
        }
    }
    rep.ok = rep.lower_ok && rep.upper_ok;
    return rep;
}

GeodesicSlab pointwise_max(const GeodesicSlab& a, const GeodesicSlab& b) {
    if (a.t_grid != b.t_grid || a.x_grid != b.x_grid) throw std::invalid_argument("slabs live on different grids");
    GeodesicSlab out;
    out.n = a.n;
    out.kind = SlabKind::Sampled;
    out.t_grid = a.t_grid;
    out.x_grid = a.x_grid;
    out.bounds = a.bounds;
    out.values.resize(a.values.size());
    for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = std::max(a.values[k], b.values[k]);
    out.lipschitz = lipschitz_certificate(out);
    return out;
}

}  // namespace radsol
