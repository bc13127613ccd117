#include "radsol/measures.hpp"

#include "radsol/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace radsol {

namespace {

using Gauss10 = boost::math::quadrature::gauss<double, 10>;

double ipow(double base, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= base;
    return r;
}

// n u^{n-1} u' for the MA density on the x-axis.
double ma_density(int n, double u, double du) { return n * ipow(u, n - 1) * du; }

// int_{x_lo}^{x_hi} e^{2kx} e^{-h} n u^{n-1} u' dx for a jet source, split at kinks.
double cell_integral(const RadialPotential& phi, double lo, double hi, int k, std::span<const double> kinks) {
    const int n = phi.n();
    auto f = [&](double x) {
        const Jet j = phi.upsilon_jet(x);
        const double u = 0.5 * j.d1;
        const double du = 0.5 * j.d2;
        return std::exp(2.0 * k * x + n - u) * ma_density(n, u, du);
    };
    double sum = 0.0;
    double a = lo;
    for (double c : kinks) {
        if (c > a && c < hi) {
            sum += Gauss10::integrate(f, a, c);
            a = c;
        }
    }
    return sum + Gauss10::integrate(f, a, hi);
}

// e^n n e^{2k x0} u0^{-k} gamma_lower(n+k, u0): mass left of x0 under the exponential tail model.
double left_tail(int n, int k, double x0, double u0) {
    if (u0 <= 0.0) return 0.0;
    const double lower = boost::math::tgamma_lower(static_cast<double>(n + k), u0);
    return std::exp(n + 2.0 * k * x0 - k * std::log(u0)) * n * lower;
}

// Mass right of x1 under the exponential tail model.
double right_tail(int n, int k, double x1, double u1) {
    const double upper = boost::math::tgamma(static_cast<double>(n + k), u1);
    if (upper == 0.0) return 0.0;
    return std::exp(n + 2.0 * k * x1 - k * std::log(u1)) * n * upper;
}

bool right_tail_carries_mass(const RadialPotential& phi) {
    return phi.has_source() || phi.right_tail() == RightTail::Exponential;
}

void check_plain(const RadialPotential& phi) {
    if (!phi.model().is_reeb()) throw std::invalid_argument("measure requires positive weights");
}

}  // namespace

double StepFunction::operator()(double lambda) const {
    if (lambda < lambda0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < thresholds.size(); ++k)
        if (lambda <= thresholds[k]) s += coefficients[k];
    return s;
}

double StepFunction::sup_gap_to_exp() const {
    // e^{-lambda} - g is largest just right of each threshold and at the start.
    double gap = std::abs(std::exp(-lambda0) - (*this)(lambda0));
    for (double t : thresholds) {
        const double right = std::nextafter(t, std::numeric_limits<double>::infinity());
        gap = std::max(gap, std::abs(std::exp(-t) - (*this)(right)));
        gap = std::max(gap, std::abs(std::exp(-t) - (*this)(t)));
    }
    return gap;
}

StepFunction StepFunction::lower_staircase(double lambda0, int k, double span) {
    if (k < 1) throw std::invalid_argument("staircase needs at least one step");
    StepFunction g;
    g.lambda0 = lambda0;
    const double d = span / k;
    for (int j = 1; j <= k; ++j) g.thresholds.push_back(lambda0 + j * d);
    for (int j = 0; j < k; ++j) {
        const double next = (j + 1 < k) ? std::exp(-g.thresholds[j + 1]) : 0.0;
        g.coefficients.push_back(std::exp(-g.thresholds[j]) - next);
    }
    return g;
}

CumulativeMeasure ma_cumulative(const RadialPotential& phi) {
    check_plain(phi);
    const int n = phi.n();
    const std::size_t m = phi.size();
    CumulativeMeasure out;
    out.axis = MeasureAxis::X;
    out.knots.assign(phi.grid().begin(), phi.grid().end());
    out.cumulative.resize(m);
    out.density.resize(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double u = phi.u(i);
        if (u < 0.0) {
            if (u < -1e-12 * (1.0 + std::abs(phi.slope_upsilon(i))))
                throw std::domain_error("negative moment coordinate at x = " + std::to_string(phi.x(i)));
            u = 0.0;
        }
        double N = ipow(u, n);
        if (N < running) {
            const double gap = running - N;
            out.max_clamp = std::max(out.max_clamp, gap);
            if (gap > 1e-8 * std::max(1.0, running))
                throw std::domain_error("cumulative MA decreases at x = " + std::to_string(phi.x(i)));
            N = running;
        }
        running = N;
        out.cumulative[i] = N;
        out.density[i] = ma_density(n, u, 0.5 * std::max(phi.curvature(i), 0.0));
    }
    out.total_mass = std::numeric_limits<double>::infinity();
    return out;
}

PLambdaMeasure ma_plambda(const RadialPotential& phi, double lambda) {
    check_plain(phi);
    const int n = phi.n();
    const double xl = contact_boundary(phi, lambda);
    const double ustar = lambda + n;
    double total = ipow(ustar, n);
    if (!std::isfinite(xl)) {
        const double tail_slope = phi.upsilon_jet(phi.x(phi.size() - 1) + kRightTailValidity).d1;
        total = ipow(std::min(0.5 * tail_slope, ustar), n);
    }
    CumulativeMeasure base = ma_cumulative(phi);
    for (std::size_t i = 0; i < base.knots.size(); ++i) {
        if (base.knots[i] > xl) {
            base.cumulative[i] = total;
            base.density[i] = 0.0;
        } else {
            base.cumulative[i] = std::min(base.cumulative[i], total);
        }
    }
    base.total_mass = total;
    return {std::move(base), lambda, xl, total};
}

std::vector<double> default_lambda_grid(int n) {
    const double l0 = -static_cast<double>(n);
    return uniform_grid(l0 + 1e-3, l0 + 20.0, 400);
}

namespace {

CumulativeMeasure lambda_measure(std::span<const double> lambdas, std::vector<double> cum) {
    CumulativeMeasure out;
    out.axis = MeasureAxis::Lambda;
    out.knots.assign(lambdas.begin(), lambdas.end());
    out.cumulative = std::move(cum);
    out.density.resize(out.knots.size());
    const std::size_t m = out.knots.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (m < 2) break;
        const std::size_t a = (i == 0) ? 0 : i - 1;
        const std::size_t b = (i + 1 == m) ? m - 1 : i + 1;
        out.density[i] = (out.cumulative[b] - out.cumulative[a]) / (out.knots[b] - out.knots[a]);
    }
    out.total_mass = out.cumulative.empty() ? 0.0 : out.cumulative.back();
    return out;
}

void check_lambdas(std::span<const double> lambdas, double l0) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > l0)) throw std::invalid_argument("lambda grid must lie above lambda0");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("lambda grid must increase");
    }
}

}  // namespace

CumulativeMeasure dh_measure(const RadialPotential& phi, std::span<const double> lambdas) {
    check_lambdas(lambdas, phi.lambda0());
    std::vector<double> cum;
    cum.reserve(lambdas.size());
    for (double l : lambdas) cum.push_back(ma_plambda(phi, l).total_mass);
    return lambda_measure(lambdas, std::move(cum));
}

CumulativeMeasure dh_measure_pushforward(const RadialPotential& phi, std::span<const double> lambdas) {
    check_plain(phi);
    check_lambdas(lambdas, phi.lambda0());
    const int n = phi.n();
    const std::size_t m = phi.size();
    std::vector<double> h(m), dh(m), N(m), dN(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = std::max(phi.u(i), 0.0);
        h[i] = u - n;
        dh[i] = 0.5 * phi.curvature(i);
        N[i] = ipow(u, n);
        dN[i] = ma_density(n, u, dh[i]);
    }
    auto hermite = [](double y0, double y1, double m0, double m1, double dx, double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * dx * m0 + (-2 * s3 + 3 * s2) * y1 +
               (s3 - s2) * dx * m1;
    };
    std::vector<double> cum;
    cum.reserve(lambdas.size());
    for (double l : lambdas) {
        const double u = l + n;
        if (l < h[0]) {
            cum.push_back(N[0] * ipow(u / (h[0] + n), n));
            continue;
        }
        if (l >= h[m - 1]) {
            if (right_tail_carries_mass(phi))
                cum.push_back(N[m - 1] * ipow(u / (h[m - 1] + n), n));
            else
                cum.push_back(N[m - 1]);
            continue;
        }
        const auto it = std::upper_bound(h.begin(), h.end(), l);
        const std::size_t i = static_cast<std::size_t>(it - h.begin()) - 1;
        const double dx = phi.x(i + 1) - phi.x(i);
        double lo = 0.0, hi = 1.0;
        for (int it2 = 0; it2 < 80; ++it2) {
            const double s = 0.5 * (lo + hi);
            if (hermite(h[i], h[i + 1], dh[i], dh[i + 1], dx, s) <= l)
                lo = s;
            else
                hi = s;
        }
        cum.push_back(hermite(N[i], N[i + 1], dN[i], dN[i + 1], dx, lo));
    }
    return lambda_measure(lambdas, std::move(cum));
}

CumulativeMeasure ma_weighted(const RadialPotential& phi, const StepFunction& g) {
    if (g.thresholds.size() != g.coefficients.size()) throw std::invalid_argument("step function size mismatch");
    for (double c : g.coefficients)
        if (c < 0.0) throw std::invalid_argument("step function coefficients must be non-negative");
    for (double t : g.thresholds)
        if (!(t > phi.lambda0())) throw std::invalid_argument("step thresholds must exceed lambda0");
    CumulativeMeasure out = ma_cumulative(phi);
    std::fill(out.cumulative.begin(), out.cumulative.end(), 0.0);
    std::fill(out.density.begin(), out.density.end(), 0.0);
    const CumulativeMeasure full = ma_cumulative(phi);
    double total = 0.0;
    for (std::size_t k = 0; k < g.thresholds.size(); ++k) {
        const PLambdaMeasure pm = ma_plambda(phi, g.thresholds[k]);
        const double a = g.coefficients[k];
        for (std::size_t i = 0; i < out.knots.size(); ++i) {
            out.cumulative[i] += a * pm.measure.cumulative[i];
            if (out.knots[i] < pm.contact_boundary) out.density[i] += a * full.density[i];
        }
        total += a * pm.total_mass;
    }
    out.total_mass = total;
    return out;
}

CumulativeMeasure ma_x(const RadialPotential& phi) {
    check_plain(phi);
    const int n = phi.n();
    const std::size_t m = phi.size();
    CumulativeMeasure out;
    out.axis = MeasureAxis::X;
    out.knots.assign(phi.grid().begin(), phi.grid().end());
    out.cumulative.resize(m);
    out.density.resize(m);
    double acc = left_tail(n, 0, phi.x(0), std::max(phi.u(0), 0.0));
    const auto& kinks = phi.kinks();
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) acc += cell_integral(phi, phi.x(i - 1), phi.x(i), 0, kinks);
        out.cumulative[i] = acc;
        const double u = std::max(phi.u(i), 0.0);
        out.density[i] = std::exp(n - u) * ma_density(n, u, 0.5 * std::max(phi.curvature(i), 0.0));
    }
    if (right_tail_carries_mass(phi)) acc += right_tail(n, 0, phi.x(m - 1), phi.u(m - 1));
    out.total_mass = acc;
    return out;
}

double tail_mass(const RadialPotential& phi, double R, int k) {
    check_plain(phi);
    if (!(R >= 1.0)) throw std::invalid_argument("tail_mass requires R >= 1");
    if (k < 0) throw std::invalid_argument("tail_mass requires k >= 0");
    const int n = phi.n();
    const std::size_t m = phi.size();
    const double xr = std::log(R);
    const double xm = phi.x(m - 1);
    if (xr >= xm) {
        if (!right_tail_carries_mass(phi)) return 0.0;
        return right_tail(n, k, xr, 0.5 * phi.upsilon_jet(xr).d1);
    }
    const auto it = std::upper_bound(phi.grid().begin(), phi.grid().end(), xr);
    std::size_t i = static_cast<std::size_t>(it - phi.grid().begin());
    double acc = cell_integral(phi, xr, phi.x(i), k, phi.kinks());
    for (; i + 1 < m; ++i) acc += cell_integral(phi, phi.x(i), phi.x(i + 1), k, phi.kinks());
    if (right_tail_carries_mass(phi)) acc += right_tail(n, k, xm, phi.u(m - 1));
    return acc;
}

double weighted_moment(const RadialPotential& phi, int k) {
    check_plain(phi);
    if (k < 0) throw std::invalid_argument("weighted_moment requires k >= 0");
    const int n = phi.n();
    const std::size_t m = phi.size();
    double acc = left_tail(n, k, phi.x(0), std::max(phi.u(0), 0.0));
    for (std::size_t i = 0; i + 1 < m; ++i) acc += cell_integral(phi, phi.x(i), phi.x(i + 1), k, phi.kinks());
    if (right_tail_carries_mass(phi)) acc += right_tail(n, k, phi.x(m - 1), phi.u(m - 1));
    return acc;
}

double weighted_volume(const GeometryModel& model) {
    static std::mutex mu;
    static std::map<std::vector<double>, double> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(model.weights()); it != cache.end()) return it->second;
    }
    if (!model.is_round()) throw std::invalid_argument("weighted volume is modeled for round weights only");
    const RadialPotential ref = gaussian(model);
    const double l0 = ref.lambda0();
    // int e^{-lambda} dnu = int e^{-lambda} nu(lambda) dlambda, since nu(lambda0) = 0
    auto f = [&](double l) { return std::exp(-l) * ma_plambda(ref, l).total_mass; };
    const double v = quad::gauss_composite(f, l0, l0 + 120.0, 120);
    std::lock_guard lock(mu);
    cache[model.weights()] = v;
    return v;
}

double integrate_ma_x(const ProfileFn& psi, int n, const std::function<double(double)>& f,
                      std::span<const double> kinks, MaXQuadrature opt) {
    const double upper = opt.upper_u > 0.0 ? opt.upper_u : 60.0 + 2.0 * n;
    std::vector<double> breaks;
    for (double k : kinks) {
        const double eps = 1e-10 * (1.0 + std::abs(k));
        breaks.push_back(0.5 * psi(k - eps).d1);
        breaks.push_back(0.5 * psi(k + eps).d1);
    }
    // geometric grading toward u = 0, where x(u) -> -inf
    const double first = upper / opt.panels;
    for (int j = 1; j <= 40; ++j) breaks.push_back(first * std::ldexp(1.0, -j));
    double guess = 0.0;
    double sum = 0.0;
    quad::for_each_node(0.0, upper, opt.panels, breaks, [&](double u, double w) {
        const double x = slope_inverse(psi, 2.0 * u, guess);
        if (!std::isfinite(x)) return;
        guess = x;
        sum += w * f(x) * std::exp(n - u) * n * ipow(u, n - 1);
    });
    return sum;
}

}  // namespace radsol
