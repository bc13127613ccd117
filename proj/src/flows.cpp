#include "radsol/flows.hpp"

#include "radsol/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace radsol {

namespace {

using Rhs = std::function<Vec(double, const Vec&)>;

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct Integration {
    std::vector<double> times;
    std::vector<Vec> states;
    bool exited = false;
    std::optional<double> exit_time;
    int accepted = 0, rejected = 0;
    double min_step = std::numeric_limits<double>::infinity(), max_step = 0.0;
    double integral_residual = 0.0;
};

// Integrates y' = rhs(t, y) on [0, T], stopping exactly at each stop point.
// Within a span (a, b] the right-hand side is sampled at times strictly below b,
// so one-sided pieces of a time-discontinuous field are respected.
Integration integrate(const Rhs& rhs, const Vec& y0, double T, const std::vector<double>& stops,
                      const FlowOptions& opt, std::size_t state_dim, double radius, const Rhs* residual_rhs) {
    Integration out;
    out.times.push_back(0.0);
    out.states.push_back(y0);
    if (T == 0.0) return out;
    if (!(T > 0.0)) throw std::invalid_argument("final time must be non-negative");
    Vec y = y0;
    double t = 0.0;
    double h = opt.initial_step;
    const auto& gx = boost::math::quadrature::gauss<double, 5>::abscissa();
    const auto& gw = boost::math::quadrature::gauss<double, 5>::weights();
    for (double b : stops) {
        const double a = t;
        auto clamp_t = [&](double s) { return s >= b ? std::nextafter(b, a) : s; };
        Vec k1 = rhs(clamp_t(t), y);
        while (t < b) {
            if (out.accepted + out.rejected >= opt.max_steps) throw std::runtime_error("step budget exhausted");
            bool last = false;
            if (t + h >= b || (b - (t + h)) < 1e-12 * std::max(1.0, std::abs(b))) {
                h = b - t;
                last = true;
            }
            const Vec k2 = rhs(clamp_t(t + c2 * h), y + h * (a21 * k1));
            const Vec k3 = rhs(clamp_t(t + c3 * h), y + h * (a31 * k1 + a32 * k2));
            const Vec k4 = rhs(clamp_t(t + c4 * h), y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = rhs(clamp_t(t + c5 * h), y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = rhs(clamp_t(t + h), y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = rhs(clamp_t(t + h), yn);
            const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = 0.0;
            for (Eigen::Index i = 0; i < err.size(); ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (!std::isfinite(en)) en = 1e10;
            if (en <= 1.0) {
                if (residual_rhs) {
                    // integral form on the cubic Hermite interpolant of the accepted step
                    const auto n = static_cast<Eigen::Index>(state_dim);
                    Vec integral = Vec::Zero(n);
                    for (std::size_t q = 0; q < gx.size(); ++q) {
                        for (double sgn : {-1.0, 1.0}) {
                            if (gx[q] == 0.0 && sgn > 0) continue;
                            const double s = 0.5 * (1.0 + sgn * gx[q]);
                            const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
                            const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
                            const Vec ys = h00 * y.head(n) + h10 * h * k1.head(n) + h01 * yn.head(n) +
                                           h11 * h * k7.head(n);
                            integral += 0.5 * h * gw[q] * (*residual_rhs)(clamp_t(t + s * h), ys);
                        }
                    }
                    out.integral_residual =
                        std::max(out.integral_residual, (yn.head(n) - y.head(n) - integral).norm());
                }
                t = last ? b : t + h;
                y = yn;
                k1 = k7;
                ++out.accepted;
                out.min_step = std::min(out.min_step, h);
                out.max_step = std::max(out.max_step, h);
                if (y.head(static_cast<Eigen::Index>(state_dim)).norm() > radius) {
                    out.exited = true;
                    out.exit_time = t;
                    out.times.push_back(t);
                    out.states.push_back(y);
                    return out;
                }
            } else {
                ++out.rejected;
            }
            const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (!last || en > 1.0) h *= fac;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) throw std::runtime_error("step size underflow");
        }
        out.times.push_back(b);
        out.states.push_back(y);
    }
    return out;
}

std::vector<double> stop_points(const TimeField& f, const FlowOptions& opt, double T) {
    std::set<double> s;
    for (double b : f.breakpoints)
        if (b > 0.0 && b < T) s.insert(b);
    for (double b : opt.output_times)
        if (b > 0.0 && b < T) s.insert(b);
    s.insert(T);
    return {s.begin(), s.end()};
}

Mat fd_jacobian(const TimeField& f, double t, const Vec& x) {
    Mat J(f.dim, f.dim);
    for (int j = 0; j < f.dim; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f.eval(t, xp) - f.eval(t, xm)) / (2.0 * h);
    }
    return J;
}

void check_field(const TimeField& f, const Vec& x0) {
    if (f.dim < 1 || x0.size() != f.dim) throw std::invalid_argument("initial point has the wrong dimension");
    if (!f.eval) throw std::invalid_argument("vector field has no evaluator");
    if (x0.norm() > f.domain_radius) throw std::invalid_argument("initial point outside the domain");
}

FlowResult to_result(Integration&& in) {
    FlowResult r;
    r.times = std::move(in.times);
    r.states = std::move(in.states);
    r.exited = in.exited;
    r.exit_time = in.exit_time;
    r.accepted_steps = in.accepted;
    r.rejected_steps = in.rejected;
    r.min_step = in.min_step;
    r.max_step = in.max_step;
    r.integral_residual = in.integral_residual;
    return r;
}

using CVec = std::vector<std::complex<double>>;

CVec to_complex(const Vec& v) {
    CVec z(static_cast<std::size_t>(v.size() / 2));
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = {v[2 * i], v[2 * i + 1]};
    return z;
}

Vec to_real(const CVec& z) {
    Vec v(2 * static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        v[2 * i] = z[i].real();
        v[2 * i + 1] = z[i].imag();
    }
    return v;
}

Mat real_blocks(const Eigen::MatrixXcd& J) {
    const auto n = J.rows();
    Mat R(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto c = J(i, j);
            R(2 * i, 2 * j) = c.real();
            R(2 * i, 2 * j + 1) = -c.imag();
            R(2 * i + 1, 2 * j) = c.imag();
            R(2 * i + 1, 2 * j + 1) = c.real();
        }
    return R;
}

}  // namespace

const Vec& FlowResult::state_at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] == t) return states[i];
    throw std::out_of_range("time " + std::to_string(t) + " was not recorded");
}

FlowResult solve_flow(const TimeField& field, const Vec& x0, double T, const FlowOptions& opt) {
    check_field(field, x0);
    const Rhs rhs = field.eval;
    return to_result(integrate(rhs, x0, T, stop_points(field, opt, T), opt, static_cast<std::size_t>(field.dim),
                               field.domain_radius, &rhs));
}

FlowResult solve_variational(const TimeField& field, const Vec& x0, double T, const FlowOptions& opt) {
    check_field(field, x0);
    const int d = field.dim;
    const Rhs rhs = [&](double t, const Vec& y) {
        const Vec x = y.head(d);
        const Mat J = Eigen::Map<const Mat>(y.data() + d, d, d);
        const Mat DV = field.jacobian ? field.jacobian(t, x) : fd_jacobian(field, t, x);
        Vec out(d + d * d);
        out.head(d) = field.eval(t, x);
        Mat dJ = DV * J;
        out.tail(d * d) = Eigen::Map<const Vec>(dJ.data(), d * d);
        return out;
    };
    Vec y0(d + d * d);
    y0.head(d) = x0;
    Mat I = Mat::Identity(d, d);
    y0.tail(d * d) = Eigen::Map<const Vec>(I.data(), d * d);
    Integration in = integrate(rhs, y0, T, stop_points(field, opt, T), opt, static_cast<std::size_t>(d),
                               field.domain_radius, nullptr);
    FlowResult r;
    for (std::size_t i = 0; i < in.states.size(); ++i) {
        r.jacobians.push_back(Eigen::Map<const Mat>(in.states[i].data() + d, d, d));
        in.states[i] = Vec(in.states[i].head(d));
    }
    auto jac = std::move(r.jacobians);
    r = to_result(std::move(in));
    r.jacobians = std::move(jac);
    return r;
}

double lipschitz_integral(const TimeField& field, double t) {
    if (!field.lipschitz) throw std::invalid_argument("field declares no Lipschitz envelope");
    std::vector<double> cuts{0.0};
    for (double b : field.breakpoints)
        if (b > 0.0 && b < t) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(t);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        // sample strictly inside the piece so jumps at the cuts are not seen
        auto f = [&](double s) { return field.lipschitz(std::clamp(s, a, std::nextafter(b, a))); };
        sum += quad::gauss_composite(f, a, b, 8);
    }
    return sum;
}

double lipschitz_spot_check(const TimeField& field, double T, double r, int samples, std::uint32_t seed) {
    if (!field.lipschitz) throw std::invalid_argument("field declares no Lipschitz envelope");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, T), ux(-r, r);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = ut(rng);
        Vec x(field.dim), y(field.dim);
        for (int i = 0; i < field.dim; ++i) {
            x[i] = ux(rng);
            y[i] = ux(rng);
        }
        const double dist = (x - y).norm();
        const double l = field.lipschitz(t);
        if (dist == 0.0) continue;
        const double gap = (field.eval(t, x) - field.eval(t, y)).norm();
        worst = std::max(worst, l > 0.0 ? gap / (l * dist) : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
    return worst;
}

GronwallReport gronwall_certificate(const TimeField& field, const Vec& x, const Vec& y, double T, int samples,
                                    const FlowOptions& opt) {
    if (samples < 2) throw std::invalid_argument("need at least two sample times");
    FlowOptions o = opt;
    o.output_times = uniform_grid(0.0, T, static_cast<std::size_t>(samples));
    const FlowResult a = solve_flow(field, x, T, o);
    const FlowResult b = solve_flow(field, y, T, o);
    if (a.exited || b.exited) throw std::runtime_error("a trajectory left the domain");
    GronwallReport rep;
    const double d0 = (x - y).norm();
    for (double t : o.output_times) {
        const double d = (a.state_at(t) - b.state_at(t)).norm();
        const double bound = std::exp(lipschitz_integral(field, t)) * d0;
        rep.times.push_back(t);
        rep.distance.push_back(d);
        rep.bound.push_back(bound);
        // integrator slack: both trajectories carry relative error ~ rtol
        const double slack = 1e-8 * bound + 10.0 * opt.rtol * (a.state_at(t).norm() + b.state_at(t).norm());
        if (bound > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, d / bound);
        if (d > bound + slack && !rep.failing_time) {
            rep.ok = false;
            rep.failing_time = t;
        }
    }
    return rep;
}

CVec PolynomialField::eval(const CVec& z) const {
    CVec out(static_cast<std::size_t>(n));
    for (const auto& m : terms) {
        std::complex<double> v = m.coefficient;
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < m.exponents[static_cast<std::size_t>(j)]; ++p) v *= z[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(m.component)] += v;
    }
    return out;
}

Eigen::MatrixXcd PolynomialField::jacobian(const CVec& z) const {
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& m : terms) {
        for (int j = 0; j < n; ++j) {
            const int e = m.exponents[static_cast<std::size_t>(j)];
            if (e == 0) continue;
            std::complex<double> v = m.coefficient * static_cast<double>(e);
            for (int k = 0; k < n; ++k) {
                const int p = m.exponents[static_cast<std::size_t>(k)] - (k == j ? 1 : 0);
                for (int q = 0; q < p; ++q) v *= z[static_cast<std::size_t>(k)];
            }
            J(m.component, j) += v;
        }
    }
    return J;
}

int PolynomialField::vanishing_order() const {
    int order = std::numeric_limits<int>::max();
    for (const auto& m : terms) {
        if (m.coefficient == 0.0) continue;
        int deg = 0;
        for (int e : m.exponents) deg += e;
        order = std::min(order, deg);
    }
    return order == std::numeric_limits<int>::max() ? 0 : order;
}

ConjugationReport conjugation_limit(const ConjugationExperiment& ex) {
    const int n = static_cast<int>(ex.weights.size());
    if (n < 1) throw std::invalid_argument("empty weight vector");
    for (double a : ex.weights)
        if (!(a > 0.0)) throw std::invalid_argument("conjugation experiment needs positive weights");
    const PolynomialField& H = ex.perturbation;
    if (H.n != n) throw std::invalid_argument("perturbation dimension does not match the weights");
    for (const auto& m : H.terms) {
        if (m.component < 0 || m.component >= n || static_cast<int>(m.exponents.size()) != n)
            throw std::invalid_argument("malformed monomial");
        int deg = 0;
        for (int e : m.exponents) {
            if (e < 0) throw std::invalid_argument("negative exponent");
            deg += e;
        }
        if (deg == 0 && m.coefficient != 0.0) throw std::invalid_argument("perturbation must vanish at the origin");
    }
    if (ex.ladder.size() < 2 || !std::is_sorted(ex.ladder.begin(), ex.ladder.end()) || !(ex.ladder.front() > 0.0))
        throw std::invalid_argument("ladder must be increasing positive times");
    const double tmax = ex.ladder.back();
    const Eigen::ArrayXd a = Eigen::Map<const Eigen::ArrayXd>(ex.weights.data(), n);

    // eta_t is the flow of H_t(z) = Exp(tX)_* H = e^{a t} H(e^{-a t} z)
    auto scale = [&](const CVec& z, double t) {
        CVec w(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) w[i] = std::exp(a[static_cast<Eigen::Index>(i)] * t) * z[i];
        return w;
    };
    TimeField Ht;
    Ht.dim = 2 * n;
    Ht.eval = [&](double t, const Vec& x) { return to_real(scale(H.eval(scale(to_complex(x), -t)), t)); };
    Ht.jacobian = [&](double t, const Vec& x) {
        Eigen::MatrixXcd J = H.jacobian(scale(to_complex(x), -t));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) J(i, j) *= std::exp((a[i] - a[j]) * t);
        return real_blocks(J);
    };
    TimeField XminusH;
    XminusH.dim = 2 * n;
    XminusH.eval = [&](double, const Vec& x) {
        const CVec z = to_complex(x);
        CVec h = H.eval(z);
        for (std::size_t i = 0; i < z.size(); ++i) h[i] = a[static_cast<Eigen::Index>(i)] * z[i] - h[i];
        return to_real(h);
    };

    ConjugationReport rep;
    rep.convention = "Exp(tX)(z)_i = exp(a_i t) z_i; eta_t = Exp(tX) o Exp(-t(X-H))";
    rep.ladder = ex.ladder;
    rep.vanishing_order = H.vanishing_order();

    FlowOptions opt;
    opt.output_times = ex.ladder;
    double delta = ex.delta;
    std::vector<Vec> samples;
    std::vector<FlowResult> flows;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::mt19937 rng(ex.seed);
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud;
        samples.clear();
        flows.clear();
        Ht.domain_radius = 100.0 * delta;
        bool escaped = false;
        for (int k = 0; k < ex.sample_count; ++k) {
            Vec v(2 * n);
            for (int i = 0; i < 2 * n; ++i) v[i] = nd(rng);
            v *= delta * std::pow(ud(rng), 1.0 / (2 * n)) / v.norm();
            samples.push_back(v);
            flows.push_back(solve_flow(Ht, v, tmax, opt));
            if (flows.back().exited) {
                escaped = true;
                break;
            }
        }
        if (!escaped) break;
        if (attempt == 1) throw std::runtime_error("flow escapes the ball before t_max even after shrinking delta");
        delta *= 0.5;
        rep.shrunk = true;
    }
    rep.delta = delta;

    for (std::size_t k = 0; k + 1 < ex.ladder.size(); ++k) {
        double sup = 0.0;
        for (const auto& f : flows) sup = std::max(sup, (f.state_at(ex.ladder[k + 1]) - f.state_at(ex.ladder[k])).norm());
        rep.cauchy.push_back(sup);
    }
    {
        std::vector<double> ts, ls;
        for (std::size_t k = 0; k < rep.cauchy.size(); ++k) {
            if (rep.cauchy[k] > 0.0) {
                ts.push_back(ex.ladder[k]);
                ls.push_back(std::log(rep.cauchy[k]));
            }
        }
        if (ts.size() >= 2) {
            const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / ts.size();
            const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / ls.size();
            double sxy = 0.0, sxx = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                sxy += (ts[k] - mt) * (ls[k] - ml);
                sxx += (ts[k] - mt) * (ts[k] - mt);
            }
            rep.rate = sxy / sxx;
            rep.converging = *rep.rate < 0.0;
        } else {
            rep.converging = ts.empty();
        }
    }

    FlowOptions plain;
    auto eta = [&](const Vec& z) { return solve_flow(Ht, z, tmax, plain).final_state(); };
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Vec& z = samples[k];
        const Vec& et = flows[k].final_state();
        // composition cross-check: Exp(tX) o Exp(-t(X-H))
        TimeField back = XminusH;
        back.eval = [&](double t, const Vec& x) { return Vec(-XminusH.eval(t, x)); };
        const Vec w = solve_flow(back, z, tmax, plain).final_state();
        rep.composition_gap = std::max(rep.composition_gap, (to_real(scale(to_complex(w), tmax)) - et).norm());
        for (double s : ex.conjugacy_times) {
            const Vec p = solve_flow(XminusH, z, s, plain).final_state();
            const Vec lhs = eta(p);
            const Vec rhs = to_real(scale(to_complex(et), s));
            rep.conjugacy_residual = std::max(rep.conjugacy_residual, (lhs - rhs).norm());
        }
        const FlowResult var = solve_variational(Ht, z, tmax, plain);
        const Mat& J = var.jacobians.back();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double A = J(2 * i, 2 * j), B = J(2 * i, 2 * j + 1);
                const double C = J(2 * i + 1, 2 * j), D = J(2 * i + 1, 2 * j + 1);
                rep.cr_residual = std::max(rep.cr_residual, std::abs(A - D) + std::abs(B + C));
            }
    }
    return rep;
}

ReebReport reeb_forward_limit(const std::vector<double>& weights, const std::vector<CVec>& points) {
    ReebReport rep;
    rep.convention = "Exp(t J xi)(z)_i = exp(-a_i t) z_i, t -> +inf";
    rep.reeb = !weights.empty() && std::all_of(weights.begin(), weights.end(), [](double a) { return a > 0.0; });
    for (const auto& z : points) {
        if (z.size() != weights.size()) throw std::invalid_argument("point dimension does not match the weights");
        ReebPoint p;
        bool any = false, bounded = false;
        p.growth_rate = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (z[i] == 0.0) continue;
            any = true;
            p.growth_rate = std::max(p.growth_rate, -weights[i]);
            if (weights[i] < 0.0) p.divergent_coordinates.push_back(static_cast<int>(i));
            if (weights[i] == 0.0) bounded = true;
        }
        if (!any) {
            p.classification = "fixed";
            p.growth_rate = 0.0;
        } else if (!p.divergent_coordinates.empty()) {
            p.classification = "diverges";
        } else if (bounded) {
            p.classification = "bounded";
        } else {
            p.classification = "origin";
        }
        rep.points.push_back(std::move(p));
    }
    return rep;
}

PullbackReport pullback_constancy(const GeodesicSlab& s, double c, double tol) {
    PullbackReport rep;
    const std::size_t nt = s.nt(), nx = s.nx();
    if (nt < 3 || nx < 8) throw std::invalid_argument("slab too small");
    std::vector<double> dxx(s.values.size(), 0.0), dtx(s.values.size(), 0.0);
    const bool fields = s.has_x_derivatives() && !s.phi_tx.empty();
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 1; j + 1 < nx; ++j) {
            const std::size_t k = s.index(i, j);
            if (fields) {
                dxx[k] = s.phi_xx[k];
                dtx[k] = s.phi_tx[k];
                continue;
            }
            const double hm = s.x_grid[j] - s.x_grid[j - 1], hp = s.x_grid[j + 1] - s.x_grid[j];
            dxx[k] = 2.0 * ((s.values[k + 1] - s.values[k]) / hp - (s.values[k] - s.values[k - 1]) / hm) / (hm + hp);
            const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == nt ? i : i + 1;
            const double dt = s.t_grid[hi] - s.t_grid[lo];
            dtx[k] = (s.values[s.index(hi, j + 1)] - s.values[s.index(hi, j - 1)] - s.values[s.index(lo, j + 1)] +
                      s.values[s.index(lo, j - 1)]) /
                     (dt * (hm + hp));
        }
    auto interp = [&](std::size_t i, double x) {
        const auto it = std::upper_bound(s.x_grid.begin(), s.x_grid.end(), x);
        std::size_t k = static_cast<std::size_t>(it - s.x_grid.begin());
        std::size_t st = k >= 2 ? k - 2 : 0;
        st = std::clamp<std::size_t>(st, 1, nx - 5);
        double sum = 0.0;
        for (std::size_t a = st; a < st + 4; ++a) {
            double w = 1.0;
            for (std::size_t b = st; b < st + 4; ++b)
                if (b != a) w *= (x - s.x_grid[b]) / (s.x_grid[a] - s.x_grid[b]);
            sum += w * dxx[s.index(i, a)];
        }
        return sum;
    };
    auto note = [&](double res, double& slot, std::size_t i, double x) {
        if (res > slot) slot = res;
        if (res > tol && rep.ok) {
            rep.ok = false;
            rep.worst_t = s.t_grid[i];
            rep.worst_x = x;
        }
    };
    for (std::size_t i = 0; i < nt; ++i) {
        const double shift = 0.5 * s.t_grid[i] * c;
        for (std::size_t j = 1; j + 1 < nx; ++j) {
            const double base = dxx[s.index(0, j)];
            const double x = s.x_grid[j] + shift;
            if (x > s.x_grid[2] && x < s.x_grid[nx - 3]) {
                const double moved = interp(i, x);
                note(std::abs(moved - base) / (1.0 + std::abs(base)), rep.curvature_residual, i, x);
            }
            const std::size_t k = s.index(i, j);
            note(std::abs(dtx[k] + 0.5 * c * dxx[k]) / (1.0 + std::abs(dxx[k])), rep.equation_residual, i,
                 s.x_grid[j]);
        }
    }
    return rep;
}

}  // namespace radsol
