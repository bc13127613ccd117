#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "radsol/flows.hpp"
#include "radsol/potential.hpp"

#include <cmath>
#include <complex>

using namespace radsol;
using cd = std::complex<double>;

namespace {

TimeField piecewise_scalar() {
    TimeField f;
    f.dim = 1;
    auto a = [](double t) { return t < 0.5 ? 1.0 : -2.0; };
    f.eval = [a](double t, const Vec& x) { return Vec(a(t) * x); };
    f.jacobian = [a](double t, const Vec&) { return Mat::Constant(1, 1, a(t)); };
    f.lipschitz = [a](double t) { return std::abs(a(t)); };
    f.breakpoints = {0.5};
    return f;
}

TimeField diagonal(const Vec& rates) {
    TimeField f;
    f.dim = static_cast<int>(rates.size());
    f.eval = [rates](double, const Vec& x) { return Vec(rates.cwiseProduct(x)); };
    f.jacobian = [rates](double, const Vec&) { return Mat(rates.asDiagonal()); };
    f.lipschitz = [rates](double) { return rates.cwiseAbs().maxCoeff(); };
    return f;
}

// Nonlinear, time-dependent planar field used for Jacobian and composition checks.
TimeField pendulum() {
    TimeField f;
    f.dim = 2;
    f.eval = [](double t, const Vec& x) {
        Vec v(2);
        v << x[1], -std::sin(x[0]) + 0.3 * std::cos(t) * x[1];
        return v;
    };
    f.lipschitz = [](double t) { return 1.0 + 0.3 * std::abs(std::cos(t)) + 1.0; };
    return f;
}

// Least-squares slope of log(g(t_{k+1}) - g(t_k)) against t_k on the default ladder.
double ladder_slope(double (*g)(double, double), double p) {
    const std::vector<double> t{1.0, 2.0, 4.0, 8.0};
    double mt = 0.0, ml = 0.0;
    std::vector<double> l;
    for (int k = 0; k < 3; ++k) {
        l.push_back(std::log(std::abs(g(t[k + 1], p) - g(t[k], p))));
        mt += t[k] / 3.0;
        ml += l.back() / 3.0;
    }
    double sxy = 0.0, sxx = 0.0;
    for (int k = 0; k < 3; ++k) {
        sxy += (t[k] - mt) * (l[k] - ml);
        sxx += (t[k] - mt) * (t[k] - mt);
    }
    return sxy / sxx;
}

PolynomialField monomial(int n, int component, cd coefficient, std::vector<int> exps) {
    PolynomialField h;
    h.n = n;
    h.terms.push_back({component, coefficient, std::move(exps)});
    return h;
}

}  // namespace

TEST_CASE("piecewise constant rate integrates across the jump") {
    const TimeField f = piecewise_scalar();
    const FlowResult r = solve_flow(f, Vec::Constant(1, 1.0), 1.0);
    CHECK(r.final_state()[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
    CHECK(r.state_at(0.5)[0] == doctest::Approx(std::exp(0.5)).epsilon(1e-10));
    CHECK(r.integral_residual < 1e-8);
    CHECK(lipschitz_integral(f, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("zero field and identity at time zero") {
    TimeField zero;
    zero.dim = 3;
    zero.eval = [](double, const Vec& x) { return Vec(Vec::Zero(x.size())); };
    Vec x0(3);
    x0 << 0.2, -1.0, 4.0;
    CHECK((solve_flow(zero, x0, 2.0).final_state() - x0).norm() == 0.0);
    const FlowResult v = solve_variational(pendulum(), Vec::Constant(2, 0.4), 0.0);
    CHECK(v.final_state() == Vec::Constant(2, 0.4));
    CHECK((v.jacobians.back() - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("linear diagonal field matches the exponential") {
    Vec rates(3), x0(3);
    rates << 0.7, -1.3, 0.0;
    x0 << 1.0, 2.0, -3.0;
    const FlowResult r = solve_variational(diagonal(rates), x0, 1.7);
    for (int i = 0; i < 3; ++i) {
        CHECK(r.final_state()[i] == doctest::Approx(x0[i] * std::exp(rates[i] * 1.7)).epsilon(1e-10));
        CHECK(r.jacobians.back()(i, i) == doctest::Approx(std::exp(rates[i] * 1.7)).epsilon(1e-10));
    }
}

TEST_CASE("variational Jacobian agrees with finite differences") {
    const TimeField f = pendulum();
    Vec x0(2);
    x0 << 0.9, -0.2;
    const double T = 3.0;
    const Mat J = solve_variational(f, x0, T).jacobians.back();
    for (int j = 0; j < 2; ++j) {
        const double h = 1e-6;
        Vec p = x0, m = x0;
        p[j] += h;
        m[j] -= h;
        const Vec col = (solve_flow(f, p, T).final_state() - solve_flow(f, m, T).final_state()) / (2 * h);
        CHECK((col - J.col(j)).norm() <= 1e-4 * (1.0 + col.norm()));
    }
}

TEST_CASE("composition law and determinism") {
    TimeField f = pendulum();
    Vec x0(2);
    x0 << 1.1, 0.5;
    FlowOptions opt;
    opt.output_times = {0.8};
    const FlowResult whole = solve_flow(f, x0, 2.0, opt);
    // restart from the intermediate state with the time origin shifted
    TimeField g = f;
    g.eval = [f](double t, const Vec& x) { return f.eval(t + 0.8, x); };
    const Vec second = solve_flow(g, whole.state_at(0.8), 1.2).final_state();
    CHECK((second - whole.final_state()).norm() < 1e-9);
    const FlowResult again = solve_flow(f, x0, 2.0, opt);
    CHECK(again.final_state() == whole.final_state());
    CHECK(again.accepted_steps == whole.accepted_steps);
}

TEST_CASE("flows push forward the identity map of a linear system") {
    // u' = A u with nilpotent A: the flow is I + tA
    TimeField f;
    f.dim = 2;
    f.eval = [](double, const Vec& x) {
        Vec v(2);
        v << x[1], 0.0;
        return v;
    };
    const FlowResult r = solve_variational(f, Vec::Zero(2), 2.5);
    Mat expect(2, 2);
    expect << 1.0, 2.5, 0.0, 1.0;
    CHECK((r.jacobians.back() - expect).norm() < 1e-6);
}

TEST_CASE("domain exit is reported") {
    Vec rates(1);
    rates << 2.0;
    TimeField f = diagonal(rates);
    f.domain_radius = 10.0;
    const FlowResult r = solve_flow(f, Vec::Constant(1, 1.0), 5.0);
    CHECK(r.exited);
    REQUIRE(r.exit_time);
    CHECK(*r.exit_time < 5.0);
    CHECK(*r.exit_time > 0.5 * std::log(10.0) - 0.5);
    CHECK_THROWS_AS(solve_flow(f, Vec::Constant(1, 11.0), 1.0), std::invalid_argument);
}

TEST_CASE("Gronwall certificate") {
    SUBCASE("expanding linear field attains the bound") {
        Vec rates(1);
        rates << 1.0;
        const GronwallReport g =
            gronwall_certificate(diagonal(rates), Vec::Constant(1, 1.0), Vec::Constant(1, 1.5), 2.0);
        CHECK(g.ok);
        CHECK(g.worst_ratio == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("contraction leaves slack") {
        Vec rates(2);
        rates << -1.0, -0.5;
        Vec x(2), y(2);
        x << 1.0, 1.0;
        y << -1.0, 0.5;
        const GronwallReport g = gronwall_certificate(diagonal(rates), x, y, 3.0);
        CHECK(g.ok);
        CHECK(g.distance.back() < 0.01 * g.bound.back());
    }
    SUBCASE("coincident starts") {
        const GronwallReport g = gronwall_certificate(pendulum(), Vec::Constant(2, 0.3), Vec::Constant(2, 0.3), 1.0);
        CHECK(g.ok);
        CHECK(g.distance.back() == 0.0);
    }
    SUBCASE("piecewise field across the jump") {
        const GronwallReport g =
            gronwall_certificate(piecewise_scalar(), Vec::Constant(1, 1.0), Vec::Constant(1, 2.0), 1.0);
        CHECK(g.ok);
    }
    SUBCASE("understated Lipschitz envelope is caught") {
        Vec rates(1);
        rates << 1.0;
        TimeField f = diagonal(rates);
        f.lipschitz = [](double) { return 0.5; };
        const GronwallReport g = gronwall_certificate(f, Vec::Constant(1, 1.0), Vec::Constant(1, 1.5), 2.0);
        CHECK_FALSE(g.ok);
        CHECK(lipschitz_spot_check(f, 2.0, 3.0, 50) > 1.5);
    }
    CHECK(lipschitz_spot_check(pendulum(), 2.0, 1.0, 200) <= 1.0);
}

TEST_CASE("polynomial fields") {
    const PolynomialField h = monomial(2, 0, {0.1, 0.0}, {0, 3});
    const std::vector<cd> z{{0.2, 0.1}, {0.3, -0.4}};
    const auto v = h.eval(z);
    CHECK(std::abs(v[0] - 0.1 * z[1] * z[1] * z[1]) < 1e-15);
    CHECK(std::abs(v[1]) == 0.0);
    const auto J = h.jacobian(z);
    CHECK(std::abs(J(0, 1) - 0.3 * z[1] * z[1]) < 1e-15);
    CHECK(std::abs(J(0, 0)) == 0.0);
    CHECK(h.vanishing_order() == 3);
}

TEST_CASE("conjugation limit") {
    SUBCASE("zero perturbation is already linear") {
        ConjugationExperiment ex;
        ex.weights = {1.0, 1.0};
        ex.perturbation.n = 2;
        const ConjugationReport r = conjugation_limit(ex);
        CHECK(r.cauchy.size() == 3);
        for (double c : r.cauchy) CHECK(c == 0.0);
        CHECK(r.converging);
        CHECK(r.conjugacy_residual < 1e-10);
    }
    SUBCASE("cubic perturbation converges at the predicted rate") {
        ConjugationExperiment ex;
        ex.weights = {1.0, 1.0};
        ex.perturbation = monomial(2, 0, {0.1, 0.0}, {0, 3});
        const ConjugationReport r = conjugation_limit(ex);
        REQUIRE(r.rate);
        CHECK(*r.rate <= -1.0);
        CHECK(*r.rate == doctest::Approx(-2.0).epsilon(0.05));
        CHECK(r.converging);
        CHECK_FALSE(r.shrunk);
        CHECK(r.conjugacy_residual <= 1e-6);
        CHECK(r.composition_gap <= 1e-8);
        CHECK(r.cr_residual <= 1e-8);
        // closed form: eta_t(z) = (z1 + 0.1 z2^3 (1 - e^{-2t})/2, z2)
        CHECK(r.cauchy[0] > 0.0);
    }
    SUBCASE("resonant linear perturbation does not settle") {
        ConjugationExperiment ex;
        ex.weights = {1.0, 1.0};
        ex.perturbation = monomial(2, 0, {0.1, 0.0}, {1, 0});
        const ConjugationReport r = conjugation_limit(ex);
        REQUIRE(r.rate);
        // eta_t(z)_1 = e^{0.1 t} z_1
        const double expect = ladder_slope([](double t, double e) { return std::exp(e * t); }, 0.1);
        CHECK(*r.rate == doctest::Approx(expect).epsilon(1e-6));
        CHECK(*r.rate > 0.0);
        CHECK_FALSE(r.converging);
    }
    SUBCASE("higher vanishing order decays faster") {
        double previous = 0.0;
        for (int N : {2, 3, 4}) {
            ConjugationExperiment ex;
            ex.weights = {1.0, 1.0};
            ex.perturbation = monomial(2, 0, {0.1, 0.0}, {0, N});
            const ConjugationReport r = conjugation_limit(ex);
            REQUIRE(r.rate);
            // eta_t(z)_1 = z_1 + eps z_2^N (1 - e^{-(N-1)t}) / (N-1)
            const double expect = ladder_slope([](double t, double m) { return -std::exp(-m * t); }, N - 1.0);
            CHECK(*r.rate == doctest::Approx(expect).epsilon(1e-4));
            if (N > 2) CHECK(*r.rate < previous);
            previous = *r.rate;
        }
    }
    SUBCASE("validation") {
        ConjugationExperiment ex;
        ex.weights = {1.0, -1.0};
        ex.perturbation.n = 2;
        CHECK_THROWS_AS(conjugation_limit(ex), std::invalid_argument);
        ex.weights = {1.0, 1.0};
        ex.perturbation = monomial(2, 0, {1.0, 0.0}, {0, 0});
        CHECK_THROWS_AS(conjugation_limit(ex), std::invalid_argument);
    }
}

TEST_CASE("Reeb forward limit") {
    const ReebReport r = reeb_forward_limit({1.0, 2.0}, {{0.0, 0.0}, {1.0, 0.0}, {{0.5, 0.5}, 3.0}});
    CHECK(r.reeb);
    CHECK(r.points[0].classification == "fixed");
    CHECK(r.points[1].classification == "origin");
    CHECK(r.points[1].growth_rate == -1.0);
    CHECK(r.points[2].classification == "origin");
    const ReebReport m = reeb_forward_limit({1.0, 0.0, -1.0}, {{1.0, 1.0, 0.0}, {1.0, 0.0, 2.0}});
    CHECK_FALSE(m.reeb);
    CHECK(m.points[0].classification == "bounded");
    CHECK(m.points[1].classification == "diverges");
    CHECK(m.points[1].divergent_coordinates == std::vector<int>{2});
    CHECK(m.points[1].growth_rate == 1.0);
    CHECK_THROWS_AS(reeb_forward_limit({1.0}, {{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("pullback constancy along translation geodesics") {
    const RadialPotential g = gaussian(GeometryModel(2));
    const GeodesicSlab still = translation_geodesic(g, 0.0);
    const PullbackReport r0 = pullback_constancy(still, 0.0);
    CHECK(r0.ok);
    CHECK(r0.curvature_residual == 0.0);
    const GeodesicSlab moving = translation_geodesic(g, 1.0);
    const PullbackReport r1 = pullback_constancy(moving, 1.0);
    CHECK(r1.ok);
    CHECK(r1.curvature_residual < 1e-6);
    CHECK(r1.equation_residual < 1e-9);
    CHECK_FALSE(pullback_constancy(moving, -1.0).ok);
    GeodesicSlab bad = moving;
    const std::size_t k = bad.index(bad.nt() / 2, bad.nx() / 2);
    bad.phi_xx[k] *= 1.01;
    const PullbackReport rb = pullback_constancy(bad, 1.0);
    CHECK_FALSE(rb.ok);
    CHECK(rb.worst_t == doctest::Approx(bad.t_grid[bad.nt() / 2]));
}
