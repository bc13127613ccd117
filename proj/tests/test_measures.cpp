#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radsol/measures.hpp"
#include "radsol/plambda.hpp"

#include <boost/math/special_functions/factorials.hpp>

#include <cmath>
#include <random>

using namespace radsol;

namespace {

RadialPotential random_potential(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> amp(0.0, 0.4), ctr(-1.5, 1.5), wid(0.5, 1.5), sh(-0.5, 0.5);
    PotentialSpec s;
    s.shift = sh(rng);
    s.terms.push_back({ProfileTerm::Kind::Softplus, amp(rng), ctr(rng), wid(rng)});
    s.terms.push_back({ProfileTerm::Kind::Softplus, amp(rng), ctr(rng), wid(rng)});
    return RadialPotential::from_spec(GeometryModel(n), s);
}

// Largest convex minorant with slope at most s: inf_{y <= x} phi(y) + s (x - y),
// minimized by golden-section search on the convex function phi(y) - s y.
double brute_plambda(const RadialPotential& phi, double lambda, std::size_t i) {
    const double s = 2.0 * (lambda + phi.n());
    const double x = phi.x(i);
    auto f = [&](double y) { return phi.upsilon_jet(y).v - s * y; };
    double a = -30.0, b = x;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    const double y = 0.5 * (a + b);
    return std::min(phi.upsilon_jet(x).v, f(y) + s * x);
}

double fact(int n) { return boost::math::factorial<double>(static_cast<unsigned>(n)); }

}  // namespace

TEST_CASE("plambda: Gaussian contact boundary and affine tail") {
    const auto g = gaussian(GeometryModel(1));
    const auto r = p_lambda(g, 0.0);
    CHECK(r.contact_boundary == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(r.potential.omega_jet(1.0).v == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
    for (int n = 1; n <= 3; ++n) {
        const auto gn = gaussian(GeometryModel(n));
        for (double l : {-n + 0.01, -0.5, 0.0, 1.0, 7.5}) {
            if (l <= -n) continue;
            CHECK(contact_boundary(gn, l) == doctest::Approx(0.5 * std::log(2 * l + 2 * n)).epsilon(1e-12));
        }
    }
    CHECK_THROWS(p_lambda(g, -1.0));
    CHECK_THROWS(p_lambda(g, -2.0));
}

TEST_CASE("plambda: oracle against brute-force minorant") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + trial % 3;
        const auto p = random_potential(rng, n);
        for (double l : {-n + 0.2, 0.0, 2.0}) {
            const auto r = p_lambda(p, l);
            for (std::size_t i = 0; i < p.size(); i += 211)
                CHECK(r.potential.phi_upsilon(i) == doctest::Approx(brute_plambda(p, l, i)).epsilon(1e-10));
        }
    }
}

TEST_CASE("plambda: order properties") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 1 + trial % 3;
        const auto p = random_potential(rng, n);
        const auto lo = p_lambda(p, 0.5);
        const auto hi = p_lambda(p, 3.0);
        const auto twice = p_lambda(lo.potential, 0.5);
        for (std::size_t i = 0; i < p.size(); i += 64) {
            CHECK(lo.potential.phi_upsilon(i) <= p.phi_upsilon(i) + 1e-12);
            CHECK(lo.potential.phi_upsilon(i) <= hi.potential.phi_upsilon(i) + 1e-12);
            CHECK(twice.potential.phi_upsilon(i) == doctest::Approx(lo.potential.phi_upsilon(i)).epsilon(1e-12));
            if (p.x(i) <= lo.contact_boundary) CHECK(lo.potential.phi_upsilon(i) == p.phi_upsilon(i));
            if (p.x(i) > lo.contact_boundary) CHECK(lo.potential.slope_upsilon(i) == doctest::Approx(2 * (0.5 + n)));
        }
        // monotone in phi: phi <= phi + c pointwise
        PotentialSpec s = *p.spec();
        s.constant += 0.3;
        const auto up = p_lambda(RadialPotential::from_spec(p.model(), s), 0.5);
        for (std::size_t i = 0; i < p.size(); i += 128) CHECK(lo.potential.phi_upsilon(i) <= up.potential.phi_upsilon(i));
    }
}

TEST_CASE("plambda: support radius") {
    const ClassBounds b{};
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        for (double l : {1.0, 2.0, 10.0, 50.0}) CHECK(contact_boundary(g, l) <= std::log(support_radius(b, n, l)));
        CHECK(support_radius(b, n, 0.3) == doctest::Approx(support_radius_base(b, n)));
        CHECK(support_radius(b, n, 8.0) / support_radius(b, n, 2.0) == doctest::Approx(2.0));
    }
    std::mt19937 rng(9);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = random_potential(rng, 1 + trial % 3);
        REQUIRE(check_class(p, b.a, b.b).ok);
        for (double l : {1.0, 5.0}) CHECK(contact_boundary(p, l) <= std::log(support_radius(b, p.n(), l)));
    }
    CHECK_THROWS(support_radius_base({0.0, 1.0}, 1));
}

TEST_CASE("measures: Monge-Ampere cumulative and truncation") {
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        const auto ma = ma_cumulative(g);
        for (std::size_t i = 0; i < g.size(); i += 128)
            CHECK(ma.cumulative[i] == doctest::Approx(std::pow(std::exp(2 * g.x(i)) / 2, n)).epsilon(1e-12));
        for (double l : {-n + 0.5, 0.0, 3.0}) CHECK(ma_plambda(g, l).total_mass == doctest::Approx(std::pow(l + n, n)));
    }
    std::mt19937 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 1 + trial % 3;
        const auto p = random_potential(rng, n);
        const auto q = random_potential(rng, n);
        for (double l : {-n + 0.1, 1.0, 6.0}) {
            CHECK(ma_plambda(p, l).total_mass == doctest::Approx(ma_plambda(q, l).total_mass).epsilon(1e-6));
        }
        const auto a = ma_plambda(p, 0.5).measure;
        const auto b = ma_plambda(p, 2.5).measure;
        for (std::size_t i = 0; i < a.cumulative.size(); i += 64) CHECK(a.cumulative[i] <= b.cumulative[i] + 1e-12);
    }
}

TEST_CASE("measures: Duistermaat-Heckman two routes agree") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + trial % 3;
        const auto p = random_potential(rng, n);
        const auto grid = default_lambda_grid(n);
        const auto a = dh_measure(p, grid);
        const auto b = dh_measure_pushforward(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(a.cumulative[i] == doctest::Approx(std::pow(grid[i] + n, n)).epsilon(1e-10));
            CHECK(b.cumulative[i] == doctest::Approx(a.cumulative[i]).epsilon(1e-8));
        }
    }
    const auto g = gaussian(GeometryModel(1));
    const std::vector<double> bad{-1.0, 0.0};
    CHECK_THROWS(dh_measure(g, bad));
}

TEST_CASE("measures: weighted measure and step functions") {
    const auto g1 = StepFunction::lower_staircase(-2.0, 40);
    const double d = 20.0 / 40;
    CHECK(g1.sup_gap_to_exp() == doctest::Approx(std::exp(2.0) * (1 - std::exp(-d))).epsilon(1e-12));
    CHECK(g1(-2.0) == doctest::Approx(std::exp(2.0 - d)));
    CHECK(g1(100.0) == 0.0);

    StepFunction neg = g1;
    neg.coefficients[3] = -1e-3;
    const auto p = gaussian(GeometryModel(2));
    CHECK_THROWS(ma_weighted(p, neg));

    std::mt19937 rng(19);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 1 + trial;
        const auto q = random_potential(rng, n);
        const auto target = ma_x(q);
        double prev = 1e300;
        for (int k : {20, 40, 80, 160}) {
            const auto g = StepFunction::lower_staircase(-n, k);
            const auto w = ma_weighted(q, g);
            double err = 0.0;
            for (std::size_t i = 0; i < w.cumulative.size(); ++i)
                err = std::max(err, std::abs(w.cumulative[i] - target.cumulative[i]));
            const double bound = g.sup_gap_to_exp() * std::pow(20.0, n) + std::exp(n) * fact(n) * 1e-4;
            CHECK(err <= bound);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("measures: weighted Monge-Ampere of the Gaussian") {
    for (int n = 1; n <= 3; ++n) {
        const GeometryModel m(n);
        const auto g = gaussian(m);
        const double vol = std::exp(n) * fact(n);
        CHECK(ma_x(g).total_mass == doctest::Approx(vol).epsilon(1e-10));
        CHECK(weighted_volume(m) == doctest::Approx(vol).epsilon(1e-10));
        // int e^{2x} dMA_X = 2 int u dMA_X, and int h dMA_X = 0
        CHECK(weighted_moment(g, 1) == doctest::Approx(2.0 * n * vol).epsilon(1e-10));
        const ProfileFn f = g.upsilon_fn();
        const double hmean = integrate_ma_x(f, n, [&](double x) { return g.upsilon_jet(x).d1 / 2 - n; });
        CHECK(std::abs(hmean) < 1e-10);
        CHECK(integrate_ma_x(f, n, [](double) { return 1.0; }) == doctest::Approx(vol).epsilon(1e-12));
    }
    const auto g1 = gaussian(GeometryModel(1));
    CHECK(tail_mass(g1, 3.0, 0) == doctest::Approx(std::exp(-3.5)).epsilon(1e-10));
    CHECK_THROWS(tail_mass(g1, 0.5, 0));
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        // e^{2x} = 2u, so the tail from R is e^n n 2^k Gamma(n+k, R^2/2)
        for (int k = 0; k <= 2; ++k) {
            for (double R : {1.0, 2.0, 5.0}) {
                const double exact =
                    std::exp(n) * n * std::pow(2.0, k) * boost::math::tgamma(double(n + k), R * R / 2);
                CHECK(tail_mass(g, R, k) == doctest::Approx(exact).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("measures: tail mass is monotone and bounded by the total") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + trial % 3;
        const auto p = random_potential(rng, n);
        for (double R : {1.0, 2.0, 4.0}) {
            const double m0 = tail_mass(p, R, 0);
            const double m1 = tail_mass(p, 2 * R, 0);
            CHECK(m1 <= m0);
            CHECK(m0 <= ma_x(p).total_mass * (1 + 1e-12));
            CHECK(m0 >= 0.0);
        }
    }
}
