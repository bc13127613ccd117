#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radsol/geometry.hpp"
#include "radsol/potential.hpp"

#include <cmath>
#include <random>

using namespace radsol;

namespace {

PotentialSpec bumped(double amp, double center) {
    PotentialSpec s;
    s.terms.push_back({ProfileTerm::Kind::Softplus, amp, center, 1.0});
    return s;
}

}  // namespace

TEST_CASE("geometry: model validation and critical data") {
    CHECK_THROWS_AS(GeometryModel(0), std::invalid_argument);
    CHECK_THROWS_AS(GeometryModel(2, {1.0}), std::invalid_argument);
    GeometryModel round(3);
    CHECK(round.is_round());
    CHECK(round.is_reeb());

    CHECK(lambda_at_fixed_point({1.0, 1.0}) == doctest::Approx(-2.0));
    CHECK(lambda_at_fixed_point({1.0, 2.0, 3.0}) == doctest::Approx(-6.0));
    CHECK_THROWS(lambda_at_fixed_point({}));
    CHECK_THROWS_WITH(bb_strata({1.0, 0.0}), doctest::Contains("degenerate weight"));

    const CriticalData all_positive = bb_strata({1.0, 1.0});
    const auto whole = all_positive.attracting_set(-2.0);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].is_everything());
    CHECK(all_positive.attracting_set(-1.5).empty());

    const CriticalData mixed = bb_strata({1.0, -1.0});
    const auto part = mixed.attracting_set(-10.0);
    REQUIRE(part.size() == 1);
    CHECK(part[0].free == std::vector<bool>{true, false});
    CHECK_FALSE(part[0].is_everything());
}

TEST_CASE("geometry: reference volume is the pushforward of Lebesgue measure") {
    GeometryModel m(2);
    const double x = 0.3;
    const double y = std::exp(2 * x) / 2;
    CHECK(reference_volume_cumulative(m, x) == doctest::Approx(y * y).epsilon(1e-14));
    const double h = 1e-5;
    const double fd = (reference_volume_cumulative(m, x + h) - reference_volume_cumulative(m, x - h)) / (2 * h);
    CHECK(reference_volume_density(m, x) == doctest::Approx(fd).epsilon(1e-8));
    CHECK_THROWS(reference_volume_density(GeometryModel(2, {1.0, -1.0}), 0.0));
}

TEST_CASE("potential: Gaussian golden values") {
    for (int n = 1; n <= 3; ++n) {
        const GeometryModel m(n);
        const auto g = gaussian(m);
        for (double x : {-8.0, -2.0, 0.0, 1.0, 4.0}) {
            const Jet j = g.omega_jet(x);
            CHECK(j.v == doctest::Approx(std::exp(2 * x) / 2 - 2.0 * n * x).epsilon(1e-14));
            CHECK(j.d1 == doctest::Approx(std::exp(2 * x) - 2.0 * n).epsilon(1e-14));
        }
        const MomentProfile mp = moment_profile(g);
        CHECK(mp.lambda0 == doctest::Approx(-n));
        for (std::size_t i = 0; i < g.size(); i += 97)
            CHECK(mp.h_values[i] == doctest::Approx(std::exp(2 * g.x(i)) / 2 - n).epsilon(1e-13));
        CHECK(mp.epsilon > 0.0);
        CHECK(check_class(g, 0.25, 4.0).ok);
    }
    const auto g1 = gaussian(GeometryModel(1));
    CHECK(g1.omega_jet(1.0).v == doctest::Approx(1.6945280494653251).epsilon(1e-14));
}

TEST_CASE("potential: moment profile satisfies the quadratic envelope") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> amp(0.0, 0.5), ctr(-2.0, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const GeometryModel m(1 + trial % 3);
        const auto p = RadialPotential::from_spec(m, bumped(amp(rng), ctr(rng)));
        const MomentProfile mp = moment_profile(p);
        const double e = mp.epsilon;
        REQUIRE(e > 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.x(i) < 0.0) continue;
            const double r2 = std::exp(2 * p.x(i));
            CHECK(e * r2 - 1.0 / e <= mp.h_values[i]);
            CHECK(mp.h_values[i] <= r2 / e);
        }
    }
}

TEST_CASE("potential: sampled construction and validation") {
    const GeometryModel m(2);
    const auto g = gaussian(m);
    std::vector<double> grid(g.grid().begin(), g.grid().end());
    std::vector<double> omega(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) omega[i] = g.phi_omega(i);
    const auto s = RadialPotential::from_omega_samples(m, grid, omega, {});
    for (std::size_t i = 0; i < grid.size(); i += 31) {
        CHECK(s.slope_upsilon(i) == doctest::Approx(g.slope_upsilon(i)).epsilon(1e-6));
    }
    CHECK(s.upsilon_jet(0.123).v == doctest::Approx(g.upsilon_jet(0.123).v).epsilon(1e-10));

    auto bad = omega;
    bad[2000] += 1.0;
    CHECK_THROWS_WITH(RadialPotential::from_omega_samples(m, grid, bad, {}), doctest::Contains("convex"));

    auto dup = grid;
    dup[10] = dup[9];
    CHECK_THROWS(RadialPotential::from_omega_samples(m, dup, omega, {}));
    std::vector<double> tiny(grid.begin(), grid.begin() + 5);
    CHECK_THROWS(RadialPotential::from_omega_samples(m, tiny, std::vector<double>(5, 0.0), {}));
    auto nan = omega;
    nan[3] = std::nan("");
    CHECK_THROWS(RadialPotential::from_omega_samples(m, grid, nan, {}));
}

TEST_CASE("potential: pullback by the soliton flow") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> sd(-1.0, 1.0), xd(-6.0, 3.0);
    for (int n = 1; n <= 3; ++n) {
        const GeometryModel m(n);
        const auto p = RadialPotential::from_spec(m, bumped(0.3, 0.5));
        for (int k = 0; k < 6; ++k) {
            const double s = sd(rng);
            const auto q = pullback_flow(p, s);
            const double x = xd(rng);
            CHECK(q.omega_jet(x).v == doctest::Approx(p.omega_jet(x - s / 2).v).epsilon(1e-12));
        }
        // composition law
        const auto a = pullback_flow(pullback_flow(p, 0.3), 0.4);
        const auto b = pullback_flow(p, 0.7);
        CHECK(a.omega_jet(0.2).v == doctest::Approx(b.omega_jet(0.2).v).epsilon(1e-12));
        CHECK(pullback_flow(p, 0.0).omega_jet(1.1).v == doctest::Approx(p.omega_jet(1.1).v).epsilon(1e-15));
    }
}

TEST_CASE("potential: adding functions") {
    const GeometryModel m(1);
    const auto g = gaussian(m);
    const ProfileFn zero = [](double) { return Jet{}; };
    const auto same = add(g, zero);
    CHECK(same.omega_jet(0.7).v == doctest::Approx(g.omega_jet(0.7).v));

    const ProfileFn cancel = [&](double x) { return -g.omega_jet(x); };
    CHECK_THROWS(add(g, cancel));

    const ProfileFn bump = [](double x) { return 0.2 * tanh(Jet::variable(x)); };
    const auto b = add(g, bump);
    CHECK(b.upsilon_jet(0.0).d1 == doctest::Approx(g.upsilon_jet(0.0).d1 + 0.2));

    const ProfileFn concave = [](double x) { return -0.6 * Jet::variable(x) * Jet::variable(x); };
    CHECK_THROWS_WITH(add(g, concave), doctest::Contains("plurisubharmonic"));
}

TEST_CASE("potential: class membership") {
    const GeometryModel m(1);
    PotentialSpec steep;
    steep.cone = 10.0;
    const auto p = RadialPotential::from_spec(m, steep);
    const auto c = check_class(p, 0.25, 4.0);
    CHECK_FALSE(c.ok);
    REQUIRE(c.witness.has_value());
    CHECK(check_class(p, 0.1, 10.0).ok);
}

TEST_CASE("potential: slope inverse") {
    const auto g = gaussian(GeometryModel(2));
    const ProfileFn f = g.upsilon_fn();
    for (double s : {1e-3, 0.5, 1.0, 7.0, 100.0}) CHECK(slope_inverse(f, s, 0.0) == doctest::Approx(0.5 * std::log(s)));
    CHECK(std::isinf(slope_inverse(f, 0.0)));
    PotentialSpec k;
    k.terms.push_back({ProfileTerm::Kind::Kink, 1.0, 0.0, 1.0});
    const auto kinked = RadialPotential::from_spec(GeometryModel(1), k);
    const double mid = 0.5 * (kinked.upsilon_jet(-1e-9).d1 + kinked.upsilon_jet(1e-9).d1);
    CHECK(std::abs(slope_inverse(kinked.upsilon_fn(), mid, 1.0)) < 1e-12);
}

TEST_CASE("potential: decreasing smooth approximation") {
    const GeometryModel m(1);
    PotentialSpec k;
    k.terms.push_back({ProfileTerm::Kind::Kink, 0.5, 0.0, 1.0});
    const auto rough = RadialPotential::from_spec(m, k);
    std::vector<RadialPotential> seq;
    for (int nu = 0; nu < 5; ++nu) seq.push_back(smooth_decreasing_approx(rough, nu));
    for (double x : {-4.0, -1.0, -0.1, 0.0, 0.2, 1.0, 2.5}) {
        for (int nu = 0; nu + 1 < 5; ++nu) CHECK(seq[nu].omega_jet(x).v >= seq[nu + 1].omega_jet(x).v);
        CHECK(seq[4].omega_jet(x).v >= rough.omega_jet(x).v);
        CHECK(seq[4].omega_jet(x).v - rough.omega_jet(x).v < 0.05 * (1 + std::exp(2 * x)));
    }
    for (const auto& s : seq) {
        CHECK(is_discretely_convex(s.grid(), s.upsilon_values()));
        const auto b = s.class_bounds();
        CHECK(check_class(s, b.a, b.b).ok);
    }
    CHECK(smoothing_width(0) == doctest::Approx(0.25));
    CHECK(smoothing_width(3) == doctest::Approx(0.25 / 8));
}
