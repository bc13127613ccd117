#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radsol/geodesics.hpp"

#include <cmath>

using namespace radsol;

namespace {

RadialPotential bumped(int n) {
    PotentialSpec s;
    s.terms.push_back({ProfileTerm::Kind::Softplus, 0.3, 0.2, 0.8});
    return RadialPotential::from_spec(GeometryModel(n), s);
}

double max_abs_diff(const GeodesicSlab& a, const GeodesicSlab& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

}  // namespace

TEST_CASE("geodesics: Legendre dual of the Gaussian") {
    const auto g = gaussian(GeometryModel(1));
    const std::vector<double> slopes{-1.5, -1.0, 0.0, 2.0, 50.0};
    const DualProfile d = legendre_dual(g, slopes);
    for (std::size_t k = 0; k < slopes.size(); ++k) {
        const double q = slopes[k] + 2.0;
        const double exact = q * (0.5 * std::log(q) - 0.5);
        CHECK(d.values[k] == doctest::Approx(exact).epsilon(1e-5));
        CHECK(d.values[k] <= exact + 1e-12);
    }
    const std::vector<double> out_of_range{-2.5};
    CHECK_THROWS(legendre_dual(g, out_of_range));
    const std::vector<double> unsorted{1.0, 0.0};
    CHECK_THROWS(legendre_dual(g, unsorted));
}

TEST_CASE("geodesics: translation geodesic from the Legendre construction") {
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        const auto t_grid = uniform_grid(0.0, 1.0, 17);
        const auto x_grid = uniform_grid(-8.0, 4.0, 513);
        const auto exact = translation_geodesic(g, 1.0, t_grid, x_grid);
        const auto built = geodesic(g, pullback_flow(g, 1.0), t_grid, x_grid);
        CHECK(max_abs_diff(exact, built) < 1e-9);
        for (std::size_t k = 0; k < exact.values.size(); k += 101) {
            CHECK(built.phi_t[k] == doctest::Approx(exact.phi_t[k]).epsilon(1e-8));
            CHECK(built.phi_xx[k] == doctest::Approx(exact.phi_xx[k]).epsilon(1e-8));
        }
    }
}

TEST_CASE("geodesics: equal endpoints give the constant path") {
    const auto p = bumped(2);
    const auto s = geodesic(p, p, uniform_grid(0, 1, 9), uniform_grid(-8, 4, 257));
    for (std::size_t i = 0; i < s.nt(); ++i)
        for (std::size_t j = 0; j < s.nx(); ++j) {
            CHECK(s.upsilon(i, j) == doctest::Approx(s.upsilon(0, j)).epsilon(1e-13));
            CHECK(std::abs(s.phi_t[s.index(i, j)]) < 1e-10);
        }
}

TEST_CASE("geodesics: homogeneous Monge-Ampere residual") {
    const auto g = gaussian(GeometryModel(1));
    const auto coarse = translation_geodesic(g, 1.0);
    const auto fine = translation_geodesic(g, 1.0, uniform_grid(0, 1, 129), uniform_grid(-8, 4, 4097));
    const HmaReport rc = hma_residual(coarse);
    const HmaReport rf = hma_residual(fine);
    CHECK(rc.residual <= 1e-5);
    CHECK(rf.residual <= 0.5 * rc.residual);

    const auto line = affine_line(g, pullback_flow(g, 1.0));
    const HmaReport rl = hma_residual(line);
    CHECK(rl.min_det < -1e-3);
    CHECK(rl.residual > 1e-3);

    GeodesicSlab too_short = coarse;
    too_short.t_grid = uniform_grid(0, 1, 5);
    CHECK_THROWS(hma_residual(too_short));
}

TEST_CASE("geodesics: barrier subgeodesic and sandwich") {
    for (int n = 1; n <= 2; ++n) {
        const auto g = gaussian(GeometryModel(n));
        for (const auto& other : {pullback_flow(g, 0.5), bumped(n)}) {
            const auto geo = geodesic(g, other);
            const auto bar = barrier(g, other);
            REQUIRE(bar.barrier.has_value());
            const HmaReport hb = hma_residual(bar);
            CHECK(hb.min_eigenvalue >= -1e-8);
            for (std::size_t k = 0; k < bar.values.size(); ++k) {
                CHECK(bar.phi_xx[k] >= 0.0);
                if (bar.phi_xx[k] < 0.0) break;
            }
            const SandwichReport sw = sandwich_check(geo, bar);
            CHECK(sw.ok);
            CHECK(sw.max_gap_to_chord > 0.0);
            const auto env = pointwise_max(geo, bar);
            CHECK(max_abs_diff(env, geo) <= 1e-6);

            GeodesicSlab raised = bar;
            const std::size_t k = raised.index(raised.nt() / 2, raised.nx() / 2);
            raised.values[k] = geo.values[k] + 1e-6;
            const SandwichReport bad = sandwich_check(geo, raised);
            CHECK_FALSE(bad.ok);
            CHECK_FALSE(bad.lower_ok);
            CHECK(bad.worst_t == doctest::Approx(0.5));

            CHECK(geo.lipschitz > 0.0);
            CHECK(std::isfinite(bar.lipschitz));
        }
    }
}

TEST_CASE("geodesics: slices and validation") {
    const auto g = gaussian(GeometryModel(2));
    const auto s = translation_geodesic(g, 0.8, uniform_grid(0, 1, 9), uniform_grid(-8, 4, 257));
    const auto mid = s.slice(4);
    CHECK(mid.omega_jet(0.3).v == doctest::Approx(g.omega_jet(0.3 - 0.2).v).epsilon(1e-8));
    CHECK(s.phi_t_at(4, 0.37) == doctest::Approx(-0.4 * g.upsilon_jet(0.37 - 0.2).d1 + 2 * 0.8).epsilon(1e-6));
    CHECK_THROWS(geodesic(g, g, {0.0, 0.5}, uniform_grid(-8, 4, 257)));
    CHECK_THROWS(geodesic(g, g, {0.1, 0.5, 1.0}, uniform_grid(-8, 4, 257)));
    CHECK_THROWS(geodesic(g, gaussian(GeometryModel(1))));
    PotentialSpec steep;
    steep.cone = 10.0;
    CHECK_THROWS(geodesic(g, RadialPotential::from_spec(GeometryModel(2), steep).with_bounds({0.25, 4.0})));
}
