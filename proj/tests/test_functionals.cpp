#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "radsol/functionals.hpp"
#include "radsol/measures.hpp"

#include <boost/math/special_functions/factorials.hpp>

#include <cmath>
#include <random>

using namespace radsol;

namespace {

RadialPotential bumped(int n, double amp = 0.3, double center = 0.2) {
    PotentialSpec s;
    s.terms.push_back({ProfileTerm::Kind::Softplus, amp, center, 0.8});
    return RadialPotential::from_spec(GeometryModel(n), s);
}

double log_fact(int n) { return std::log(boost::math::factorial<double>(static_cast<unsigned>(n))); }

}  // namespace

TEST_CASE("functionals: F of the Gaussian and flow invariance") {
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        CHECK(f_functional(g).value == doctest::Approx(-log_fact(n)).epsilon(1e-10));
        for (double s : {-0.7, 0.5, 1.3}) {
            CHECK(f_functional(pullback_flow(g, s)).value == doctest::Approx(-log_fact(n)).epsilon(1e-10));
            const auto b = bumped(n);
            CHECK(f_functional(pullback_flow(b, s)).value == doctest::Approx(f_functional(b).value).epsilon(1e-10));
        }
        PotentialSpec shifted;
        shifted.constant = 0.75;
        const auto c = RadialPotential::from_spec(GeometryModel(n), shifted);
        CHECK(f_functional(c).value == doctest::Approx(f_functional(g).value + 0.75).epsilon(1e-10));
    }
}

TEST_CASE("functionals: E_X identities") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> amp(0.0, 0.4), ctr(-1.0, 1.0);
    for (int n = 1; n <= 3; ++n) {
        const GeometryModel m(n);
        const auto g = gaussian(m);
        const double vol = weighted_volume(m);
        PotentialSpec shifted;
        shifted.constant = 0.4;
        const auto c = RadialPotential::from_spec(m, shifted);
        CHECK(energy_ex(c, g).value == doctest::Approx(0.4 * vol).epsilon(1e-10));
        CHECK(std::abs(energy_ex(g, g).value) < 1e-14);

        // translation along the soliton flow carries zero energy
        CHECK(std::abs(energy_ex(pullback_flow(g, 0.6), g).value) < 1e-5);

        const auto a = bumped(n, amp(rng), ctr(rng));
        const auto b = bumped(n, amp(rng), ctr(rng));
        const double ab = energy_ex(a, b).value, ba = energy_ex(b, a).value;
        CHECK(std::abs(ab + ba) <= 1e-6 * (1 + std::abs(ab)));
        const double ag = energy_ex(a, g).value, bg = energy_ex(b, g).value;
        CHECK(std::abs(ag - (ab + bg)) <= 3e-5);
        // monotone: phi1 >= phi0 implies E_X(phi1, phi0) >= 0
        CHECK(energy_ex(bumped(n, 0.3, 0.0), g).value > 0.0);
    }
    CHECK_THROWS(energy_ex(gaussian(GeometryModel(1)), gaussian(GeometryModel(1)), 4));
    PotentialSpec steep;
    steep.cone = 10.0;
    const auto s = RadialPotential::from_spec(GeometryModel(1), steep).with_bounds({0.25, 4.0});
    CHECK_THROWS_WITH(energy_ex(s, gaussian(GeometryModel(1))), doctest::Contains("class"));
}

TEST_CASE("functionals: energy along a path is path independent") {
    const int n = 2;
    const GeometryModel m(n);
    const auto g = gaussian(m);
    const double c = 0.8;
    const auto end = pullback_flow(bumped(n), c);
    const auto start = bumped(n);
    const SliceFn path = [&](double t) {
        return ProfileFn([&, t](double x) {
            Jet j = start.upsilon_jet(x - 0.5 * t * c);
            j.v += n * t * c;
            return j;
        });
    };
    const VelocityFn vel = [&](double t) {
        return std::function<double(double)>(
            [&, t](double x) { return -0.5 * c * start.upsilon_jet(x - 0.5 * t * c).d1 + n * c; });
    };
    const double along = energy_along_path(start, end, path, vel).value;
    CHECK(std::abs(along - energy_ex(end, start).value) < 1e-5);

    // straight line, and the same line reparametrized by t^2
    const auto other = bumped(n, 0.2, -0.5);
    const SliceFn line = [&](double t) {
        return ProfileFn([&, t](double x) { return t * other.upsilon_jet(x) + (1 - t) * start.upsilon_jet(x); });
    };
    const VelocityFn line_v = [&](double) {
        return std::function<double(double)>(
            [&](double x) { return other.upsilon_jet(x).v - start.upsilon_jet(x).v; });
    };
    const SliceFn square = [&](double t) { return line(t * t); };
    const VelocityFn square_v = [&](double t) {
        return std::function<double(double)>(
            [&, t](double x) { return 2 * t * (other.upsilon_jet(x).v - start.upsilon_jet(x).v); });
    };
    const double direct = energy_ex(other, start).value;
    CHECK(std::abs(energy_along_path(start, other, line, line_v).value - direct) < 1e-8);
    CHECK(std::abs(energy_along_path(start, other, square, square_v).value - direct) < 1e-5);

    const VelocityFn wrong = [&](double) { return std::function<double(double)>([](double) { return 0.0; }); };
    CHECK_THROWS_WITH(energy_along_path(start, end, path, wrong), doctest::Contains("derivative"));
    CHECK_THROWS_WITH(energy_along_path(g, end, path, vel), doctest::Contains("start"));
}

TEST_CASE("functionals: Simpson order in t") {
    const auto g = gaussian(GeometryModel(2));
    const auto p = pullback_flow(g, 0.6);
    // the exact value is zero, so each result is its own error
    const double e17 = std::abs(energy_ex(p, g, 17).value);
    const double e33 = std::abs(energy_ex(p, g, 33).value);
    CHECK(e33 * 8 <= e17);
    CHECK_THROWS(energy_ex(p, g, 7));
}

TEST_CASE("functionals: Ding invariances") {
    const int n = 2;
    const auto g = gaussian(GeometryModel(n));
    const auto b = bumped(n);
    const double base = ding(b, g).value;
    CHECK(std::abs(ding(pullback_flow(b, 0.4), pullback_flow(g, 0.4)).value - base) < 1e-6);
    PotentialSpec s;
    s.terms.push_back({ProfileTerm::Kind::Softplus, 0.3, 0.2, 0.8});
    s.constant = 0.5;
    CHECK(ding(RadialPotential::from_spec(GeometryModel(n), s), g).value == doctest::Approx(base).epsilon(1e-9));
    CHECK(ding(g, g).value == doctest::Approx(-f_functional(g).value).epsilon(1e-12));
}

TEST_CASE("functionals: Ding along the translation geodesic") {
    for (int n = 1; n <= 2; ++n) {
        const auto g = gaussian(GeometryModel(n));
        for (double t : {0.0, 0.25, 1.0}) {
            const double d = ding(pullback_flow(g, t), g).value;
            CHECK(std::abs(d - log_fact(n)) < 1e-4);
        }
    }
}

TEST_CASE("functionals: endpoint derivatives match the velocity integrals") {
    const int n = 1;
    const auto g = gaussian(GeometryModel(n));
    const auto geo = geodesic(g, bumped(n), default_t_grid(), uniform_grid(-8, 4, 1025));
    const EndpointDerivatives d = endpoint_derivatives(geo, 17);
    CHECK(d.energy_right_at_0 == doctest::Approx(d.energy_ref_at_0).epsilon(1e-4));
    CHECK(d.energy_left_at_1 == doctest::Approx(d.energy_ref_at_1).epsilon(1e-4));
    CHECK(std::abs(d.f_right_at_0 - d.f_ref_at_0) < 1e-4);
    CHECK(std::abs(d.f_left_at_1 - d.f_ref_at_1) < 1e-4);
    // E_X is affine along geodesics, so both endpoint slopes agree
    CHECK(d.energy_ref_at_0 == doctest::Approx(d.energy_ref_at_1).epsilon(1e-4));
}

TEST_CASE("functionals: shrinker criterion") {
    for (int n = 1; n <= 3; ++n) {
        const auto g = gaussian(GeometryModel(n));
        const auto r = shrinker_residual(g);
        CHECK(r.residual < 1e-9);
        CHECK(r.offset == doctest::Approx(n));
        CHECK(shrinker_residual(pullback_flow(g, 0.7)).residual < 1e-9);
        PotentialSpec s;
        s.terms.push_back({ProfileTerm::Kind::Tanh, 0.1, 0.0, 1.0});
        CHECK(shrinker_residual(RadialPotential::from_spec(GeometryModel(n), s)).residual > 1e-3);
    }
}

TEST_CASE("functionals: convexity along geodesics and affine lines") {
    const int n = 1;
    const auto g = gaussian(GeometryModel(n));
    const auto b = bumped(n);
    const auto x_grid = uniform_grid(-8, 4, 1025);
    const auto geo = geodesic(g, b, default_t_grid(), x_grid);
    const auto e = convexity_profile(geo, Functional::EnergyX, 8);
    for (double d : e.second_differences) CHECK(std::abs(d) < 1e-6);
    const auto f = convexity_profile(geo, Functional::F, 8);
    CHECK(f.min_second_difference >= -1e-6);
    const auto line = affine_line(g, b, default_t_grid(), x_grid);
    const auto el = convexity_profile(line, Functional::EnergyX, 8);
    for (double d : el.second_differences) CHECK(d <= 1e-9);
    CHECK(el.min_second_difference < 0.0);
}
