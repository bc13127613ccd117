#pragma once

#include "radsol/geodesics.hpp"
#include "radsol/potential.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace radsol {

struct FunctionalValue {
    double value = 0.0;
    double max_integrand = 0.0;   ///< largest |inner integral| over the time nodes, or |integrand| for F
    double tail_estimate = 0.0;   ///< size of the neglected truncation tail
    int t_points = 0;
};

/// E_X(phi1, phi0) = int_0^1 int (phi1 - phi0) dMA_X(t phi1 + (1 - t) phi0) dt,
/// with Simpson's rule on t_points (odd) nodes.
FunctionalValue energy_ex(const RadialPotential& phi1, const RadialPotential& phi0, int t_points = 33);

using SliceFn = std::function<ProfileFn(double)>;
using VelocityFn = std::function<std::function<double(double)>(double)>;

/// int_0^1 int d/dt phi_t dMA_X(phi_t) dt along a user path; the path must
/// start at phi0, end at phi1 and carry a consistent time derivative.
FunctionalValue energy_along_path(const RadialPotential& phi0, const RadialPotential& phi1, const SliceFn& path,
                                  const VelocityFn& velocity, int t_points = 33, std::vector<double> kinks = {});

/// F(phi) = -log int e^{-phi_Upsilon} dV.
FunctionalValue f_functional(const RadialPotential& phi);
FunctionalValue f_functional(const ProfileFn& upsilon, int n, std::span<const double> kinks = {});

/// D(phi1, phi0) = E_X(phi1, phi0) / vol_X - F(phi1).
FunctionalValue ding(const RadialPotential& phi1, const RadialPotential& phi0, int t_points = 33);

struct EndpointDerivatives {
    double energy_right_at_0 = 0.0;   ///< Richardson one-sided quotient of E_X at t = 0
    double energy_ref_at_0 = 0.0;     ///< int dPhi/dt dMA_X(Phi_0)
    double energy_left_at_1 = 0.0;
    double energy_ref_at_1 = 0.0;
    double f_right_at_0 = 0.0;
    double f_ref_at_0 = 0.0;          ///< int dPhi/dt e^{-Phi_0} dV / int e^{-Phi_0} dV
    double f_left_at_1 = 0.0;
    double f_ref_at_1 = 0.0;
};

/// One-sided difference quotients at offsets 1/64, 1/32, 1/16 with Richardson
/// extrapolation, against the integrals of the time-derivative field.
EndpointDerivatives endpoint_derivatives(const GeodesicSlab& slab, int t_points = 33);

struct ShrinkerReport {
    double residual = 0.0;   ///< max deviation of log(e^{-h} MA) - log(e^{-phi} dV) from its median
    double offset = 0.0;     ///< the median (log of the proportionality constant)
    std::size_t used = 0;
    std::size_t excluded = 0;  ///< grid points where MA vanishes
};

ShrinkerReport shrinker_residual(const RadialPotential& phi);

enum class Functional { EnergyX, F, Ding };

struct ConvexityProfile {
    std::vector<double> t;
    std::vector<double> values;
    std::vector<double> second_differences;   ///< raw (undivided) second differences
    double min_second_difference = 0.0;
};

/// Functional along the time slices of a slab (every `stride`-th row, plus the last).
/// EnergyX is measured from the t = 0 slice.
ConvexityProfile convexity_profile(const GeodesicSlab& slab, Functional which, std::size_t stride = 1,
                                   int t_points = 17);

}  // namespace radsol
