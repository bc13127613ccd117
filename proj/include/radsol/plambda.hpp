#pragma once

#include "radsol/potential.hpp"

namespace radsol {

/// x_lambda = sup{x : h(x) <= lambda}; +inf when h stays below lambda.
/// Throws when lambda <= lambda0 or when an exponential right tail would be
/// needed beyond its validity window.
double contact_boundary(const RadialPotential& phi, double lambda);

struct PLambdaResult {
    RadialPotential potential;
    double lambda = 0.0;
    /// Contact set is (-inf, contact_boundary]; +inf means P_lambda phi = phi.
    double contact_boundary = 0.0;
    /// R(lambda): the contact set contains the Euclidean ball of this radius.
    double support_radius = 0.0;
};

/// Largest psh minorant of phi whose moment image stays in h <= lambda.
PLambdaResult p_lambda(const RadialPotential& phi, double lambda);

/// Radius R_0 such that every class-(a,b) potential has contact set containing
/// {|z| <= R_0} at lambda = 1.
double support_radius_base(ClassBounds bounds, int n);

/// R(lambda) = R_0 sqrt(max(lambda, 1)).
double support_radius(ClassBounds bounds, int n, double lambda);

/// Tail validity window beyond the last grid point for exponential right tails.
inline constexpr double kRightTailValidity = 6.0;

}  // namespace radsol
