#pragma once

#include "radsol/potential.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radsol {

enum class SlabKind { Geodesic, Translation, AffineLine, Barrier, Sampled };

std::string to_string(SlabKind k);

struct BarrierParams {
    double A = 0.0;       ///< exponential damping e^{-A t(1-t)} of the cone part
    double B = 1.0;       ///< coefficient of 2B t(t-1)
    double D = 1.0;       ///< size of the compactly supported convexity correction
    double R = 2.0;       ///< outer radius of the correction plateau
    double L = 1.0;       ///< roll-off length beyond R
    double psi0 = 0.0;    ///< log cone coefficient of the t = 0 endpoint
    double psi1 = 0.0;    ///< log cone coefficient of the t = 1 endpoint
    int attempts = 0;
};

/// Samples Phi(t_i, x_j) of a path of radial potentials, row-major in t.
/// Values are stored in the Upsilon trivialization; exact first and second
/// x-derivatives and the first t-derivative fields are optional.
struct GeodesicSlab {
    int n = 1;
    SlabKind kind = SlabKind::Sampled;
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> values;
    std::vector<double> phi_x;
    std::vector<double> phi_xx;
    std::vector<double> phi_t;
    std::vector<double> phi_tx;
    ClassBounds bounds;
    /// max over x of |Phi_t| / (1 + e^{2x}) at the endpoints.
    double lipschitz = 0.0;
    std::optional<BarrierParams> barrier;

    std::size_t nt() const { return t_grid.size(); }
    std::size_t nx() const { return x_grid.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * x_grid.size() + j; }
    double upsilon(std::size_t i, std::size_t j) const { return values[index(i, j)]; }
    double omega(std::size_t i, std::size_t j) const { return values[index(i, j)] - 2.0 * n * x_grid[j]; }
    bool has_x_derivatives() const { return !phi_x.empty() && !phi_xx.empty(); }
    bool has_t_derivatives() const { return !phi_t.empty(); }

    /// Time slice i as a radial potential (Hermite data from the stored fields,
    /// finite differences otherwise).
    RadialPotential slice(std::size_t i) const;
    /// Phi_t(t_i, x) at an arbitrary x by cubic interpolation of the stored field.
    double phi_t_at(std::size_t i, double x) const;
};

std::vector<double> default_t_grid();   ///< 65 uniform points on [0, 1]
std::vector<double> default_x_grid();   ///< 2049 uniform points on [-8, 4]

struct DualProfile {
    std::vector<double> slopes;
    std::vector<double> values;
};

/// phi*(p) = sup_x (p x - phi_Omega(x)) over the grid samples; p must lie in
/// the open slope range of phi_Omega on the grid.
DualProfile legendre_dual(const RadialPotential& phi, std::span<const double> slopes);

/// Psh geodesic between two class potentials: Legendre transform in x of the
/// linear interpolation of the duals, evaluated pointwise by Newton in log-slope.
GeodesicSlab geodesic(const RadialPotential& phi0, const RadialPotential& phi1,
                      std::vector<double> t_grid = default_t_grid(), std::vector<double> x_grid = default_x_grid());

/// Phi_t(x) = phi_Omega(x - t c/2): the pullback path along the soliton flow.
GeodesicSlab translation_geodesic(const RadialPotential& phi, double c,
                                  std::vector<double> t_grid = default_t_grid(),
                                  std::vector<double> x_grid = default_x_grid());

/// (1 - t) phi0 + t phi1.
GeodesicSlab affine_line(const RadialPotential& phi0, const RadialPotential& phi1,
                         std::vector<double> t_grid = default_t_grid(), std::vector<double> x_grid = default_x_grid());

/// Explicit subgeodesic with the given endpoints; parameters are increased
/// until the discrete (t, x) Hessian is positive semidefinite on the grid.
GeodesicSlab barrier(const RadialPotential& phi0, const RadialPotential& phi1,
                     std::vector<double> t_grid = default_t_grid(), std::vector<double> x_grid = default_x_grid());

/// Barrier for fixed parameters, without the search.
GeodesicSlab barrier_with(const RadialPotential& phi0, const RadialPotential& phi1, const BarrierParams& params,
                          std::vector<double> t_grid, std::vector<double> x_grid);

struct HmaReport {
    double residual = 0.0;        ///< max over interior points of the normalized defect
    double min_eigenvalue = 0.0;  ///< min normalized eigenvalue
    double max_det = 0.0;
    double min_det = 0.0;
    double worst_t = 0.0;
    double worst_x = 0.0;
    bool from_derivative_fields = false;
};

/// Normalized homogeneous Monge–Ampère defect of the (t, x) Hessian: with
/// H^ = H / tr H, max(|det H^|, max(0, -lambda_min(H^))).
HmaReport hma_residual(const GeodesicSlab& slab);

struct SandwichReport {
    bool ok = true;
    bool lower_ok = true;
    bool upper_ok = true;
    double worst_violation = 0.0;
    double worst_t = 0.0;
    double worst_x = 0.0;
    double max_gap_to_chord = 0.0;
};

/// barrier <= Phi <= (1 - t) Phi_0 + t Phi_1 on the grid, to tolerance tol.
SandwichReport sandwich_check(const GeodesicSlab& geodesic, const GeodesicSlab& barrier, double tol = 1e-8);

/// Pointwise max of two slabs on identical grids (values only).
GeodesicSlab pointwise_max(const GeodesicSlab& a, const GeodesicSlab& b);

/// max over x of |Phi_t| / (1 + e^{2x}) at t = 0 and t = 1.
double lipschitz_certificate(const GeodesicSlab& slab);

}  // namespace radsol
