#pragma once

#include "radsol/plambda.hpp"
#include "radsol/potential.hpp"

#include <functional>
#include <span>
#include <vector>

namespace radsol {

enum class MeasureAxis { X, Lambda };

/// Cumulative distribution of a radial measure sampled at knots.
struct CumulativeMeasure {
    MeasureAxis axis = MeasureAxis::X;
    std::vector<double> knots;
    std::vector<double> cumulative;
    std::vector<double> density;
    double total_mass = 0.0;
    /// Largest monotonicity repair applied to the cumulative samples.
    double max_clamp = 0.0;
};

/// Non-negative combination of indicators 1[lambda0, lambda_k].
struct StepFunction {
    double lambda0 = 0.0;
    std::vector<double> thresholds;
    std::vector<double> coefficients;

    double operator()(double lambda) const;
    /// sup over [lambda0, inf) of |e^{-lambda} - g(lambda)| for staircases built below.
    double sup_gap_to_exp() const;

    /// k uniform steps on [lambda0, lambda0 + span], approximating e^{-lambda} from below.
    static StepFunction lower_staircase(double lambda0, int k, double span = 20.0);
};

/// MA(phi) on the x-axis: N(x) = u(x)^n.
CumulativeMeasure ma_cumulative(const RadialPotential& phi);

struct PLambdaMeasure {
    CumulativeMeasure measure;
    double lambda = 0.0;
    double contact_boundary = 0.0;
    double total_mass = 0.0;
};

/// MA(P_lambda phi): the cumulative of phi truncated at the contact boundary, with
/// the atom of the affine tail at x_lambda.
PLambdaMeasure ma_plambda(const RadialPotential& phi, double lambda);

/// Default lambda grid: 400 uniform points on [lambda0 + 1e-3, lambda0 + 20].
std::vector<double> default_lambda_grid(int n);

/// Duistermaat–Heckman measure nu(lambda) = total mass of MA(P_lambda phi),
/// evaluated by contact search on the potential.
CumulativeMeasure dh_measure(const RadialPotential& phi, std::span<const double> lambdas);

/// Same measure, computed independently as the pushforward of MA(phi) under h,
/// using only the sampled arrays (inverse Hermite interpolation of h in x).
CumulativeMeasure dh_measure_pushforward(const RadialPotential& phi, std::span<const double> lambdas);

/// sum_k alpha_k MA(P_{lambda_k} phi) on the x-axis.
CumulativeMeasure ma_weighted(const RadialPotential& phi, const StepFunction& g);

/// MA_X(phi) = e^{-h} MA(phi) on the x-axis; tails use incomplete gamma closed forms.
CumulativeMeasure ma_x(const RadialPotential& phi);

/// int_{|z| >= R} |z|^{2k} dMA_X(phi), R >= 1.
double tail_mass(const RadialPotential& phi, double R, int k = 0);

/// int |z|^{2k} dMA_X(phi) over all of C^n.
double weighted_moment(const RadialPotential& phi, int k);

/// vol_X = int e^{-lambda} dnu_DH for the reference (Gaussian) potential; cached per n.
double weighted_volume(const GeometryModel& model);

struct MaXQuadrature {
    double upper_u = 0.0;   ///< truncation point in the moment coordinate
    int panels = 48;
};

/// int f(x) dMA_X(psi) for a convex profile psi, integrated in the moment
/// coordinate u = psi'/2 with panels split at the images of the kinks.
double integrate_ma_x(const ProfileFn& psi, int n, const std::function<double(double)>& f,
                      std::span<const double> kinks = {}, MaXQuadrature opt = {});

}  // namespace radsol
