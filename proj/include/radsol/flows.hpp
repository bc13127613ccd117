#pragma once

#include "radsol/geodesics.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace radsol {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Time-dependent vector field V(t, x) on R^d, integrable in t and Lipschitz in x.
struct TimeField {
    int dim = 1;
    std::function<Vec(double, const Vec&)> eval;
    /// Spatial derivative; finite differences are used when empty.
    std::function<Mat(double, const Vec&)> jacobian;
    /// l(t) >= Lipschitz constant of V(t, .) on the domain.
    std::function<double(double)> lipschitz;
    /// Times where V may jump; integration never steps across them.
    std::vector<double> breakpoints;
    /// Trajectories leaving the ball |x| <= domain_radius are truncated.
    double domain_radius = std::numeric_limits<double>::infinity();
};

struct FlowOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double initial_step = 1e-3;
    int max_steps = 1000000;
    /// Extra times at which the state is recorded (integration stops there exactly).
    std::vector<double> output_times;
};

struct FlowResult {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Mat> jacobians;
    bool exited = false;
    std::optional<double> exit_time;
    int accepted_steps = 0;
    int rejected_steps = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
    /// max over accepted steps of |u(t+h) - u(t) - int_t^{t+h} V(s, u(s)) ds|, with the
    /// integral taken by 5-point Gauss on the Hermite dense output.
    double integral_residual = 0.0;

    const Vec& final_state() const { return states.back(); }
    /// State at a recorded time (exact match required).
    const Vec& state_at(double t) const;
};

/// Solves u(t) = x0 + int_0^t V(s, u(s)) ds on [0, T] with an adaptive
/// Dormand–Prince 5(4) pair, restarting at every breakpoint.
FlowResult solve_flow(const TimeField& field, const Vec& x0, double T, const FlowOptions& opt = {});

/// Co-integrates d/dt J = DV(t, u) J, J(0) = I, with the trajectory.
FlowResult solve_variational(const TimeField& field, const Vec& x0, double T, const FlowOptions& opt = {});

/// Xi(t) = int_0^t l(s) ds, split at the field's breakpoints.
double lipschitz_integral(const TimeField& field, double t);

/// Largest ratio |V(t,x) - V(t,y)| / (l(t) |x - y|) over random pairs in the box [-r, r]^d.
double lipschitz_spot_check(const TimeField& field, double T, double r, int samples, std::uint32_t seed = 1);

struct GronwallReport {
    bool ok = true;
    std::vector<double> times;
    std::vector<double> distance;   ///< |u_x(t) - u_y(t)|
    std::vector<double> bound;      ///< e^{Xi(t)} |x - y|
    double worst_ratio = 0.0;       ///< max distance / bound
    std::optional<double> failing_time;
};

/// Checks |u_x(t) - u_y(t)| <= e^{Xi(t)} |x - y| at `samples` uniform times.
GronwallReport gronwall_certificate(const TimeField& field, const Vec& x, const Vec& y, double T, int samples = 65,
                                    const FlowOptions& opt = {});

/// Monomial c z^alpha d/dz_component of a holomorphic polynomial field on C^n.
struct Monomial {
    int component = 0;
    std::complex<double> coefficient;
    std::vector<int> exponents;
};

struct PolynomialField {
    int n = 1;
    std::vector<Monomial> terms;

    std::vector<std::complex<double>> eval(const std::vector<std::complex<double>>& z) const;
    /// Complex Jacobian dH_i/dz_j.
    Eigen::MatrixXcd jacobian(const std::vector<std::complex<double>>& z) const;
    /// Minimal total degree over the terms (0 for the zero field).
    int vanishing_order() const;
};

struct ConjugationExperiment {
    std::vector<double> weights;     ///< X = sum a_i z_i d/dz_i, Exp(tX)(z)_i = e^{a_i t} z_i
    PolynomialField perturbation;    ///< H
    double delta = 0.3;
    std::vector<double> ladder{1.0, 2.0, 4.0, 8.0};
    std::vector<double> conjugacy_times{0.1, 0.5, 1.0};
    int sample_count = 16;
    std::uint32_t seed = 20240611;
};

struct ConjugationReport {
    std::string convention;
    double delta = 0.0;               ///< radius actually used (after at most one shrink)
    bool shrunk = false;
    std::vector<double> ladder;
    std::vector<double> cauchy;       ///< sup_samples |eta_{t_{k+1}} - eta_{t_k}|
    std::optional<double> rate;       ///< least-squares slope of log cauchy against t_k
    bool converging = true;
    double conjugacy_residual = 0.0;  ///< max over s of sup |eta o Exp(s(X-H)) - Exp(sX) o eta|
    double composition_gap = 0.0;     ///< |flow of H_t - Exp(tX) o Exp(-t(X-H))| at t_max
    double cr_residual = 0.0;         ///< Cauchy–Riemann defect of the real Jacobian of eta
    int vanishing_order = 0;
};

ConjugationReport conjugation_limit(const ConjugationExperiment& exp);

struct ReebPoint {
    std::string classification;       ///< "fixed", "origin", "bounded" or "diverges"
    std::vector<int> divergent_coordinates;
    double growth_rate = 0.0;         ///< max -a_i over nonzero coordinates
};

struct ReebReport {
    std::string convention;
    bool reeb = false;
    std::vector<ReebPoint> points;
};

/// Forward limits of Exp(t J xi)(z)_i = e^{-a_i t} z_i for the diagonal field.
ReebReport reeb_forward_limit(const std::vector<double>& weights,
                              const std::vector<std::vector<std::complex<double>>>& points);

struct PullbackReport {
    bool ok = true;
    double curvature_residual = 0.0;  ///< max relative change of Phi_t''(x + tc/2) against t = 0
    double equation_residual = 0.0;   ///< max relative defect of d_x Phi_t-dot = -(c/2) Phi_t''
    double worst_t = 0.0;
    double worst_x = 0.0;
};

/// Constancy of the pulled-back curvature along the translation geodesic of speed c.
PullbackReport pullback_constancy(const GeodesicSlab& slab, double c, double tol = 1e-6);

}  // namespace radsol
