#pragma once

#include "radsol/geometry.hpp"
#include "radsol/jet.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radsol {

/// Jet of a radial profile in x = log r, Upsilon trivialization.
using ProfileFn = std::function<Jet(double)>;

std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

/// Default potential grid: 4097 uniform points on [-8, 4].
std::vector<double> default_grid();

struct ClassBounds {
    double a = 0.25;
    double b = 4.0;
    friend bool operator==(const ClassBounds&, const ClassBounds&) = default;
};

/// One additive term of a closed-form profile, as a function of y = x - shift/2.
struct ProfileTerm {
    enum class Kind { Softplus, Tanh, Kink, Exp };
    Kind kind = Kind::Softplus;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    Jet eval(Jet y) const;
    friend bool operator==(const ProfileTerm&, const ProfileTerm&) = default;
};

/// Closed-form profile
///   phi_Upsilon(x) = (cone/2) e^{2y} + constant + sum terms(y) + n*shift,  y = x - shift/2.
/// shift = s is the pullback by the flow of X/2 for time s.
struct PotentialSpec {
    double cone = 1.0;
    double shift = 0.0;
    double constant = 0.0;
    std::vector<ProfileTerm> terms;

    Jet upsilon(int n, double x) const;
    std::vector<double> kinks() const;
    /// Leading coefficient A of the right tail (A/2) e^{2x}.
    double cone_coefficient() const;

    static PotentialSpec gaussian() { return {}; }
    friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

enum class RightTail { Exponential, Affine };

/// Convex radial profile of an S^1-invariant metric on the anticanonical bundle.
///
/// Samples are stored in the Upsilon trivialization (value, slope, curvature);
/// phi_Omega = phi_Upsilon - 2n x. Off-grid evaluation uses the closed-form
/// source when present, otherwise cubic Hermite interpolation inside the grid
/// and the analytic tail models outside it: c + k e^{2x} on the left, and on
/// the right either the same exponential model or an affine continuation.
class RadialPotential {
public:
    static RadialPotential from_spec(const GeometryModel& model, const PotentialSpec& spec,
                                     std::vector<double> grid = default_grid(), ClassBounds bounds = {});
    static RadialPotential from_function(const GeometryModel& model, ProfileFn upsilon, std::vector<double> grid,
                                         ClassBounds bounds, std::vector<double> kinks = {},
                                         RightTail tail = RightTail::Exponential);
    /// Samples of phi_Omega only; derivatives by finite differences.
    static RadialPotential from_omega_samples(const GeometryModel& model, std::vector<double> grid,
                                              std::vector<double> omega_values, ClassBounds bounds);
    /// Fully specified samples (Upsilon trivialization).
    static RadialPotential from_jets(const GeometryModel& model, std::vector<double> grid, std::vector<double> values,
                                     std::vector<double> slopes, std::vector<double> curvatures, ClassBounds bounds,
                                     RightTail tail = RightTail::Exponential);

    const GeometryModel& model() const { return model_; }
    int n() const { return model_.n(); }
    std::span<const double> grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    double x(std::size_t i) const { return grid_[i]; }

    double phi_upsilon(std::size_t i) const { return values_[i]; }
    double phi_omega(std::size_t i) const { return values_[i] - 2.0 * n() * grid_[i]; }
    double slope_upsilon(std::size_t i) const { return slopes_[i]; }
    double slope_omega(std::size_t i) const { return slopes_[i] - 2.0 * n(); }
    double curvature(std::size_t i) const { return curvatures_[i]; }
    /// Moment coordinate u = phi_Upsilon'/2 = h + n.
    double u(std::size_t i) const { return 0.5 * slopes_[i]; }
    double h(std::size_t i) const { return 0.5 * slopes_[i] - n(); }

    std::span<const double> upsilon_values() const { return values_; }
    std::span<const double> upsilon_slopes() const { return slopes_; }
    std::span<const double> curvatures() const { return curvatures_; }

    Jet upsilon_jet(double x) const;
    Jet omega_jet(double x) const;
    ProfileFn upsilon_fn() const;

    double lambda0() const { return -static_cast<double>(n()); }
    double left_slope_limit() const { return 2.0 * lambda0(); }
    double cone_coefficient() const { return cone_coefficient_; }
    ClassBounds class_bounds() const { return bounds_; }
    RightTail right_tail() const { return tail_; }
    const std::optional<PotentialSpec>& spec() const { return spec_; }
    bool has_source() const { return static_cast<bool>(source_); }
    const std::vector<double>& kinks() const { return kinks_; }
    const std::optional<std::string>& derivative_warning() const { return warning_; }

    RadialPotential with_bounds(ClassBounds b) const;

private:
    RadialPotential(GeometryModel model) : model_(std::move(model)) {}
    void finalize();
    Jet interpolate(double x) const;

    GeometryModel model_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::vector<double> curvatures_;
    ProfileFn source_;
    std::optional<PotentialSpec> spec_;
    std::vector<double> kinks_;
    ClassBounds bounds_;
    double cone_coefficient_ = 1.0;
    RightTail tail_ = RightTail::Exponential;
    std::optional<std::string> warning_;
};

struct MomentProfile {
    std::vector<double> grid;
    std::vector<double> h_values;
    double lambda0 = 0.0;
    /// Largest eps in (0, 1] with eps e^{2x} - 1/eps <= h <= e^{2x}/eps on grid points x >= 0.
    double epsilon = 0.0;
    std::optional<std::string> warning;
};

struct ClassCheck {
    bool ok = true;
    std::optional<double> witness;  ///< first violating x
};

RadialPotential gaussian(const GeometryModel& model, std::vector<double> grid = default_grid());

MomentProfile moment_profile(const RadialPotential& phi);

/// (gamma_{-s}^* phi)_Omega(x) = phi_Omega(x - s/2).
RadialPotential pullback_flow(const RadialPotential& phi, double s);

/// phi + u; rejects results that fail convexity or leave the growth class.
RadialPotential add(const RadialPotential& phi, const ProfileFn& u, std::vector<double> u_kinks = {});

ClassCheck check_class(const RadialPotential& phi, double a, double b);

struct SmoothingOptions {
    double initial_width = 0.25;   ///< delta_0; delta_nu = delta_0 2^{-nu}
    double correction = 0.05;      ///< C' in C' delta (1 + e^{2x})
};

double smoothing_width(int nu, const SmoothingOptions& opt = {});

/// Mollification in x with a compactly supported C^infinity kernel of width delta_nu
/// plus the decreasing correction C' delta_nu (1 + e^{2x}).
RadialPotential smooth_decreasing_approx(const RadialPotential& rough, int nu, const SmoothingOptions& opt = {});

/// Central/one-sided finite-difference slopes and curvatures of sampled values.
struct FiniteDifferenceJets {
    std::vector<double> d1;
    std::vector<double> d2;
    double max_discrepancy = 0.0;  ///< max relative gap between low- and high-order slope estimates
};
FiniteDifferenceJets finite_difference_jets(std::span<const double> grid, std::span<const double> values);

/// sup{x : phi_Upsilon'(x) <= slope} for a convex profile, found by safeguarded
/// Newton on log phi' with a bisection fallback (kinks are handled by the
/// bracket). Returns -inf / +inf when the slope is never / always reached
/// inside [-limit, limit].
double slope_inverse(const ProfileFn& f, double slope, double guess = 0.0, double limit = 60.0);

/// Discrete convexity of sampled values with a roundoff-scaled tolerance.
bool is_discretely_convex(std::span<const double> grid, std::span<const double> values);

}  // namespace radsol
