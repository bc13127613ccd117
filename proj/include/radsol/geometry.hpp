#pragma once

#include <string>
#include <vector>

namespace radsol {

/// Ambient model: C^n with the diagonal linear field X = sum a_i z_i d/dz_i.
/// The default weights give the Euler field r d/dr.
class GeometryModel {
public:
    explicit GeometryModel(int n);
    GeometryModel(int n, std::vector<double> weights);

    int n() const { return n_; }
    const std::vector<double>& weights() const { return weights_; }
    bool is_reeb() const;
    bool is_round() const;

    /// Normalization tag carried into every serialized artifact.
    static constexpr const char* normalization = "ma-cumulative=(phi_upsilon'/2)^n";

    friend bool operator==(const GeometryModel&, const GeometryModel&) = default;

private:
    int n_;
    std::vector<double> weights_;
};

/// Coordinate subspace {z_i = 0 for i not free}.
struct CoordinateSubspace {
    std::vector<bool> free;

    bool contains(const CoordinateSubspace& other) const;
    bool is_everything() const;
    bool is_origin() const;
    friend bool operator==(const CoordinateSubspace&, const CoordinateSubspace&) = default;
};

struct FixedComponent {
    CoordinateSubspace fixed_subspace;
    CoordinateSubspace attracting;  ///< points whose flow under -X tends to the component
    double lambda_z = 0.0;
};

struct CriticalData {
    std::vector<FixedComponent> components;
    double lambda0 = 0.0;
    std::vector<double> sigma;

    /// Union of attracting sets of components with lambda_Z >= lambda; each is
    /// a closed coordinate subspace, so the result is a list of them.
    std::vector<CoordinateSubspace> attracting_set(double lambda) const;
};

/// -1/2 of the real trace of the differential of X at the origin, i.e. -sum a_i.
double lambda_at_fixed_point(const std::vector<double>& weights);

CriticalData bb_strata(const std::vector<double>& weights);

/// dV/dx for dV = d((e^{2x}/2)^n), the pushforward of Euclidean volume to x = log r.
double reference_volume_density(const GeometryModel& model, double x);

/// (e^{2x}/2)^n.
double reference_volume_cumulative(const GeometryModel& model, double x);

}  // namespace radsol
