#include "radsol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace radsol {

GeometryModel::GeometryModel(int n) : GeometryModel(n, std::vector<double>(n > 0 ? n : 0, 1.0)) {}

GeometryModel::GeometryModel(int n, std::vector<double> weights) : n_(n), weights_(std::move(weights)) {
    if (n_ < 1) throw std::invalid_argument("complex dimension must be at least 1");
    if (static_cast<int>(weights_.size()) != n_)
        throw std::invalid_argument("weight count does not match complex dimension");
    for (double a : weights_)
        if (!std::isfinite(a)) throw std::invalid_argument("non-finite weight");
}

bool GeometryModel::is_reeb() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double a) { return a > 0.0; });
}

bool GeometryModel::is_round() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double a) { return a == 1.0; });
}

bool CoordinateSubspace::contains(const CoordinateSubspace& other) const {
    if (other.free.size() != free.size()) return false;
    for (std::size_t i = 0; i < free.size(); ++i)
        if (other.free[i] && !free[i]) return false;
    return true;
}

bool CoordinateSubspace::is_everything() const {
    return std::all_of(free.begin(), free.end(), [](bool b) { return b; });
}

bool CoordinateSubspace::is_origin() const {
    return std::none_of(free.begin(), free.end(), [](bool b) { return b; });
}

std::vector<CoordinateSubspace> CriticalData::attracting_set(double lambda) const {
    std::vector<CoordinateSubspace> out;
    for (const auto& c : components)
        if (c.lambda_z >= lambda) out.push_back(c.attracting);
    return out;
}

double lambda_at_fixed_point(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("empty weight vector: dimension must be at least 1");
    // real trace of the complex-linear diagonal field is 2 sum a_i
    const double real_trace = 2.0 * std::accumulate(weights.begin(), weights.end(), 0.0);
    return -0.5 * real_trace;
}

CriticalData bb_strata(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("empty weight vector: dimension must be at least 1");
    for (double a : weights)
        if (a == 0.0)
            throw std::invalid_argument("degenerate weight: positive-dimensional fixed component not modeled");

    const std::size_t n = weights.size();
    FixedComponent origin;
    origin.fixed_subspace.free.assign(n, false);
    origin.attracting.free.resize(n);
    for (std::size_t i = 0; i < n; ++i) origin.attracting.free[i] = weights[i] > 0.0;
    origin.lambda_z = lambda_at_fixed_point(weights);

    CriticalData data;
    data.components.push_back(origin);
    data.lambda0 = origin.lambda_z;
    data.sigma = {origin.lambda_z};
    return data;
}

double reference_volume_density(const GeometryModel& model, double x) {
    if (!model.is_reeb()) throw std::invalid_argument("reference volume requires a Reeb model");
    const int n = model.n();
    const double y = std::exp(2.0 * x);
    return n * std::pow(0.5 * y, n - 1) * y;
}

double reference_volume_cumulative(const GeometryModel& model, double x) {
    if (!model.is_reeb()) throw std::invalid_argument("reference volume requires a Reeb model");
    return std::pow(0.5 * std::exp(2.0 * x), model.n());
}

}  // namespace radsol
