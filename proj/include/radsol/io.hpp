#pragma once

#include "radsol/flows.hpp"
#include "radsol/functionals.hpp"
#include "radsol/geodesics.hpp"
#include "radsol/measures.hpp"
#include "radsol/plambda.hpp"
#include "radsol/potential.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace radsol::io {

using Json = nlohmann::ordered_json;

/// Finite doubles become JSON numbers; inf and nan become the strings "inf", "-inf", "nan".
Json number(double v);
double to_double(const Json& j);

/// Minimal CSV writer: mandatory header, '.' decimal, "\n" line endings, 17 significant digits.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t width_;
};

Json to_json(const PotentialSpec& spec);
Json to_json(const GeometryModel& model);
GeometryModel model_from_json(const Json& j);

/// Self-contained record: reading it back and writing again reproduces the same text.
Json to_json(const RadialPotential& phi);
RadialPotential potential_from_json(const Json& j);
/// Columns x, phi_omega, phi_upsilon, h.
void write_csv(std::ostream& out, const RadialPotential& phi);

Json to_json(const PLambdaResult& p);
PLambdaResult plambda_from_json(const Json& j);

Json to_json(const CumulativeMeasure& m);
CumulativeMeasure measure_from_json(const Json& j);
/// Columns knot, cumulative, density.
void write_csv(std::ostream& out, const CumulativeMeasure& m);

/// Header only: grids, Lipschitz constant, kind and barrier parameters.
Json slab_header(const GeodesicSlab& s);
/// Long format: t, x, phi (Upsilon trivialization).
void write_csv(std::ostream& out, const GeodesicSlab& s);

/// Columns t, value, second_difference (empty second difference at the ends).
void write_csv(std::ostream& out, const ConvexityProfile& p);

/// Columns t, x_1 .. x_d.
void write_trajectory_csv(std::ostream& out, const FlowResult& r);

Json to_json(const HmaReport& r);
Json to_json(const SandwichReport& r);
Json to_json(const FunctionalValue& v);
Json to_json(const EndpointDerivatives& d);
Json to_json(const ShrinkerReport& r);
Json to_json(const GronwallReport& r, bool traces = false);
Json to_json(const ConjugationReport& r);
Json to_json(const ReebReport& r);
Json to_json(const PullbackReport& r);

/// Writes text with '\n' line endings, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace radsol::io
