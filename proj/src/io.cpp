#include "radsol/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace radsol::io {

namespace {

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

std::vector<double> doubles(const Json& a) {
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& x : a) out.push_back(to_double(x));
    return out;
}

const char* tail_name(RightTail t) { return t == RightTail::Affine ? "affine" : "exponential"; }

RightTail tail_from(const std::string& s) {
    if (s == "affine") return RightTail::Affine;
    if (s == "exponential") return RightTail::Exponential;
    throw std::invalid_argument("unknown right tail '" + s + "'");
}

const char* term_name(ProfileTerm::Kind k) {
    switch (k) {
        case ProfileTerm::Kind::Softplus: return "softplus";
        case ProfileTerm::Kind::Tanh: return "tanh";
        case ProfileTerm::Kind::Kink: return "kink";
        case ProfileTerm::Kind::Exp: return "exp";
    }
    return "?";
}

ProfileTerm::Kind term_from(const std::string& s) {
    if (s == "softplus") return ProfileTerm::Kind::Softplus;
    if (s == "tanh") return ProfileTerm::Kind::Tanh;
    if (s == "kink") return ProfileTerm::Kind::Kink;
    if (s == "exp") return ProfileTerm::Kind::Exp;
    throw std::invalid_argument("unknown profile term '" + s + "'");
}

PotentialSpec spec_from(const Json& j) {
    PotentialSpec s;
    s.cone = to_double(j.at("cone"));
    s.shift = to_double(j.at("shift"));
    s.constant = to_double(j.at("constant"));
    for (const auto& t : j.at("terms"))
        s.terms.push_back({term_from(t.at("kind").get<std::string>()), to_double(t.at("amplitude")),
                           to_double(t.at("center")), to_double(t.at("width"))});
    return s;
}

}  // namespace

Json to_json(const PotentialSpec& s) {
    Json j;
    j["cone"] = number(s.cone);
    j["shift"] = number(s.shift);
    j["constant"] = number(s.constant);
    j["terms"] = Json::array();
    for (const auto& t : s.terms)
        j["terms"].push_back({{"kind", term_name(t.kind)},
                              {"amplitude", number(t.amplitude)},
                              {"center", number(t.center)},
                              {"width", number(t.width)}});
    return j;
}

Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double to_double(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != width_) throw std::invalid_argument("CSV row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt17(values[i]);
    out_ << '\n';
}

Json to_json(const GeometryModel& model) {
    return {{"n", model.n()}, {"weights", numbers(model.weights())}};
}

GeometryModel model_from_json(const Json& j) {
    return GeometryModel(j.at("n").get<int>(), doubles(j.at("weights")));
}

Json to_json(const RadialPotential& phi) {
    Json j;
    j["model"] = to_json(phi.model());
    j["convention"] = GeometryModel::normalization;
    j["trivialization"] = "upsilon";
    j["class_bounds"] = {{"a", number(phi.class_bounds().a)}, {"b", number(phi.class_bounds().b)}};
    j["right_tail"] = tail_name(phi.right_tail());
    j["cone_coefficient"] = number(phi.cone_coefficient());
    j["spec"] = phi.spec() ? to_json(*phi.spec()) : Json();
    const auto grid = phi.grid();
    j["grid"] = numbers({grid.begin(), grid.end()});
    if (!phi.spec()) {
        const auto v = phi.upsilon_values(), s = phi.upsilon_slopes(), c = phi.curvatures();
        j["values"] = numbers({v.begin(), v.end()});
        j["slopes"] = numbers({s.begin(), s.end()});
        j["curvatures"] = numbers({c.begin(), c.end()});
    }
    return j;
}

RadialPotential potential_from_json(const Json& j) {
    const GeometryModel model = model_from_json(j.at("model"));
    const ClassBounds bounds{to_double(j.at("class_bounds").at("a")), to_double(j.at("class_bounds").at("b"))};
    auto grid = doubles(j.at("grid"));
    if (!j.at("spec").is_null()) return RadialPotential::from_spec(model, spec_from(j.at("spec")), grid, bounds);
    return RadialPotential::from_jets(model, std::move(grid), doubles(j.at("values")), doubles(j.at("slopes")),
                                      doubles(j.at("curvatures")), bounds,
                                      tail_from(j.at("right_tail").get<std::string>()));
}

void write_csv(std::ostream& out, const RadialPotential& phi) {
    CsvWriter w(out, {"x", "phi_omega", "phi_upsilon", "h"});
    for (std::size_t i = 0; i < phi.size(); ++i) w.row({phi.x(i), phi.phi_omega(i), phi.phi_upsilon(i), phi.h(i)});
}

Json to_json(const PLambdaResult& p) {
    Json j;
    j["lambda"] = number(p.lambda);
    j["contact_boundary"] = number(p.contact_boundary);
    j["support_radius"] = number(p.support_radius);
    j["potential"] = to_json(p.potential);
    return j;
}

PLambdaResult plambda_from_json(const Json& j) {
    return PLambdaResult{potential_from_json(j.at("potential")), to_double(j.at("lambda")),
                         to_double(j.at("contact_boundary")), to_double(j.at("support_radius"))};
}

Json to_json(const CumulativeMeasure& m) {
    Json j;
    j["axis"] = m.axis == MeasureAxis::X ? "x" : "lambda";
    j["convention"] = GeometryModel::normalization;
    j["total_mass"] = number(m.total_mass);
    j["max_clamp"] = number(m.max_clamp);
    j["knots"] = numbers(m.knots);
    j["cumulative"] = numbers(m.cumulative);
    j["density"] = numbers(m.density);
    return j;
}

CumulativeMeasure measure_from_json(const Json& j) {
    CumulativeMeasure m;
    const auto axis = j.at("axis").get<std::string>();
    if (axis != "x" && axis != "lambda") throw std::invalid_argument("unknown measure axis '" + axis + "'");
    m.axis = axis == "x" ? MeasureAxis::X : MeasureAxis::Lambda;
    m.total_mass = to_double(j.at("total_mass"));
    m.max_clamp = to_double(j.at("max_clamp"));
    m.knots = doubles(j.at("knots"));
    m.cumulative = doubles(j.at("cumulative"));
    m.density = doubles(j.at("density"));
    if (m.cumulative.size() != m.knots.size() || m.density.size() != m.knots.size())
        throw std::invalid_argument("measure arrays have different lengths");
    return m;
}

void write_csv(std::ostream& out, const CumulativeMeasure& m) {
    CsvWriter w(out, {"knot", "cumulative", "density"});
    for (std::size_t i = 0; i < m.knots.size(); ++i) w.row({m.knots[i], m.cumulative[i], m.density[i]});
}

Json slab_header(const GeodesicSlab& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    j["n"] = s.n;
    j["trivialization"] = "upsilon";
    j["class_bounds"] = {{"a", number(s.bounds.a)}, {"b", number(s.bounds.b)}};
    j["lipschitz"] = number(s.lipschitz);
    j["t_grid"] = numbers(s.t_grid);
    j["x_grid"] = numbers(s.x_grid);
    if (s.barrier) {
        const auto& b = *s.barrier;
        j["barrier"] = {{"A", number(b.A)},       {"B", number(b.B)},       {"D", number(b.D)},
                        {"R", number(b.R)},       {"L", number(b.L)},       {"psi0", number(b.psi0)},
                        {"psi1", number(b.psi1)}, {"attempts", b.attempts}};
    } else {
        j["barrier"] = nullptr;
    }
    return j;
}

void write_csv(std::ostream& out, const GeodesicSlab& s) {
    CsvWriter w(out, {"t", "x", "phi"});
    for (std::size_t i = 0; i < s.nt(); ++i)
        for (std::size_t k = 0; k < s.nx(); ++k) w.row({s.t_grid[i], s.x_grid[k], s.upsilon(i, k)});
}

void write_csv(std::ostream& out, const ConvexityProfile& p) {
    out << "t,value,second_difference\n";
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        out << fmt17(p.t[i]) << ',' << fmt17(p.values[i]) << ',';
        if (i > 0 && i + 1 < p.t.size()) out << fmt17(p.second_differences[i - 1]);
        out << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const FlowResult& r) {
    const auto d = r.states.empty() ? 0 : static_cast<std::size_t>(r.states.front().size());
    std::vector<std::string> header{"t"};
    for (std::size_t i = 1; i <= d; ++i) header.push_back(fmt::format("x_{}", i));
    CsvWriter w(out, header);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        std::vector<double> row{r.times[k]};
        for (std::size_t i = 0; i < d; ++i) row.push_back(r.states[k][static_cast<Eigen::Index>(i)]);
        w.row(row);
    }
}

Json to_json(const HmaReport& r) {
    return {{"residual", number(r.residual)},   {"min_eigenvalue", number(r.min_eigenvalue)},
            {"max_det", number(r.max_det)},     {"min_det", number(r.min_det)},
            {"worst_t", number(r.worst_t)},     {"worst_x", number(r.worst_x)},
            {"from_derivative_fields", r.from_derivative_fields}};
}

Json to_json(const SandwichReport& r) {
    return {{"ok", r.ok},
            {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok},
            {"worst_violation", number(r.worst_violation)},
            {"worst_t", number(r.worst_t)},
            {"worst_x", number(r.worst_x)},
            {"max_gap_to_chord", number(r.max_gap_to_chord)}};
}

Json to_json(const FunctionalValue& v) {
    return {{"value", number(v.value)},
            {"max_integrand", number(v.max_integrand)},
            {"tail_estimate", number(v.tail_estimate)},
            {"t_points", v.t_points}};
}

Json to_json(const EndpointDerivatives& d) {
    return {{"energy_right_at_0", number(d.energy_right_at_0)}, {"energy_ref_at_0", number(d.energy_ref_at_0)},
            {"energy_left_at_1", number(d.energy_left_at_1)},   {"energy_ref_at_1", number(d.energy_ref_at_1)},
            {"f_right_at_0", number(d.f_right_at_0)},           {"f_ref_at_0", number(d.f_ref_at_0)},
            {"f_left_at_1", number(d.f_left_at_1)},             {"f_ref_at_1", number(d.f_ref_at_1)}};
}

Json to_json(const ShrinkerReport& r) {
    return {{"residual", number(r.residual)}, {"offset", number(r.offset)}, {"used", r.used}, {"excluded", r.excluded}};
}

Json to_json(const GronwallReport& r, bool traces) {
    Json j{{"ok", r.ok},
           {"worst_ratio", number(r.worst_ratio)},
           {"failing_time", r.failing_time ? number(*r.failing_time) : Json()}};
    if (traces) {
        j["times"] = numbers(r.times);
        j["distance"] = numbers(r.distance);
        j["bound"] = numbers(r.bound);
    }
    return j;
}

Json to_json(const ConjugationReport& r) {
    return {{"convention", r.convention},
            {"delta", number(r.delta)},
            {"shrunk", r.shrunk},
            {"ladder", numbers(r.ladder)},
            {"cauchy", numbers(r.cauchy)},
            {"rate", r.rate ? number(*r.rate) : Json()},
            {"converging", r.converging},
            {"conjugacy_residual", number(r.conjugacy_residual)},
            {"composition_gap", number(r.composition_gap)},
            {"cr_residual", number(r.cr_residual)},
            {"vanishing_order", r.vanishing_order}};
}

Json to_json(const ReebReport& r) {
    Json pts = Json::array();
    for (const auto& p : r.points)
        pts.push_back({{"classification", p.classification},
                       {"divergent_coordinates", p.divergent_coordinates},
                       {"growth_rate", number(p.growth_rate)}});
    return {{"convention", r.convention}, {"reeb", r.reeb}, {"points", pts}};
}

Json to_json(const PullbackReport& r) {
    return {{"ok", r.ok},
            {"curvature_residual", number(r.curvature_residual)},
            {"equation_residual", number(r.equation_residual)},
            {"worst_t", number(r.worst_t)},
            {"worst_x", number(r.worst_x)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace radsol::io
