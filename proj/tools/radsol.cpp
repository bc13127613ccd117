// radsol: batch runner for the radial soliton toolkit.
//
//   radsol <command> [--config file.ini] [flags]
//
// Writes <command>.json (deterministic summary), one or more <command>*.csv
// data files and <command>.timing.json into the output directory.
// Exit status: 0 all assertions pass, 1 an assertion failed, 2 invalid input.

#include "radsol/acceptance.hpp"
#include "radsol/io.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace radsol;
using io::Json;

namespace {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands{"gaussian-report", "plambda", "dh",        "ma-x", "energy",
                                         "geodesic",        "ding",    "conjugate", "ode",  "all-acceptance"};

struct PotentialInput {
    std::optional<fs::path> file;
    PotentialSpec spec;
};

struct Config {
    std::string command;
    int n = 1;
    std::vector<double> weights;
    double x_min = -8.0;
    double x_max = 4.0;
    int x_points = 4097;
    int t_points = 65;
    double lambda_max = 10.0;
    int lambda_points = 200;
    PotentialInput phi;    ///< first potential (default Gaussian)
    PotentialInput phi0;   ///< reference potential (default Gaussian)
    double lambda = 0.0;
    double speed = 1.0;    ///< translation speed c for ding and geodesic
    double delta = 0.3;
    double epsilon = 0.1;
    int order = 3;
    std::map<std::string, double> tolerances;
    fs::path output_dir = "radsol-out";
};

// ---- INI parsing -----------------------------------------------------------

const std::map<std::string, std::set<std::string>> kKeys{
    {"run", {"command", "output_dir"}},
    {"model", {"n", "weights"}},
    {"grids", {"x_min", "x_max", "x_points", "t_points", "lambda_max", "lambda_points"}},
    {"potential", {"file", "cone", "shift", "constant", "terms"}},
    {"reference", {"file", "cone", "shift", "constant", "terms"}},
    {"plambda", {"lambda"}},
    {"translation", {"speed"}},
    {"conjugate", {"delta", "epsilon", "order"}},
    {"tolerances", {}},  // any assertion name
};

double parse_double(const std::string& where, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (text.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("{}: '{}' is not a number", where, text));
    }
}

int parse_int(const std::string& where, const std::string& text) {
    const double v = parse_double(where, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError(fmt::format("{}: '{}' is not an integer", where, text));
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& where, const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    for (std::string tok; in >> tok;) out.push_back(parse_double(where, tok));
    return out;
}

ProfileTerm::Kind term_kind(const std::string& where, const std::string& name) {
    if (name == "softplus") return ProfileTerm::Kind::Softplus;
    if (name == "tanh") return ProfileTerm::Kind::Tanh;
    if (name == "kink") return ProfileTerm::Kind::Kink;
    if (name == "exp") return ProfileTerm::Kind::Exp;
    throw ValidationError(fmt::format("{}: unknown term kind '{}'", where, name));
}

// "softplus 0.3 -0.5 0.7, tanh 0.1 0 1": kind amplitude center width, comma separated
std::vector<ProfileTerm> parse_terms(const std::string& where, const std::string& text) {
    std::vector<ProfileTerm> out;
    std::istringstream groups(text);
    for (std::string group; std::getline(groups, group, ',');) {
        std::istringstream in(group);
        std::string kind;
        if (!(in >> kind)) continue;
        std::vector<double> nums;
        for (std::string tok; in >> tok;) nums.push_back(parse_double(where, tok));
        if (nums.size() != 3) throw ValidationError(fmt::format("{}: term '{}' needs amplitude center width", where, group));
        out.push_back({term_kind(where, kind), nums[0], nums[1], nums[2]});
    }
    return out;
}

void read_potential(const boost::property_tree::ptree& sec, const std::string& name, PotentialInput& p,
                    const fs::path& base) {
    for (const auto& [key, node] : sec) {
        const std::string v = node.get_value<std::string>();
        const std::string where = name + "." + key;
        if (key == "file") p.file = base / v;
        if (key == "cone") p.spec.cone = parse_double(where, v);
        if (key == "shift") p.spec.shift = parse_double(where, v);
        if (key == "constant") p.spec.constant = parse_double(where, v);
        if (key == "terms") p.spec.terms = parse_terms(where, v);
    }
}

void read_ini(const fs::path& path, Config& c) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(fmt::format("config: {}", e.what()));
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    for (const auto& [section, sec] : tree) {
        const auto known = kKeys.find(section);
        if (known == kKeys.end()) throw ValidationError(fmt::format("config: unknown section [{}]", section));
        if (sec.data().size() && sec.empty()) throw ValidationError(fmt::format("config: key '{}' outside a section", section));
        for (const auto& [key, node] : sec) {
            if (section != "tolerances" && !known->second.count(key))
                throw ValidationError(fmt::format("config: unknown key '{}' in [{}]", key, section));
            const std::string v = node.get_value<std::string>();
            const std::string where = section + "." + key;
            if (section == "run" && key == "command") c.command = v;
            if (section == "run" && key == "output_dir") c.output_dir = base / v;
            if (section == "model" && key == "n") c.n = parse_int(where, v);
            if (section == "model" && key == "weights") c.weights = parse_list(where, v);
            if (section == "grids") {
                if (key == "x_min") c.x_min = parse_double(where, v);
                if (key == "x_max") c.x_max = parse_double(where, v);
                if (key == "x_points") c.x_points = parse_int(where, v);
                if (key == "t_points") c.t_points = parse_int(where, v);
                if (key == "lambda_max") c.lambda_max = parse_double(where, v);
                if (key == "lambda_points") c.lambda_points = parse_int(where, v);
            }
            if (section == "plambda") c.lambda = parse_double(where, v);
            if (section == "translation") c.speed = parse_double(where, v);
            if (section == "conjugate") {
                if (key == "delta") c.delta = parse_double(where, v);
                if (key == "epsilon") c.epsilon = parse_double(where, v);
                if (key == "order") c.order = parse_int(where, v);
            }
            if (section == "tolerances") c.tolerances[key] = parse_double(where, v);
        }
        if (section == "potential") read_potential(sec, "potential", c.phi, base);
        if (section == "reference") read_potential(sec, "reference", c.phi0, base);
    }
}

void validate(Config& c) {
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
        throw ValidationError(fmt::format("unknown command '{}'", c.command));
    if (c.n < 1 || c.n > 8) throw ValidationError(fmt::format("model.n = {} must lie in [1, 8]", c.n));
    if (c.weights.empty()) c.weights.assign(static_cast<std::size_t>(c.n), 1.0);
    if (static_cast<int>(c.weights.size()) != c.n)
        throw ValidationError(fmt::format("model.weights has {} entries, expected {}", c.weights.size(), c.n));
    if (!(c.x_min < c.x_max)) throw ValidationError("grids.x_min must be below grids.x_max");
    if (c.x_min < -30.0 || c.x_max > 8.0) throw ValidationError("grids: x range must lie within [-30, 8]");
    if (c.x_points < 8 || c.x_points > 200001) throw ValidationError("grids.x_points must lie in [8, 200001]");
    if (c.t_points < 9 || c.t_points % 2 == 0 || c.t_points > 4097)
        throw ValidationError("grids.t_points must be odd and in [9, 4097]");
    if (!(c.lambda_max > -c.n + 0.1)) throw ValidationError("grids.lambda_max must exceed lambda0 + 0.1");
    if (c.lambda_points < 2 || c.lambda_points > 100000) throw ValidationError("grids.lambda_points must lie in [2, 100000]");
    if (!(c.lambda > -c.n)) throw ValidationError(fmt::format("plambda.lambda must exceed lambda0 = {}", -c.n));
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ValidationError("conjugate.delta must lie in (0, 1)");
    if (c.order < 1 || c.order > 12) throw ValidationError("conjugate.order must lie in [1, 12]");
    for (const auto& [k, v] : c.tolerances)
        if (!(v >= 0.0)) throw ValidationError(fmt::format("tolerances.{} must be nonnegative", k));
}

}  // namespace

namespace {

// ---- run bookkeeping ---------------------------------------------------------

class Run {
public:
    explicit Run(const Config& c) : cfg(c) { values = Json::object(); }

    // Tolerance overrides are keyed by the assertion anchor.
    double limit(const std::string& anchor, double fallback) const {
        const auto it = cfg.tolerances.find(anchor);
        return it == cfg.tolerances.end() ? fallback : it->second;
    }
    void at_most(const std::string& name, const std::string& anchor, double value, double fallback) {
        const double lim = limit(anchor, fallback);
        add({name, anchor, "<=", value, lim, value <= lim});
    }
    void at_least(const std::string& name, const std::string& anchor, double value, double fallback) {
        const double lim = limit(anchor, fallback);
        add({name, anchor, ">=", value, lim, value >= lim});
    }
    void flag(const std::string& name, const std::string& anchor, bool ok) {
        add({name, anchor, "==", ok ? 1.0 : 0.0, 1.0, ok});
    }
    void add(acceptance::Check c) {
        if (std::isnan(c.value)) c.pass = false;
        checks.push_back(std::move(c));
    }

    template <class Writer>
    void csv(const std::string& suffix, Writer&& write) {
        std::ostringstream out;
        write(out);
        files.emplace_back(cfg.command + suffix + ".csv", out.str());
    }

    void json(const std::string& suffix, const Json& j) {
        files.emplace_back(cfg.command + suffix + ".json", j.dump(2) + "\n");
    }

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }

    const Config& cfg;
    Json values;
    std::vector<acceptance::Check> checks;
    std::vector<std::pair<std::string, std::string>> files;
};

GeometryModel model_of(const Config& c) { return GeometryModel(c.n, c.weights); }
std::vector<double> x_grid(const Config& c) { return uniform_grid(c.x_min, c.x_max, static_cast<std::size_t>(c.x_points)); }
std::vector<double> slab_x(const Config& c) {
    return uniform_grid(c.x_min, c.x_max, static_cast<std::size_t>((c.x_points - 1) / 2 + 1));
}
std::vector<double> slab_t(const Config& c) { return uniform_grid(0.0, 1.0, static_cast<std::size_t>(c.t_points)); }

bool is_default(const PotentialInput& p) { return !p.file && p.spec == PotentialSpec::gaussian(); }

RadialPotential load(const Config& c, const PotentialInput& p, bool full_mass = true) {
    if (p.file) {
        Json j;
        try {
            j = Json::parse(io::read_text(*p.file));
        } catch (const Json::exception& e) {
            throw ValidationError(fmt::format("{}: {}", p.file->string(), e.what()));
        } catch (const std::runtime_error& e) {
            throw ValidationError(e.what());
        }
        RadialPotential phi = io::potential_from_json(j);
        if (phi.n() != c.n) throw ValidationError(fmt::format("{}: dimension {} does not match model.n", p.file->string(), phi.n()));
        if (full_mass && phi.right_tail() == RightTail::Affine)
            throw ValidationError(fmt::format("{}: '{}' needs a potential of full mass, this one has bounded slope",
                                              p.file->string(), c.command));
        return phi;
    }
    return RadialPotential::from_spec(model_of(c), p.spec, x_grid(c));
}

Json potential_input_json(const PotentialInput& p) {
    if (p.file) return {{"file", p.file->generic_string()}};
    return io::to_json(p.spec);
}

Json inputs_json(const Config& c) {
    Json tol = Json::object();
    for (const auto& [k, v] : c.tolerances) tol[k] = io::number(v);
    Json w = Json::array();
    for (double x : c.weights) w.push_back(io::number(x));
    return {{"model", {{"n", c.n}, {"weights", w}}},
            {"grids",
             {{"x_min", io::number(c.x_min)},
              {"x_max", io::number(c.x_max)},
              {"x_points", c.x_points},
              {"t_points", c.t_points},
              {"lambda_max", io::number(c.lambda_max)},
              {"lambda_points", c.lambda_points}}},
            {"potential", potential_input_json(c.phi)},
            {"reference", potential_input_json(c.phi0)},
            {"lambda", io::number(c.lambda)},
            {"speed", io::number(c.speed)},
            {"conjugate", {{"delta", io::number(c.delta)}, {"epsilon", io::number(c.epsilon)}, {"order", c.order}}},
            {"tolerances", tol}};
}

// ---- commands ----------------------------------------------------------------

void gaussian_report(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential g = gaussian(model_of(c), x_grid(c));
    double h_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) h_err = std::max(h_err, std::abs(g.h(i) - (0.5 * std::exp(2.0 * g.x(i)) - c.n)));
    const double vol = std::exp(c.n) * std::tgamma(c.n + 1.0);
    const CumulativeMeasure mx = ma_x(g);
    const double F = f_functional(g).value;
    const ShrinkerReport sh = shrinker_residual(g);
    r.at_most("h(x) = e^(2x)/2 - n on the grid", "gaussian-moment-map", h_err, 1e-10);
    r.at_most("MA_X total mass vs e^n n!", "ma-x-volume", std::abs(mx.total_mass - vol) / vol, 1e-10);
    r.at_most("F(Gaussian) vs -log n!", "f-gaussian", std::abs(F + std::lgamma(c.n + 1.0)), 1e-8);
    r.at_most("shrinker residual", "shrinker-criterion", sh.residual, 1e-10);
    r.values = {{"vol_x", io::number(mx.total_mass)}, {"F", io::number(F)}, {"shrinker", io::to_json(sh)},
                {"potential", io::to_json(g)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, g); });
    r.json(".potential", io::to_json(g));
}

void plambda_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi = load(c, c.phi, false);
    const PLambdaResult p = p_lambda(phi, c.lambda);
    double above = 0.0, slope = -std::numeric_limits<double>::infinity(), contact = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double a = p.potential.phi_omega(i), b = phi.phi_omega(i);
        above = std::max(above, (a - b) / (1.0 + std::abs(b)));
        slope = std::max(slope, p.potential.slope_omega(i));
        if (phi.x(i) <= p.contact_boundary) contact = std::max(contact, std::abs(a - b) / (1.0 + std::abs(b)));
    }
    r.at_most("P_lambda phi <= phi", "plambda-minorant", above, 1e-12);
    r.at_most("slope of P_lambda phi minus 2 lambda", "plambda-slope", slope - 2.0 * c.lambda, 1e-10);
    r.at_most("P_lambda phi = phi on the contact set", "plambda-contact-set", contact, 1e-12);
    if (is_default(c.phi)) {
        const double xl = 0.5 * std::log(2.0 * c.lambda + 2.0 * c.n);
        const double knee = (c.lambda + c.n) * (1.0 - std::log(2.0 * c.lambda + 2.0 * c.n));
        double dev = 0.0;
        for (std::size_t i = 0; i < p.potential.size(); ++i) {
            const double x = p.potential.x(i);
            const double exact = x <= xl ? 0.5 * std::exp(2.0 * x) - 2.0 * c.n * x : knee + 2.0 * c.lambda * x;
            dev = std::max(dev, std::abs(p.potential.phi_omega(i) - exact));
        }
        r.at_most("max deviation from the Gaussian closed form", "plambda-gaussian-example", dev, 1e-8);
        r.at_most("contact boundary vs log(2 lambda + 2n)/2", "plambda-contact-boundary",
                  std::abs(p.contact_boundary - xl), 1e-8);
    }
    r.values = {{"lambda", io::number(p.lambda)},
                {"contact_boundary", io::number(p.contact_boundary)},
                {"support_radius", io::number(p.support_radius)},
                {"total_mass", io::number(ma_plambda(phi, c.lambda).total_mass)},
                {"result", io::to_json(p)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, p.potential); });
    r.json(".potential", io::to_json(p.potential));
}

void dh_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi = load(c, c.phi);
    const auto lambdas = uniform_grid(-c.n + 0.1, c.lambda_max, static_cast<std::size_t>(c.lambda_points));
    const CumulativeMeasure dh = dh_measure(phi, lambdas);
    const CumulativeMeasure push = dh_measure_pushforward(phi, lambdas);
    double err = 0.0, route = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double exact = std::pow(lambdas[i] + c.n, c.n);
        err = std::max(err, std::abs(dh.cumulative[i] - exact) / exact);
        route = std::max(route, std::abs(push.cumulative[i] - exact) / exact);
    }
    r.at_most("DH cumulative vs (lambda+n)^n", "dh-independence", err, 1e-3);
    r.at_most("pushforward of MA under h vs (lambda+n)^n", "dh-pushforward", route, 1e-3);
    r.values = {{"measure", io::to_json(dh)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, dh); });
}

void ma_x_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi = load(c, c.phi);
    const CumulativeMeasure m = ma_x(phi);
    const double vol = weighted_volume(model_of(c));
    const double hmean =
        integrate_ma_x(phi.upsilon_fn(), c.n, [&](double x) { return 0.5 * phi.upsilon_jet(x).d1 - c.n; }, phi.kinks());
    r.at_most("MA_X total mass vs vol_X", "ma-x-volume", std::abs(m.total_mass - vol) / vol, 1e-6);
    r.at_most("|int h dMA_X| / vol_X", "ma-x-mean-moment", std::abs(hmean) / vol, 1e-8);
    r.values = {{"vol_x", io::number(vol)}, {"mean_h", io::number(hmean)}, {"measure", io::to_json(m)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, m); });
}

void energy_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi1 = load(c, c.phi), phi0 = load(c, c.phi0);
    const FunctionalValue e = energy_ex(phi1, phi0, c.t_points);
    const FunctionalValue back = energy_ex(phi0, phi1, c.t_points);
    r.at_most("antisymmetry |E(1,0) + E(0,1)| / (1 + |E|)", "energy-antisymmetry",
              std::abs(e.value + back.value) / (1.0 + std::abs(e.value)), 1e-6);
    const GeodesicSlab geo = geodesic(phi0, phi1, slab_t(c), slab_x(c));
    const std::size_t stride = std::max<std::size_t>(1, (geo.nt() - 1) / 8);
    const ConvexityProfile prof = convexity_profile(geo, Functional::EnergyX, stride, c.t_points);
    double second = 0.0;
    for (double d : prof.second_differences) second = std::max(second, std::abs(d));
    r.at_most("|second differences| of E_X along the geodesic", "energy-affine-on-geodesics", second, 1e-5);
    r.values = {{"energy", io::to_json(e)}, {"reversed", io::to_json(back)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, prof); });
}

void geodesic_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi1 = load(c, c.phi), phi0 = load(c, c.phi0);
    const GeodesicSlab geo = geodesic(phi0, phi1, slab_t(c), slab_x(c));
    const GeodesicSlab bar = barrier(phi0, phi1, slab_t(c), slab_x(c));
    const SandwichReport sw = sandwich_check(geo, bar, r.limit("sandwich", 1e-8));
    const HmaReport hma = hma_residual(geo);
    const HmaReport fine = hma_residual(geodesic(phi0, phi1, uniform_grid(0.0, 1.0, 2 * geo.nt() - 1),
                                                 uniform_grid(c.x_min, c.x_max, 2 * geo.nx() - 1)));
    r.flag("barrier <= geodesic <= affine line", "sandwich", sw.ok);
    r.at_most("HMA residual of the geodesic", "hma-residual", hma.residual, 1e-3);
    r.at_most("HMA residual ratio under refinement", "hma-refinement",
              hma.residual > 1e-12 ? fine.residual / hma.residual : 0.0, 0.5);
    r.values = {{"slab", io::slab_header(geo)},
                {"barrier", io::slab_header(bar)},
                {"sandwich", io::to_json(sw)},
                {"hma", io::to_json(hma)},
                {"hma_refined", io::to_json(fine)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, geo); });
    r.csv(".barrier", [&](std::ostream& o) { io::write_csv(o, bar); });
}

void ding_cmd(Run& r) {
    const Config& c = r.cfg;
    const RadialPotential phi = load(c, c.phi);
    const GeodesicSlab trans = translation_geodesic(phi, c.speed, slab_t(c), slab_x(c));
    const std::size_t stride = std::max<std::size_t>(1, (trans.nt() - 1) / 8);
    const ConvexityProfile prof = convexity_profile(trans, Functional::Ding, stride, c.t_points);
    const auto [lo, hi] = std::minmax_element(prof.values.begin(), prof.values.end());
    r.at_most("spread of Ding along the translation geodesic", "ding-constant-on-translation", *hi - *lo, 1e-4);
    const PullbackReport pb = pullback_constancy(trans, c.speed, r.limit("pullback-constancy", 1e-6));
    r.flag("pulled-back curvature is constant along the flow", "pullback-constancy", pb.ok);
    r.values = {{"ding", io::number(prof.values.front())}, {"pullback", io::to_json(pb)}};
    r.csv("", [&](std::ostream& o) { io::write_csv(o, prof); });
}

void conjugate_cmd(Run& r) {
    const Config& c = r.cfg;
    ConjugationExperiment ex;
    ex.weights = c.weights;
    ex.delta = c.delta;
    ex.perturbation.n = c.n;
    std::vector<int> exps(static_cast<std::size_t>(c.n), 0);
    exps[c.n > 1 ? 1 : 0] = c.order;
    ex.perturbation.terms.push_back({0, {c.epsilon, 0.0}, exps});
    const ConjugationReport rep = conjugation_limit(ex);
    if (c.order >= 2) {
        r.at_most("fitted Cauchy decay rate per unit t", "conjugation-rate", rep.rate.value_or(0.0), -0.5);
        r.at_most("conjugacy residual", "conjugacy", rep.conjugacy_residual, 1e-6);
    } else {
        r.flag("first-order perturbation reports non-convergence", "conjugation-negative-control", !rep.converging);
    }
    std::vector<std::vector<std::complex<double>>> pts;
    for (int i = 0; i < c.n; ++i) {
        std::vector<std::complex<double>> e(static_cast<std::size_t>(c.n), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        pts.push_back(e);
    }
    pts.emplace_back(static_cast<std::size_t>(c.n), 1.0);
    r.values = {{"conjugation", io::to_json(rep)}, {"reeb", io::to_json(reeb_forward_limit(c.weights, pts))}};
    r.csv("", [&](std::ostream& o) {
        io::CsvWriter w(o, {"t", "cauchy"});
        for (std::size_t k = 0; k < rep.cauchy.size(); ++k) w.row({rep.ladder[k], rep.cauchy[k]});
    });
}

acceptance::Settings settings_of(const Config& c) {
    acceptance::Settings s;
    s.x_min = c.x_min;
    s.x_max = c.x_max;
    s.x_points = c.x_points;
    s.energy_t_points = c.t_points;
    s.lambda_max = c.lambda_max;
    s.lambda_points = c.lambda_points;
    s.conj_delta = c.delta;
    s.conj_epsilon = c.epsilon;
    return s;
}

void ode_cmd(Run& r) {
    const acceptance::CriterionResult res = acceptance::ode_suite(settings_of(r.cfg));
    for (const auto& ch : res.checks) r.add(ch);
    TimeField f;
    f.dim = 1;
    f.eval = [](double t, const Vec& x) { return Vec((t < 0.5 ? 1.0 : -2.0) * x); };
    f.breakpoints = {0.5};
    FlowOptions opt;
    opt.output_times = uniform_grid(0.0, 1.0, static_cast<std::size_t>(r.cfg.t_points));
    const FlowResult flow = solve_flow(f, Vec::Constant(1, 1.0), 1.0, opt);
    r.values = res.data;
    r.values["piecewise_final"] = io::number(flow.final_state()[0]);
    r.values["accepted_steps"] = flow.accepted_steps;
    r.csv("", [&](std::ostream& o) { io::write_trajectory_csv(o, flow); });
}

void all_acceptance(Run& r) {
    const auto results = acceptance::run(settings_of(r.cfg));
    Json list = Json::array();
    for (const auto& res : results) {
        std::cout << acceptance::summary_line(res) << '\n';
        for (const auto& ch : res.checks) r.add(ch);
        list.push_back(acceptance::to_json(res));
    }
    r.values = {{"criteria", list}};
    r.csv("", [&](std::ostream& o) {
        io::CsvWriter w(o, {"id", "pass", "checks", "failed"});
        for (const auto& res : results) {
            double failed = 0;
            for (const auto& ch : res.checks) failed += ch.pass ? 0 : 1;
            w.row({double(res.id), res.pass() ? 1.0 : 0.0, double(res.checks.size()), failed});
        }
    });
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int execute(const Config& c) {
    const auto start = std::chrono::steady_clock::now();
    const std::string started = iso_now();
    Run r(c);
    static const std::map<std::string, void (*)(Run&)> table{
        {"gaussian-report", gaussian_report}, {"plambda", plambda_cmd},   {"dh", dh_cmd},
        {"ma-x", ma_x_cmd},                   {"energy", energy_cmd},     {"geodesic", geodesic_cmd},
        {"ding", ding_cmd},                   {"conjugate", conjugate_cmd}, {"ode", ode_cmd},
        {"all-acceptance", all_acceptance}};
    table.at(c.command)(r);

    Json assertions = Json::array();
    for (const auto& ch : r.checks)
        assertions.push_back({{"name", ch.name},
                              {"anchor", ch.anchor},
                              {"value", io::number(ch.value)},
                              {"relation", ch.relation},
                              {"limit", io::number(ch.limit)},
                              {"pass", ch.pass}});
    const Json summary{{"command", c.command},
                       {"convention", {{"normalization", GeometryModel::normalization},
                                       {"trivialization", "upsilon: phi_upsilon = phi_omega + 2n log r"}}},
                       {"inputs", inputs_json(c)},
                       {"values", r.values},
                       {"assertions", assertions},
                       {"pass", r.pass()}};
    io::write_text(c.output_dir / (c.command + ".json"), summary.dump(2) + "\n");
    for (const auto& [name, text] : r.files) io::write_text(c.output_dir / name, text);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Json timing{{"command", c.command}, {"started", started}, {"seconds", seconds}};
    io::write_text(c.output_dir / (c.command + ".timing.json"), timing.dump(2) + "\n");

    for (const auto& ch : r.checks)
        if (!ch.pass)
            std::cerr << fmt::format("assertion failed [{}]: {} = {:.6g}, required {} {:.6g}\n", ch.anchor, ch.name,
                                     ch.value, ch.relation, ch.limit);
    std::cout << fmt::format("{}: {} of {} assertions passed; summary in {}\n", c.command,
                             std::count_if(r.checks.begin(), r.checks.end(), [](const auto& ch) { return ch.pass; }),
                             r.checks.size(), (c.output_dir / (c.command + ".json")).string());
    return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on radial Kahler potentials"};
    Config cfg;
    std::string command, config_path, output_dir;
    app.add_option("command", command, "gaussian-report | plambda | dh | ma-x | energy | geodesic | ding | "
                                       "conjugate | ode | all-acceptance");
    app.add_option("--config", config_path, "INI configuration file");
    int n = 0, x_points = 0, t_points = 0, lambda_points = 0, order = 0;
    double lambda = 0, x_min = 0, x_max = 0, lambda_max = 0, speed = 0, delta = 0, epsilon = 0;
    std::vector<double> weights;
    auto* o_n = app.add_option("--n", n, "complex dimension");
    auto* o_w = app.add_option("--weights", weights, "diagonal weights of X");
    auto* o_l = app.add_option("--lambda", lambda, "level for P_lambda");
    auto* o_xmin = app.add_option("--x-min", x_min);
    auto* o_xmax = app.add_option("--x-max", x_max);
    auto* o_xp = app.add_option("--x-points", x_points);
    auto* o_tp = app.add_option("--t-points", t_points, "time nodes (odd)");
    auto* o_lm = app.add_option("--lambda-max", lambda_max);
    auto* o_lp = app.add_option("--lambda-points", lambda_points);
    auto* o_sp = app.add_option("--speed", speed, "translation speed c");
    auto* o_d = app.add_option("--delta", delta, "conjugation ball radius");
    auto* o_e = app.add_option("--epsilon", epsilon, "perturbation size");
    auto* o_o = app.add_option("--order", order, "vanishing order of the perturbation");
    auto* o_out = app.add_option("--output-dir", output_dir);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (!config_path.empty()) read_ini(config_path, cfg);
        if (const char* env = std::getenv("RADSOL_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
        if (!command.empty()) cfg.command = command;
        if (*o_n) cfg.n = n;
        if (*o_w) cfg.weights = weights;
        if (*o_l) cfg.lambda = lambda;
        if (*o_xmin) cfg.x_min = x_min;
        if (*o_xmax) cfg.x_max = x_max;
        if (*o_xp) cfg.x_points = x_points;
        if (*o_tp) cfg.t_points = t_points;
        if (*o_lm) cfg.lambda_max = lambda_max;
        if (*o_lp) cfg.lambda_points = lambda_points;
        if (*o_sp) cfg.speed = speed;
        if (*o_d) cfg.delta = delta;
        if (*o_e) cfg.epsilon = epsilon;
        if (*o_o) cfg.order = order;
        if (*o_out) cfg.output_dir = output_dir;
        validate(cfg);
        return execute(cfg);
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
