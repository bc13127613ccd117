#pragma once

#include "radsol/io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace radsol::acceptance {

/// One numeric assertion: passes when `value` compares to `limit` as `relation`.
struct Check {
    std::string name;
    std::string anchor;     ///< short stable tag naming the property being checked
    std::string relation;   ///< "<=", ">=" or "=="
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string key;
    std::string title;
    std::vector<Check> checks;
    io::Json data;           ///< computed values worth keeping in the summary
    double seconds = 0.0;    ///< wall time, kept out of the deterministic summary
    double budget = 0.0;     ///< advisory runtime budget in seconds (0 = none)

    bool pass() const;
};

/// Knobs for the acceptance suite; defaults reproduce the documented settings.
struct Settings {
    std::vector<int> dims{1, 2, 3};
    double x_min = -8.0;
    double x_max = 4.0;
    int x_points = 4097;       ///< potential grid
    int slab_t_points = 65;
    int slab_x_points = 2049;
    int energy_t_points = 65;  ///< Simpson nodes for E_X in the acceptance suite
    double lambda_max = 10.0;
    int lambda_points = 200;
    double conj_delta = 0.3;
    double conj_epsilon = 0.1;
    int gronwall_pairs = 100;
    std::uint32_t seed = 20240611;
};

CriterionResult gaussian_golden(const Settings& s);
CriterionResult mass_independence(const Settings& s);
CriterionResult measure_monotonicity(const Settings& s);
CriterionResult step_convergence(const Settings& s);
CriterionResult convexity_trichotomy(const Settings& s);
CriterionResult primitivity_cocycle(const Settings& s);
CriterionResult shrinker_detection(const Settings& s);
CriterionResult geodesic_certificates(const Settings& s);
CriterionResult ode_suite(const Settings& s);
CriterionResult conjugation(const Settings& s);
CriterionResult regularization_ladder(const Settings& s);

struct Criterion {
    int id;
    const char* key;
    CriterionResult (*run)(const Settings&);
};

/// The eleven criteria in order.
const std::vector<Criterion>& criteria();

/// Runs the selected criteria (all when `ids` is empty), concurrently when asked;
/// results come back in id order regardless.
std::vector<CriterionResult> run(const Settings& s, const std::vector<int>& ids = {}, bool parallel = true);

/// Deterministic record: no timing information.
io::Json to_json(const CriterionResult& r);
/// "[PASS] 1 gaussian-golden: ... (0.41 s)"
std::string summary_line(const CriterionResult& r);

}  // namespace radsol::acceptance
