#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rspde/lattice.hpp"
#include "rspde/noise.hpp"

namespace rspde {

enum class ExperimentKind { DeterministicConvergence, StochasticConvergence, GreenTable, PropertySuite };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// p = 2 (d = 1), 6 (d = 2), 8 (d = 3).
double default_moment_order(int dim);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::DeterministicConvergence;
    int dim = 1;
    std::vector<int> levels{8, 16, 32, 64};
    int reference = 512;
    int replicates = 1;
    double p = 2.0;
    std::uint64_t seed = 42;
    std::string barrier = "sine";
    std::string f = "linear:a=-0.1,b=0";
    std::string sigma = "const:c=1";
    double lcp_tol = 1e-10;
    double picard_tol = 1e-8;
    int max_picard = 200;
    int threads = 0;  ///< 0 = hardware concurrency
    std::filesystem::path output_dir = ".";
};

/// Throws std::invalid_argument describing the first violated invariant.
void validate(const ExperimentConfig& cfg);

/// Missing keys keep their defaults; "p" defaults to default_moment_order(d).
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct LevelRow {
    int n = 0;
    std::vector<double> sup_errors;  ///< one per successful replicate
    double mean_error_p = 0.0;       ///< (1/R) sum error^p
    double std_error = 0.0;          ///< standard error of mean_error_p
    double wall_seconds = 0.0;
};

struct ConvergenceReport {
    ExperimentConfig config;
    std::vector<LevelRow> rows;
    bool monotone = false;
    double slope = 0.0;  ///< least-squares slope of log(mean error^p) against log n
    int failed_replicates = 0;
    std::vector<std::string> failures;
};

/**
 * Obstacle problem at each level and at the reference level; the error at
 * level n is the sup over the reference lattice of |z^n - z^ref|.
 */
ConvergenceReport run_deterministic_convergence(const ExperimentConfig& cfg);

/// The levels' noise samples of one replicate, produced by successive refinement
/// from the coarsest level, plus the reference level last.
std::vector<NoiseSample> coupled_noise_chain(const ExperimentConfig& cfg, int replicate);

/**
 * Per replicate: couple all levels to one Brownian sheet via the refinement
 * chain, solve the reflected equation at each level, and record the sup over
 * the reference lattice of |u~^n - u~^ref|.
 */
ConvergenceReport run_stochastic_convergence(const ExperimentConfig& cfg);

/// Report without timings, so re-runs are byte-identical.
nlohmann::json report_to_json(const ConvergenceReport& report);
/// `level_n,replicate,sup_error`
std::string errors_csv(const ConvergenceReport& report);
/// Writes report.json, errors.csv and manifest.json (timings, seeds, versions) into cfg.output_dir.
void write_convergence_outputs(const ConvergenceReport& report);

/// `x1[,x2[,x3]],y1[,..],K,Kn,Kprime,Kcaret_n` on the product of a points^d net with itself.
std::string green_table(int dim, int n, int points);

struct PropertyVerdict {
    std::string name;
    bool passed = false;
    bool asserted = true;  ///< reported-only properties never fail the suite
    std::string detail;
};

struct PropertySuiteConfig {
    std::string filter;         ///< substring filter on property names
    double sample_scale = 1.0;  ///< multiplies every random sample count
    std::uint64_t seed = 2024;
    bool flip_sign_lemma = false;  ///< mutation hook: asserts <b+, A b> >= 0 instead
};

std::vector<std::string> property_names();
std::vector<PropertyVerdict> run_property_suite(const PropertySuiteConfig& cfg);
nlohmann::json verdicts_to_json(const std::vector<PropertyVerdict>& verdicts);
bool all_passed(const std::vector<PropertyVerdict>& verdicts);

/// Runs task(i) for i in [0, count) on up to `threads` workers; results must be stored by index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace rspde
