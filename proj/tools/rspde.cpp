#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rspde/greens.hpp"
#include "rspde/harness.hpp"
#include "rspde/io.hpp"
#include "rspde/noise.hpp"
#include "rspde/obstacle.hpp"
#include "rspde/registry.hpp"
#include "rspde/spde.hpp"

using namespace rspde;
using nlohmann::json;

namespace {

json residuals_json(const LcpResiduals& r) {
    return {{"max_violation", r.max_violation},
            {"max_negative_eta", r.max_negative_eta},
            {"complementarity_gap", r.complementarity_gap}};
}

json smallness_json(const SmallnessReport& s) {
    return {{"p", s.p},
            {"epsilon", s.epsilon},
            {"gamma", s.gamma},
            {"c_p", s.c_p},
            {"a", s.a},
            {"b_holder", s.b_holder},
            {"lipschitz", s.lipschitz},
            {"c_d", s.c_d},
            {"c_d_tilde", s.c_d_tilde},
            {"lhs_lattice", s.lhs_lattice},
            {"lhs", s.lhs},
            {"satisfied_lattice", s.satisfied_lattice},
            {"satisfied", s.satisfied}};
}

struct ObstacleArgs {
    int dim = 1;
    int n = 16;
    std::string barrier = "sine";
    std::string barrier_file;
    double tol = 1e-10;
    std::string out = "obstacle";
};

int obstacle_solve(const ObstacleArgs& a) {
    const GridSpec spec(a.dim, a.n);
    GridField v = a.barrier_file.empty() ? sample_on_lattice(make_barrier(a.barrier, a.dim), spec)
                                         : read_grid_file(a.barrier_file);
    if (!(v.spec() == spec)) throw std::invalid_argument("barrier file does not match --dim/--n");
    LcpOptions options;
    options.tol = a.tol;
    const LcpSolution sol = solve_lcp(LcpProblem{v}, options);
    write_file_atomic(a.out + "_z.csv", grid_to_csv(sol.z));
    write_file_atomic(a.out + "_eta.csv", grid_to_csv(sol.eta));
    const json report = {{"d", a.dim},
                         {"n", a.n},
                         {"barrier", a.barrier_file.empty() ? a.barrier : a.barrier_file},
                         {"tol", a.tol},
                         {"sweeps", sol.sweeps},
                         {"polished", sol.polished},
                         {"residuals", residuals_json(sol.residuals)}};
    write_file_atomic(a.out + "_report.json", report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

struct SpdeArgs {
    int dim = 1;
    int n = 32;
    std::string f = "linear:a=-0.1,b=0";
    std::string sigma = "const:c=1";
    std::uint64_t seed = 42;
    double tol = 1e-8;
    int max_iters = 200;
    std::string out = "spde";
};

int spde_solve(const SpdeArgs& a) {
    const GridSpec spec(a.dim, a.n);
    const CoefficientPair coeffs = make_coefficients(a.f, a.sigma, a.dim);
    const auto noise = std::make_shared<const NoiseSample>(sample_noise(spec, a.seed));
    PicardOptions options;
    options.tol = a.tol;
    options.max_iters = a.max_iters;
    const SpdeSolution sol = picard_solve(coeffs, noise, options);

    GridField zero(spec);
    const LcpResiduals res = lcp_residuals(zero, sol.u, sol.eta);
    json smallness;
    try {
        SmallnessInputs in;
        in.p = default_moment_order(a.dim);
        smallness = smallness_json(check_smallness(coeffs, spec, in));
    } catch (const std::exception& e) {
        smallness = {{"error", e.what()}};
    }
    write_file_atomic(a.out + "_u.csv", grid_to_csv(sol.u));
    write_file_atomic(a.out + "_eta.csv", grid_to_csv(sol.eta));
    const json manifest = {{"d", a.dim},
                           {"n", a.n},
                           {"f", a.f},
                           {"sigma", a.sigma},
                           {"seed", a.seed},
                           {"tol", a.tol},
                           {"picard_iterations", sol.picard_iterations},
                           {"final_change", sol.final_change},
                           {"residuals", residuals_json(res)},
                           {"equation_residual", equation_residual(coeffs, *noise, sol.u, sol.eta).sup_norm()},
                           {"smallness", smallness}};
    write_file_atomic(a.out + "_manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int convergence(const std::string& mode, const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg = config_from_json(json::parse(read_text_file(config_path)));
    cfg.kind = mode == "det" ? ExperimentKind::DeterministicConvergence : ExperimentKind::StochasticConvergence;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    validate(cfg);
    const ConvergenceReport report = cfg.kind == ExperimentKind::DeterministicConvergence
                                         ? run_deterministic_convergence(cfg)
                                         : run_stochastic_convergence(cfg);
    write_convergence_outputs(report);
    for (const auto& row : report.rows) {
        std::printf("n=%-5d mean error^p %.6e  (se %.2e)\n", row.n, row.mean_error_p, row.std_error);
    }
    std::printf("slope %.4f  monotone %s\n", report.slope, report.monotone ? "yes" : "no");
    return report.monotone ? 0 : 1;
}

int properties(const PropertySuiteConfig& cfg, bool as_json) {
    const auto verdicts = run_property_suite(cfg);
    if (as_json) {
        std::cout << verdicts_to_json(verdicts).dump(2) << "\n";
    } else {
        for (const auto& v : verdicts) {
            const char* tag = v.passed ? "PASS" : (v.asserted ? "FAIL" : "INFO");
            std::printf("%-4s %-34s %s\n", tag, v.name.c_str(), v.detail.c_str());
        }
    }
    return all_passed(verdicts) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice schemes for reflected stochastic elliptic equations on the unit cube"};
    app.require_subcommand(1);

    auto* obstacle = app.add_subcommand("obstacle", "Discrete obstacle problem");
    auto* obstacle_solve_cmd = obstacle->add_subcommand("solve", "Solve B Z = eta, Z >= -V");
    obstacle->require_subcommand(1);
    ObstacleArgs oa;
    obstacle_solve_cmd->add_option("--dim", oa.dim)->check(CLI::Range(1, 3));
    obstacle_solve_cmd->add_option("--n", oa.n)->check(CLI::Range(2, 1 << 20));
    obstacle_solve_cmd->add_option("--barrier", oa.barrier, "NAME[:k=v,...]");
    obstacle_solve_cmd->add_option("--barrier-file", oa.barrier_file, "GridField CSV or JSON")->check(CLI::ExistingFile);
    obstacle_solve_cmd->add_option("--tol", oa.tol);
    obstacle_solve_cmd->add_option("--out", oa.out, "output prefix");

    auto* spde = app.add_subcommand("spde", "Reflected stochastic equation");
    auto* spde_solve_cmd = spde->add_subcommand("solve", "Picard solve of the lattice scheme");
    spde->require_subcommand(1);
    SpdeArgs sa;
    spde_solve_cmd->add_option("--dim", sa.dim)->check(CLI::Range(1, 3));
    spde_solve_cmd->add_option("--n", sa.n)->check(CLI::Range(2, 1 << 20));
    spde_solve_cmd->add_option("--f", sa.f, "NAME[:k=v,...]");
    spde_solve_cmd->add_option("--sigma", sa.sigma, "NAME[:k=v,...]");
    spde_solve_cmd->add_option("--seed", sa.seed);
    spde_solve_cmd->add_option("--tol", sa.tol);
    spde_solve_cmd->add_option("--max-iters", sa.max_iters);
    spde_solve_cmd->add_option("--out", sa.out, "output prefix");

    auto* conv = app.add_subcommand("convergence", "Refinement studies");
    std::string mode;
    std::string config_path;
    std::string out_dir;
    conv->add_option("mode", mode, "det | stoch")->required()->check(CLI::IsMember({"det", "stoch"}));
    conv->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
    conv->add_option("--out-dir", out_dir, "overrides output_dir of the config");

    auto* green = app.add_subcommand("green-table", "Tabulate K, K_n, K', K^n");
    int gdim = 1;
    int gn = 8;
    int gpoints = 5;
    green->add_option("--dim", gdim)->check(CLI::Range(1, 3));
    green->add_option("--n", gn)->check(CLI::Range(2, 1 << 16));
    green->add_option("--points", gpoints, "evaluation net points per axis")->check(CLI::Range(2, 1000));

    auto* props = app.add_subcommand("properties", "Run the property suite");
    PropertySuiteConfig pc;
    bool as_json = false;
    props->add_option("--filter", pc.filter, "substring of property names");
    props->add_option("--scale", pc.sample_scale, "multiplier on random sample counts");
    props->add_option("--seed", pc.seed);
    props->add_flag("--flip-sign-lemma", pc.flip_sign_lemma, "mutation check for the suite");
    props->add_flag("--json", as_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (obstacle_solve_cmd->parsed()) return obstacle_solve(oa);
        if (spde_solve_cmd->parsed()) return spde_solve(sa);
        if (conv->parsed()) return convergence(mode, config_path, out_dir);
        if (green->parsed()) {
            std::cout << green_table(gdim, gn, gpoints);
            return 0;
        }
        if (props->parsed()) return properties(pc, as_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
