#include "rspde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rspde/greens.hpp"
#include "rspde/io.hpp"
#include "rspde/obstacle.hpp"
#include "rspde/registry.hpp"
#include "rspde/spde.hpp"

namespace rspde {

namespace {

constexpr const char* kVersion = "rspde 1.0.0";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// sup over the interior points of the reference lattice of |coarse extension - reference|
double sup_error_on_net(const GridField& coarse, const GridField& reference) {
    const GridSpec& ref = reference.spec();
    double err = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        err = std::max(err, std::abs(multilinear_extend(coarse, ref.point(k)) - reference[k]));
    }
    return err;
}

void summarise(LevelRow& row, double p) {
    const auto r = static_cast<double>(row.sup_errors.size());
    if (row.sup_errors.empty()) return;
    double mean = 0.0;
    for (double e : row.sup_errors) mean += std::pow(e, p);
    mean /= r;
    double var = 0.0;
    for (double e : row.sup_errors) var += (std::pow(e, p) - mean) * (std::pow(e, p) - mean);
    row.mean_error_p = mean;
    row.std_error = row.sup_errors.size() > 1 ? std::sqrt(var / (r - 1.0) / r) : 0.0;
}

double mean_error(const LevelRow& row) {
    double s = 0.0;
    for (double e : row.sup_errors) s += e;
    return row.sup_errors.empty() ? 0.0 : s / static_cast<double>(row.sup_errors.size());
}

double fit_slope(const std::vector<LevelRow>& rows) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : rows) {
        const double e = mean_error(row);
        if (e > 0.0) {
            xs.push_back(std::log(static_cast<double>(row.n)));
            ys.push_back(std::log(e));
        }
    }
    if (xs.size() < 2) return 0.0;
    const double nx = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / nx;
        my += ys[i] / nx;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::DeterministicConvergence: return "deterministic-convergence";
        case ExperimentKind::StochasticConvergence: return "stochastic-convergence";
        case ExperimentKind::GreenTable: return "green-table";
        case ExperimentKind::PropertySuite: return "property-suite";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto k : {ExperimentKind::DeterministicConvergence, ExperimentKind::StochasticConvergence,
                   ExperimentKind::GreenTable, ExperimentKind::PropertySuite}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

double default_moment_order(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 6.0;
        case 3: return 8.0;
        default: throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.dim < 1 || cfg.dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
    if (cfg.levels.empty()) throw std::invalid_argument("at least one level is required");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        if (cfg.levels[i] < 2) throw std::invalid_argument("levels must be at least 2");
        if (i > 0 && (cfg.levels[i] <= cfg.levels[i - 1] || cfg.levels[i] % cfg.levels[i - 1] != 0)) {
            throw std::invalid_argument("levels must be strictly increasing, each dividing the next");
        }
    }
    if (cfg.reference <= cfg.levels.back() || cfg.reference % cfg.levels.back() != 0) {
        throw std::invalid_argument("reference must be a strict multiple of every level");
    }
    if (cfg.kind == ExperimentKind::StochasticConvergence &&
        !is_power_of_two(cfg.reference / cfg.levels.front())) {
        throw std::invalid_argument("coupled noise needs the reference to be a power-of-two multiple of the levels");
    }
    if (cfg.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (cfg.p < 1.0) throw std::invalid_argument("moment order p must be at least 1");
    if (!(cfg.lcp_tol > 0.0) || !(cfg.picard_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (cfg.max_picard < 1) throw std::invalid_argument("max_picard must be at least 1");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("kind")) cfg.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    cfg.dim = j.value("dim", cfg.dim);
    cfg.levels = j.value("levels", cfg.levels);
    cfg.reference = j.value("reference", cfg.reference);
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.p = j.contains("p") ? j.at("p").get<double>() : default_moment_order(cfg.dim);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.barrier = j.value("barrier", cfg.barrier);
    cfg.f = j.value("f", cfg.f);
    cfg.sigma = j.value("sigma", cfg.sigma);
    cfg.lcp_tol = j.value("lcp_tol", cfg.lcp_tol);
    cfg.picard_tol = j.value("picard_tol", cfg.picard_tol);
    cfg.max_picard = j.value("max_picard", cfg.max_picard);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    validate(cfg);
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    // threads and output_dir do not affect results and stay out of the report
    return {{"kind", to_string(cfg.kind)},
            {"dim", cfg.dim},
            {"levels", cfg.levels},
            {"reference", cfg.reference},
            {"replicates", cfg.replicates},
            {"p", cfg.p},
            {"seed", cfg.seed},
            {"barrier", cfg.barrier},
            {"f", cfg.f},
            {"sigma", cfg.sigma},
            {"lcp_tol", cfg.lcp_tol},
            {"picard_tol", cfg.picard_tol},
            {"max_picard", cfg.max_picard}};
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::mutex mutex;
    std::size_t next = 0;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = 0;
                {
                    std::lock_guard lock(mutex);
                    if (next >= count || error) return;
                    i = next++;
                }
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ConvergenceReport run_deterministic_convergence(const ExperimentConfig& cfg) {
    validate(cfg);
    const ScalarFunction v = make_barrier(cfg.barrier, cfg.dim);
    LcpOptions options;
    options.tol = cfg.lcp_tol;

    ConvergenceReport report;
    report.config = cfg;
    const GridField reference = [&] {
        try {
            return deterministic_scheme(v, GridSpec(cfg.dim, cfg.reference), options).lattice.z;
        } catch (const std::exception& e) {
            throw std::runtime_error("reference level n=" + std::to_string(cfg.reference) + ": " + e.what());
        }
    }();

    for (int n : cfg.levels) {
        const auto start = Clock::now();
        LevelRow row;
        row.n = n;
        try {
            const DeterministicSolution sol = deterministic_scheme(v, GridSpec(cfg.dim, n), options);
            row.sup_errors.push_back(sup_error_on_net(sol.lattice.z, reference));
        } catch (const std::exception& e) {
            throw std::runtime_error("level n=" + std::to_string(n) + ": " + e.what());
        }
        summarise(row, cfg.p);
        row.wall_seconds = seconds_since(start);
        report.rows.push_back(std::move(row));
    }

    report.monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const double prev = report.rows[i - 1].sup_errors.front();
        const double cur = report.rows[i].sup_errors.front();
        if (!(cur < prev || (cur == 0.0 && prev == 0.0))) report.monotone = false;
    }
    report.slope = fit_slope(report.rows);
    return report;
}

std::vector<NoiseSample> coupled_noise_chain(const ExperimentConfig& cfg, int replicate) {
    const std::uint64_t seed = replicate_seed(cfg.seed, static_cast<std::uint64_t>(replicate));
    std::vector<int> wanted = cfg.levels;
    wanted.push_back(cfg.reference);

    std::vector<NoiseSample> chain;
    NoiseSample current = sample_noise(GridSpec(cfg.dim, wanted.front()), seed, 0);
    for (int n : wanted) {
        while (current.spec().n() < n) current = refine_noise(current);
        if (current.spec().n() != n) throw std::invalid_argument("levels are not reachable by halving");
        chain.push_back(current);
    }
    return chain;
}

ConvergenceReport run_stochastic_convergence(const ExperimentConfig& cfg) {
    validate(cfg);
    const CoefficientPair coeffs = make_coefficients(cfg.f, cfg.sigma, cfg.dim);
    PicardOptions options;
    options.tol = cfg.picard_tol;
    options.max_iters = cfg.max_picard;
    options.lcp.tol = cfg.lcp_tol;

    const std::size_t levels = cfg.levels.size();
    const auto replicates = static_cast<std::size_t>(cfg.replicates);
    std::vector<std::vector<double>> errors(replicates);
    std::vector<std::vector<double>> seconds(replicates, std::vector<double>(levels, 0.0));
    std::vector<std::string> failure(replicates);

    parallel_for(replicates, cfg.threads, [&](std::size_t r) {
        try {
            const std::vector<NoiseSample> chain = coupled_noise_chain(cfg, static_cast<int>(r));
            const auto ref_noise = std::make_shared<const NoiseSample>(chain.back());
            const SpdeSolution ref = picard_solve(coeffs, ref_noise, options);
            std::vector<double> errs(levels);
            for (std::size_t l = 0; l < levels; ++l) {
                const auto start = Clock::now();
                const SpdeSolution sol = picard_solve(coeffs, std::make_shared<const NoiseSample>(chain[l]), options);
                errs[l] = sup_error_on_net(sol.u, ref.u);
                seconds[r][l] = seconds_since(start);
            }
            errors[r] = std::move(errs);
        } catch (const std::exception& e) {
            failure[r] = "replicate " + std::to_string(r) + ": " + e.what();
        }
    });

    ConvergenceReport report;
    report.config = cfg;
    for (std::size_t r = 0; r < replicates; ++r) {
        if (!failure[r].empty()) {
            ++report.failed_replicates;
            report.failures.push_back(failure[r]);
        }
    }
    if (report.failed_replicates * 20 > cfg.replicates) {
        throw std::runtime_error(std::to_string(report.failed_replicates) + " of " + std::to_string(cfg.replicates) +
                                 " replicates failed (limit 5%); first: " + report.failures.front());
    }
    for (std::size_t l = 0; l < levels; ++l) {
        LevelRow row;
        row.n = cfg.levels[l];
        for (std::size_t r = 0; r < replicates; ++r) {
            if (!failure[r].empty()) continue;
            row.sup_errors.push_back(errors[r][l]);
            row.wall_seconds += seconds[r][l];
        }
        summarise(row, cfg.p);
        report.rows.push_back(std::move(row));
    }

    report.monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const LevelRow& a = report.rows[i - 1];
        const LevelRow& b = report.rows[i];
        const double combined = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
        if (!(a.mean_error_p - b.mean_error_p > combined)) report.monotone = false;
    }
    report.slope = fit_slope(report.rows);
    return report;
}

nlohmann::json report_to_json(const ConvergenceReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"n", row.n},
                        {"replicates", row.sup_errors.size()},
                        {"mean_sup_error", mean_error(row)},
                        {"mean_error_p", row.mean_error_p},
                        {"std_error", row.std_error}});
    }
    const std::string criterion = report.config.kind == ExperimentKind::StochasticConvergence
                                      ? "mean error^p decreases by more than one combined standard error per level"
                                      : "sup error strictly decreases per level";
    nlohmann::json verdicts = nlohmann::json::array();
    verdicts.push_back({{"name", "monotone_decrease"}, {"criterion", criterion}, {"passed", report.monotone}});
    return {{"kind", to_string(report.config.kind)},
            {"config", config_to_json(report.config)},
            {"error_net", "interior points of the reference lattice"},
            {"rows", rows},
            {"monotone", report.monotone},
            {"log_log_slope", report.slope},
            {"failed_replicates", report.failed_replicates},
            {"failures", report.failures},
            {"verdicts", verdicts}};
}

std::string errors_csv(const ConvergenceReport& report) {
    std::string out = "level_n,replicate,sup_error\n";
    for (const auto& row : report.rows) {
        for (std::size_t r = 0; r < row.sup_errors.size(); ++r) {
            out += std::to_string(row.n) + "," + std::to_string(r) + "," + format_double(row.sup_errors[r]) + "\n";
        }
    }
    return out;
}

void write_convergence_outputs(const ConvergenceReport& report) {
    const auto& dir = report.config.output_dir;
    write_file_atomic(dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_file_atomic(dir / "errors.csv", errors_csv(report));

    nlohmann::json timings = nlohmann::json::array();
    for (const auto& row : report.rows) timings.push_back({{"n", row.n}, {"wall_seconds", row.wall_seconds}});
    const nlohmann::json manifest = {
        {"version", kVersion},
        {"config", config_to_json(report.config)},
        {"seed", report.config.seed},
        {"replicate_seed_rule", "mix64(mix64(seed) ^ replicate * 0xD6E8FEB86659FD93)"},
        {"noise_levels", "sampled at the coarsest level, refined by halving up to the reference"},
        {"timings", timings}};
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string green_table(int dim, int n, int points) {
    const GridSpec spec(dim, n);
    if (points < 2) throw std::invalid_argument("green table needs at least 2 points per axis");
    const int per_axis = points - 1;
    std::size_t count = 1;
    for (int j = 0; j < dim; ++j) count *= static_cast<std::size_t>(per_axis);

    const auto net_point = [&](std::size_t idx) {
        Point x{0.0, 0.0, 0.0};
        for (int j = 0; j < dim; ++j) {
            x[j] = static_cast<double>(idx % static_cast<std::size_t>(per_axis) + 1) / points;
            idx /= static_cast<std::size_t>(per_axis);
        }
        return x;
    };

    std::string out;
    for (int j = 1; j <= dim; ++j) out += "x" + std::to_string(j) + ",";
    for (int j = 1; j <= dim; ++j) out += "y" + std::to_string(j) + ",";
    out += "K,Kn,Kprime,Kcaret_n\n";
    const KernelTag tags[] = {KernelTag::Continuous, KernelTag::Discrete, KernelTag::InterpolatedContinuous,
                              KernelTag::InterpolatedDiscrete};
    for (std::size_t a = 0; a < count; ++a) {
        const Point x = net_point(a);
        for (std::size_t b = 0; b < count; ++b) {
            const Point y = net_point(b);
            for (int j = 0; j < dim; ++j) out += format_double(x[j]) + ",";
            for (int j = 0; j < dim; ++j) out += format_double(y[j]) + ",";
            for (int t = 0; t < 4; ++t) {
                out += format_double(eval_kernel(KernelKind{tags[t], std::nullopt}, spec, x, y));
                out += t < 3 ? "," : "\n";
            }
        }
    }
    return out;
}

}  // namespace rspde
