#include "fbpm/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbpm/io.hpp"

namespace fbpm {

const std::set<std::string>& known_config_keys()
{
    static const std::set<std::string> keys = {
        "problem.input",    "problem.signal",    "problem.n",          "problem.amplitude", "problem.noise",
        "problem.seed",     "problem.image",     "problem.delta",      "exponent.kind",     "exponent.p",
        "exponent.sigma",   "exponent.k",        "exponent.p_min",     "exponent.p_max",    "rothe.T",
        "rothe.m",          "rothe.epsilon",     "rothe.gamma",        "rothe.newton_tol",  "rothe.newton_max_iter",
        "sweep.eps",        "sweep.m",           "sweep.space_splits", "sweep.time_splits", "sweep.bins",
        "io.out",           "verify.seed",       "verify.below_threshold",
    };
    return keys;
}

namespace {

std::string fmt(double v) { return format_number(v); }

template <class F>
auto config_guard(const std::string& key, F&& f)
{
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

ExponentField build_exponent(const Config& cfg, const Grid& grid, const ScalarField& reference)
{
    const std::string& kind = cfg.require("exponent.kind");
    if (kind == "constant") {
        const double p = cfg.require_double("exponent.p");
        return config_guard("exponent.p", [&] { return build_constant(p, grid); });
    }
    if (kind == "edge_adaptive") {
        EdgeAdaptiveParams params;
        params.sigma = cfg.get_double("exponent.sigma", params.sigma);
        params.k = cfg.get_double("exponent.k", params.k);
        params.p_min = cfg.get_double("exponent.p_min", params.p_min);
        params.p_max = cfg.get_double("exponent.p_max", params.p_max);
        return config_guard("exponent.kind", [&] { return build_edge_adaptive(grid, reference, params); });
    }
    throw ConfigError("key 'exponent.kind': expected constant or edge_adaptive, got '" + kind + "'");
}

class Summary {
public:
    template <class T>
    void add(const std::string& key, const T& value)
    {
        if constexpr (std::is_same_v<T, double>) {
            out_ << key << '=' << fmt(value) << '\n';
        } else if constexpr (std::is_same_v<T, bool>) {
            out_ << key << '=' << (value ? "true" : "false") << '\n';
        } else {
            out_ << key << '=' << value << '\n';
        }
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string final_state_csv(const ScalarField& u, const Grid& grid)
{
    const EdgeField g = gradient(grid, u);
    CsvTable table;
    table.header = {"x", "u", "grad_u"};
    for (std::size_t i = 0; i < u.size(); ++i) {
        // Forward difference; the last node has no edge to its right.
        const double grad = i + 1 < u.size() ? g.axis[0][i] : 0.0;
        table.rows.push_back({grid.position(i)[0], u[i], grad});
    }
    return write_csv(table);
}

}  // namespace

Problem build_problem(const Config& cfg)
{
    const std::string& input = cfg.require("problem.input");
    const double delta = cfg.require_double("problem.delta");
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw ConfigError("key 'problem.delta': must lie in [0, 1]");
    }

    if (input == "signal") {
        const SignalKind kind = config_guard("problem.signal", [&] { return parse_signal_kind(cfg.require("problem.signal")); });
        const std::uint64_t n = cfg.get_uint("problem.n", 256);
        if (n < 2) {
            throw ConfigError("key 'problem.n': need at least 2 nodes");
        }
        const double amplitude = cfg.get_double("problem.amplitude", 1.0);
        const double noise = cfg.get_double("problem.noise", 0.0);
        if (noise < 0.0) {
            throw ConfigError("key 'problem.noise': must be >= 0");
        }
        const std::uint64_t seed = cfg.get_uint("problem.seed", 42);
        Grid grid = Grid::unit_line(n);
        ScalarField f = gen_signal(kind, n, amplitude, noise, seed);
        ExponentField p = build_exponent(cfg, grid, f);
        return {grid, std::move(f), FluxModel(delta, std::move(p))};
    }
    if (input == "image") {
        const std::string& path = cfg.require("problem.image");
        std::string bytes;
        try {
            bytes = read_file(path);
        } catch (const std::exception& e) {
            throw ConfigError("key 'problem.image': " + std::string(e.what()));
        }
        Image img = [&] {
            try {
                return read_pgm(bytes);
            } catch (const PgmError& e) {
                throw ConfigError("key 'problem.image': " + std::string(e.what()));
            }
        }();
        ExponentField p = build_exponent(cfg, img.grid, img.pixels);
        return {img.grid, std::move(img.pixels), FluxModel(delta, std::move(p))};
    }
    throw ConfigError("key 'problem.input': expected signal or image, got '" + input + "'");
}

RotheSetup build_rothe(const Config& cfg, double epsilon, double K)
{
    RotheSetup setup;
    RotheConfig& rc = setup.config;
    rc.T = cfg.require_double("rothe.T");
    rc.epsilon = epsilon;
    rc.gamma = cfg.get_double("rothe.gamma", 0.5 * epsilon);
    rc.newton_tol = cfg.get_double("rothe.newton_tol", rc.newton_tol);
    rc.newton_max_iter = static_cast<int>(cfg.get_uint("rothe.newton_max_iter", rc.newton_max_iter));
    rc.m = 1;
    config_guard("rothe", [&] {
        rc.validate();
        return 0;
    });
    setup.m0 = min_steps(K, rc.T, rc.epsilon, rc.gamma);
    const std::string& m = cfg.require("rothe.m");
    if (m == "auto") {
        setup.m_auto = true;
        rc.m = setup.m0;
    } else {
        rc.m = parse_uint(m, "rothe.m");
        if (rc.m < 1) {
            throw ConfigError("key 'rothe.m': must be auto or a positive integer");
        }
    }
    return setup;
}

Artifacts run_artifacts(const Trajectory& traj, const RotheSetup& setup, const std::string& error,
                        const std::string& prefix)
{
    Artifacts files;
    const Grid& grid = traj.grid;
    const ScalarField& u = traj.steps.back();
    if (grid.dim() == 1) {
        files[prefix + "final.csv"] = final_state_csv(u, grid);
    } else {
        files[prefix + "final.pgm"] = write_pgm(u, grid);
    }
    const EnergyTrace trace = energy_trace(traj);
    files[prefix + "energy.csv"] = write_csv(to_csv(trace));

    const RotheConfig& rc = traj.config;
    const StructureConstants sc = growth_constants(traj.model);
    const StaircaseReport stairs = staircase_report(u, grid);
    int iterations = 0;
    int descent = 0;
    std::size_t roundoff = 0;
    double max_residual = 0.0;
    for (const auto& r : traj.results) {
        iterations += r.iterations;
        descent += r.descent_steps;
        roundoff += r.roundoff_limited ? 1 : 0;
        max_residual = std::max(max_residual, r.residual_norm);
    }

    Summary s;
    s.add("status", std::string(error.empty() ? "ok" : "failed"));
    if (!error.empty()) {
        s.add("error", error);
    }
    s.add("dim", grid.dim());
    s.add("nx", grid.nx());
    s.add("ny", grid.ny());
    s.add("h", grid.spacing());
    s.add("delta", traj.model.delta());
    s.add("p_minus", traj.model.exponent().p_minus());
    s.add("p_plus", traj.model.exponent().p_plus());
    s.add("T", rc.T);
    s.add("epsilon", rc.epsilon);
    s.add("gamma", rc.gamma);
    s.add("m", rc.m);
    s.add("m_auto", setup.m_auto);
    s.add("m0", setup.m0);
    s.add("energy_inequality_guaranteed", traj.energy_inequality_guaranteed);
    s.add("convex_steps", traj.convex_steps);
    s.add("lambda1", sc.lambda1);
    s.add("lambda2", sc.lambda2);
    s.add("K", sc.K);
    s.add("coercive", sc.coercive);
    s.add("steps_completed", traj.steps.size() - 1);
    s.add("newton_iterations", iterations);
    s.add("descent_steps", descent);
    s.add("roundoff_limited_steps", roundoff);
    s.add("max_residual", max_residual);
    s.add("energy_initial", trace.initial_energy);
    s.add("energy_final", trace.rows.back().energy);
    s.add("min_margin", trace.min_margin());
    s.add("max_mean_drift", trace.max_mean_drift());
    s.add("sign_change_count", stairs.sign_change_count);
    s.add("max_abs_gradient", stairs.max_abs_gradient);
    s.add("gradient_range_width", stairs.gradient_range_width);
    files[prefix + "summary.txt"] = s.str();
    return files;
}

CommandResult cmd_run(const Config& cfg)
{
    cfg.reject_unknown(known_config_keys());
    const Problem problem = build_problem(cfg);
    const double K = monotonicity_defect(problem.model);
    const RotheSetup setup = build_rothe(cfg, cfg.require_double("rothe.epsilon"), K);

    CommandResult result;
    std::string error;
    std::optional<Trajectory> traj;
    try {
        traj = evolve(problem.f, setup.config, problem.model, problem.grid);
    } catch (const EvolveFailure& e) {
        error = e.what();
        traj = e.partial();
        result.exit_code = kExitSolverFailure;
    }
    result.files = run_artifacts(*traj, setup, error, "");

    const StaircaseReport stairs = staircase_report(traj->steps.back(), problem.grid);
    result.messages.push_back("m = " + std::to_string(setup.config.m) + (setup.m_auto ? " (auto)" : "") +
                              ", m0 = " + std::to_string(setup.m0));
    result.messages.push_back("sign changes " + std::to_string(stairs.sign_change_count) + ", max |grad u| " +
                              fmt(stairs.max_abs_gradient) + ", range width of gradient maxima " +
                              fmt(stairs.gradient_range_width));
    if (!error.empty()) {
        result.messages.push_back("solver failure: " + error);
    }
    return result;
}

CommandResult cmd_sweep(const Config& cfg)
{
    cfg.reject_unknown(known_config_keys());
    const Problem problem = build_problem(cfg);
    const double K = monotonicity_defect(problem.model);

    SweepPlan plan;
    plan.eps_list = cfg.require_double_list("sweep.eps");
    plan.T = cfg.require_double("rothe.T");
    plan.newton_tol = cfg.get_double("rothe.newton_tol", plan.newton_tol);
    plan.newton_max_iter = static_cast<int>(cfg.get_uint("rothe.newton_max_iter", plan.newton_max_iter));
    const std::string m_user = cfg.get_string("sweep.m", "auto");
    plan.m_user = m_user == "auto" ? 1 : parse_uint(m_user, "sweep.m");
    config_guard("sweep.eps", [&] {
        plan.validate();
        for (double eps : plan.eps_list) {
            plan.config_for(eps, K).validate();
        }
        return 0;
    });
    const std::size_t space_splits = cfg.get_uint("sweep.space_splits", 4);
    const std::size_t time_splits = cfg.get_uint("sweep.time_splits", 2);
    const std::size_t bins = cfg.get_uint("sweep.bins", 64);
    if (bins < 1) {
        throw ConfigError("key 'sweep.bins': need at least one bin");
    }
    const auto windows = config_guard("sweep.space_splits",
                                      [&] { return tile_windows(problem.grid, plan.T, space_splits, time_splits); });

    CommandResult result;
    const auto runs = sweep(problem.f, plan, problem.model, problem.grid);

    std::vector<const Trajectory*> complete;
    Summary s;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const SweepRun& run = runs[k];
        RotheSetup setup;
        setup.config = run.config;
        setup.m0 = min_steps(K, run.config.T, run.config.epsilon, run.config.gamma);
        setup.m_auto = run.config.m == setup.m0;
        const std::string prefix = "eps_" + std::to_string(k) + "/";
        result.files.merge(run_artifacts(*run.trajectory, setup, run.error, prefix));
        s.add("run" + std::to_string(k) + ".epsilon", run.epsilon);
        s.add("run" + std::to_string(k) + ".m", run.config.m);
        s.add("run" + std::to_string(k) + ".status", std::string(run.ok() ? "ok" : "failed"));
        if (run.ok()) {
            complete.push_back(&*run.trajectory);
        } else {
            result.exit_code = kExitSolverFailure;
            result.messages.push_back("eps " + fmt(run.epsilon) + ": solver failure: " + run.error);
        }
    }

    // Distances and Young measures use the completed runs only.
    const Eigen::MatrixXd d = pairwise_distance(complete);
    CsvTable dist;
    dist.header = {"eps"};
    for (const Trajectory* t : complete) {
        dist.header.push_back(fmt(t->config.epsilon));
    }
    for (Eigen::Index a = 0; a < d.rows(); ++a) {
        std::vector<double> row{complete[static_cast<std::size_t>(a)]->config.epsilon};
        for (Eigen::Index b = 0; b < d.cols(); ++b) {
            row.push_back(d(a, b));
        }
        dist.rows.push_back(std::move(row));
    }
    result.files["distances.csv"] = write_csv(dist);
    for (Eigen::Index a = 0; a + 1 < d.rows(); ++a) {
        s.add("gap" + std::to_string(a), d(a, a + 1));
        result.messages.push_back("d(eps " + fmt(complete[static_cast<std::size_t>(a)]->config.epsilon) + ", eps " +
                                  fmt(complete[static_cast<std::size_t>(a) + 1]->config.epsilon) +
                                  ") = " + fmt(d(a, a + 1)));
    }

    if (!complete.empty()) {
        CsvTable table;
        table.header = {"window",  "i_begin",      "i_end",        "j_begin",     "j_end",       "t_begin",
                        "t_end",   "samples",      "moment_x",     "moment_y",    "grad_u_x",    "grad_u_y",
                        "discrepancy", "tolerance", "std",         "max_abs_sample"};
        const int components = problem.grid.dim();
        std::size_t within = 0;
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const SpaceTimeWindow& win = windows[w];
            const GradientHistogram hist = young_measure(complete, win, bins);
            const Eigen::Vector2d g = window_average_gradient(*complete.back(), win);
            const double disc = barycenter_check(hist, g);
            const double tol = 0.05 * (1.0 + g.norm());
            within += disc <= tol ? 1 : 0;
            table.rows.push_back({static_cast<double>(w), static_cast<double>(win.begin[0]),
                                  static_cast<double>(win.end[0]), static_cast<double>(win.begin[1]),
                                  static_cast<double>(win.end[1]), win.t_begin, win.t_end,
                                  static_cast<double>(hist.total), hist.first_moment[0], hist.first_moment[1], g[0],
                                  g[1], disc, tol, hist.standard_deviation(), hist.half_width / 1.05});

            CsvTable h;
            h.header = components == 2 ? std::vector<std::string>{"center_x", "center_y", "count", "probability"}
                                       : std::vector<std::string>{"center", "count", "probability"};
            const auto prob = hist.probabilities();
            for (std::size_t b = 0; b < hist.counts.size(); ++b) {
                const Eigen::Vector2d c = hist.center(b);
                if (components == 2) {
                    h.rows.push_back({c[0], c[1], static_cast<double>(hist.counts[b]), prob[b]});
                } else {
                    h.rows.push_back({c[0], static_cast<double>(hist.counts[b]), prob[b]});
                }
            }
            result.files["hist_" + std::to_string(w) + ".csv"] = write_csv(h);
        }
        result.files["windows.csv"] = write_csv(table);
        s.add("windows", windows.size());
        s.add("windows_within_tolerance", within);
        result.messages.push_back("barycenter within tolerance on " + std::to_string(within) + " of " +
                                  std::to_string(windows.size()) + " windows");
    }
    result.files["summary.txt"] = s.str();
    return result;
}

void write_artifacts(const std::string& dir, const Artifacts& files)
{
    namespace fs = std::filesystem;
    for (const auto& [name, bytes] : files) {
        const fs::path path = fs::path(dir) / name;
        fs::create_directories(path.parent_path());
        write_file(path.string(), bytes);
    }
}

}  // namespace fbpm
