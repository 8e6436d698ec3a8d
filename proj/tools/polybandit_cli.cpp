// polybandit: run regret experiments, print lower-bound curves, validate
// polyhedron files.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "polybandit/config.hpp"
#include "polybandit/harness.hpp"

namespace fs = std::filesystem;
using namespace polybandit;

namespace {

int run_command(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                int parallel)
{
    auto config = load_config(config_path);
    if (seed)
        config.experiment.seed = *seed;
    resolve_theta(config);

    const auto traces = run_experiment(config.experiment, parallel);
    const auto summary = summarize(traces);

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / config.csv_name;
    const fs::path summary_path = fs::path(out_dir) / config.summary_name;
    {
        std::ofstream csv(csv_path);
        if (!csv)
            throw ConfigError("cannot write " + csv_path.string());
        write_traces_csv(csv, traces, config.experiment.realized_regret);
    }
    {
        std::ofstream js(summary_path);
        if (!js)
            throw ConfigError("cannot write " + summary_path.string());
        write_summary_json(js, config, summary);
    }

    std::cout << "theta =";
    for (Index k = 0; k < config.experiment.theta.size(); ++k)
        std::cout << ' ' << config.experiment.theta(k);
    std::cout << "\nfinal mean pseudo-regret at T=" << config.experiment.horizon << ":\n";
    for (const auto& s : summary)
        std::cout << "  " << std::left << std::setw(20) << s.policy << s.mean.back() << " (std " << s.std.back()
                  << ")\n";
    std::cout << "wrote " << csv_path.string() << " and " << summary_path.string() << '\n';
    return 0;
}

int lower_bound_command(const std::vector<double>& theta_values, double R, const std::vector<std::int64_t>& Ts)
{
    Vector<double> theta(static_cast<Index>(theta_values.size()));
    for (std::size_t i = 0; i < theta_values.size(); ++i)
        theta(static_cast<Index>(i)) = theta_values[i];
    const auto curve = lower_bound_curve(theta, R, Ts);
    std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
    std::cout << "slope " << lower_bound_slope(theta, R) << '\n';
    for (std::size_t i = 0; i < Ts.size(); ++i)
        std::cout << Ts[i] << ' ' << curve[i] << '\n';
    return 0;
}

int validate_command(const std::string& path)
{
    const auto poly = load_polyhedron(path);
    std::cout << path << ": N=" << poly.dim() << " M=" << poly.rows() << " bounded\n";
    try {
        const auto vertices = enumerate_vertices(poly);
        std::cout << "vertices: " << vertices.size() << '\n';
    } catch (const VertexBlowup& e) {
        std::cout << "vertices: not enumerated (" << e.what() << ")\n";
    }
    try {
        const auto anchor = interior_anchor(poly);
        std::cout << "interior anchor alpha: " << anchor.alpha << '\n';
    } catch (const DegenerateAnchor& e) {
        std::cout << "interior anchor: none (" << e.what() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic linear bandits over polyhedral arm sets"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    std::string config_path;
    std::string out_dir = "results";
    std::uint64_t seed_value = 0;
    int parallel = 1;
    run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory");
    auto* seed_opt = run->add_option("--seed", seed_value, "master seed (overrides the config)");
    run->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

    auto* lb = app.add_subcommand("lower-bound", "print the lower-bound reference curve");
    std::vector<double> theta;
    double R = 1.0;
    std::vector<std::int64_t> Ts;
    lb->add_option("--theta", theta, "parameter vector")->required();
    lb->add_option("--R", R, "sub-Gaussian parameter");
    lb->add_option("--T", Ts, "horizons")->required();

    auto* validate = app.add_subcommand("validate", "check a polyhedron file");
    std::string poly_path;
    validate->add_option("polyhedron", poly_path, "polyhedron file (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return run_command(config_path, out_dir,
                               seed_opt->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt, parallel);
        if (*lb)
            return lower_bound_command(theta, R, Ts);
        if (*validate)
            return validate_command(poly_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
