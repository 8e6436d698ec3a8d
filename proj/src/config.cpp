#include "polybandit/config.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polybandit/errors.hpp"
#include "polybandit/generators.hpp"

namespace polybandit {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& item : obj.items())
        if (!known.count(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where)
{
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where)
{
    return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

Vector<double> to_vector(const json& arr, const std::string& where)
{
    if (!arr.is_array())
        throw ConfigError(where + ": expected an array of numbers");
    Vector<double> v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ConfigError(where + ": entry " + std::to_string(i) + " is not a number");
        v(static_cast<Index>(i)) = arr[i].get<double>();
    }
    return v;
}

Polyhedron<double> polyhedron_from_json(const json& doc)
{
    if (!doc.is_object() || !doc.contains("A") || !doc.contains("b"))
        throw ConfigError("polyhedron: expected an object with keys A and b");
    reject_unknown(doc, {"A", "b"}, "polyhedron");
    const json& rows = doc["A"];
    if (!rows.is_array() || rows.empty())
        throw ConfigError("polyhedron: A must be a nonempty array of rows");
    const std::size_t n = rows[0].is_array() ? rows[0].size() : 0;
    if (n == 0)
        throw ConfigError("polyhedron: rows of A must be nonempty arrays");
    Matrix<double> A(static_cast<Index>(rows.size()), static_cast<Index>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = to_vector(rows[i], "polyhedron.A[" + std::to_string(i) + "]");
        if (row.size() != static_cast<Index>(n))
            throw DimensionError("polyhedron: row " + std::to_string(i) + " of A has " +
                                 std::to_string(row.size()) + " entries, expected " + std::to_string(n));
        A.row(static_cast<Index>(i)) = row.transpose();
    }
    return Polyhedron<double>(std::move(A), to_vector(doc["b"], "polyhedron.b"));
}

Polyhedron<double> polyhedron_from_config(const json& spec, const std::filesystem::path& base_dir, std::string& source)
{
    const std::string where = "polyhedron";
    if (!spec.is_object())
        throw ConfigError(where + ": expected an object");
    if (spec.contains("file")) {
        reject_unknown(spec, {"file"}, where);
        std::filesystem::path path = get<std::string>(spec, "file", where);
        if (path.is_relative() && !base_dir.empty())
            path = base_dir / path;
        source = path.string();
        return load_polyhedron(path);
    }
    const auto generator = get<std::string>(spec, "generator", where);
    const auto n = get<Index>(spec, "N", where);
    if (n < 1)
        throw ConfigError(where + ".N must be positive");
    if (generator == "hypercube") {
        reject_unknown(spec, {"generator", "N", "low", "high"}, where);
        const double lo = get_or(spec, "low", 0.0, where);
        const double hi = get_or(spec, "high", 1.0, where);
        if (!(hi > lo))
            throw ConfigError(where + ": hypercube needs high > low");
        source = "hypercube(" + std::to_string(n) + ")";
        return make_box<double>(n, lo, hi);
    }
    if (generator == "simplex") {
        reject_unknown(spec, {"generator", "N", "scale"}, where);
        const double scale = get_or(spec, "scale", 1.0, where);
        if (!(scale > 0))
            throw ConfigError(where + ": simplex needs scale > 0");
        source = "simplex(" + std::to_string(n) + ")";
        return make_simplex<double>(n, scale);
    }
    if (generator == "random") {
        reject_unknown(spec, {"generator", "N", "M", "seed"}, where);
        const auto m = get<Index>(spec, "M", where);
        const auto seed = get_or<std::uint64_t>(spec, "seed", 0, where);
        std::mt19937_64 rng(seed);
        source = "random(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(seed) + ")";
        return random_polyhedron<double>(n, m, rng);
    }
    throw ConfigError(where + ": unknown generator '" + generator + "' (expected hypercube, simplex or random)");
}

PolicySpec policy_from_json(const json& obj, std::size_t index)
{
    const std::string where = "policies[" + std::to_string(index) + "]";
    if (!obj.is_object())
        throw ConfigError(where + ": expected an object");
    reject_unknown(obj,
                   {"type", "name", "epsilon", "lambda", "start_cycle", "R", "delta", "regularization", "estimator",
                    "block_cap"},
                   where);
    PolicySpec spec;
    spec.kind = policy_kind_from_string(get<std::string>(obj, "type", where));
    spec.name = get_or<std::string>(obj, "name", "", where);
    spec.epsilon = get_or(obj, "epsilon", spec.epsilon, where);
    spec.lambda = get_or(obj, "lambda", spec.lambda, where);
    spec.start_cycle = get_or(obj, "start_cycle", spec.start_cycle, where);
    spec.R = get_or(obj, "R", spec.R, where);
    spec.delta = get_or(obj, "delta", spec.delta, where);
    spec.regularization = get_or(obj, "regularization", spec.regularization, where);
    spec.block_cap = get_or(obj, "block_cap", spec.block_cap, where);
    const auto estimator = get_or<std::string>(obj, "estimator", "difference", where);
    if (estimator != "difference" && estimator != "linear_system")
        throw ConfigError(where + ".estimator: expected difference or linear_system");
    spec.linear_system = estimator == "linear_system";
    if (spec.linear_system && spec.kind != PolicyKind::general_see)
        throw ConfigError(where + ": the linear_system estimator applies to general_see only");
    return spec;
}

}  // namespace

Polyhedron<double> parse_polyhedron(const std::string& json_text)
{
    return polyhedron_from_json(parse_json(json_text, "polyhedron"));
}

Polyhedron<double> load_polyhedron(const std::filesystem::path& path)
{
    return parse_polyhedron(read_file(path));
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    const json doc = parse_json(json_text, "config");
    const std::string where = "config";
    if (!doc.is_object())
        throw ConfigError(where + ": expected an object");
    reject_unknown(doc,
                   {"polyhedron", "theta", "min_gap", "noise", "policies", "horizon", "runs", "seed", "checkpoints",
                    "per_decade", "realized_regret", "lower_bound", "output"},
                   where);

    std::string source;
    if (!doc.contains("polyhedron"))
        throw ConfigError(where + ": missing polyhedron");
    ExperimentConfig config{Experiment(polyhedron_from_config(doc["polyhedron"], base_dir, source))};
    config.polyhedron_source = source;
    config.echo = doc.dump();
    Experiment& exp = config.experiment;

    if (!doc.contains("theta"))
        throw ConfigError(where + ": missing theta");
    if (doc["theta"].is_string()) {
        if (doc["theta"].get<std::string>() != "uniform01")
            throw ConfigError(where + ".theta: expected a vector or \"uniform01\"");
        config.random_theta = true;
    } else {
        exp.theta = to_vector(doc["theta"], "theta");
        if (exp.theta.size() != exp.poly.dim())
            throw DimensionError("theta has " + std::to_string(exp.theta.size()) +
                                 " entries, polyhedron dimension is " + std::to_string(exp.poly.dim()));
    }
    config.min_gap = get_or(doc, "min_gap", 0.0, where);

    if (doc.contains("noise")) {
        const json& noise = doc["noise"];
        reject_unknown(noise, {"kind", "R"}, "noise");
        exp.noise.kind = noise_kind_from_string(get_or<std::string>(noise, "kind", "gaussian", "noise"));
        exp.noise.R = get_or(noise, "R", 1.0, "noise");
        if (!(exp.noise.R > 0))
            throw ConfigError("noise.R must be positive");
    }

    if (!doc.contains("policies") || !doc["policies"].is_array() || doc["policies"].empty())
        throw ConfigError(where + ": policies must be a nonempty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc["policies"].size(); ++i) {
        exp.policies.push_back(policy_from_json(doc["policies"][i], i));
        if (!names.insert(exp.policies.back().display_name()).second)
            throw ConfigError("duplicate policy name '" + exp.policies.back().display_name() + "'");
    }

    exp.horizon = get_or<std::int64_t>(doc, "horizon", exp.horizon, where);
    exp.runs = get_or(doc, "runs", exp.runs, where);
    exp.seed = get_or<std::uint64_t>(doc, "seed", exp.seed, where);
    exp.per_decade = get_or(doc, "per_decade", exp.per_decade, where);
    exp.realized_regret = get_or(doc, "realized_regret", false, where);
    if (exp.horizon < 1)
        throw ConfigError(where + ".horizon must be at least 1");
    if (exp.runs < 1)
        throw ConfigError(where + ".runs must be at least 1");
    if (doc.contains("checkpoints")) {
        exp.checkpoints = get<std::vector<std::int64_t>>(doc, "checkpoints", where);
        validate_checkpoints(exp.checkpoints, exp.horizon);
    }
    config.lower_bound = get_or(doc, "lower_bound", false, where);
    if (doc.contains("output")) {
        const json& output = doc["output"];
        reject_unknown(output, {"csv", "summary"}, "output");
        config.csv_name = get_or<std::string>(output, "csv", config.csv_name, "output");
        config.summary_name = get_or<std::string>(output, "summary", config.summary_name, "output");
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path), path.parent_path());
}

void resolve_theta(ExperimentConfig& config)
{
    Experiment& exp = config.experiment;
    const auto vertices = enumerate_vertices(exp.poly);
    const double needed = std::max(config.min_gap, tolerance::membership);
    if (!config.random_theta) {
        const auto g = gap(vertices, exp.theta);
        if (g.delta <= needed)
            throw TiedOptimum("theta: gap " + std::to_string(g.delta) + " is below min_gap");
        return;
    }
    std::mt19937_64 rng(split_seed(exp.seed, 0x7468657461ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vector<double> theta(exp.poly.dim());
        for (Index k = 0; k < theta.size(); ++k)
            theta(k) = unit(rng);
        try {
            if (gap(vertices, theta).delta > needed) {
                exp.theta = theta;
                return;
            }
        } catch (const TiedOptimum&) {
        }
    }
    throw ConfigError("theta: no uniform01 draw reached min_gap in 1000 attempts");
}

void write_summary_json(std::ostream& out, const ExperimentConfig& config, const std::vector<PolicySummary>& summary)
{
    const Experiment& exp = config.experiment;
    json doc;
    doc["config"] = json::parse(config.echo);
    json resolved;
    resolved["polyhedron"] = config.polyhedron_source;
    resolved["N"] = exp.poly.dim();
    resolved["M"] = exp.poly.rows();
    resolved["theta"] = std::vector<double>(exp.theta.data(), exp.theta.data() + exp.theta.size());
    resolved["horizon"] = exp.horizon;
    resolved["runs"] = exp.runs;
    resolved["seed"] = exp.seed;
    resolved["noise"] = {{"kind", to_string(exp.noise.kind)}, {"R", exp.noise.R}};
    resolved["realized_regret"] = exp.realized_regret;
    doc["resolved"] = resolved;

    json policies = json::array();
    for (const auto& s : summary) {
        json p;
        p["name"] = s.policy;
        p["t"] = s.t;
        p["mean"] = s.mean;
        p["std"] = s.std;
        if (!s.realized_mean.empty())
            p["realized_mean"] = s.realized_mean;
        policies.push_back(p);
    }
    doc["policies"] = policies;

    if (config.lower_bound) {
        const std::vector<std::int64_t> ts = summary.empty() ? std::vector<std::int64_t>{} : summary.front().t;
        json lb;
        lb["slope"] = lower_bound_slope(exp.theta, exp.noise.R);
        lb["t"] = ts;
        lb["value"] = lower_bound_curve(exp.theta, exp.noise.R, ts);
        doc["lower_bound"] = lb;
    }
    out << doc.dump(2) << '\n';
}

}  // namespace polybandit
