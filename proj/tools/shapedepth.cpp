// Command-line surface: depth evaluation, deepest-shape estimation, test
// calibration and execution, contour grids, MCD depth curves, simulation
// replication, and the per-group shape-outlier scan. Every run emits a
// manifest recording the effective parameter set, input digests and seed, so
// outputs can be reproduced byte for byte.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapedepth/shapedepth.hpp"

namespace sd = shapedepth;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitInvalid = 4;
constexpr int kExitConvergence = 5;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SHAPEDEPTH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw sd::parse_error("SHAPEDEPTH_SEED is not an integer");
        }
    }
    return 0;
}

struct Manifest {
    std::string subcommand;
    json flags = json::object();
    json inputs = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void input(const std::string& path) { inputs[path] = sd::file_digest(path); }

    void write(const std::string& path) const {
        const auto wall =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        json j{{"subcommand", subcommand}, {"version", sd::kVersion},   {"rng", sd::kRngFamily},
               {"flags", flags},           {"inputs", inputs},           {"outputs", outputs},
               {"wall_ms", wall.count()}};
        sd::save_json(path, j);
    }
};

std::vector<double> parse_grid(const std::string& spec) {
    // "a:b:step" inclusive of both ends (up to rounding).
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw sd::parse_error("grid must look like a:b:step, got '" + spec + "'");
    double a = 0, b = 0, step = 0;
    try {
        a = std::stod(spec.substr(0, c1));
        b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(spec.substr(c2 + 1));
    } catch (const std::exception&) {
        throw sd::parse_error("grid values in '" + spec + "' are not numbers");
    }
    if (!(step > 0.0) || !(a <= b)) throw std::domain_error("grid needs a <= b and step > 0");
    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double v = a + i * step;
        if (v > b + 1e-12) break;
        values.push_back(std::min(v, b));
    }
    return values;
}

Eigen::VectorXd parse_vector(const std::string& spec) {
    std::vector<double> vals;
    std::string cell;
    std::stringstream ss(spec);
    while (std::getline(ss, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw sd::parse_error("--theta entries must be numbers, got '" + cell + "'");
        }
    }
    Eigen::VectorXd v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    return v;
}

sd::ShapeMatrix load_shape(const std::string& path, bool normalize, Manifest& manifest) {
    manifest.input(path);
    std::ifstream in(path);
    if (!in) throw sd::parse_error("cannot open shape file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw sd::parse_error("shape json parse failure in " + path + ": " + e.what());
    }
    if (normalize) j["normalize"] = true;
    return sd::shape_from_json(j);
}

std::string manifest_path(const std::string& explicit_path, const std::string& primary_output,
                          const std::string& subcommand) {
    if (!explicit_path.empty()) return explicit_path;
    if (!primary_output.empty()) return primary_output + ".manifest.json";
    return subcommand + ".manifest.json";
}

// ---------------------------------------------------------------- simulate

const json& require_field(const json& j, const std::string& key, const char* type_name, const std::string& path) {
    if (!j.contains(key)) throw sd::parse_error("config: missing field " + path + "." + key);
    const json& v = j.at(key);
    const std::string t = type_name;
    const bool ok = (t == "number" && v.is_number()) || (t == "integer" && v.is_number_integer()) ||
                    (t == "string" && v.is_string()) || (t == "array" && v.is_array()) ||
                    (t == "object" && v.is_object());
    if (!ok) throw sd::parse_error("config: field " + path + "." + key + " must be a " + t);
    return v;
}

sd::Generator parse_generator(const std::string& g, const std::string& path) {
    if (g == "normal") return sd::Generator::normal;
    if (g == "cauchy") return sd::Generator::cauchy;
    throw sd::parse_error("config: " + path + " must be \"normal\" or \"cauchy\"");
}

sd::Calibration calibration_from_config(const json& cfg, Manifest& manifest, int threads) {
    if (cfg.contains("calibration") && cfg.at("calibration").is_string()) {
        const std::string path = cfg.at("calibration").get<std::string>();
        manifest.input(path);
        return sd::load_calibration_json(path);
    }
    if (cfg.contains("calibration") && cfg.at("calibration").is_object()) {
        const json& c = cfg.at("calibration");
        const auto reps = require_field(c, "replicates", "integer", "$.calibration").get<std::int64_t>();
        const auto seed = require_field(c, "seed", "integer", "$.calibration").get<std::uint64_t>();
        const int n = require_field(cfg, "n", "integer", "$").get<int>();
        const double alpha = c.value("alpha", 0.05);
        return sd::calibrate_critical_values(2, n, alpha, reps, seed, {}, sd::Generator::normal, threads);
    }
    throw sd::parse_error("config: missing field $.calibration (path or {replicates, seed})");
}

int run_simulate(const std::string& config_path, const std::string& out_override,
                 const std::string& manifest_override, int threads) {
    Manifest manifest;
    manifest.subcommand = "simulate";
    manifest.input(config_path);

    std::ifstream in(config_path);
    if (!in) throw sd::parse_error("cannot open config: " + config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw sd::parse_error(std::string("config json parse failure: ") + e.what());
    }

    const std::string mode = require_field(cfg, "mode", "string", "$").get<std::string>();
    std::string out = out_override.empty()
                          ? require_field(cfg, "out", "string", "$").get<std::string>()
                          : out_override;
    const auto seed = cfg.contains("seed") ? require_field(cfg, "seed", "integer", "$").get<std::uint64_t>()
                                           : default_seed();
    manifest.flags = {{"config", config_path}, {"mode", mode}, {"seed", seed}, {"threads", threads}};

    if (mode == "power") {
        sd::PowerConfig pc;
        pc.n = require_field(cfg, "n", "integer", "$").get<int>();
        pc.xi = require_field(cfg, "xi", "number", "$").get<double>();
        pc.ell_list.clear();
        for (const auto& e : require_field(cfg, "ell_list", "array", "$")) {
            if (!e.is_number_integer()) throw sd::parse_error("config: $.ell_list entries must be integers");
            pc.ell_list.push_back(e.get<int>());
        }
        pc.generator = parse_generator(require_field(cfg, "generator", "string", "$").get<std::string>(),
                                       "$.generator");
        pc.replications = require_field(cfg, "replications", "integer", "$").get<std::int64_t>();
        pc.seed = seed;
        pc.threads = threads;
        pc.calibration = calibration_from_config(cfg, manifest, threads);
        const sd::SimTable table = sd::power_simulation(pc);
        sd::save_sim_table_csv(out, table);
    } else if (mode == "robustness") {
        sd::RobustnessConfig rc;
        rc.n = require_field(cfg, "n", "integer", "$").get<int>();
        rc.eta_list.clear();
        for (const auto& e : require_field(cfg, "eta_list", "array", "$")) {
            if (!e.is_number()) throw sd::parse_error("config: $.eta_list entries must be numbers");
            rc.eta_list.push_back(e.get<double>());
        }
        const std::string pat = require_field(cfg, "pattern", "string", "$").get<std::string>();
        if (pat == "a")
            rc.pattern = sd::ContaminationPattern::a;
        else if (pat == "b")
            rc.pattern = sd::ContaminationPattern::b;
        else if (pat == "c")
            rc.pattern = sd::ContaminationPattern::c;
        else
            throw sd::parse_error("config: $.pattern must be \"a\", \"b\" or \"c\"");
        rc.generator = parse_generator(require_field(cfg, "generator", "string", "$").get<std::string>(),
                                       "$.generator");
        rc.replications = require_field(cfg, "replications", "integer", "$").get<std::int64_t>();
        if (cfg.contains("v0_diag")) {
            const auto& d = require_field(cfg, "v0_diag", "array", "$");
            if (d.size() != 2) throw sd::parse_error("config: $.v0_diag must have two entries");
            rc.v0 = Eigen::Vector2d(d[0].get<double>(), d[1].get<double>()).asDiagonal();
        }
        rc.seed = seed;
        rc.threads = threads;
        rc.calibration = calibration_from_config(cfg, manifest, threads);
        const sd::SimTable table = sd::robustness_simulation(rc);
        sd::save_sim_table_csv(out, table);
    } else if (mode == "figure1") {
        const int n = require_field(cfg, "n", "integer", "$").get<int>();
        const sd::ShapeMatrix shape = sd::shape_from_json(require_field(cfg, "shape", "object", "$"));
        const auto axis = [&](const char* key) {
            const json& a = require_field(cfg, key, "object", "$");
            return sd::GridAxis{require_field(a, "from", "number", std::string("$.") + key).get<double>(),
                                require_field(a, "to", "number", std::string("$.") + key).get<double>(),
                                require_field(a, "count", "integer", std::string("$.") + key).get<int>()};
        };
        const sd::GridAxis ratio = axis("ratio"), corr = axis("corr");
        sd::EllipticalModel model{2, Eigen::VectorXd::Zero(2), shape, sd::Generator::normal, 0.0};
        const Eigen::MatrixXd sample = sd::sample_elliptical(model, n, seed);
        sd::save_contour_csv(out, sd::depth_contour_grid(sample, Eigen::VectorXd::Zero(2), ratio, corr));
        manifest.outputs.push_back(out);
        if (cfg.contains("out_population")) {
            const std::string pop = cfg.at("out_population").get<std::string>();
            sd::save_contour_csv(pop, sd::population_contour_grid(model, ratio, corr));
            manifest.outputs.push_back(pop);
        }
        manifest.write(manifest_path(manifest_override, out, "simulate"));
        return 0;
    } else if (mode == "figure2") {
        const int n = require_field(cfg, "n", "integer", "$").get<int>();
        const auto reps = require_field(cfg, "replications", "integer", "$").get<std::int64_t>();
        const double delta = require_field(cfg, "delta", "number", "$").get<double>();
        const double eta = require_field(cfg, "eta", "number", "$").get<double>();
        const json& g = require_field(cfg, "gammas", "object", "$");
        const std::vector<double> gammas =
            parse_grid(sd::detail::fmt12(require_field(g, "from", "number", "$.gammas").get<double>()) + ":" +
                       sd::detail::fmt12(require_field(g, "to", "number", "$.gammas").get<double>()) + ":" +
                       sd::detail::fmt12(require_field(g, "step", "number", "$.gammas").get<double>()));
        const int starts = cfg.value("starts", 50);

        // Section 5.1 mixture: clean X ~ N(0, diag(4,1)), outliers +-Y with
        // Y ~ N((0,delta), I2); MSE of the first-eigenvector angle per gamma.
        sd::MixtureSpec spec;
        spec.base = sd::EllipticalModel{2, Eigen::VectorXd::Zero(2),
                                        sd::normalize_to_shape(Eigen::Vector2d(4.0, 1.0).asDiagonal()),
                                        sd::Generator::normal, 0.0};
        // Scatter diag(4,1): scale the trace-2 draw back up.
        const double base_scale = std::sqrt(5.0 / 2.0);
        spec.contaminant = sd::EllipticalModel{2, Eigen::Vector2d(0.0, delta),
                                               sd::ShapeMatrix(Eigen::MatrixXd::Identity(2, 2)),
                                               sd::Generator::normal, 0.0};
        spec.kind = sd::ContaminantKind::model;
        spec.eta = eta;
        spec.contaminant_sign_flip = true;

        std::vector<double> mse(gammas.size(), 0.0);
        std::vector<std::vector<double>> errs(gammas.size(), std::vector<double>(reps, 0.0));
        sd::Rng master(seed);
        sd::detail::parallel_for(reps, threads, [&](std::int64_t r) {
            sd::Rng sub = master.substream(static_cast<std::uint64_t>(r));
            sd::LabeledSample sample = sd::sample_mixture(spec, n, sub.next_u64());
            for (int i = 0; i < n; ++i)
                if (sample.labels[static_cast<std::size_t>(i)] == 0) sample.rows.row(i) *= base_scale;
            for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
                const sd::McdResult res = sd::mcd_subset(sample.rows, gammas[gi], starts, sub.next_u64());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.shape.entries());
                const Eigen::VectorXd v1 = es.eigenvectors().col(1);  // largest eigenvalue
                const double cosang = std::min(1.0, std::abs(v1[0]));
                errs[gi][static_cast<std::size_t>(r)] = std::acos(cosang);
            }
        });
        sd::SimTable table;
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            for (double e : errs[gi]) mse[gi] += e * e;
            mse[gi] /= static_cast<double>(reps);
            table.push_back({gammas[gi], mse[gi], reps});
        }
        sd::save_sim_table_csv(out, table);
    } else {
        throw sd::parse_error("config: $.mode must be one of power, robustness, figure1, figure2");
    }

    manifest.outputs.push_back(out);
    manifest.write(manifest_path(manifest_override, out, "simulate"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tyler shape depth: depth evaluation, deepest-shape estimation, shape tests and scans"};
    app.require_subcommand(1);

    std::string data_path, shape_path, calib_path, out_path, manifest_path_flag, theta_spec, config_path;
    std::string gamma_grid = "0.5:1.0:0.05", ratio_spec = "0.25:4:21", corr_spec = "-0.9:0.9:21";
    std::string generator_name = "normal", model_shape_path;
    bool normalize = false;
    int ndirs = 100000, starts = 8, mcd_starts = 100, threads = 1, k_flag = 2, n_flag = 200;
    double alpha = 0.05, atom_mass = 0.0;
    std::int64_t replicates = 100000;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;

    const auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "RNG seed (default: SHAPEDEPTH_SEED or 0)")
            ->each([&](const std::string&) { seed_given = true; });
    };
    const auto effective_seed = [&]() { return seed_given ? seed_flag : default_seed(); };

    auto* depth_cmd = app.add_subcommand("depth", "Tyler shape depth of a shape matrix w.r.t. a dataset");
    depth_cmd->add_option("--data", data_path, "dataset CSV")->required();
    depth_cmd->add_option("--shape", shape_path, "shape matrix JSON")->required();
    depth_cmd->add_option("--theta", theta_spec, "fixed location c1,...,ck (omit for plug-in Tukey median)");
    depth_cmd->add_option("--ndirs", ndirs, "random directions for k >= 3");
    depth_cmd->add_flag("--normalize", normalize, "trace-normalize the shape before validation");
    depth_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(depth_cmd);

    auto* deepest_cmd = app.add_subcommand("deepest", "deepest shape matrix of a dataset");
    deepest_cmd->add_option("--data", data_path, "dataset CSV")->required();
    deepest_cmd->add_option("--theta", theta_spec, "fixed location (omit for plug-in Tukey median)");
    deepest_cmd->add_option("--starts", starts, "multistart count");
    deepest_cmd->add_option("--ndirs", ndirs, "random directions for k >= 3");
    deepest_cmd->add_option("--out", out_path, "result JSON path (default stdout)");
    deepest_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(deepest_cmd);

    auto* scan_cmd = app.add_subcommand("scan", "per-group shape-outlier scan");
    scan_cmd->add_option("--data", data_path, "dataset CSV with a leading group column")->required();
    scan_cmd->add_option("--gamma-grid", gamma_grid, "gamma grid a:b:step");
    scan_cmd->add_option("--starts", mcd_starts, "MCD starts");
    scan_cmd->add_option("--out", out_path, "output CSV")->required();
    scan_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(scan_cmd);

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Monte Carlo critical values for the shape test");
    calibrate_cmd->add_option("--k", k_flag, "dimension");
    calibrate_cmd->add_option("--n", n_flag, "sample size")->required();
    calibrate_cmd->add_option("--alpha", alpha, "test level");
    calibrate_cmd->add_option("--replicates", replicates, "Monte Carlo replicates");
    calibrate_cmd->add_option("--generator", generator_name, "normal|cauchy null sampler");
    calibrate_cmd->add_option("--ndirs", ndirs, "random directions for k >= 3");
    calibrate_cmd->add_option("--threads", threads, "parallelism cap (does not change outputs)");
    calibrate_cmd->add_option("--out", out_path, "calibration JSON")->required();
    calibrate_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(calibrate_cmd);

    auto* test_cmd = app.add_subcommand("test", "randomized depth test of H0: V = V0");
    test_cmd->add_option("--data", data_path, "dataset CSV")->required();
    test_cmd->add_option("--shape", shape_path, "null shape V0 JSON")->required();
    test_cmd->add_option("--theta", theta_spec, "known location")->required();
    test_cmd->add_option("--calib", calib_path, "calibration JSON")->required();
    test_cmd->add_option("--ndirs", ndirs, "random directions for k >= 3");
    test_cmd->add_flag("--normalize", normalize, "trace-normalize V0 before validation");
    test_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(test_cmd);

    auto* contour_cmd = app.add_subcommand("contour", "depth contour grid over (ratio, corr)");
    contour_cmd->add_option("--data", data_path, "dataset CSV (empirical grid)");
    contour_cmd->add_option("--model-shape", model_shape_path, "model shape JSON (closed-form grid)");
    contour_cmd->add_option("--atom", atom_mass, "atom mass at the center for the closed form");
    contour_cmd->add_option("--theta", theta_spec, "fixed location for the empirical grid");
    contour_cmd->add_option("--ratio", ratio_spec, "ratio axis a:b:count");
    contour_cmd->add_option("--corr", corr_spec, "corr axis a:b:count");
    contour_cmd->add_option("--out", out_path, "output CSV")->required();
    contour_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(contour_cmd);

    auto* curve_cmd = app.add_subcommand("mcd-curve", "depth-versus-gamma MCD selection curve");
    curve_cmd->add_option("--data", data_path, "dataset CSV")->required();
    curve_cmd->add_option("--gammas", gamma_grid, "gamma grid a:b:step");
    curve_cmd->add_option("--starts", mcd_starts, "MCD starts");
    curve_cmd->add_option("--out", out_path, "output CSV")->required();
    curve_cmd->add_option("--manifest", manifest_path_flag, "manifest path");
    add_seed(curve_cmd);

    auto* simulate_cmd = app.add_subcommand("simulate", "power/robustness/figure replication from a config");
    simulate_cmd->add_option("--config", config_path, "simulation config JSON")->required();
    simulate_cmd->add_option("--out", out_path, "override the config's output path");
    simulate_cmd->add_option("--threads", threads, "parallelism cap (does not change outputs)");
    simulate_cmd->add_option("--manifest", manifest_path_flag, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    }

    try {
        const std::uint64_t seed = effective_seed();

        if (depth_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "depth";
            manifest.input(data_path);
            const sd::DataSet data = sd::load_data_csv(data_path);
            const sd::ShapeMatrix v = load_shape(shape_path, normalize, manifest);
            if (data.k() != v.dim())
                throw sd::dimension_error("data has " + std::to_string(data.k()) + " columns but shape is " +
                                          std::to_string(v.dim()) + " x " + std::to_string(v.dim()));
            sd::DirectionBudget budget{ndirs, true, seed};
            const bool plug_in = theta_spec.empty();
            sd::DepthValue d;
            if (plug_in) {
                d = sd::shape_depth(data.rows, v, budget);
            } else {
                const Eigen::VectorXd theta = parse_vector(theta_spec);
                if (theta.size() != data.k()) throw sd::dimension_error("--theta length does not match data");
                d = sd::shape_depth_fixed_theta(data.rows, theta, v, budget);
            }
            std::cout << "method: " << (data.k() == 2 ? "exact sweep (k = 2)" : "sampled directions") << "\n";
            std::cout << "depth " << d.str() << " (= " << sd::detail::fmt12(d.value()) << ")\n";
            manifest.flags = {{"data", data_path},   {"shape", shape_path}, {"theta", plug_in ? "plug-in" : theta_spec},
                              {"ndirs", ndirs},      {"seed", seed},        {"normalize", normalize},
                              {"depth", d.str()}};
            manifest.write(manifest_path(manifest_path_flag, "", "depth"));
        } else if (deepest_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "deepest";
            manifest.input(data_path);
            const sd::DataSet data = sd::load_data_csv(data_path);
            if (data.n() == 1) std::cerr << "warning: single observation; every shape has depth 1\n";
            sd::DeepestShapeOptions opts;
            opts.starts = starts;
            opts.seed = seed;
            opts.budget = sd::DirectionBudget{ndirs, true, seed};
            const sd::DeepestShapeResult result =
                theta_spec.empty() ? sd::deepest_shape(data.rows, opts)
                                   : sd::deepest_shape_fixed_theta(data.rows, parse_vector(theta_spec), opts);
            const json j = sd::deepest_result_to_json(result);
            if (out_path.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                sd::save_json(out_path, j);
                manifest.outputs.push_back(out_path);
            }
            manifest.flags = {{"data", data_path}, {"theta", theta_spec.empty() ? "plug-in" : theta_spec},
                              {"starts", starts},  {"ndirs", ndirs},
                              {"seed", seed}};
            manifest.write(manifest_path(manifest_path_flag, out_path, "deepest"));
        } else if (scan_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "scan";
            manifest.input(data_path);
            const sd::DataSet data = sd::load_data_csv(data_path);
            if (!data.has_groups()) throw sd::dimension_error("scan needs a dataset with a group column");
            const int k = data.k();

            std::vector<std::string> group_order;
            std::map<std::string, std::vector<int>> members;
            for (int i = 0; i < data.n(); ++i) {
                const auto& g = data.groups[static_cast<std::size_t>(i)];
                if (members.find(g) == members.end()) group_order.push_back(g);
                members[g].push_back(i);
            }
            if (group_order.size() < 2) throw sd::dimension_error("scan needs at least 2 groups");

            std::vector<std::string> skipped;
            std::vector<std::string> eligible;
            for (const auto& g : group_order) {
                if (static_cast<int>(members[g].size()) < k + 1) {
                    skipped.push_back(g);
                    std::cerr << "warning: group '" << g << "' has fewer than k+1 observations; skipped\n";
                } else {
                    eligible.push_back(g);
                }
            }

            const std::vector<double> gammas = parse_grid(gamma_grid);
            sd::DirectionBudget budget{ndirs, true, seed};
            const auto [gamma_hat, depth_hat] =
                sd::select_gamma_max_depth(data.rows, gammas, data.rows, mcd_starts, seed, budget);
            // Recompute the winning estimate (same substream as the selection).
            std::size_t gi = 0;
            while (gammas[gi] != gamma_hat) ++gi;
            const sd::McdResult full =
                sd::mcd_subset(data.rows, gamma_hat, mcd_starts, sd::Rng(seed).substream(gi).next_u64());

            std::vector<double> depths;
            std::vector<std::pair<std::string, double>> rows;
            for (const auto& g : eligible) {
                Eigen::MatrixXd block(members[g].size(), k);
                for (std::size_t i = 0; i < members[g].size(); ++i)
                    block.row(static_cast<Eigen::Index>(i)) = data.rows.row(members[g][i]);
                const double d = sd::shape_depth(block, full.shape, budget).value();
                depths.push_back(d);
                rows.emplace_back(g, d);
            }
            double fence = -std::numeric_limits<double>::infinity();
            if (depths.size() >= 4) {
                fence = sd::boxplot_lower_fence(depths);
            } else {
                std::cerr << "warning: fewer than 4 eligible groups; no flagging fence\n";
            }

            std::ofstream out(out_path);
            if (!out) throw sd::parse_error("cannot write output: " + out_path);
            out << "group,n,depth,flagged\n";
            for (std::size_t i = 0; i < rows.size(); ++i)
                out << rows[i].first << "," << members[rows[i].first].size() << ","
                    << sd::detail::fmt12(rows[i].second) << "," << (rows[i].second < fence ? 1 : 0) << "\n";
            manifest.outputs.push_back(out_path);
            manifest.flags = {{"data", data_path},       {"gamma_grid", gamma_grid},
                              {"starts", mcd_starts},    {"seed", seed},
                              {"gamma_hat", gamma_hat},  {"gamma_hat_depth", depth_hat.str()},
                              {"fence", fence},          {"skipped_groups", skipped}};
            manifest.write(manifest_path(manifest_path_flag, out_path, "scan"));
        } else if (calibrate_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "calibrate";
            const sd::Generator gen = parse_generator(generator_name, "--generator");
            const sd::Calibration calib = sd::calibrate_critical_values(
                k_flag, n_flag, alpha, replicates, seed, sd::DirectionBudget{ndirs, true, seed}, gen, threads);
            if (calib.degenerate) std::cerr << "warning: no mass at t_crit; gamma_rand forced to 0\n";
            sd::save_json(out_path, sd::calibration_to_json(calib));
            std::cout << "t_crit " << sd::detail::fmt12(calib.t_crit) << " gamma_rand "
                      << sd::detail::fmt12(calib.gamma_rand) << "\n";
            manifest.outputs.push_back(out_path);
            manifest.flags = {{"k", k_flag},           {"n", n_flag},
                              {"alpha", alpha},        {"replicates", replicates},
                              {"generator", generator_name}, {"ndirs", ndirs},
                              {"threads", threads},    {"seed", seed},
                              {"t_crit", calib.t_crit}, {"gamma_rand", calib.gamma_rand}};
            manifest.write(manifest_path(manifest_path_flag, out_path, "calibrate"));
        } else if (test_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "test";
            manifest.input(data_path);
            manifest.input(calib_path);
            const sd::DataSet data = sd::load_data_csv(data_path);
            const sd::ShapeMatrix v0 = load_shape(shape_path, normalize, manifest);
            const sd::Calibration calib = sd::load_calibration_json(calib_path);
            const Eigen::VectorXd theta = parse_vector(theta_spec);
            if (theta.size() != data.k()) throw sd::dimension_error("--theta length does not match data");
            const sd::TestOutcome outcome =
                sd::shape_test(data.rows, theta, v0, calib, seed, sd::DirectionBudget{ndirs, true, seed});
            std::cout << "statistic " << outcome.statistic.str() << " (= "
                      << sd::detail::fmt12(outcome.statistic.value()) << ")\n";
            std::cout << "t_crit " << sd::detail::fmt12(calib.t_crit) << " gamma_rand "
                      << sd::detail::fmt12(calib.gamma_rand) << "\n";
            std::cout << "decision " << sd::to_string(outcome.decision) << "\n";
            if (outcome.rand_draw) std::cout << "rand_draw " << sd::detail::fmt12(*outcome.rand_draw) << "\n";
            manifest.flags = {{"data", data_path}, {"shape", shape_path},
                              {"calib", calib_path}, {"theta", theta_spec},
                              {"seed", seed},      {"statistic", outcome.statistic.str()},
                              {"decision", sd::to_string(outcome.decision)}};
            manifest.write(manifest_path(manifest_path_flag, "", "test"));
        } else if (contour_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "contour";
            const auto parse_axis = [](const std::string& spec) {
                const auto c1 = spec.find(':');
                const auto c2 = spec.find(':', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos)
                    throw sd::parse_error("axis must look like a:b:count, got '" + spec + "'");
                return sd::GridAxis{std::stod(spec.substr(0, c1)), std::stod(spec.substr(c1 + 1, c2 - c1 - 1)),
                                    std::stoi(spec.substr(c2 + 1))};
            };
            const sd::GridAxis ratio = parse_axis(ratio_spec), corr = parse_axis(corr_spec);
            sd::ContourGrid grid;
            if (!data_path.empty()) {
                manifest.input(data_path);
                const sd::DataSet data = sd::load_data_csv(data_path);
                const Eigen::VectorXd theta =
                    theta_spec.empty() ? Eigen::VectorXd(sd::tukey_median(data.rows, {ndirs, true, seed}))
                                       : parse_vector(theta_spec);
                grid = sd::depth_contour_grid(data.rows, theta, ratio, corr, {ndirs, true, seed});
            } else if (!model_shape_path.empty()) {
                const sd::ShapeMatrix v0 = load_shape(model_shape_path, normalize, manifest);
                grid = sd::population_contour_grid(
                    sd::EllipticalModel{2, Eigen::VectorXd::Zero(2), v0, sd::Generator::normal, atom_mass}, ratio,
                    corr);
            } else {
                throw sd::parse_error("contour needs --data or --model-shape");
            }
            sd::save_contour_csv(out_path, grid);
            manifest.outputs.push_back(out_path);
            manifest.flags = {{"data", data_path},   {"model_shape", model_shape_path},
                              {"ratio", ratio_spec}, {"corr", corr_spec},
                              {"theta", theta_spec}, {"seed", seed}};
            manifest.write(manifest_path(manifest_path_flag, out_path, "contour"));
        } else if (curve_cmd->parsed()) {
            Manifest manifest;
            manifest.subcommand = "mcd-curve";
            manifest.input(data_path);
            const sd::DataSet data = sd::load_data_csv(data_path);
            const std::vector<double> gammas = parse_grid(gamma_grid);
            const sd::GammaCurve curve =
                sd::gamma_depth_curve(data.rows, gammas, mcd_starts, seed, {ndirs, true, seed});
            sd::save_gamma_curve_csv(out_path, curve);
            manifest.outputs.push_back(out_path);
            manifest.flags = {{"data", data_path}, {"gammas", gamma_grid}, {"starts", mcd_starts}, {"seed", seed}};
            manifest.write(manifest_path(manifest_path_flag, out_path, "mcd-curve"));
        } else if (simulate_cmd->parsed()) {
            return run_simulate(config_path, out_path, manifest_path_flag, threads);
        }
        return 0;
    } catch (const sd::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const sd::dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDimension;
    } catch (const sd::convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
