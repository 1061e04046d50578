// ucp-lab: batch driver for the unique-continuation / Delone-Anderson
// experiments. Subcommands: run, constants, gen-delone, plot-data, selftest.
// Exit codes: 0 ok, 1 compute failure, 2 config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "ucplab/anderson.hpp"
#include "ucplab/constants.hpp"
#include "ucplab/geometry.hpp"
#include "ucplab/io.hpp"
#include "ucplab/operator.hpp"
#include "ucplab/rng.hpp"
#include "ucplab/ucp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "ucp-lab 1.0.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int thread_count(int flag_value) {
    if (const char* env = std::getenv("UCPLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (flag_value > 0) return flag_value;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void require_object(const json& j, const std::string& where,
                    const std::set<std::string>& allowed,
                    const std::set<std::string>& required) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    for (const auto& key : required)
        if (!j.contains(key))
            throw ConfigError(where + ": missing required field '" + key + "'");
}

std::function<double(const Eigen::VectorXd&)> v0_from_json(const json& j) {
    require_object(j, "model.V0", {"kind", "amplitude"}, {"kind"});
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return [](const Eigen::VectorXd&) { return 0.0; };
    if (kind == "cosine") {
        const double amp = j.value("amplitude", 0.5);
        return [amp](const Eigen::VectorXd& x) {
            double v = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) v += amp * std::cos(2.0 * M_PI * x(i));
            return v;
        };
    }
    throw ConfigError("model.V0.kind: unknown value '" + kind + "'");
}

ucplab::CouplingDistribution dist_from_json(const json& j) {
    require_object(j, "model.distribution",
                   {"kind", "a", "b", "p", "v0", "v1", "mu", "sigma"}, {"kind"});
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
        return ucplab::CouplingDistribution::uniform(j.value("a", 0.0), j.value("b", 1.0));
    if (kind == "bernoulli")
        return ucplab::CouplingDistribution::bernoulli(j.value("p", 0.5), j.value("v0", 0.0),
                                                       j.value("v1", 1.0));
    if (kind == "truncated_gaussian")
        return ucplab::CouplingDistribution::truncated_gaussian(
            j.value("mu", 0.0), j.value("sigma", 1.0), j.value("a", -1.0), j.value("b", 1.0));
    throw ConfigError("model.distribution.kind: unknown value '" + kind + "'");
}

ucplab::CarlemanConfig carleman_from_json(const json& j) {
    ucplab::CarlemanConfig cfg;
    if (j.is_null()) return cfg;
    require_object(j, "constants", {"C2", "C3", "K_Delta", "C_dim"}, {});
    cfg.C2 = j.value("C2", cfg.C2);
    cfg.C3 = j.value("C3", cfg.C3);
    cfg.K_Delta = j.value("K_Delta", cfg.K_Delta);
    cfg.C_dim = j.value("C_dim", cfg.C_dim);
    return cfg;
}

json constants_report_json(const ucplab::ConstantsReport& r) {
    json j;
    j["d"] = r.params.d;
    j["K_V"] = r.params.K_V;
    j["delta"] = r.params.delta;
    j["bc"] = ucplab::to_string(r.bc);
    j["R"] = r.params.R;
    j["beta"] = r.params.beta;
    j["alpha"] = r.alpha;
    j["c_quc"] = r.c_quc;
    j["c_sfuc_composed"] = r.c_sfuc.composed;
    j["c_sfuc_simplified"] = r.c_sfuc.simplified;
    j["c_sfuc_dilute"] = r.c_sfuc.dilute;
    if (r.c_lf) {
        j["c_lf"] = r.c_lf->c_lf;
        j["c_lf_c1"] = r.c_lf->c1;
    }
    j["kappa"] = r.wegner.kappa;
    j["c_E"] = r.wegner.c_E;
    j["c_W"] = r.wegner.c_W;
    return j;
}

void write_constants_outputs(const ucplab::ConstantsReport& r, const fs::path& dir) {
    fs::create_directories(dir);
    const json j = constants_report_json(r);
    std::ofstream(dir / "constants.json") << j.dump(2) << '\n';
    ucplab::CsvRow header, row;
    for (const auto& [key, value] : j.items()) {
        header.push_back(key);
        row.push_back(value.is_string() ? value.get<std::string>()
                      : value.is_number_integer()
                          ? std::to_string(value.get<long long>())
                          : ucplab::format_double(value.get<double>()));
    }
    ucplab::write_csv(dir / "constants.csv", header, {row});
}

struct RunContext {
    json config;
    fs::path out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    ucplab::CarlemanConfig carleman;
};

ucplab::DeloneAndersonModel model_from_json(const json& m, const ucplab::BoxSpec& window,
                                            std::uint64_t seed) {
    require_object(m, "model",
                   {"V0", "distribution", "C_minus", "C_plus", "delta_minus", "delta_plus", "M",
                    "M_tilde", "profile", "gamma2_per_cell"},
                   {});
    ucplab::DeloneAndersonModel model;
    model.V0 = m.contains("V0") ? v0_from_json(m.at("V0"))
                                : [](const Eigen::VectorXd&) { return 0.0; };
    if (m.contains("distribution")) model.dist = dist_from_json(m.at("distribution"));
    model.C_minus = m.value("C_minus", 1.0);
    model.C_plus = m.value("C_plus", 1.0);
    model.delta_minus = m.value("delta_minus", 0.3);
    model.delta_plus = m.value("delta_plus", 0.4);
    const auto profile = m.value("profile", std::string("indicator"));
    if (profile == "indicator")
        model.profile = ucplab::SingleSiteProfile::IndicatorBall;
    else if (profile == "bump")
        model.profile = ucplab::SingleSiteProfile::BumpBall;
    else
        throw ConfigError("model.profile: unknown value '" + profile + "'");
    model.arrangement =
        ucplab::generate_delone(window.d, m.value("M_tilde", 0.5), m.value("M", 1), window, seed,
                                model.delta_minus, m.value("gamma2_per_cell", 0));
    return model;
}

void write_provenance(const RunContext& ctx, double wall_seconds) {
    std::ofstream log(ctx.out_dir / "provenance.txt");
    log << kVersion << '\n'
        << "experiment: " << ctx.config.at("experiment").get<std::string>() << '\n'
        << "seed: " << ctx.seed << '\n'
        << "threads: " << ctx.threads << '\n'
        << "wall_seconds: " << wall_seconds << '\n';
}

json numeric_block(const RunContext& ctx) {
    return ctx.config.value("numeric", json::object());
}

void run_ucp(const RunContext& ctx) {
    const json num = numeric_block(ctx);
    const auto L_list = num.value("L_list", std::vector<int>{5, 9, 13, 17, 21});
    const auto bc = ucplab::bc_from_string(num.value("bc", std::string("periodic")));
    const auto V0 = ctx.config.contains("model") && ctx.config.at("model").contains("V0")
                        ? v0_from_json(ctx.config.at("model").at("V0"))
                        : v0_from_json(json{{"kind", "cosine"}, {"amplitude", 0.5}});
    const auto summary = ucplab::verify_ucp(V0, L_list, bc, num.value("n_eigs", 10),
                                            num.value("delta", 0.3),
                                            num.value("n_per_unit", 40), ctx.carleman);
    ucplab::write_csv(ctx.out_dir / "ucp.csv", ucplab::kUcpHeader,
                      ucplab::ucp_summary_rows(summary, ctx.seed));
    json j;
    j["L_list"] = summary.L_list;
    j["min_ratio_per_L"] = summary.min_ratio_per_L;
    j["log_ratio_slope"] = summary.log_ratio_slope;
    std::ofstream(ctx.out_dir / "summary.json") << j.dump(2) << '\n';
}

void run_wegner(const RunContext& ctx) {
    const json num = numeric_block(ctx);
    const int L = num.value("L", 21);
    const int n_per_unit = num.value("n_per_unit", 10);
    const auto bc = ucplab::bc_from_string(num.value("bc", std::string("periodic")));
    ucplab::BoxSpec box{.d = num.value("d", 1), .center = {}, .side = static_cast<double>(L),
                        .bc = bc};
    const auto model = model_from_json(ctx.config.value("model", json::object()), box, ctx.seed);
    const ucplab::Grid grid{box, n_per_unit * L};

    const ucplab::GridFunction Vbg = ucplab::GridFunction::sample(grid, model.V0);
    const auto H0 = ucplab::build_hamiltonian(grid, Vbg);
    const double lambda0 = ucplab::eigs_lowest(H0, 1)[0].lambda;
    const double E = lambda0 + num.value("E_offset", 0.1);

    const auto eps = num.value("epsilon_list", std::vector<double>{0.02, 0.04, 0.08, 0.16});
    const int n_real = ctx.config.value("randomness", json::object()).value("n_real", 200);
    const auto table =
        ucplab::wegner_mc(model, grid, E, eps, n_real, ctx.seed, 1.0, ctx.threads);
    ucplab::write_csv(ctx.out_dir / "wegner.csv", ucplab::kWegnerHeader,
                      ucplab::wegner_rows(table, L, E, n_real));
    json j;
    j["E"] = E;
    j["loglog_slope"] = table.loglog_slope;
    j["dropped"] = table.dropped;
    std::ofstream(ctx.out_dir / "summary.json") << j.dump(2) << '\n';
}

void run_lift(const RunContext& ctx) {
    const json num = numeric_block(ctx);
    const int L = num.value("L", 15);
    ucplab::BoxSpec box{.d = num.value("d", 1), .center = {}, .side = static_cast<double>(L),
                        .bc = ucplab::bc_from_string(num.value("bc", std::string("periodic")))};
    const auto model = model_from_json(ctx.config.value("model", json::object()), box, ctx.seed);
    const ucplab::Grid grid{box, num.value("n_per_unit", 20) * L};
    const int n_t = num.value("t_points", 11);
    std::vector<double> t_grid;
    for (int i = 0; i < n_t; ++i) t_grid.push_back(static_cast<double>(i) / (n_t - 1));
    const auto curve = ucplab::eigenvalue_lift(model, grid, t_grid);
    ucplab::write_csv(ctx.out_dir / "lift.csv", ucplab::kLiftHeader, ucplab::lift_rows(curve));
    json j;
    j["kappa_emp"] = curve.kappa_emp;
    std::ofstream(ctx.out_dir / "summary.json") << j.dump(2) << '\n';
}

void run_uncertainty(const RunContext& ctx) {
    const json num = numeric_block(ctx);
    const int L = num.value("L", 15);
    ucplab::BoxSpec box{.d = num.value("d", 1), .center = {}, .side = static_cast<double>(L),
                        .bc = ucplab::bc_from_string(num.value("bc", std::string("periodic")))};
    const auto model = model_from_json(ctx.config.value("model", json::object()), box, ctx.seed);
    const ucplab::Grid grid{box, num.value("n_per_unit", 20) * L};
    const auto W = ucplab::frozen_gamma1_potential(model, grid);
    const auto H0 =
        ucplab::build_hamiltonian(grid, ucplab::GridFunction::sample(grid, model.V0));
    const auto lift = ucplab::eigenvalue_lift(model, grid, {0.0, 1.0});
    const auto res = ucplab::uncertainty_check(H0, W, num.value("q", 0.5), lift.kappa_emp);
    json j;
    j["empty_projector"] = res.empty_projector;
    j["projector_rank"] = res.projector_rank;
    j["min_compression_eigenvalue"] = res.min_compression_eigenvalue;
    j["threshold"] = res.threshold;
    j["ok"] = res.ok;
    std::ofstream(ctx.out_dir / "summary.json") << j.dump(2) << '\n';
}

void run_ssf(const RunContext& ctx) {
    const json num = numeric_block(ctx);
    const int L = num.value("L", 9);
    ucplab::BoxSpec box{.d = num.value("d", 1), .center = {}, .side = static_cast<double>(L),
                        .bc = ucplab::bc_from_string(num.value("bc", std::string("dirichlet")))};
    const auto model = model_from_json(ctx.config.value("model", json::object()), box, ctx.seed);
    const ucplab::Grid grid{box, num.value("n_per_unit", 10) * L};
    const auto H1 =
        ucplab::build_hamiltonian(grid, ucplab::GridFunction::sample(grid, model.V0));
    const auto W = ucplab::frozen_gamma1_potential(model, grid);
    Eigen::MatrixXd M1(H1.matrix);
    Eigen::MatrixXd M2 = M1;
    M2 += W.values.asDiagonal();
    const auto rec = ucplab::ssf(M1, M2);
    ucplab::write_csv(ctx.out_dir / "ssf.csv", ucplab::kSsfHeader, ucplab::ssf_rows(rec));
    json j;
    j["trace_identity_residual"] = rec.trace_identity_residual;
    std::ofstream(ctx.out_dir / "summary.json") << j.dump(2) << '\n';
}

int cmd_run(const std::string& config_path, int threads_flag) {
    json config;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "config error: cannot read " << config_path << '\n';
            return 2;
        }
        try {
            config = json::parse(in);
        } catch (const json::exception& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        }
    }
    RunContext ctx;
    try {
        require_object(config, "config",
                       {"experiment", "seed", "output_dir", "threads", "model", "numeric",
                        "randomness", "constants"},
                       {"experiment", "seed", "output_dir"});
        ctx.config = config;
        ctx.seed = config.at("seed").get<std::uint64_t>();
        ctx.out_dir = config.at("output_dir").get<std::string>();
        ctx.threads = thread_count(threads_flag > 0 ? threads_flag : config.value("threads", 0));
        ctx.carleman = carleman_from_json(config.value("constants", json()));
        ctx.carleman.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    const auto experiment = config.at("experiment").get<std::string>();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fs::create_directories(ctx.out_dir);
        std::ofstream(ctx.out_dir / "config.resolved.json") << config.dump(2) << '\n';
        if (experiment == "ucp")
            run_ucp(ctx);
        else if (experiment == "wegner")
            run_wegner(ctx);
        else if (experiment == "lift")
            run_lift(ctx);
        else if (experiment == "uncertainty")
            run_uncertainty(ctx);
        else if (experiment == "ssf")
            run_ssf(ctx);
        else if (experiment == "constants") {
            const json num = numeric_block(ctx);
            const auto report = ucplab::constants_report(
                num.value("d", 1), num.value("K_V", 1.0), num.value("delta", 0.3),
                ucplab::bc_from_string(num.value("bc", std::string("periodic"))), ctx.carleman);
            write_constants_outputs(report, ctx.out_dir);
        } else if (experiment == "gen-delone") {
            const json num = numeric_block(ctx);
            ucplab::BoxSpec window{.d = num.value("d", 1), .center = {},
                                   .side = static_cast<double>(num.value("L", 15)),
                                   .bc = ucplab::BoundaryCondition::Periodic};
            const auto arr = ucplab::generate_delone(window.d, num.value("M_tilde", 0.5),
                                                     num.value("M", 1), window, ctx.seed,
                                                     num.value("delta", 0.3));
            std::ofstream(ctx.out_dir / "delone.json")
                << ucplab::delone_to_json(arr).dump(2) << '\n';
        } else {
            std::cerr << "config error: unknown experiment '" << experiment << "'\n";
            return 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "compute failure in experiment '" << experiment << "': " << e.what()
                  << '\n';
        return 1;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_provenance(ctx, wall);
    return 0;
}

int cmd_plot_data(const std::vector<std::string>& reports, const fs::path& out_dir) {
    try {
        fs::create_directories(out_dir);
        std::ofstream recipe(out_dir / "plot_recipe.txt");
        for (const auto& report : reports) {
            const auto [header, rows] = ucplab::read_csv(report);
            const auto col = [&](const std::string& name) {
                for (std::size_t i = 0; i < header.size(); ++i)
                    if (header[i] == name) return i;
                throw ucplab::IoError("plot-data: column '" + name + "' missing in " + report);
            };
            if (header == ucplab::kUcpHeader) {
                std::ofstream dat(out_dir / "ratio_vs_L.dat", std::ios::binary);
                if (rows.empty()) {
                    std::cerr << "warning: empty report " << report << '\n';
                    continue;
                }
                // one block per eigen-index
                std::map<int, std::vector<std::pair<int, double>>> blocks;
                for (const auto& row : rows)
                    blocks[std::stoi(row[col("eig_idx")])].emplace_back(
                        std::stoi(row[col("L")]), std::stod(row[col("ratio")]));
                for (auto& [eig, pts] : blocks) {
                    dat << "# eig_idx " << eig << '\n';
                    std::sort(pts.begin(), pts.end());
                    for (const auto& [L, ratio] : pts)
                        dat << L << ' ' << ucplab::format_double(ratio) << '\n';
                    dat << "\n\n";
                }
                recipe << "plot 'ratio_vs_L.dat' using 1:2 with linespoints  # mass ratio vs L\n";
            } else if (header == ucplab::kWegnerHeader) {
                std::ofstream dat(out_dir / "loglog.dat", std::ios::binary);
                if (rows.empty()) {
                    std::cerr << "warning: empty report " << report << '\n';
                    continue;
                }
                dat << "# slope " << rows.front()[col("slope_fit")] << '\n';
                for (const auto& row : rows)
                    dat << ucplab::format_double(std::log(std::stod(row[col("epsilon")]))) << ' '
                        << ucplab::format_double(std::log(std::stod(row[col("mean_count")])))
                        << '\n';
                recipe << "plot 'loglog.dat' using 1:2 with linespoints  # ln mean count vs ln epsilon\n";
            } else if (header == ucplab::kLiftHeader) {
                std::ofstream dat(out_dir / "lambda_vs_t.dat", std::ios::binary);
                if (rows.empty()) {
                    std::cerr << "warning: empty report " << report << '\n';
                    continue;
                }
                for (const auto& row : rows)
                    dat << row[col("t")] << ' ' << row[col("lambda")] << '\n';
                recipe << "plot 'lambda_vs_t.dat' using 1:2 with linespoints  # ground state energy vs t\n";
            } else {
                throw ucplab::IoError("plot-data: unrecognized report layout in " + report);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "plot-data failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };
    try {
        // weight envelope on random points
        ucplab::CounterRng rng(7, 0, 0);
        bool weight_ok = true;
        for (int i = 0; i < 1000; ++i) {
            Eigen::VectorXd x(3);
            for (int k = 0; k < 3; ++k) x(k) = rng.uniform(-1.0, 1.0);
            if (x.norm() == 0.0) continue;
            x *= rng.uniform() / x.norm();  // weight domain is the unit ball
            const double w = ucplab::weight(x, 1.0);
            const double r = x.norm();
            if (w < r / 3.0 - 1e-10 || w > r + 1e-10) weight_ok = false;
        }
        check("carleman weight envelope", weight_ok);

        // delone generate -> validate roundtrip
        ucplab::BoxSpec window{.d = 2, .center = {}, .side = 5.0,
                               .bc = ucplab::BoundaryCondition::Periodic};
        const auto arr = ucplab::generate_delone(2, 0.5, 1, window, 11);
        check("delone generate/validate",
              !ucplab::validate_delone(arr.all_points(), 0.5, 1, window).has_value());

        // near-neighbor injectivity, d=1, L=5, periodic
        ucplab::BoxSpec box{.d = 1, .center = {}, .side = 5.0,
                            .bc = ucplab::BoundaryCondition::Periodic};
        std::set<std::vector<int>> images;
        bool injective = true;
        for (const auto& k : ucplab::lattice_sites(box, 1)) {
            const auto nn = ucplab::right_near_neighbor(k, 5, box.bc);
            std::vector<int> img(nn.k_plus.data(), nn.k_plus.data() + nn.k_plus.size());
            if (!images.insert(img).second) injective = false;
        }
        check("near-neighbor injectivity", injective);

        // switch function pins and slope cap
        const ucplab::RhoSwitch rho(0.25);
        check("switch function", rho(-0.25) == -1.0 && rho(0.25) == 0.0 &&
                                     std::abs(rho.derivative(0.0) - 0.75 / 0.25) < 1e-12);

        // csv round trip
        const auto tmp = fs::temp_directory_path() / "ucplab_selftest.csv";
        ucplab::write_csv(tmp, {"a", "b"}, {{ucplab::format_double(1.0 / 3.0), "x"}});
        const auto [header, rows] = ucplab::read_csv(tmp);
        check("csv round trip",
              header == ucplab::CsvRow{"a", "b"} && std::stod(rows[0][0]) == 1.0 / 3.0);
        fs::remove(tmp);
    } catch (const std::exception& e) {
        std::cerr << "selftest failure: " << e.what() << '\n';
        return 1;
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for scale-free unique continuation and "
                 "Delone-Anderson spectral statistics"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Execute an experiment described by a JSON config");
    std::string config_path;
    int threads_flag = 0;
    run->add_option("config", config_path, "Path to the experiment config")->required();
    run->add_option("--threads", threads_flag, "Worker pool size (default: hardware)");

    // constants
    auto* constants = app.add_subcommand("constants", "Evaluate the constant chain");
    int c_d = 1;
    double c_kv = 1.0, c_delta = 0.3, c_cminus = 1.0, c_e0 = 0.0;
    std::string c_bc = "periodic", c_out = ".";
    int c_m = 1;
    constants->add_option("--d", c_d, "Dimension")->check(CLI::PositiveNumber);
    constants->add_option("--kv", c_kv, "Potential sup-norm K_V");
    constants->add_option("--delta", c_delta, "Ball radius in (0, 1]");
    constants->add_option("--bc", c_bc, "Boundary condition: dirichlet | periodic");
    constants->add_option("--m", c_m, "Dilute lattice scale M");
    constants->add_option("--cminus", c_cminus, "Coupling floor C_minus");
    constants->add_option("--e0", c_e0, "Energy reference E_0");
    constants->add_option("--out", c_out, "Output directory");

    // gen-delone
    auto* gen = app.add_subcommand("gen-delone", "Generate a Delone arrangement");
    int g_d = 1, g_m = 1;
    double g_mtilde = 0.5, g_side = 15.0, g_delta = 0.3;
    std::uint64_t g_seed = 0;
    bool g_seed_set = false;
    std::string g_out = "delone.json";
    gen->add_option("--d", g_d, "Dimension")->check(CLI::PositiveNumber);
    gen->add_option("--m", g_m, "Relative denseness scale M");
    gen->add_option("--mtilde", g_mtilde, "Uniform discreteness scale");
    gen->add_option("--side", g_side, "Window side length");
    gen->add_option("--delta", g_delta, "Ball radius");
    gen->add_option("--seed", g_seed, "RNG seed")
        ->each([&](const std::string&) { g_seed_set = true; });
    gen->add_option("--out", g_out, "Output JSON path");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "Reshape report CSVs into gnuplot .dat files");
    std::vector<std::string> p_reports;
    std::string p_out = ".";
    plot->add_option("reports", p_reports, "Report CSV files")->required();
    plot->add_option("--out", p_out, "Output directory");

    auto* self = app.add_subcommand("selftest", "Run the invariant suite");
    (void)self;

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, threads_flag);
    if (constants->parsed()) {
        try {
            const auto report = ucplab::constants_report(
                c_d, c_kv, c_delta, ucplab::bc_from_string(c_bc), ucplab::CarlemanConfig{},
                c_cminus, c_e0, c_m);
            write_constants_outputs(report, c_out);
        } catch (const ucplab::ConstantsError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "compute failure: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }
    if (gen->parsed()) {
        if (!g_seed_set) {
            std::cerr << "config error: missing required field 'seed'\n";
            return 2;
        }
        try {
            ucplab::BoxSpec window{.d = g_d, .center = {}, .side = g_side,
                                   .bc = ucplab::BoundaryCondition::Periodic};
            const auto arr = ucplab::generate_delone(g_d, g_mtilde, g_m, window, g_seed, g_delta);
            std::ofstream(g_out) << ucplab::delone_to_json(arr).dump(2) << '\n';
        } catch (const std::exception& e) {
            std::cerr << "compute failure: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }
    if (plot->parsed()) return cmd_plot_data(p_reports, p_out);
    return cmd_selftest();
}
