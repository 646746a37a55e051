// Command-line driver: deterministic experiment orchestration and CSV/JSON
// emission. Every run writes a manifest whose content hash is stamped into
// each output file; identical (config, seed) give identical bytes.
//
// Exit codes: 0 ok, 1 experiment or configuration value error, 2 usage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "skel/decomposition.hpp"
#include "skel/experiments.hpp"
#include "skel/functionals.hpp"
#include "skel/io.hpp"
#include "skel/karandikar.hpp"
#include "skel/occupation.hpp"
#include "skel/variation.hpp"
#include "skel/young.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skel;

namespace {

struct GlobalOpts {
    std::string config_file;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool emit_plot_data = false;
};

json load_config(const GlobalOpts& g) {
    if (g.config_file.empty()) return json::object();
    std::ifstream in(g.config_file);
    if (!in) throw std::runtime_error("config: cannot open " + g.config_file);
    json j;
    in >> j;
    return j;
}

// Manifest: canonical config dump + content hash, written once per run.
struct Run {
    fs::path dir;
    std::string hash;

    Run(const GlobalOpts& g, const std::string& subcommand, const json& params) {
        json manifest;
        manifest["subcommand"] = subcommand;
        manifest["seed"] = g.seed;
        manifest["params"] = params;
        const std::string canonical = manifest.dump(2);  // nlohmann sorts keys
        hash = hash_hex(fnv1a64(canonical));
        manifest["hash"] = hash;
        dir = fs::path(g.out_dir);
        fs::create_directories(dir);
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << "\n";
    }

    std::ofstream open_csv(const std::string& name) const {
        std::ofstream out(dir / name);
        out << "# manifest=" << hash << "\n";
        return out;
    }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream out(dir / name);
        json wrapped = j;
        wrapped["manifest"] = hash;
        out << wrapped.dump(2) << "\n";
    }
};

std::unique_ptr<Functional> functional_from(const std::string& name, const std::string& params) {
    try {
        return make_functional(name, params);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("functional params: ") + e.what());
    }
}

std::vector<double> read_series(const std::string& file, std::size_t column) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open series file: " + file);
    std::vector<double> xs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string cell;
        for (std::size_t c = 0; c <= column; ++c)
            if (!std::getline(row, cell, ',')) break;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) continue;  // header row
        xs.push_back(v);
    }
    if (xs.empty()) throw std::runtime_error("no numeric data in " + file);
    return xs;
}

// Grid CSV: header ",x0,x1,..." then rows "t,v,v,...".
GridField read_grid(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open grid file: " + file);
    GridField g;
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // corner
        while (std::getline(row, cell, ',')) g.xs.push_back(std::strtod(cell.c_str(), nullptr));
    }
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        g.times.push_back(std::strtod(cell.c_str(), nullptr));
        while (std::getline(row, cell, ','))
            g.v.push_back(std::strtod(cell.c_str(), nullptr));
    }
    g.check_rectangular();
    return g;
}

void write_trend_csv(std::ofstream out, const TrendTable& t) {
    out << "k,mean_sup_error,se,median,n_paths,clock,oracle\n";
    for (const auto& r : t.rows)
        out << r.k << ',' << format_double(r.mean) << ',' << format_double(r.se) << ','
            << format_double(r.median) << ',' << r.n_paths << ',' << t.clock << ',' << t.oracle
            << "\n";
}

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, const json& cfg) {
    const int k = cfg.value("k", 5);
    const std::size_t n = cfg.value("n_paths", 10);
    const double horizon = cfg.value("horizon", 1.0);
    const std::string mode = cfg.value("mode", "walk");
    const double dt_factor = cfg.value("dt_factor", 64.0);
    if (k < 1 || n == 0 || horizon <= 0.0)
        throw std::runtime_error("simulate: k, n_paths, horizon must be positive");
    const double eps = std::pow(2.0, -k);

    Run run(g, "simulate", cfg);
    auto summary = run.open_csv("summary.csv");
    summary << "path,n_arrivals,last_arrival,end_level\n";
    for (std::size_t p = 0; p < n; ++p) {
        Rng rng(g.seed, p);
        Skeleton s;
        if (mode == "walk") {
            s = build_skeleton_walk(eps, horizon, rng);
        } else if (mode == "coupled") {
            const auto b = generate_brownian(horizon, eps * eps / dt_factor, rng);
            s = extract_skeleton(b, eps);
            char pname[64];
            std::snprintf(pname, sizeof pname, "path_%03zu.csv", p);
            write_path_csv((run.dir / pname).string(), b, Rng::derive_seed(g.seed, p));
        } else {
            throw std::runtime_error("simulate: mode must be walk or coupled");
        }
        char name[64];
        std::snprintf(name, sizeof name, "skeleton_%03zu.csv", p);
        write_skeleton_csv((run.dir / name).string(), s);
        summary << p << ',' << s.size() << ',' << format_double(s.arrival(s.size())) << ','
                << s.level_index(s.size()) << "\n";
    }
    std::cout << "simulate: wrote " << n << " skeletons to " << run.dir << "\n";
    return 0;
}

int cmd_operators(const GlobalOpts& g, const json& cfg) {
    const int k = cfg.value("k", 5);
    const double horizon = cfg.value("horizon", 1.0);
    const auto f = functional_from(cfg.value("functional", "quadratic"),
                                   cfg.value("params", json::object()).dump());
    Run run(g, "operators", cfg);
    Rng rng(g.seed, cfg.value("path_index", 0));
    const auto s = build_skeleton_walk(std::pow(2.0, -k), horizon, rng);
    const auto grid = default_operator_grid(s);

    OperatorScan scan(*f, s);
    auto out = run.open_csv("operator_trace.csv");
    out << "t,n,dh,d2,u,delta_ratio\n";
    for (double t : grid) {
        const auto smp = scan.sample(t);
        out << format_double(smp.t) << ',' << smp.n << ',' << format_double(smp.dh) << ','
            << format_double(smp.d2) << ',' << format_double(smp.u) << ',';
        if (!std::isnan(smp.delta_ratio)) out << format_double(smp.delta_ratio);
        out << "\n";
    }
    std::cout << "operators: trace with " << grid.size() << " rows in " << run.dir << "\n";
    return 0;
}

int cmd_occupation(const GlobalOpts& g, const json& cfg) {
    const int k = cfg.value("k", 6);
    const std::int64_t level = cfg.value("level", 0);
    const std::size_t n = cfg.value("n_paths", 200);
    const double horizon = cfg.value("horizon", 1.0);
    const std::string clock_s = cfg.value("clock", "square_bracket");
    const Clock clock = clock_s == "angle_bracket" ? Clock::angle_bracket : Clock::square_bracket;
    const double eps = std::pow(2.0, -k);

    Run run(g, "occupation", cfg);
    auto out = run.open_csv("occupation_terminal.csv");
    out << "path,L_terminal\n";
    std::vector<double> vals(n);
    for (std::size_t p = 0; p < n; ++p) {
        Rng rng(g.seed, p);
        const auto s = build_skeleton_walk(eps, horizon, rng);
        const auto f = OccupationField::build(s);
        vals[p] = f.occupation_value(eps * static_cast<double>(level), horizon, clock);
        out << p << ',' << format_double(vals[p]) << "\n";
    }
    const auto m = mean_se(vals);
    json res = {{"k", k}, {"level", level}, {"clock", clock_s},
                {"mean", m.mean}, {"se", m.se}, {"n_paths", n}};
    run.write_json("occupation_summary.json", res);
    if (g.emit_plot_data) {
        std::vector<double> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
        write_xy_csv((run.dir / "plotdata_occupation.csv").string(), "path", "L_terminal", idx,
                     vals);
    }
    std::cout << "occupation: mean " << m.mean << " (se " << m.se << ") in " << run.dir << "\n";
    return 0;
}

int cmd_pvar(const GlobalOpts& g, const json& cfg) {
    const double p = cfg.value("p", 2.0);
    const auto series = read_series(cfg.at("input").get<std::string>(), cfg.value("column", 0));
    const bool brute = cfg.value("brute", false);
    const auto rep = brute ? p_variation_brute(series, p) : p_variation(series, p);

    Run run(g, "pvar", cfg);
    json j = {{"p", rep.p},
              {"power_sum", rep.power_sum},
              {"value", rep.value},
              {"partition", rep.partition},
              {"method", rep.method}};
    run.write_json("pvar.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_young(const GlobalOpts& g, const json& cfg) {
    Run run(g, "young", cfg);
    const std::string mode = cfg.value("mode", "1d");
    if (mode == "1d") {
        const auto f = read_series(cfg.at("f").get<std::string>(), 0);
        const auto gg = read_series(cfg.at("g").get<std::string>(), 0);
        Young1DParams params;
        params.tolerance = cfg.value("tolerance", 1e-8);
        params.max_depth = cfg.value("max_depth", 18);
        params.rule = cfg.value("rule", "left") == std::string("trapezoid") ? TagRule::trapezoid
                                                                            : TagRule::left;
        params.check_regime = true;
        const auto r = young_integral_1d(f, gg, params);
        json j = {{"value", r.value},       {"trace", r.trace},
                  {"converged", r.converged}, {"tolerance", r.tolerance},
                  {"regime_warning", r.regime_warning}};
        run.write_json("young.json", j);
        std::cout << j.dump(2) << "\n";
        return r.converged ? 0 : 1;
    }
    if (mode == "2d") {
        const auto G = read_grid(cfg.at("G").get<std::string>());
        const auto R = read_grid(cfg.at("R").get<std::string>());
        Young2DParams params;
        params.tolerance = cfg.value("tolerance", 1e-6);
        params.max_depth = cfg.value("max_depth", 10);
        const auto r = young_integral_2d(G, R, params);
        const auto ibp = ibp_transform(G, R);
        json j = {{"value", r.value},
                  {"trace", r.trace},
                  {"converged", r.converged},
                  {"ibp_direct", ibp.direct},
                  {"ibp_via_parts", ibp.via_parts},
                  {"ibp_residual", ibp.residual}};
        run.write_json("young.json", j);
        std::cout << j.dump(2) << "\n";
        return r.converged ? 0 : 1;
    }
    throw std::runtime_error("young: mode must be 1d or 2d");
}

int cmd_decompose(const GlobalOpts& g, const json& cfg) {
    const int k = cfg.value("k", 5);
    const std::size_t n = cfg.value("n_paths", 20);
    const double horizon = cfg.value("horizon", 1.0);
    const auto f = functional_from(cfg.value("functional", "quadratic"),
                                   cfg.value("params", json::object()).dump());
    const Clock clock = cfg.value("clock", "square_bracket") == std::string("angle_bracket")
                            ? Clock::angle_bracket
                            : Clock::square_bracket;
    Run run(g, "decompose", cfg);
    auto out = run.open_csv("residuals.csv");
    out << "path,max_rel_residual,max_parts_residual\n";
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        Rng rng(g.seed, p);
        const auto s = build_skeleton_walk(std::pow(2.0, -k), horizon, rng);
        std::vector<double> grid = s.arrival_times;
        grid.push_back(horizon);
        const auto tr = decompose_discrete(*f, s, grid, clock);
        double scale = 1.0, res = 0.0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            scale = std::max(scale, std::fabs(tr.x[i]));
            res = std::max(res, tr.residual[i]);
        }
        const auto pc = summation_by_parts_check(*f, s, horizon);
        const double parts = pc.residual / std::max(1.0, std::fabs(pc.lhs));
        out << p << ',' << format_double(res / scale) << ',' << format_double(parts) << "\n";
        worst = std::max(worst, res / scale);
        if (p == 0) {
            auto trace = run.open_csv("trace_path0.csv");
            trace << "t,x,martingale,mart_centered,horizontal,occupation,residual\n";
            for (std::size_t i = 0; i < tr.t.size(); ++i)
                trace << format_double(tr.t[i]) << ',' << format_double(tr.x[i]) << ','
                      << format_double(tr.martingale[i]) << ','
                      << format_double(tr.mart_centered[i]) << ','
                      << format_double(tr.horizontal[i]) << ','
                      << format_double(tr.occupation[i]) << ','
                      << format_double(tr.residual[i]) << "\n";
        }
    }
    std::cout << "decompose: worst relative residual " << worst << " in " << run.dir << "\n";
    return (clock == Clock::square_bracket && worst > 1e-9) ? 1 : 0;
}

int cmd_drift(const GlobalOpts& g, const json& cfg) {
    const int k_min = cfg.value("k_min", 4), k_max = cfg.value("k_max", 8);
    if (k_min > k_max) throw std::runtime_error("drift: k_min must be <= k_max");
    EnsembleSpec spec;
    spec.seed = g.seed;
    spec.n_paths = cfg.value("n_paths", 200);
    spec.horizon = cfg.value("horizon", 1.0);
    spec.threads = g.threads;
    std::vector<int> ks;
    for (int k = k_min; k <= k_max; ++k) ks.push_back(k);

    const std::string fname = cfg.value("functional", "quadratic");
    const auto f = functional_from(fname, cfg.value("params", json::object()).dump());

    DriftOracle oracle;
    std::string oracle_name;
    if (fname == "quadratic") {
        oracle = [](const ContinuousPath*, double t) { return t; };
        oracle_name = "V(t)=t";
    } else if (fname == "rough_drift") {
        auto* rd = dynamic_cast<const RoughDriftFunctional*>(f.get());
        if (!rd || rd->Y() != nullptr)
            throw std::runtime_error("drift: closed-form oracle needs rough_drift with Y == 1");
        const Curve gc = rd->g();
        oracle = [gc](const ContinuousPath*, double t) { return gc(t) - gc(0.0); };
        oracle_name = "g - g(0)";
    } else {
        throw std::runtime_error("drift: no closed-form oracle for functional " + fname);
    }

    const auto table = drift_via_occupation_experiment(*f, ks, spec, DriftMode::walk, oracle,
                                                       Clock::square_bracket, oracle_name);
    Run run(g, "drift", cfg);
    write_trend_csv(run.open_csv("drift_convergence.csv"), table);
    if (g.emit_plot_data) {
        std::vector<double> xs, ys;
        for (const auto& r : table.rows) {
            xs.push_back(r.k);
            ys.push_back(r.mean);
        }
        write_xy_csv((run.dir / "plotdata_drift.csv").string(), "k", "mean_sup_error", xs, ys);
    }
    std::cout << "drift: " << table.rows.size() << " levels, monotone="
              << (table.monotone_decreasing() ? "yes" : "no") << " in " << run.dir << "\n";
    return 0;
}

int cmd_ito_check(const GlobalOpts& g, const json& cfg) {
    const int k_min = cfg.value("k_min", 5), k_max = cfg.value("k_max", 7);
    EnsembleSpec spec;
    spec.seed = g.seed;
    spec.n_paths = cfg.value("n_paths", 100);
    spec.horizon = cfg.value("horizon", 1.0);
    spec.threads = g.threads;
    std::vector<int> ks;
    for (int k = k_min; k <= k_max; ++k) ks.push_back(k);

    const std::string kernel_type = cfg.value("kernel", "smooth_bump");
    KernelG kernel =
        kernel_type == "holder_bump"
            ? holder_bump_kernel(cfg.value("gamma", 0.8), cfg.value("kernel_seed", 1))
            : smooth_bump_kernel(cfg.value("center", 0.0), cfg.value("halfwidth", 1.0),
                                 cfg.value("amplitude", 1.0));
    const auto rep = functional_ito_check(kernel, ks, spec);

    Run run(g, "ito-check", cfg);
    auto out = run.open_csv("ito_residuals.csv");
    out << "k,mean_abs_residual,sup_lhs,rel_residual,max_ibp_rel,n_paths\n";
    for (const auto& r : rep.rows)
        out << r.k << ',' << format_double(r.mean_abs_residual) << ','
            << format_double(r.sup_lhs) << ',' << format_double(r.rel_residual) << ','
            << format_double(r.max_ibp_rel) << ',' << r.n_paths << "\n";
    std::cout << "ito-check: " << rep.rows.size() << " levels, decreasing="
              << (rep.decreasing ? "yes" : "no") << " in " << run.dir << "\n";
    return 0;
}

int cmd_audit(const GlobalOpts& g, const json& cfg) {
    EnsembleSpec spec;
    spec.seed = g.seed;
    spec.n_paths = cfg.value("n_paths", 24);
    spec.horizon = cfg.value("horizon", 1.0);
    const auto f = functional_from(cfg.value("functional", "quadratic"),
                                   cfg.value("params", json::object()).dump());
    const auto rows = assumption_audit(*f, spec, cfg.value("window_lo", -1.0),
                                       cfg.value("window_hi", 1.0),
                                       cfg.value("declared_gradient_holder", 1.0));
    Run run(g, "audit", cfg);
    auto out = run.open_csv("audit.csv");
    out << "assumption,declared,measured,constant,pass,note\n";
    for (const auto& r : rows)
        out << r.assumption << ',' << format_double(r.declared) << ','
            << format_double(r.measured) << ',' << format_double(r.constant) << ','
            << (r.pass ? "yes" : "no") << ',' << r.note << "\n";
    std::cout << "audit: " << rows.size() << " rows in " << run.dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete skeleton calculus runner"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_file, "JSON config file (flags override)");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_flag("--emit-plot-data", g.emit_plot_data, "write x/y series files");

    // Per-subcommand overrides land in a json blob merged over the config file.
    json cli_cfg = json::object();
    auto add_common = [&](CLI::App* sub) {
        sub->fallthrough();  // global flags may follow the subcommand
        sub->add_option_function<int>("--k", [&](const int& v) { cli_cfg["k"] = v; });
        sub->add_option_function<int>("--k-min", [&](const int& v) { cli_cfg["k_min"] = v; });
        sub->add_option_function<int>("--k-max", [&](const int& v) { cli_cfg["k_max"] = v; });
        sub->add_option_function<std::size_t>(
            "--n", [&](const std::size_t& v) { cli_cfg["n_paths"] = v; });
        sub->add_option_function<double>("--horizon",
                                         [&](const double& v) { cli_cfg["horizon"] = v; });
        sub->add_option_function<std::string>(
            "--functional", [&](const std::string& v) { cli_cfg["functional"] = v; });
        sub->add_option_function<std::string>(
            "--params", [&](const std::string& v) { cli_cfg["params"] = json::parse(v); });
        sub->add_option_function<std::string>(
            "--clock", [&](const std::string& v) { cli_cfg["clock"] = v; });
    };

    auto* simulate = app.add_subcommand("simulate", "skeleton ensembles to CSV");
    add_common(simulate);
    simulate->add_option_function<std::string>(
        "--mode", [&](const std::string& v) { cli_cfg["mode"] = v; });

    auto* operators_cmd = app.add_subcommand("operators", "operator trace for one path");
    add_common(operators_cmd);

    auto* occupation_cmd = app.add_subcommand("occupation", "terminal occupation histogram");
    add_common(occupation_cmd);
    occupation_cmd->add_option_function<std::int64_t>(
        "--level", [&](const std::int64_t& v) { cli_cfg["level"] = v; });

    auto* pvar = app.add_subcommand("pvar", "p-variation of a sampled series");
    pvar->fallthrough();
    pvar->add_option_function<double>("--p", [&](const double& v) { cli_cfg["p"] = v; });
    pvar->add_option_function<std::string>(
        "--input", [&](const std::string& v) { cli_cfg["input"] = v; });
    pvar->add_option_function<std::size_t>(
        "--column", [&](const std::size_t& v) { cli_cfg["column"] = v; });
    pvar->add_flag_function("--brute", [&](std::int64_t) { cli_cfg["brute"] = true; });

    auto* young_cmd = app.add_subcommand("young", "Young integral of sampled data");
    young_cmd->fallthrough();
    young_cmd->add_option_function<std::string>(
        "--mode", [&](const std::string& v) { cli_cfg["mode"] = v; });
    young_cmd->add_option_function<std::string>(
        "--f", [&](const std::string& v) { cli_cfg["f"] = v; });
    young_cmd->add_option_function<std::string>(
        "--g", [&](const std::string& v) { cli_cfg["g"] = v; });
    young_cmd->add_option_function<std::string>(
        "--G", [&](const std::string& v) { cli_cfg["G"] = v; });
    young_cmd->add_option_function<std::string>(
        "--R", [&](const std::string& v) { cli_cfg["R"] = v; });
    young_cmd->add_option_function<std::string>(
        "--rule", [&](const std::string& v) { cli_cfg["rule"] = v; });
    young_cmd->add_option_function<double>("--tol",
                                           [&](const double& v) { cli_cfg["tolerance"] = v; });

    auto* decompose = app.add_subcommand("decompose", "per-path decomposition residuals");
    add_common(decompose);

    auto* drift = app.add_subcommand("drift", "drift recovery convergence table");
    add_common(drift);

    auto* ito = app.add_subcommand("ito-check", "functional Ito identity residuals");
    add_common(ito);
    ito->add_option_function<std::string>(
        "--kernel", [&](const std::string& v) { cli_cfg["kernel"] = v; });
    ito->add_option_function<double>("--gamma", [&](const double& v) { cli_cfg["gamma"] = v; });

    auto* audit = app.add_subcommand("audit", "regularity assumption audit");
    add_common(audit);
    audit->add_option_function<double>(
        "--declared-holder", [&](const double& v) { cli_cfg["declared_gradient_holder"] = v; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        json cfg = load_config(g);
        cfg.update(cli_cfg);  // flags win over the file
        if (simulate->parsed()) return cmd_simulate(g, cfg);
        if (operators_cmd->parsed()) return cmd_operators(g, cfg);
        if (occupation_cmd->parsed()) return cmd_occupation(g, cfg);
        if (pvar->parsed()) return cmd_pvar(g, cfg);
        if (young_cmd->parsed()) return cmd_young(g, cfg);
        if (decompose->parsed()) return cmd_decompose(g, cfg);
        if (drift->parsed()) return cmd_drift(g, cfg);
        if (ito->parsed()) return cmd_ito_check(g, cfg);
        if (audit->parsed()) return cmd_audit(g, cfg);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
