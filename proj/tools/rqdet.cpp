// rqdet: recurrence-determinism toolbox for interval dynamics.
// Subcommands: construct, rqa, sweep, reproduce.
// Exit codes: 0 ok, 1 certified-bound failure, 2 usage, 3 budget.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rqdet/dynamics.hpp"
#include "rqdet/experiments.hpp"
#include "rqdet/interval_system.hpp"
#include "rqdet/recurrence.hpp"

namespace {

using nlohmann::ordered_json;
using namespace rqdet;

constexpr int kExitOk = 0;
constexpr int kExitBoundFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

struct Budget {
    std::int64_t max_n = 65536;
    int max_mcap = 4096;
    int max_depth = IntervalSystem::kDefaultDepthCap;
};

Budget env_budget() {
    Budget b;
    if (const char* v = std::getenv("RQDET_MAX_N")) b.max_n = std::stoll(v);
    if (const char* v = std::getenv("RQDET_MAX_MCAP")) b.max_mcap = std::stoi(v);
    if (const char* v = std::getenv("RQDET_MAX_DEPTH")) b.max_depth = std::stoi(v);
    return b;
}

struct RunConfig {
    std::string command;
    std::string kind = "ternary";
    int depth = 10;
    int stages = 3;
    int table_depth = 10;
    std::string map = "logistic:3.2";
    std::string x0 = "0.3";
    std::string alpha;
    std::vector<std::string> eps;
    std::string eps_grid;  // "", "ladder:N", "eps_t:LO..HI"
    std::vector<std::int64_t> n_grid{4096};
    int m_cap = 64;
    std::int64_t transient = 0;
    int threads = 1;
    std::uint64_t seed = 1;
    int t_lo = 2, t_hi = 6;
    double theta0 = 0.1, theta1 = 0.05;
    std::string out, out_csv, out_json, plot, plot_pgm, traj_csv, dump_config;

    ordered_json to_json() const {
        return ordered_json{{"command", command}, {"kind", kind},       {"depth", depth},
                            {"stages", stages},   {"table_depth", table_depth},
                            {"map", map},         {"x0", x0},           {"alpha", alpha},
                            {"eps", eps},         {"eps_grid", eps_grid},
                            {"n_grid", n_grid},   {"m_cap", m_cap},     {"transient", transient},
                            {"threads", threads}, {"seed", seed},       {"t_lo", t_lo},
                            {"t_hi", t_hi},       {"theta0", theta0},   {"theta1", theta1},
                            {"out", out},         {"out_csv", out_csv}, {"out_json", out_json},
                            {"plot", plot},       {"plot_pgm", plot_pgm}, {"traj_csv", traj_csv}};
    }
    static RunConfig from_json(const ordered_json& j) {
        RunConfig c;
        c.command = j.at("command").get<std::string>();
        c.kind = j.at("kind").get<std::string>();
        c.depth = j.at("depth").get<int>();
        c.stages = j.at("stages").get<int>();
        c.table_depth = j.at("table_depth").get<int>();
        c.map = j.at("map").get<std::string>();
        c.x0 = j.at("x0").get<std::string>();
        c.alpha = j.at("alpha").get<std::string>();
        c.eps = j.at("eps").get<std::vector<std::string>>();
        c.eps_grid = j.at("eps_grid").get<std::string>();
        c.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
        c.m_cap = j.at("m_cap").get<int>();
        c.transient = j.at("transient").get<std::int64_t>();
        c.threads = j.at("threads").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.t_lo = j.at("t_lo").get<int>();
        c.t_hi = j.at("t_hi").get<int>();
        c.theta0 = j.at("theta0").get<double>();
        c.theta1 = j.at("theta1").get<double>();
        c.out = j.at("out").get<std::string>();
        c.out_csv = j.at("out_csv").get<std::string>();
        c.out_json = j.at("out_json").get<std::string>();
        c.plot = j.at("plot").get<std::string>();
        c.plot_pgm = j.at("plot_pgm").get<std::string>();
        c.traj_csv = j.at("traj_csv").get<std::string>();
        return c;
    }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << content;
}

void maybe_dump_config(const RunConfig& cfg) {
    if (!cfg.dump_config.empty()) write_text(cfg.dump_config, cfg.to_json().dump(2) + "\n");
}

// "logistic:3.2" | "tent:2.0" | "odometer:ternary[:depth]" | "odometer:theorem3[:stages]"
MapSpec parse_map(const std::string& s, const Budget& budget) {
    auto next = [](const std::string& str, std::size_t& pos) {
        auto colon = str.find(':', pos);
        std::string tok = str.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
        pos = colon == std::string::npos ? str.size() : colon + 1;
        return tok;
    };
    std::size_t pos = 0;
    std::string head = next(s, pos);
    if (head == "logistic") return MapSpec::logistic(std::stod(s.substr(pos)));
    if (head == "tent") return MapSpec::tent(std::stod(s.substr(pos)));
    if (head == "odometer") {
        std::string sk = next(s, pos);
        std::string rest = pos < s.size() ? s.substr(pos) : "";
        if (sk == "ternary") {
            int depth = rest.empty() ? 12 : std::stoi(rest);
            if (depth > budget.max_depth) throw std::length_error("odometer depth beyond cap");
            auto sys = std::make_shared<const IntervalSystem>(IntervalSystem::ternary(depth));
            return MapSpec::odometer(sys, depth - 1);
        }
        if (sk == "theorem3") {
            int stages = rest.empty() ? 3 : std::stoi(rest);
            auto sys = std::make_shared<const IntervalSystem>(
                IntervalSystem::theorem3(stages, budget.max_depth));
            return MapSpec::odometer(sys, sys->depth() - 1);
        }
    }
    throw CLI::ValidationError("--map", "unrecognized map spec: " + s);
}

InitialPoint parse_start(const RunConfig& cfg) {
    if (!cfg.alpha.empty()) return InitialPoint::addr(cfg.alpha);
    auto slash = cfg.x0.find('/');
    if (slash != std::string::npos) {
        return InitialPoint::fraction(std::stoll(cfg.x0.substr(0, slash)),
                                      std::stoll(cfg.x0.substr(slash + 1)));
    }
    return InitialPoint::real(std::stod(cfg.x0));
}

std::vector<EpsSpec> resolve_eps(const RunConfig& cfg_in, const MapSpec& map, std::string& provenance) {
    RunConfig cfg = cfg_in;
    // a single --eps value of the form ladder[:N] / eps_t:LO..HI names a grid
    if (cfg.eps_grid.empty() && cfg.eps.size() == 1 &&
        (cfg.eps[0].rfind("ladder", 0) == 0 || cfg.eps[0].rfind("eps_t:", 0) == 0)) {
        cfg.eps_grid = cfg.eps[0];
        cfg.eps.clear();
    }
    provenance = "explicit";
    if (!cfg.eps_grid.empty()) {
        if (cfg.eps_grid.rfind("ladder", 0) == 0) {
            provenance = "ladder";
            if (map.kind != MapKind::Odometer || map.sys->kind() != SystemKind::Theorem3)
                throw CLI::ValidationError("--eps-grid", "ladder grid needs an odometer:theorem3 map");
            return ladder_eps_grid(*map.sys);
        }
        if (cfg.eps_grid.rfind("eps_t:", 0) == 0) {
            provenance = "eps_t";
            std::string range = cfg.eps_grid.substr(6);
            auto dots = range.find("..");
            if (dots == std::string::npos || map.kind != MapKind::Odometer)
                throw CLI::ValidationError("--eps-grid", "eps_t grid needs odometer map and LO..HI");
            return epsilon_t_grid(*map.sys, std::stoi(range.substr(0, dots)),
                                  std::stoi(range.substr(dots + 2)));
        }
        throw CLI::ValidationError("--eps-grid", "expected ladder[:N] or eps_t:LO..HI");
    }
    std::vector<EpsSpec> grid;
    for (const auto& e : cfg.eps) grid.push_back(EpsSpec::parse(e));
    if (grid.empty()) throw CLI::ValidationError("--eps", "at least one epsilon required");
    return grid;
}

Trajectory make_cli_trajectory(const MapSpec& map, const RunConfig& cfg, std::int64_t length) {
    InitialPoint start = parse_start(cfg);
    if (map.kind == MapKind::Odometer && start.kind == InitialPoint::Kind::Address) {
        Word alpha = word_from_string(cfg.alpha);
        return make_symbolic_trajectory(map.sys, alpha, length);
    }
    if (map.kind == MapKind::Tent && map.param == 2.0 && start.kind == InitialPoint::Kind::Fraction) {
        Trajectory whole = make_tent2_trajectory(start.num, start.den, length + cfg.transient);
        Trajectory t;
        t.source = whole.source;
        t.values.assign(whole.values.begin() + cfg.transient, whole.values.end());
        ExactOrbit ex;
        ex.den = whole.exact->den;
        ex.scaled.assign(whole.exact->scaled.begin() + cfg.transient, whole.exact->scaled.end());
        t.exact = std::move(ex);
        return t;
    }
    double x = start.x0;
    for (std::int64_t i = 0; i < cfg.transient; ++i) x = eval_map(map, x);
    return make_trajectory(map, x, length);
}

int cmd_construct(const RunConfig& cfg, const Budget& budget) {
    maybe_dump_config(cfg);
    std::optional<IntervalSystem> sys;
    if (cfg.kind == "ternary") {
        if (cfg.depth > budget.max_depth) {
            std::cerr << "construct: depth " << cfg.depth << " beyond cap " << budget.max_depth << "\n";
            return kExitBudget;
        }
        sys = IntervalSystem::ternary(cfg.depth);
    } else if (cfg.kind == "theorem3") {
        try {
            sys = IntervalSystem::theorem3(cfg.stages, budget.max_depth);
        } catch (const std::out_of_range& e) {
            std::cerr << "construct: " << e.what() << "\n";
            return kExitBudget;
        }
    } else {
        std::cerr << "construct: kind must be ternary or theorem3\n";
        return kExitUsage;
    }
    ValidationReport report = validate(*sys, sys->depth());
    ordered_json out;
    out["config"] = cfg.to_json();
    out["system"] = sys->to_json(cfg.table_depth);
    out["validation"] = report.to_json();
    if (!cfg.out.empty()) write_text(cfg.out, out.dump(2) + "\n");
    else std::cout << out.dump(2) << "\n";
    std::cerr << "validation: " << (report.pass ? "pass" : "FAIL") << " (" << report.records.size()
              << " checks)\n";
    return report.pass ? kExitOk : kExitBoundFailure;
}

int cmd_rqa(const RunConfig& cfg, const Budget& budget) {
    maybe_dump_config(cfg);
    MapSpec map = parse_map(cfg.map, budget);
    std::int64_t n_max = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
    if (n_max > budget.max_n || cfg.m_cap > budget.max_mcap) {
        std::cerr << "rqa: n/m budget exceeded (caps: n <= " << budget.max_n << ", m <= "
                  << budget.max_mcap << ")\n";
        return kExitBudget;
    }
    Trajectory traj = make_cli_trajectory(map, cfg, n_max + cfg.m_cap - 1);

    std::string provenance;
    std::vector<EpsSpec> grid = resolve_eps(cfg, map, provenance);

    ordered_json out;
    out["config"] = cfg.to_json();
    ordered_json reports = ordered_json::array();
    std::string csv;
    for (const auto& eps : grid) {
        DeterminismReport rep = make_report(build_profile(traj, eps, cfg.n_grid, cfg.m_cap));
        reports.push_back(rep.to_json());
        std::ostringstream os;
        rep.write_csv(os);
        csv += "# eps = " + eps.repr + "\n" + os.str();
    }
    out["reports"] = std::move(reports);

    if (!cfg.plot.empty() || !cfg.plot_pgm.empty()) {
        PairData data(traj, grid.front());
        RecurrenceMatrix rm = RecurrenceMatrix::build(data, n_max, grid.front().repr);
        if (!cfg.plot.empty()) {
            std::ofstream os(cfg.plot, std::ios::binary);
            rm.write_pbm(os);
        }
        if (!cfg.plot_pgm.empty()) {
            std::ofstream os(cfg.plot_pgm, std::ios::binary);
            rm.write_pgm_runs(os);
        }
        out["run_lengths"] = rm.run_length_json();
    }

    if (!cfg.traj_csv.empty()) {
        std::ofstream os(cfg.traj_csv);
        write_trajectory_csv(os, traj);
    }
    if (!cfg.out_csv.empty()) write_text(cfg.out_csv, csv);
    if (!cfg.out_json.empty()) write_text(cfg.out_json, out.dump(2) + "\n");
    if (cfg.out_csv.empty() && cfg.out_json.empty()) std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const Budget& budget) {
    maybe_dump_config(cfg);
    MapSpec map = parse_map(cfg.map, budget);
    std::string provenance;
    std::vector<EpsSpec> grid = resolve_eps(cfg, map, provenance);
    SweepBudget sb;
    sb.n_max = std::min<std::int64_t>(budget.max_n,
                                      *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end()));
    sb.M_cap = std::min(cfg.m_cap, budget.max_mcap);
    sb.transient = cfg.transient;
    SweepResult sweep = epsilon_sweep(map, parse_start(cfg), grid, sb, provenance, cfg.threads);
    ordered_json out;
    out["config"] = cfg.to_json();
    out["sweep"] = sweep.to_json();
    bool budget_hit = false;
    for (const auto& r : sweep.rows) budget_hit = budget_hit || r.budget_exceeded;
    ClassifyThresholds th;
    th.theta0 = cfg.theta0;
    th.theta1 = cfg.theta1;
    try {
        out["classification"] = classify(sweep, th).to_json();
    } catch (const std::invalid_argument& e) {
        out["classification"] = ordered_json{{"error", e.what()}};
    }
    if (!cfg.out.empty()) write_text(cfg.out, out.dump(2) + "\n");
    else std::cout << out.dump(2) << "\n";
    return budget_hit ? kExitBudget : kExitOk;
}

int cmd_reproduce(const std::string& what, const RunConfig& cfg, const Budget& budget) {
    maybe_dump_config(cfg);
    ordered_json out;
    out["config"] = cfg.to_json();
    bool pass = false;
    if (what == "theorem-example") {
        try {
            TheoremExampleReport rep = theorem_example_report(cfg.stages, budget.max_n);
            out["report"] = rep.to_json();
            pass = rep.pass;
        } catch (const std::out_of_range& e) {
            std::cerr << "reproduce: " << e.what() << "\n";
            return kExitBudget;
        }
    } else if (what == "four-fifths") {
        auto sys = std::make_shared<const IntervalSystem>(
            IntervalSystem::ternary(std::min(budget.max_depth, cfg.t_hi + 2)));
        FourFifthsReport rep = four_fifths_report(sys, cfg.t_lo, cfg.t_hi);
        out["report"] = rep.to_json();
        pass = rep.pass;
    } else if (what == "sandwich") {
        auto sys = std::make_shared<const IntervalSystem>(
            IntervalSystem::ternary(std::min(budget.max_depth, cfg.t_hi + 2)));
        std::vector<int> levels;
        for (int s = cfg.t_lo; s <= cfg.t_hi; ++s) levels.push_back(s);
        SandwichReport rep = sandwich_report(sys, cfg.t_hi, levels);
        out["report"] = rep.to_json();
        pass = rep.violations == 0;
    } else {
        std::cerr << "reproduce: unknown target " << what << "\n";
        return kExitUsage;
    }
    if (!cfg.out.empty()) write_text(cfg.out, out.dump(2) + "\n");
    else std::cout << out.dump(2) << "\n";
    std::cerr << "reproduce " << what << ": " << (pass ? "pass" : "FAIL") << "\n";
    return pass ? kExitOk : kExitBoundFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recurrence-determinism toolbox for interval dynamics"};
    app.require_subcommand(1);
    Budget budget = env_budget();

    RunConfig cfg;
    std::string config_path;
    std::string reproduce_what;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "load a resolved config JSON (overrides flags)");
        sub->add_option("--dump-config", cfg.dump_config, "write the resolved config JSON");
        sub->add_option("--threads", cfg.threads, "worker count (results are thread-invariant)");
        sub->add_option("--seed", cfg.seed, "seed for randomized helpers");
    };

    CLI::App* construct = app.add_subcommand("construct", "build an interval system + validator report");
    construct->add_option("--kind", cfg.kind, "ternary | theorem3");
    construct->add_option("--depth", cfg.depth, "levels for ternary");
    construct->add_option("--stages", cfg.stages, "stages for theorem3");
    construct->add_option("--table-depth", cfg.table_depth, "deepest level emitted in the JSON table");
    construct->add_option("--out", cfg.out, "output JSON path");
    add_common(construct);

    CLI::App* rqa = app.add_subcommand("rqa", "trajectory profiles: C_m, rdet, DET, recurrence plots");
    rqa->add_option("--map", cfg.map, "logistic:R | tent:S | odometer:ternary[:depth] | odometer:theorem3[:stages]");
    rqa->add_option("--x0", cfg.x0, "initial point, decimal or exact fraction p/q");
    rqa->add_option("--alpha", cfg.alpha, "symbolic address digits (odometer maps)");
    rqa->add_option("--eps", cfg.eps, "epsilon list (fractions or decimals)");
    rqa->add_option("--eps-grid", cfg.eps_grid, "ladder[:N] | eps_t:LO..HI");
    rqa->add_option("--n", cfg.n_grid, "trajectory window sizes");
    rqa->add_option("--m-cap", cfg.m_cap, "largest Bowen window");
    rqa->add_option("--transient", cfg.transient, "iterates discarded before recording");
    rqa->add_option("--out-csv", cfg.out_csv, "profile CSV path");
    rqa->add_option("--out-json", cfg.out_json, "report JSON path");
    rqa->add_option("--plot", cfg.plot, "recurrence matrix PBM (P4) path");
    rqa->add_option("--plot-pgm", cfg.plot_pgm, "diagonal run-length PGM (P5) path");
    rqa->add_option("--traj-csv", cfg.traj_csv, "trajectory CSV path");
    add_common(rqa);

    CLI::App* sweep = app.add_subcommand("sweep", "epsilon sweep + trichotomy classification");
    sweep->add_option("--map", cfg.map);
    sweep->add_option("--x0", cfg.x0);
    sweep->add_option("--alpha", cfg.alpha);
    sweep->add_option("--eps", cfg.eps);
    sweep->add_option("--eps-grid", cfg.eps_grid);
    sweep->add_option("--n", cfg.n_grid, "largest trajectory window");
    sweep->add_option("--m-cap", cfg.m_cap);
    sweep->add_option("--transient", cfg.transient);
    sweep->add_option("--theta0", cfg.theta0, "DET_ZERO ceiling");
    sweep->add_option("--theta1", cfg.theta1, "DET_ONE margin");
    sweep->add_option("--out", cfg.out, "output JSON path");
    add_common(sweep);

    CLI::App* reproduce = app.add_subcommand("reproduce", "reproduction reports with certified bounds");
    reproduce->add_option("target", reproduce_what, "theorem-example | four-fifths | sandwich")->required();
    reproduce->add_option("--stages", cfg.stages, "stages for theorem-example");
    reproduce->add_option("--t", [&cfg](const std::vector<std::string>& vals) {
        auto dots = vals[0].find("..");
        if (dots == std::string::npos) return false;
        cfg.t_lo = std::stoi(vals[0].substr(0, dots));
        cfg.t_hi = std::stoi(vals[0].substr(dots + 2));
        return true;
    }, "level range LO..HI");
    reproduce->add_option("--out", cfg.out, "output JSON path");
    add_common(reproduce);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot read config " + config_path);
            ordered_json j = ordered_json::parse(is);
            std::string dump = cfg.dump_config;
            cfg = RunConfig::from_json(j);
            if (!dump.empty()) cfg.dump_config = dump;
        }
        if (construct->parsed()) {
            cfg.command = "construct";
            return cmd_construct(cfg, budget);
        }
        if (rqa->parsed()) {
            cfg.command = "rqa";
            return cmd_rqa(cfg, budget);
        }
        if (sweep->parsed()) {
            cfg.command = "sweep";
            return cmd_sweep(cfg, budget);
        }
        if (reproduce->parsed()) {
            cfg.command = "reproduce " + reproduce_what;
            return cmd_reproduce(reproduce_what, cfg, budget);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::length_error& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::out_of_range& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
