#include "rqdet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rqdet {

RdetBounds combinatorial_rdet_bounds(const IntervalSystem& sys, int t, const Rational& eps,
                                     std::int64_t m) {
    RdetBounds b;
    b.n1 = sys.count_near(t, eps, 1);
    b.n1_joint = sys.count_joint(t, eps, 1);
    b.nm = sys.count_near(t, eps, m);
    b.nm_joint = sys.count_joint(t, eps, m);
    if (b.n1_joint == 0) return b;  // trivial (0,1), flagged undefined
    b.defined = true;
    b.lower = Rational(b.nm_joint, b.n1);
    b.upper = Rational(b.nm, b.n1_joint);
    return b;
}

// ---------------------------------------------------------------------------
// sweeps

InitialPoint InitialPoint::real(double v) {
    InitialPoint p;
    p.kind = Kind::Real;
    p.x0 = v;
    return p;
}

InitialPoint InitialPoint::fraction(std::int64_t n, std::int64_t d) {
    InitialPoint p;
    p.kind = Kind::Fraction;
    p.num = n;
    p.den = d;
    p.x0 = static_cast<double>(n) / static_cast<double>(d);
    return p;
}

InitialPoint InitialPoint::addr(std::string digits) {
    InitialPoint p;
    p.kind = Kind::Address;
    p.address = std::move(digits);
    return p;
}

std::string InitialPoint::repr() const {
    switch (kind) {
        case Kind::Real: return std::to_string(x0);
        case Kind::Fraction: return std::to_string(num) + "/" + std::to_string(den);
        default: return "addr:" + (address.empty() ? std::string("o") : address);
    }
}

namespace {

std::vector<std::int64_t> geometric_n_grid(std::int64_t n_max) {
    std::vector<std::int64_t> grid;
    for (std::int64_t n = 256; n < n_max; n *= 2) grid.push_back(n);
    grid.push_back(n_max);
    return grid;
}

// deepest level whose widest cylinder is still >= eps
int scale_level(const IntervalSystem& sys, const EpsSpec& eps, int cap) {
    int t = 0;
    for (int s = 1; s <= cap; ++s) {
        bool wide = eps.exact ? (sys.nu(s) >= *eps.exact)
                              : (sys.nu(s).to_double() >= eps.value);
        if (!wide) break;
        t = s;
    }
    return t;
}

Trajectory sweep_trajectory(const MapSpec& map, const InitialPoint& start, const EpsSpec& eps,
                            const SweepBudget& budget, std::int64_t& n_used, int& M_used,
                            bool& budget_exceeded) {
    if (map.kind == MapKind::Odometer) {
        const auto& sys = map.sys;
        int t = scale_level(*sys, eps, std::max(1, sys->depth() - 2));
        int T = std::min(t + 2, sys->depth());
        // exact orbits need an int64 level denominator
        while (T > 1 && !(sys->scaled_level(T).ok && sys->scaled_level(T).den.fits_int64())) --T;
        std::int64_t n_want = std::max<std::int64_t>(4096, std::int64_t{8} << t);
        n_used = std::min(n_want, budget.n_max);
        budget_exceeded = n_want > budget.n_max;
        // the infinity proxy is exact once the window covers the orbit
        // period 2^T; stay within half the trajectory
        std::int64_t m_want = std::max<std::int64_t>(budget.M_cap, std::int64_t{1} << T);
        M_used = static_cast<int>(std::min(m_want, n_used / 2));
        if (M_used < (std::int64_t{1} << T)) budget_exceeded = true;
        Word alpha = Word::zeros(T);
        if (start.kind == InitialPoint::Kind::Address && !start.address.empty()) {
            Word given = word_from_string(start.address);
            for (int i = 0; i < std::min(given.len, T); ++i)
                if (given.digit(i)) alpha.bits |= std::uint64_t{1} << i;
        }
        return make_symbolic_trajectory(sys, alpha, n_used + M_used - 1);
    }
    n_used = budget.n_max;
    M_used = budget.M_cap;
    budget_exceeded = false;
    std::int64_t len = n_used + M_used - 1;
    if (map.kind == MapKind::Tent && map.param == 2.0 && start.kind == InitialPoint::Kind::Fraction) {
        Trajectory whole = make_tent2_trajectory(start.num, start.den, len + budget.transient);
        // drop the transient by re-basing the exact orbit
        Trajectory t;
        t.source = whole.source + " (transient " + std::to_string(budget.transient) + ")";
        t.values.assign(whole.values.begin() + budget.transient, whole.values.end());
        ExactOrbit ex;
        ex.den = whole.exact->den;
        ex.scaled.assign(whole.exact->scaled.begin() + budget.transient, whole.exact->scaled.end());
        t.exact = std::move(ex);
        return t;
    }
    double x = start.x0;
    for (std::int64_t i = 0; i < budget.transient; ++i) x = eval_map(map, x);
    return make_trajectory(map, x, len);
}

}  // namespace

SweepResult epsilon_sweep(const MapSpec& map, const InitialPoint& start,
                          const std::vector<EpsSpec>& grid, const SweepBudget& budget,
                          std::string grid_provenance, int threads) {
    SweepResult res;
    res.map_label = map.label;
    res.start = start.repr();
    res.grid_provenance = std::move(grid_provenance);
    res.config = {{"map", map.label},
                  {"start", start.repr()},
                  {"n_max", budget.n_max},
                  {"M_cap", budget.M_cap},
                  {"transient", budget.transient},
                  {"grid", res.grid_provenance}};

    std::vector<EpsSpec> eps_sorted = grid;
    std::sort(eps_sorted.begin(), eps_sorted.end(),
              [](const EpsSpec& a, const EpsSpec& b) { return a.value > b.value; });

    res.rows.resize(eps_sorted.size());
    auto run_one = [&](std::size_t i) {
        const EpsSpec& eps = eps_sorted[i];
        std::int64_t n_used = 0;
        int M_used = 0;
        bool exceeded = false;
        Trajectory traj = sweep_trajectory(map, start, eps, budget, n_used, M_used, exceeded);
        if (M_used >= n_used) M_used = static_cast<int>(std::max<std::int64_t>(2, n_used / 2));
        auto report = make_report(build_profile(traj, eps, geometric_n_grid(n_used), M_used));
        SweepRow row;
        row.eps_repr = eps.repr;
        row.eps = eps.value;
        row.c_lo = report.tails.c_lo[static_cast<std::size_t>(M_used)];
        row.c_hi = report.tails.c_hi[static_cast<std::size_t>(M_used)];
        row.rdet_lo = report.tails.rdet_lo[static_cast<std::size_t>(M_used)];
        row.rdet_hi = report.tails.rdet_hi[static_cast<std::size_t>(M_used)];
        std::size_t last = report.profile.n_grid.size() - 1;
        row.c_at_n = report.profile.C(last, M_used);
        row.rdet_at_n = report.profile.rdet(last, M_used);
        row.M_cap = M_used;
        row.n_used = n_used;
        row.stabilized_at_m = report.profile.stabilized_at_m;
        row.budget_exceeded = exceeded;
        res.rows[i] = std::move(row);
    };

    if (threads <= 1 || eps_sorted.size() <= 1) {
        for (std::size_t i = 0; i < eps_sorted.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::size_t workers = std::min<std::size_t>(threads, eps_sorted.size());
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < eps_sorted.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return res;
}

std::vector<EpsSpec> ladder_eps_grid(const IntervalSystem& sys) {
    if (sys.kind() != SystemKind::Theorem3)
        throw std::invalid_argument("ladder_eps_grid: theorem3 system required");
    std::vector<EpsSpec> grid;
    for (const auto& s : sys.ladder().stages) {
        grid.push_back(EpsSpec::from_rational(s.eps));
        grid.push_back(EpsSpec::from_rational(s.eps_prime));
    }
    return grid;
}

std::vector<EpsSpec> epsilon_t_grid(const IntervalSystem& sys, int s_lo, int s_hi) {
    std::vector<EpsSpec> grid;
    for (int s = s_lo; s <= s_hi; ++s) grid.push_back(EpsSpec::from_rational(sys.epsilon_t(s)));
    return grid;
}

nlohmann::ordered_json SweepResult::to_json() const {
    nlohmann::ordered_json j;
    j["map"] = map_label;
    j["start"] = start;
    j["grid_provenance"] = grid_provenance;
    j["config"] = config;
    nlohmann::ordered_json rows_j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"eps", r.eps_repr},
                          {"eps_value", r.eps},
                          {"c_lo", r.c_lo},
                          {"c_hi", r.c_hi},
                          {"rdet_lo", r.rdet_lo},
                          {"rdet_hi", r.rdet_hi},
                          {"c_at_n", r.c_at_n},
                          {"rdet_at_n", r.rdet_at_n},
                          {"M_cap", r.M_cap},
                          {"n", r.n_used},
                          {"stabilized_at_m", r.stabilized_at_m},
                          {"budget_exceeded", r.budget_exceeded}});
    }
    j["rows"] = std::move(rows_j);
    return j;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::DetOne: return "DET_ONE";
        case Verdict::DetZero: return "DET_ZERO";
        default: return "POSITIVE_BOUNDED";
    }
}

Classification classify(const SweepResult& sweep, const ClassifyThresholds& th) {
    if (sweep.rows.size() < 6) throw std::invalid_argument("classify: need >= 6 epsilons");
    double lo = sweep.rows.back().eps, hi = sweep.rows.front().eps;
    // three decades to the nearest decade (the eps_t ladder steps by 3, so
    // seven rungs span 3^6 ~ 10^2.86)
    if (!(std::log10(hi / lo) >= 2.5))
        throw std::invalid_argument("classify: grid must span >= 3 decades");

    Classification c;
    c.thresholds = th;
    std::size_t small = static_cast<std::size_t>(
        std::ceil(static_cast<double>(sweep.rows.size()) * th.small_fraction));
    small = std::max<std::size_t>(small, 1);
    c.small_count = small;
    // verdicts read the largest-n point estimate: the n-tail extremes are
    // floor-inflated at small n (C_m >= 1/n) and stay in the report only
    bool all_one = true, all_zero = true;
    bool first = true;
    for (std::size_t i = sweep.rows.size() - small; i < sweep.rows.size(); ++i) {
        const auto& r = sweep.rows[i];
        if (first || r.rdet_at_n < c.min_small_rdet_lo) c.min_small_rdet_lo = r.rdet_at_n;
        if (first || r.rdet_at_n > c.max_small_rdet_hi) c.max_small_rdet_hi = r.rdet_at_n;
        first = false;
        all_one = all_one && r.rdet_at_n >= 1.0 - th.theta1;
        all_zero = all_zero && r.rdet_at_n <= th.theta0;
    }
    c.verdict = all_one ? Verdict::DetOne : (all_zero ? Verdict::DetZero : Verdict::PositiveBounded);
    return c;
}

nlohmann::ordered_json Classification::to_json() const {
    return {{"verdict", to_string(verdict)},
            {"theta0", thresholds.theta0},
            {"theta1", thresholds.theta1},
            {"small_fraction", thresholds.small_fraction},
            {"small_count", small_count},
            {"min_small_rdet_lo", min_small_rdet_lo},
            {"max_small_rdet_hi", max_small_rdet_hi}};
}

// ---------------------------------------------------------------------------
// theorem-example report

namespace {

// exact sandwich check of one symbolic profile cell against the pair counts;
// n must be a multiple of 2^t so the finite-n statistic is exactly periodic
struct CellCheck {
    bool c_ok;
    bool rdet_defined;
    bool rdet_ok;
};

CellCheck check_cell(std::int64_t count_m, std::int64_t count_1, std::int64_t n, int t,
                     std::int64_t near_m, std::int64_t joint_m, std::int64_t near_1,
                     std::int64_t joint_1) {
    CellCheck c{};
    std::int64_t k = n >> t;  // n / 2^t
    std::int64_t k2 = k * k;
    c.c_ok = joint_m * k2 <= count_m && count_m <= near_m * k2;
    c.rdet_defined = joint_1 > 0;
    if (c.rdet_defined) {
        c.rdet_ok = count_m * near_1 >= joint_m * count_1 && count_m * joint_1 <= near_m * count_1;
    }
    return c;
}

}  // namespace

TheoremExampleReport theorem_example_report(int stages, std::int64_t traj_budget) {
    TheoremExampleReport rep;
    rep.stages = stages;
    auto sys = std::make_shared<const IntervalSystem>(IntervalSystem::theorem3(stages));
    rep.validation = validate(*sys, sys->depth());
    bool ok = rep.validation.pass;

    for (const auto& st : sys->ladder().stages) {
        TheoremExampleReport::StageRow row;
        row.n = st.n;
        row.t = st.t;
        row.eps = st.eps.to_fraction_string();
        row.t_prime = st.t_prime;
        row.eps_prime = st.eps_prime.to_fraction_string();

        row.det1_exact_one = true;
        for (std::int64_t m : {std::int64_t{1}, std::int64_t{2}, kInfSteps}) {
            RdetBounds b = combinatorial_rdet_bounds(*sys, st.t, st.eps, m);
            row.det1_exact_one = row.det1_exact_one && b.defined && b.lower == Rational(1) &&
                                 b.upper == Rational(1);
        }

        RdetBounds b0 = combinatorial_rdet_bounds(*sys, st.t_prime, st.eps_prime, kInfSteps);
        Rational target(1);  // 2^{1-n}
        for (int k = 1; k < st.n; ++k) target = target / Rational(2);
        row.upper_at_prime = b0.defined ? b0.upper.to_fraction_string() : "undefined";
        row.upper_target = target.to_fraction_string();
        row.det0_bound_ok = b0.defined && b0.upper <= target;

        std::int64_t n_traj = std::int64_t{4} << st.t_prime;
        if (n_traj <= traj_budget) {
            row.trajectory_checked = true;
            // scale (t_n, eps_n): every recurrence persists, rdet pinned at 1
            {
                int t = st.t;
                std::int64_t n = std::int64_t{4} << t;
                int M = static_cast<int>(std::int64_t{1} << t) + 1;
                Trajectory traj = make_symbolic_trajectory(sys, Word::zeros(t), n + M - 1);
                auto counts = corr_counts_runs(PairData(traj, EpsSpec::from_rational(st.eps)), n, M);
                std::int64_t n1 = sys->count_near(t, st.eps, 1);
                std::int64_t n1j = sys->count_joint(t, st.eps, 1);
                for (std::int64_t m : {std::int64_t{1}, std::int64_t{2}, std::int64_t{1} << t}) {
                    auto cell = check_cell(counts[static_cast<std::size_t>(m)], counts[1], n, t,
                                           sys->count_near(t, st.eps, m),
                                           sys->count_joint(t, st.eps, m), n1, n1j);
                    bool exact_one = counts[static_cast<std::size_t>(m)] == counts[1];
                    if (!(cell.c_ok && cell.rdet_defined && cell.rdet_ok && exact_one)) {
                        row.trajectory_ok = false;
                        row.trajectory_note = "det1 scale sandwich violated at m=" + std::to_string(m);
                    }
                }
            }
            // scale (t_n', eps_n'): full-cycle window inside the collapse bound
            if (row.trajectory_ok) {
                int t = st.t_prime;
                std::int64_t n = std::int64_t{4} << t;
                int M = static_cast<int>(std::int64_t{1} << t);
                Trajectory traj = make_symbolic_trajectory(sys, Word::zeros(t), n + M - 1);
                auto counts = corr_counts_runs(PairData(traj, EpsSpec::from_rational(st.eps_prime)), n, M);
                auto cell = check_cell(counts[static_cast<std::size_t>(M)], counts[1], n, t,
                                       b0.nm, b0.nm_joint, b0.n1, b0.n1_joint);
                if (!(cell.c_ok && cell.rdet_defined && cell.rdet_ok)) {
                    row.trajectory_ok = false;
                    row.trajectory_note = "det0 scale sandwich violated";
                }
                if (row.trajectory_ok && row.trajectory_note.empty())
                    row.trajectory_note = "sandwich verified at both scales";
            }
        } else {
            row.trajectory_note = "skipped (budget: n = " + std::to_string(n_traj) + " > " +
                                  std::to_string(traj_budget) + ")";
        }

        ok = ok && row.det1_exact_one && row.det0_bound_ok &&
             (!row.trajectory_checked || row.trajectory_ok);
        rep.stage_rows.push_back(std::move(row));
    }
    rep.pass = ok;
    return rep;
}

nlohmann::ordered_json TheoremExampleReport::to_json() const {
    nlohmann::ordered_json j;
    j["stages"] = stages;
    j["pass"] = pass;
    nlohmann::ordered_json rows_j = nlohmann::ordered_json::array();
    for (const auto& r : stage_rows) {
        rows_j.push_back({{"n", r.n},
                          {"t", r.t},
                          {"eps", r.eps},
                          {"det1_exact_one", r.det1_exact_one},
                          {"t_prime", r.t_prime},
                          {"eps_prime", r.eps_prime},
                          {"upper_at_prime", r.upper_at_prime},
                          {"upper_target", r.upper_target},
                          {"det0_bound_ok", r.det0_bound_ok},
                          {"trajectory_checked", r.trajectory_checked},
                          {"trajectory_ok", r.trajectory_ok},
                          {"trajectory_note", r.trajectory_note}});
    }
    j["stage_rows"] = std::move(rows_j);
    j["validation"] = validation.to_json();
    return j;
}

// ---------------------------------------------------------------------------
// 4/5 report

FourFifthsReport four_fifths_report(const std::shared_ptr<const IntervalSystem>& sys, int t_lo,
                                    int t_hi) {
    if (t_lo < 2) throw std::invalid_argument("four_fifths_report: t >= 2 required");
    FourFifthsReport rep;
    bool ok = true;
    for (int t = t_lo; t <= t_hi; ++t) {
        FourFifthsReport::Row row;
        row.t = t;
        Rational eps = sys->epsilon_t(t - 2);
        row.eps = eps.to_fraction_string();
        row.hypothesis_ok = true;
        for (int s = 0; s <= t - 2; ++s) {
            if (sys->epsilon_t(s) < eps) row.hypothesis_ok = false;
        }
        row.n_inf = sys->count_near(t, eps, kInfSteps);
        row.n1_joint = sys->count_joint(t, eps, 1);
        row.count_bound_ok = row.n_inf <= (std::int64_t{2} << t);
        row.margin_ok = row.n1_joint - row.n_inf >= (std::int64_t{1} << (t - 1));
        Rational bound = Rational(row.n_inf, row.n1_joint);
        row.bound = bound.to_fraction_string();
        row.bound_le_four_fifths = bound <= Rational(4, 5);

        std::int64_t n = std::int64_t{8} << t;
        int M = static_cast<int>(std::int64_t{1} << t);
        Trajectory traj = make_symbolic_trajectory(sys, Word::zeros(t), n + M - 1);
        auto counts = corr_counts_runs(PairData(traj, EpsSpec::from_rational(eps)), n, M);
        row.traj_rdet = static_cast<double>(counts[static_cast<std::size_t>(M)]) /
                        static_cast<double>(counts[1]);
        row.traj_ok = row.traj_rdet <= 0.8 + 0.02;

        // the 4/5 ceiling is only asserted under the eps-minimality
        // hypothesis; rows outside it are reported but not gating
        if (row.hypothesis_ok)
            ok = ok && row.count_bound_ok && row.margin_ok && row.bound_le_four_fifths && row.traj_ok;
        rep.rows.push_back(std::move(row));
    }
    rep.pass = ok;
    return rep;
}

nlohmann::ordered_json FourFifthsReport::to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = pass;
    nlohmann::ordered_json rows_j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"t", r.t},
                          {"eps", r.eps},
                          {"hypothesis_ok", r.hypothesis_ok},
                          {"N_inf", r.n_inf},
                          {"N1_joint", r.n1_joint},
                          {"count_bound_ok", r.count_bound_ok},
                          {"margin_ok", r.margin_ok},
                          {"bound", r.bound},
                          {"bound_le_four_fifths", r.bound_le_four_fifths},
                          {"traj_rdet", r.traj_rdet},
                          {"traj_ok", r.traj_ok}});
    }
    j["rows"] = std::move(rows_j);
    return j;
}

// ---------------------------------------------------------------------------
// sandwich report

SandwichReport sandwich_report(const std::shared_ptr<const IntervalSystem>& sys, int t_max,
                               const std::vector<int>& eps_levels) {
    SandwichReport rep;
    for (int t = 1; t <= t_max; ++t) {
        std::int64_t n = std::int64_t{8} << t;
        int M = static_cast<int>(std::int64_t{1} << t);
        Trajectory traj = make_symbolic_trajectory(sys, Word::zeros(t), n + M - 1);
        for (int s : eps_levels) {
            Rational eps = sys->epsilon_t(s);
            auto counts = corr_counts_runs(PairData(traj, EpsSpec::from_rational(eps)), n, M);
            auto prof = sys->pair_count_profile(t, eps);
            for (std::int64_t m = 1; m <= M; m *= 2) {
                SandwichReport::Row row;
                row.t = t;
                row.eps = eps.to_fraction_string();
                row.n = n;
                row.m = m;
                row.count = counts[static_cast<std::size_t>(m)];
                row.near = prof.near(m);
                row.joint = prof.joint(m);
                auto cell = check_cell(row.count, counts[1], n, t, row.near, row.joint,
                                       prof.near(1), prof.joint(1));
                row.c_ok = cell.c_ok;
                row.rdet_defined = cell.rdet_defined;
                row.rdet_ok = !cell.rdet_defined || cell.rdet_ok;
                if (!row.c_ok || !row.rdet_ok) ++rep.violations;
                rep.rows.push_back(std::move(row));
            }
        }
    }
    return rep;
}

nlohmann::ordered_json SandwichReport::to_json() const {
    nlohmann::ordered_json j;
    j["violations"] = violations;
    nlohmann::ordered_json rows_j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"t", r.t},
                          {"eps", r.eps},
                          {"n", r.n},
                          {"m", r.m},
                          {"count", r.count},
                          {"N", r.near},
                          {"N_joint", r.joint},
                          {"c_ok", r.c_ok},
                          {"rdet_defined", r.rdet_defined},
                          {"rdet_ok", r.rdet_ok}});
    }
    j["rows"] = std::move(rows_j);
    return j;
}

}  // namespace rqdet
