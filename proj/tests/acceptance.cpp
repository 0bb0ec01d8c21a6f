// Acceptance suite: nine criteria, one pass/fail line each.
// Usage: acceptance [--only ID] [--list]

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rqdet/dynamics.hpp"
#include "rqdet/experiments.hpp"
#include "rqdet/interval_system.hpp"
#include "rqdet/recurrence.hpp"

using namespace rqdet;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::shared_ptr<const IntervalSystem> g_ternary10;

Trajectory logistic_orbit(double r, double x0, std::int64_t transient, std::int64_t len) {
    MapSpec m = MapSpec::logistic(r);
    double x = x0;
    for (std::int64_t i = 0; i < transient; ++i) x = eval_map(m, x);
    return make_trajectory(m, x, len);
}

Trajectory random_orbit(std::mt19937_64& rng, std::int64_t len) {
    Trajectory t;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    t.values.resize(static_cast<std::size_t>(len));
    for (auto& v : t.values) v = uni(rng);
    return t;
}

// A1 — attracting 2-cycle: rdet_m = 1 exactly, C_m within 2/n of 1/2
Outcome run_a1() {
    Outcome o;
    Trajectory traj = logistic_orbit(3.2, 0.3, 1000, 4096 + 64 - 1);
    auto prof = build_profile(traj, EpsSpec::parse("1e-3"), {1024, 2048, 4096}, 64);
    double worst_c = 0;
    for (std::size_t ni = 0; ni < prof.n_grid.size(); ++ni) {
        double n = static_cast<double>(prof.n_grid[ni]);
        for (int m = 1; m <= 64; ++m) {
            if (prof.counts[ni][static_cast<std::size_t>(m)] != prof.counts[ni][1]) {
                o.pass = false;
                o.detail = "rdet_m != 1 at n=" + std::to_string(prof.n_grid[ni]) +
                           " m=" + std::to_string(m);
                return o;
            }
            double dev = std::abs(prof.C(ni, m) - 0.5);
            worst_c = std::max(worst_c, dev * n / 2.0);
            if (dev > 2.0 / n) {
                o.pass = false;
                o.detail = "C_m off 1/2 by " + std::to_string(dev) + " at n=" +
                           std::to_string(prof.n_grid[ni]);
                return o;
            }
        }
    }
    std::ostringstream os;
    os << "rdet_m = 1 exactly on all 3x64 cells; max |C-1/2| = " << worst_c << " * (2/n)";
    o.detail = os.str();
    return o;
}

// A2 — DET line-histogram route vs m rdet_m - (m-1) rdet_{m+1}, <= 1e-12
Outcome run_a2() {
    Outcome o;
    double worst = 0;
    auto check_profile = [&](const CorrelationProfile& prof) {
        for (std::size_t ni = 0; ni < prof.n_grid.size(); ++ni) {
            for (int m : prof.m_grid) {
                if (m >= prof.M_cap) continue;
                double lhs = prof.rqa_det(ni, m);
                double rhs = m * prof.rdet(ni, m) - (m - 1) * static_cast<double>(prof.counts[ni][static_cast<std::size_t>(m) + 1]) /
                                                        static_cast<double>(prof.counts[ni][1]);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    };
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 100; ++trial) {
        std::int64_t n = 64;
        int M = 9;
        Trajectory t = random_orbit(rng, n + M - 1);
        double eps = 0.02 + 0.3 * static_cast<double>(trial) / 100.0;
        PairData d(t, EpsSpec::from_double(eps));
        auto counts = corr_counts_runs(d, n, M);
        for (int m = 1; m <= 8; ++m) {
            double lhs = static_cast<double>(det_line_numerator(d, n, m, M)) /
                         static_cast<double>(counts[1]);
            double rhs = (m * static_cast<double>(counts[static_cast<std::size_t>(m)]) -
                          (m - 1) * static_cast<double>(counts[static_cast<std::size_t>(m) + 1])) /
                         static_cast<double>(counts[1]);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    check_profile(build_profile(logistic_orbit(3.2, 0.3, 1000, 2048 + 63), EpsSpec::parse("1e-3"),
                                {1024, 2048}, 64));
    {
        Trajectory tent = make_tent2_trajectory(1, 999983, 1024 + 32);
        check_profile(build_profile(tent, EpsSpec::parse("1e-3"), {512, 1024}, 33));
    }
    o.pass = worst <= 1e-12;
    std::ostringstream os;
    os << "max |DET - identity| = " << worst << " (tolerance 1e-12)";
    o.detail = os.str();
    return o;
}

// A3 — trajectory statistics inside the exact count sandwich, t <= 8
Outcome run_a3() {
    Outcome o;
    auto rep = sandwich_report(g_ternary10, 8, {0, 1, 2, 3, 4, 5, 6, 7, 8});
    o.pass = rep.violations == 0;
    std::ostringstream os;
    os << rep.rows.size() << " cells, " << rep.violations << " violations";
    o.detail = os.str();
    return o;
}

// A4 — staged construction through stage 3
Outcome run_a4() {
    Outcome o;
    auto rep = theorem_example_report(3, std::int64_t{4} << 12);
    o.pass = rep.pass;
    std::ostringstream os;
    for (const auto& r : rep.stage_rows) {
        os << "stage " << r.n << ": rdet(eps_" << r.n << ")=1 " << (r.det1_exact_one ? "ok" : "FAIL")
           << ", upper(eps_" << r.n << "')=" << r.upper_at_prime << " <= " << r.upper_target << " "
           << (r.det0_bound_ok ? "ok" : "FAIL") << "; ";
    }
    os << "validator " << (rep.validation.pass ? "pass" : "FAIL");
    o.detail = os.str();
    return o;
}

// A5 — 4/5 ceiling with exact counts, t in 2..8
Outcome run_a5() {
    Outcome o;
    auto rep = four_fifths_report(g_ternary10, 2, 8);
    o.pass = rep.pass;
    std::ostringstream os;
    os << "bounds:";
    for (const auto& r : rep.rows) os << " t=" << r.t << ":" << r.bound;
    o.detail = os.str();
    return o;
}

// A6 — positive-entropy collapse: LSQ slope of log C_m on m in [4,32]
// <= -0.1 and rdet_32 <= 0.1, tent(2.0) and logistic(4.0)
Outcome run_a6() {
    Outcome o;
    std::ostringstream os;
    auto eval_one = [&](const std::string& name, const Trajectory& traj) {
        auto prof = build_profile(traj, EpsSpec::parse("1e-3"), {8192}, 33);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (int m = 4; m <= 32; ++m) {
            double y = std::log(prof.C(0, m));
            sx += m;
            sy += y;
            sxx += static_cast<double>(m) * m;
            sxy += m * y;
            ++cnt;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        double rdet32 = prof.rdet(0, 32);
        bool ok = slope <= -0.1 && rdet32 <= 0.1;
        os << name << ": slope=" << slope << (slope <= -0.1 ? " ok" : " FAIL(<= -0.1)")
           << ", rdet_32=" << rdet32 << (rdet32 <= 0.1 ? " ok" : " FAIL(<= 0.1)") << "; ";
        return ok;
    };
    bool tent_ok = eval_one("tent(2.0)", make_tent2_trajectory(1, 999983, 8192 + 32));
    bool logi_ok = eval_one("logistic(4.0)", logistic_orbit(4.0, 0.3, 0, 8192 + 32));
    o.pass = tent_ok && logi_ok;
    o.detail = os.str();
    return o;
}

// A7 — kernel equivalence and the bit-parallel performance gate
Outcome run_a7() {
    Outcome o;
    std::mt19937_64 rng(7177);
    for (int trial = 0; trial < 100; ++trial) {
        std::int64_t n = 8 + static_cast<std::int64_t>(rng() % 57);
        int M = 1 + static_cast<int>(rng() % 8);
        Trajectory t = random_orbit(rng, n + M - 1);
        double eps = 0.01 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
        PairData d(t, EpsSpec::from_double(eps));
        if (corr_counts_naive(d, n, M) != corr_counts_bitparallel(d, n, M)) {
            o.pass = false;
            o.detail = "kernel mismatch at trial " + std::to_string(trial);
            return o;
        }
    }
    Trajectory big = logistic_orbit(4.0, 0.3, 0, 16384 + 63);
    PairData d(big, EpsSpec::parse("1e-3"));
    auto t0 = std::chrono::steady_clock::now();
    auto counts = corr_counts_bitparallel(d, 16384, 64);
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    o.pass = secs < 10.0 && counts[1] > 0;
    std::ostringstream os;
    os << "100 random instances agree; n=16384 M=64 in " << secs << " s (< 10 s)";
    o.detail = os.str();
    return o;
}

// A8 — monotonicity in m and eps, and the shift inequality up to h = 64
Outcome run_a8() {
    Outcome o;
    std::int64_t violations = 0;

    auto check_monotone_m = [&](const CorrelationProfile& prof) {
        for (std::size_t ni = 0; ni < prof.n_grid.size(); ++ni)
            for (int m = 1; m < prof.M_cap; ++m)
                if (prof.counts[ni][static_cast<std::size_t>(m)] <
                    prof.counts[ni][static_cast<std::size_t>(m) + 1])
                    ++violations;
    };

    // profiles from the A1/A6 configurations at nested epsilons
    Trajectory logi = logistic_orbit(3.2, 0.3, 1000, 4096 + 63);
    Trajectory tent = make_tent2_trajectory(1, 999983, 4096 + 32);
    Trajectory chaos = logistic_orbit(4.0, 0.3, 0, 4096 + 32);
    std::vector<std::string> eps_list = {"1e-2", "1e-3", "1e-4"};
    for (const Trajectory* traj : {&logi, &tent, &chaos}) {
        std::vector<std::vector<std::int64_t>> per_eps;
        int M = traj == &logi ? 64 : 32;
        for (const auto& es : eps_list) {
            auto prof = build_profile(*traj, EpsSpec::parse(es), {2048, 4096}, M);
            check_monotone_m(prof);
            per_eps.push_back(prof.counts[1]);  // counts at n = 4096, all m
        }
        // eps decreasing along eps_list: counts must not increase
        for (std::size_t e = 1; e < per_eps.size(); ++e)
            for (std::size_t m = 1; m < per_eps[e].size(); ++m)
                if (per_eps[e][m] > per_eps[e - 1][m]) ++violations;
    }

    // symbolic ternary profile monotonicity
    {
        Trajectory sym = make_symbolic_trajectory(g_ternary10, Word::zeros(6), 512 + 64);
        auto prof = build_profile(sym, EpsSpec::from_rational(g_ternary10->epsilon_t(4)), {256, 512}, 64);
        check_monotone_m(prof);
    }

    // shift inequality, exact in integers
    for (std::int64_t h : {1, 2, 4, 8, 16, 32, 64}) {
        for (int m : {1, 8}) {
            auto c1 = check_shift_bound(logi, EpsSpec::parse("1e-3"), 2048, h, m);
            auto c2 = check_shift_bound(tent, EpsSpec::parse("1e-3"), 2048, h, m);
            if (!c1.ok_upper || !c1.ok_lower || !c2.ok_upper || !c2.ok_lower) ++violations;
        }
    }

    o.pass = violations == 0;
    o.detail = std::to_string(violations) + " violations across monotonicity and shift checks";
    return o;
}

// A9 — cylinder endpoints map into the successor cylinder, |a| <= 6
Outcome run_a9() {
    Outcome o;
    std::int64_t checked = 0, violations = 0;
    auto staged = std::make_shared<const IntervalSystem>(IntervalSystem::theorem3(2));
    for (auto sys : {g_ternary10, staged}) {
        OdometerExtension f(sys, sys->depth() - 1);
        for (int t = 0; t <= 6; ++t) {
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
                Word a = Word::make(v, t);
                const auto& dst = sys->interval(word_add(a, 1));
                for (const Rational& x : {sys->interval(a).lo, sys->interval(a).hi}) {
                    Rational y = f.eval_exact(x);
                    ++checked;
                    if (y < dst.lo || y > dst.hi) ++violations;
                }
            }
        }
    }
    o.pass = violations == 0;
    o.detail = std::to_string(checked) + " endpoint images checked, " +
               std::to_string(violations) + " violations";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
        if (std::strcmp(argv[i], "--list") == 0) {
            std::cout << "A1 A2 A3 A4 A5 A6 A7 A8 A9\n";
            return 0;
        }
    }

    g_ternary10 = std::make_shared<const IntervalSystem>(IntervalSystem::ternary(10));

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1", run_a1}, {"A2", run_a2}, {"A3", run_a3}, {"A4", run_a4}, {"A5", run_a5},
        {"A6", run_a6}, {"A7", run_a7}, {"A8", run_a8}, {"A9", run_a9}};

    bool all_pass = true;
    int ran = 0;
    for (auto& [id, fn] : criteria) {
        if (!only.empty() && id != only) continue;
        ++ran;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out = fn();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << id << " (" << secs << " s) — "
                  << out.detail << "\n";
        all_pass = all_pass && out.pass;
    }
    if (ran == 0) {
        std::cerr << "unknown criterion: " << only << "\n";
        return 2;
    }
    return all_pass ? 0 : 1;
}
