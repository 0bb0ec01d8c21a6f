#include <doctest.h>

#include <stdexcept>

#include <memory>

#include "rqdet/experiments.hpp"

using namespace rqdet;

namespace {

std::shared_ptr<const IntervalSystem> ternary(int depth) {
    return std::make_shared<const IntervalSystem>(IntervalSystem::ternary(depth));
}

SweepResult synthetic_sweep(std::initializer_list<std::pair<double, double>> eps_rdet) {
    SweepResult s;
    s.map_label = "synthetic";
    for (auto [eps, rdet] : eps_rdet) {
        SweepRow r;
        r.eps = eps;
        r.eps_repr = std::to_string(eps);
        r.rdet_lo = rdet;
        r.rdet_hi = rdet;
        r.rdet_at_n = rdet;
        r.c_lo = r.c_hi = r.c_at_n = 0.1;
        s.rows.push_back(r);
    }
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("combinatorial bounds: staged system pins rdet to 1 at eps_n") {
    auto sys = IntervalSystem::theorem3(2);
    for (const auto& st : sys.ladder().stages) {
        for (std::int64_t m : {std::int64_t{1}, std::int64_t{3}, kInfSteps}) {
            RdetBounds b = combinatorial_rdet_bounds(sys, st.t, st.eps, m);
            REQUIRE(b.defined);
            CHECK(b.lower == Rational(1));
            CHECK(b.upper == Rational(1));
        }
        RdetBounds b0 = combinatorial_rdet_bounds(sys, st.t_prime, st.eps_prime, kInfSteps);
        REQUIRE(b0.defined);
        Rational target(1);
        for (int k = 1; k < st.n; ++k) target = target / Rational(2);
        CHECK(b0.upper <= target);
        CHECK(b0.lower <= b0.upper);
    }
}

TEST_CASE("combinatorial bounds: undefined below the joint resolution") {
    auto sys = IntervalSystem::ternary(8);
    // at eps = eps_t every single cylinder is wider than eps, so N_1° = 0
    RdetBounds b = combinatorial_rdet_bounds(sys, 4, sys.epsilon_t(4), 1);
    CHECK_FALSE(b.defined);
    CHECK(b.lower == Rational(0));
    CHECK(b.upper == Rational(1));
    CHECK(b.n1_joint == 0);
}

TEST_CASE("ternary 4/5 report certifies the ceiling") {
    auto rep = four_fifths_report(ternary(10), 2, 6);
    CHECK(rep.pass);
    for (const auto& r : rep.rows) {
        CHECK(r.hypothesis_ok);
        CHECK(r.bound_le_four_fifths);
        CHECK(r.traj_rdet <= 0.82);
        CHECK(r.traj_rdet > 0.0);
    }
    CHECK(rep.to_json()["pass"] == true);
    CHECK_THROWS_AS(four_fifths_report(ternary(6), 1, 3), std::invalid_argument);
}

TEST_CASE("sandwich report: zero violations on the ternary system") {
    auto rep = sandwich_report(ternary(8), 5, {0, 1, 2, 3, 4, 5});
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.rows.empty());
    bool some_defined = false;
    for (const auto& r : rep.rows) some_defined = some_defined || r.rdet_defined;
    CHECK(some_defined);
}

TEST_CASE("sandwich report: zero violations on the staged system") {
    auto sys = std::make_shared<const IntervalSystem>(IntervalSystem::theorem3(2));
    auto rep = sandwich_report(sys, 5, {0, 1, 2, 3});
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.rows.empty());
}

TEST_CASE("theorem-example report at two stages") {
    auto rep = theorem_example_report(2);
    CHECK(rep.pass);
    REQUIRE(rep.stage_rows.size() == 2);
    CHECK(rep.stage_rows[0].upper_at_prime == "2/3");
    CHECK(rep.stage_rows[1].upper_at_prime == "8/31");
    CHECK(rep.stage_rows[0].det1_exact_one);
    CHECK(rep.stage_rows[1].det0_bound_ok);
    CHECK(rep.stage_rows[0].trajectory_checked);

    // identical inputs give byte-identical reports
    CHECK(rep.to_json().dump() == theorem_example_report(2).to_json().dump());
}

TEST_CASE("theorem-example trajectory checks are budget-gated") {
    auto rep = theorem_example_report(2, /*traj_budget=*/16);
    CHECK(rep.pass);  // bounds still certified
    for (const auto& r : rep.stage_rows) {
        CHECK_FALSE(r.trajectory_checked);
        CHECK(r.trajectory_note.find("skipped") != std::string::npos);
    }
}

TEST_CASE("classifier on synthetic sweeps") {
    auto one = synthetic_sweep({{1e-1, 1.0}, {3e-2, 1.0}, {1e-2, 1.0}, {3e-3, 0.99}, {1e-3, 0.99}, {1e-4, 0.97}});
    auto zero = synthetic_sweep({{1e-1, 0.9}, {3e-2, 0.5}, {1e-2, 0.3}, {3e-3, 0.05}, {1e-3, 0.04}, {1e-4, 0.01}});
    auto mid = synthetic_sweep({{1e-1, 0.9}, {3e-2, 0.8}, {1e-2, 0.7}, {3e-3, 0.6}, {1e-3, 0.75}, {1e-4, 0.7}});
    CHECK(classify(one).verdict == Verdict::DetOne);
    CHECK(classify(zero).verdict == Verdict::DetZero);
    CHECK(classify(mid).verdict == Verdict::PositiveBounded);

    ClassifyThresholds strict;
    strict.theta1 = 0.001;
    CHECK(classify(one, strict).verdict == Verdict::PositiveBounded);  // thresholds matter, echoed
    CHECK(classify(one, strict).to_json()["theta1"] == 0.001);

    auto too_few = synthetic_sweep({{1e-1, 1.0}, {1e-2, 1.0}, {1e-3, 1.0}});
    CHECK_THROWS_AS(classify(too_few), std::invalid_argument);
    auto narrow = synthetic_sweep(
        {{1e-1, 1.0}, {8e-2, 1.0}, {6e-2, 1.0}, {5e-2, 1.0}, {3e-2, 1.0}, {2e-2, 1.0}});
    CHECK_THROWS_AS(classify(narrow), std::invalid_argument);
}

TEST_CASE("epsilon grids from the system") {
    auto t3 = IntervalSystem::theorem3(3);
    auto grid = ladder_eps_grid(t3);
    CHECK(grid.size() == 6);
    CHECK(grid[0].exact == Rational(1, 3));
    CHECK(grid[1].exact == Rational(1, 192));
    auto tern = ternary(8);
    auto tg = epsilon_t_grid(*tern, 2, 6);
    CHECK(tg.size() == 5);
    CHECK(tg[0].exact == Rational(7, 81));
    CHECK_THROWS_AS(ladder_eps_grid(*tern), std::invalid_argument);
}

TEST_CASE("odometer sweep classifies the ternary map as positive-bounded") {
    auto sys = ternary(11);
    MapSpec map = MapSpec::odometer(sys, 10);
    SweepBudget budget;
    budget.n_max = 4096;
    budget.M_cap = 128;
    auto grid = epsilon_t_grid(*sys, 2, 8);
    SweepResult sweep = epsilon_sweep(map, InitialPoint::addr(""), grid, budget, "eps_t");
    REQUIRE(sweep.rows.size() == 7);
    for (std::size_t i = 1; i < sweep.rows.size(); ++i)
        CHECK(sweep.rows[i - 1].eps > sweep.rows[i].eps);  // sorted by decreasing eps
    auto verdict = classify(sweep);
    CHECK(verdict.verdict == Verdict::PositiveBounded);
    CHECK(verdict.max_small_rdet_hi <= 0.85);
    CHECK(verdict.min_small_rdet_lo > 0.1);

    // determinism: identical inputs, byte-identical serialization
    SweepResult again = epsilon_sweep(map, InitialPoint::addr(""), grid, budget, "eps_t");
    CHECK(sweep.to_json().dump() == again.to_json().dump());
}

TEST_CASE("classification is invariant under trajectory shifts") {
    auto sys = ternary(11);
    MapSpec map = MapSpec::odometer(sys, 10);
    SweepBudget budget;
    budget.n_max = 4096;
    budget.M_cap = 128;
    auto grid = epsilon_t_grid(*sys, 2, 8);
    auto base = classify(epsilon_sweep(map, InitialPoint::addr(""), grid, budget, "eps_t"));
    // the prefixes 101 and 0000001 start the orbit at +5 and +64
    for (const char* start : {"101", "0000001"}) {
        auto shifted = classify(epsilon_sweep(map, InitialPoint::addr(start), grid, budget, "eps_t"));
        CHECK(shifted.verdict == base.verdict);
    }
    CHECK(base.verdict == Verdict::PositiveBounded);
}

TEST_CASE("sweep rows are thread-invariant") {
    auto sys = ternary(9);
    MapSpec map = MapSpec::odometer(sys, 8);
    SweepBudget budget;
    budget.n_max = 1024;
    budget.M_cap = 32;
    auto grid = epsilon_t_grid(*sys, 2, 6);
    auto serial = epsilon_sweep(map, InitialPoint::addr(""), grid, budget, "eps_t", 1);
    auto parallel = epsilon_sweep(map, InitialPoint::addr(""), grid, budget, "eps_t", 3);
    CHECK(serial.to_json().dump() == parallel.to_json().dump());
}

TEST_CASE("sweep rows report budget exhaustion per epsilon") {
    auto sys = ternary(11);
    MapSpec map = MapSpec::odometer(sys, 10);
    SweepBudget tiny;
    tiny.n_max = 512;
    tiny.M_cap = 16;
    auto grid = epsilon_t_grid(*sys, 6, 8);  // wants n = 8 * 2^t > 512
    SweepResult sweep = epsilon_sweep(map, InitialPoint::addr(""), grid, tiny, "eps_t");
    bool any = false;
    for (const auto& r : sweep.rows) any = any || r.budget_exceeded;
    CHECK(any);
}

TEST_SUITE_END();
