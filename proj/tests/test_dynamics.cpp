#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

#include "rqdet/dynamics.hpp"

using namespace rqdet;

namespace {

std::shared_ptr<const IntervalSystem> ternary(int depth) {
    return std::make_shared<const IntervalSystem>(IntervalSystem::ternary(depth));
}

std::shared_ptr<const IntervalSystem> staged(int stages) {
    return std::make_shared<const IntervalSystem>(IntervalSystem::theorem3(stages));
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("analytic map evaluation") {
    CHECK(eval_map(MapSpec::tent(2.0), 0.25) == doctest::Approx(0.5));
    CHECK(eval_map(MapSpec::logistic(4.0), 0.5) == doctest::Approx(1.0));
    CHECK(eval_map(MapSpec::logistic(3.2), 0.0) == 0.0);
    CHECK_THROWS_AS(eval_map(MapSpec::tent(2.0), -0.1), std::domain_error);
    CHECK_THROWS_AS(eval_map(MapSpec::tent(2.0), 1.5), std::domain_error);
    CHECK_THROWS_AS(MapSpec::logistic(4.5), std::domain_error);
    CHECK_THROWS_AS(MapSpec::tent(2.5), std::domain_error);
}

TEST_CASE("logistic(3.2) settles on the attracting 2-cycle") {
    MapSpec m = MapSpec::logistic(3.2);
    Trajectory t = make_trajectory(m, 0.3, 1200);
    double a = t.values[1198], b = t.values[1199];
    // known 2-cycle of r = 3.2 near {0.5130, 0.7995}
    CHECK(std::min(a, b) == doctest::Approx(0.5130445).epsilon(1e-3));
    CHECK(std::max(a, b) == doctest::Approx(0.7994555).epsilon(1e-3));
}

TEST_CASE("orbit started at a fixed point stays there") {
    Trajectory t = make_trajectory(MapSpec::logistic(3.7), 0.0, 50);
    for (double v : t.values) CHECK(v == 0.0);
}

TEST_CASE("odometer extension maps 0 to 2/3 on the ternary system") {
    auto sys = ternary(9);
    OdometerExtension f(sys, 8);
    CHECK(f.eval(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f.eval_exact(Rational(0)) == Rational(2, 3));
    CHECK(f.eval_exact(Rational(1)) == Rational(0));
}

TEST_CASE("cylinder endpoints land in the successor cylinder (conjugacy)") {
    for (auto sys : {ternary(9), staged(2)}) {
        OdometerExtension f(sys, sys->depth() - 1);
        for (int t = 0; t <= 6; ++t) {
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
                Word a = Word::make(v, t);
                Word next = word_add(a, 1);
                const auto& src = sys->interval(a);
                const auto& dst = sys->interval(next);
                for (const Rational& x : {src.lo, src.hi}) {
                    Rational y = f.eval_exact(x);
                    CHECK(y >= dst.lo);
                    CHECK(y <= dst.hi);
                }
            }
        }
    }
}

TEST_CASE("endpoint images are exact under the address +1") {
    auto sys = ternary(9);
    OdometerExtension f(sys, 8);
    for (int t = 1; t <= 5; ++t) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
            Word a = Word::make(v, t);
            Word next = word_add(a, 1);
            if (!a.is_all_ones()) {
                CHECK(f.eval_exact(sys->interval(a).lo) == sys->interval(next).lo);
                CHECK(f.eval_exact(sys->interval(a).hi) == sys->interval(next).hi);
            }
        }
    }
}

TEST_CASE("orientation flips at the all-ones cylinder") {
    auto sys = ternary(9);
    OdometerExtension f(sys, 8);
    for (int t = 1; t <= 5; ++t) {
        Word ones = Word::ones(t);
        // y_{1^t 0} = y_{1^t} maps to y_{0^t 1}
        Word left_child = Word::make(ones.bits, t + 1);
        Word img = Word::make(std::uint64_t{1} << t, t + 1);  // 0^t 1
        CHECK(f.eval_exact(sys->interval(left_child).lo) == sys->interval(img).lo);
        // the right child 1^{t+1} maps into 0^{t+1}
        Word right_child = Word::ones(t + 1);
        Rational y = f.eval_exact(sys->interval(right_child).lo);
        CHECK(y >= sys->interval(Word::zeros(t + 1)).lo);
        CHECK(y <= sys->interval(Word::zeros(t + 1)).hi);
    }
}

TEST_CASE("no jumps at cylinder boundaries (continuity probe)") {
    for (auto sys : {ternary(9), staged(2)}) {
        OdometerExtension f(sys, sys->depth() - 1);
        Rational delta(1, 1000000000);
        Rational bound = sys->nu(f.depth()) * Rational(2) + Rational(1, 1000);
        for (int t = 1; t <= 5; ++t) {
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
                const auto& k = sys->interval(Word::make(v, t));
                for (const Rational& edge : {k.lo, k.hi}) {
                    Rational lo = max(Rational(0), edge - delta);
                    Rational hi = min(Rational(1), edge + delta);
                    Rational jump = (f.eval_exact(hi) - f.eval_exact(lo)).abs();
                    CHECK(jump <= bound);
                }
            }
        }
    }
}

TEST_CASE("gap images are stable under a deeper evaluation cap") {
    auto sys = ternary(10);
    OdometerExtension f5(sys, 5), f6(sys, 6);
    for (int t = 0; t <= 4; ++t) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
            const auto& c0 = sys->interval(Word::make(v, t + 1));
            const auto& c1 = sys->interval(Word::make(v | (std::uint64_t{1} << t), t + 1));
            Rational mid = (c0.hi + c1.lo) / Rational(2);
            CHECK(f5.eval_exact(mid) == f6.eval_exact(mid));
        }
    }
}

TEST_CASE("float evaluation tracks the exact one") {
    auto sys = ternary(9);
    OdometerExtension f(sys, 8);
    for (int k = 0; k <= 200; ++k) {
        Rational x(k, 200);
        double dx = x.to_double();
        CHECK(f.eval(dx) == doctest::Approx(f.eval_exact(x).to_double()).epsilon(1e-9));
    }
}

TEST_CASE("symbolic trajectory: addresses, period, enclosures") {
    auto sys = ternary(9);
    int T = 5;
    std::int64_t period = std::int64_t{1} << T;
    Trajectory traj = make_symbolic_trajectory(sys, Word::zeros(T), 2 * period + 3);
    REQUIRE(traj.exact.has_value());
    REQUIRE(traj.symbolic.has_value());

    // step 1 carries the address 1 0^{T-1}
    CHECK(symbolic_enclosure(traj, 1).lo == sys->interval(word_from_string("10000")).lo);
    // exact periodicity with period 2^T
    for (std::int64_t i = 0; i + period < static_cast<std::int64_t>(traj.size()); ++i)
        CHECK(traj.exact->scaled[i] == traj.exact->scaled[i + period]);
    // positions sit inside their enclosures
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(traj.size()); ++i) {
        auto enc = symbolic_enclosure(traj, i);
        Rational pos(BigInt(traj.exact->scaled[i]), traj.exact->den);
        CHECK(pos >= enc.lo);
        CHECK(pos <= enc.hi);
    }
}

TEST_CASE("float orbit of the left endpoint stays inside the symbolic enclosures") {
    for (int T = 2; T <= 6; ++T) {
        auto sys = ternary(T + 3);
        OdometerExtension f(sys, T);
        Trajectory sym = make_symbolic_trajectory(sys, Word::zeros(T), std::int64_t{1} << T);
        double x = 0.0;
        for (std::int64_t i = 0; i < (std::int64_t{1} << T); ++i) {
            auto enc = symbolic_enclosure(sym, i);
            CHECK(x >= enc.lo.to_double() - 1e-9);
            CHECK(x <= enc.hi.to_double() + 1e-9);
            x = f.eval(x);
        }
    }
}

TEST_CASE("exact tent(2) orbits") {
    Trajectory t = make_tent2_trajectory(1, 3, 5);
    CHECK(t.values[0] == doctest::Approx(1.0 / 3.0));
    CHECK(t.values[1] == doctest::Approx(2.0 / 3.0));
    CHECK(t.values[2] == doctest::Approx(2.0 / 3.0));  // fixed point reached
    CHECK(t.exact->scaled[3] == 2);

    // a large odd prime denominator yields a long, non-repeating orbit
    Trajectory big = make_tent2_trajectory(1, 999983, 5000);
    std::set<std::int64_t> seen(big.exact->scaled.begin(), big.exact->scaled.end());
    CHECK(seen.size() == 5000);

    // double iteration of tent(2) collapses to 0; the exact orbit does not
    MapSpec m = MapSpec::tent(2.0);
    double x = 0.37;
    for (int i = 0; i < 200; ++i) x = eval_map(m, x);
    CHECK(x == 0.0);
    CHECK(big.exact->scaled[4999] != 0);
}

TEST_CASE("enclosure predicate decides consistently with endpoint positions") {
    auto sys = ternary(8);
    Rational eps(1, 9);
    for (int t = 1; t <= 6; ++t) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << t); ++v) {
            for (std::uint64_t w = 0; w < (std::uint64_t{1} << t); ++w) {
                Word a = Word::make(v, t), b = Word::make(w, t);
                auto d = enclosure_recurrent(*sys, a, b, eps);
                Rational gap = (sys->interval(a).lo - sys->interval(b).lo).abs();
                if (d == EnclosureDecision::Yes) CHECK(gap <= eps);
                if (d == EnclosureDecision::No) CHECK(gap > eps);
            }
        }
    }
}

TEST_CASE("trajectory csv shapes") {
    auto sys = ternary(6);
    std::ostringstream sym_csv;
    write_trajectory_csv(sym_csv, make_symbolic_trajectory(sys, Word::zeros(3), 4));
    CHECK(sym_csv.str().rfind("index,address,lo,hi\n", 0) == 0);
    CHECK(sym_csv.str().find("1,100,2/3,") != std::string::npos);

    std::ostringstream flt_csv;
    write_trajectory_csv(flt_csv, make_trajectory(MapSpec::tent(2.0), 0.25, 3));
    CHECK(flt_csv.str().rfind("index,value\n", 0) == 0);
}

TEST_SUITE_END();
