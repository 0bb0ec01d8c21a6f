#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqdet/dynamics.hpp"
#include "rqdet/interval_system.hpp"
#include "rqdet/recurrence.hpp"

namespace rqdet {

// Exact asymptotic-rdet bounds from the pair counts:
//   N_m°/N_1 <= rdet_lower <= rdet_upper <= N_m/N_1°,  valid when N_1° > 0.
struct RdetBounds {
    bool defined = false;
    Rational lower{0}, upper{1};
    std::int64_t n1 = 0, n1_joint = 0, nm = 0, nm_joint = 0;
};
RdetBounds combinatorial_rdet_bounds(const IntervalSystem& sys, int t, const Rational& eps,
                                     std::int64_t m);

// -------------------------------------------------------------------------
// epsilon sweeps and the trichotomy classifier

struct InitialPoint {
    enum class Kind { Real, Fraction, Address };
    Kind kind = Kind::Real;
    double x0 = 0.0;
    std::int64_t num = 0, den = 1;
    std::string address;

    static InitialPoint real(double v);
    static InitialPoint fraction(std::int64_t n, std::int64_t d);
    static InitialPoint addr(std::string digits);
    std::string repr() const;
};

struct SweepBudget {
    std::int64_t n_max = 16384;
    int M_cap = 256;
    std::int64_t transient = 1024;  // discarded leading iterates for analytic maps
};

struct SweepRow {
    std::string eps_repr;
    double eps = 0.0;
    double c_lo = 0, c_hi = 0, rdet_lo = 0, rdet_hi = 0;  // tail stats at m = M_cap
    double c_at_n = 0, rdet_at_n = 0;                     // point estimate at the largest n
    int M_cap = 0;
    std::int64_t n_used = 0;
    int stabilized_at_m = 0;
    bool budget_exceeded = false;
};

struct SweepResult {
    std::string map_label;
    std::string start;
    std::string grid_provenance;  // explicit | ladder | eps_t
    std::vector<SweepRow> rows;   // sorted by decreasing eps
    nlohmann::ordered_json config;
    nlohmann::ordered_json to_json() const;
};

// rows may be computed concurrently (threads > 1); the result is a pure
// function of the inputs either way
SweepResult epsilon_sweep(const MapSpec& map, const InitialPoint& start,
                          const std::vector<EpsSpec>& grid, const SweepBudget& budget,
                          std::string grid_provenance = "explicit", int threads = 1);

// scale grids taken from the system itself
std::vector<EpsSpec> ladder_eps_grid(const IntervalSystem& sys);
std::vector<EpsSpec> epsilon_t_grid(const IntervalSystem& sys, int s_lo, int s_hi);

struct ClassifyThresholds {
    double theta0 = 0.1;   // DET_ZERO ceiling
    double theta1 = 0.05;  // DET_ONE margin
    double small_fraction = 1.0 / 3.0;
};

enum class Verdict { DetOne, PositiveBounded, DetZero };
std::string to_string(Verdict v);

struct Classification {
    Verdict verdict = Verdict::PositiveBounded;
    ClassifyThresholds thresholds;
    std::size_t small_count = 0;
    double min_small_rdet_lo = 0.0;
    double max_small_rdet_hi = 0.0;
    nlohmann::ordered_json to_json() const;
};

// requires >= 6 epsilons spanning >= 3 decades
Classification classify(const SweepResult& sweep, const ClassifyThresholds& th = {});

// -------------------------------------------------------------------------
// theorem-example reproduction (staged system, oscillating determinism)

struct TheoremExampleReport {
    int stages = 0;
    ValidationReport validation;
    struct StageRow {
        int n = 0;
        int t = 0;
        std::string eps;
        bool det1_exact_one = false;  // combinatorial bounds pin rdet = 1 at (t_n, eps_n)
        int t_prime = 0;
        std::string eps_prime;
        std::string upper_at_prime;   // exact N_inf / N_1°
        std::string upper_target;     // 2^{1-n}
        bool det0_bound_ok = false;
        bool trajectory_checked = false;
        bool trajectory_ok = true;
        std::string trajectory_note;
    };
    std::vector<StageRow> stage_rows;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

// traj_budget caps the symbolic-orbit length 4 * 2^{t_n'}; stages whose
// trajectory check would exceed it are skipped (bounds still certified)
TheoremExampleReport theorem_example_report(int stages,
                                            std::int64_t traj_budget = std::int64_t{1} << 15);

// -------------------------------------------------------------------------
// 4/5 determinism ceiling at the eps_t scales

struct FourFifthsReport {
    struct Row {
        int t = 0;
        std::string eps;  // eps_{t-2}
        bool hypothesis_ok = false;
        std::int64_t n_inf = 0, n1_joint = 0;
        bool count_bound_ok = false;  // N_inf <= 2^{t+1}
        bool margin_ok = false;       // N_1° - N_inf >= 2^{t-1}
        std::string bound;            // N_inf / N_1°
        bool bound_le_four_fifths = false;
        double traj_rdet = 0.0;
        bool traj_ok = false;  // <= 0.8 + 0.02
    };
    std::vector<Row> rows;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

FourFifthsReport four_fifths_report(const std::shared_ptr<const IntervalSystem>& sys, int t_lo,
                                    int t_hi);

// -------------------------------------------------------------------------
// trajectory statistics against the exact count sandwich

struct SandwichReport {
    struct Row {
        int t = 0;
        std::string eps;
        std::int64_t n = 0;
        std::int64_t m = 0;
        std::int64_t count = 0;        // n^2 C_m from the exact symbolic orbit
        std::int64_t near = 0, joint = 0;
        bool c_ok = false;
        bool rdet_defined = false;
        bool rdet_ok = true;
    };
    std::vector<Row> rows;
    std::int64_t violations = 0;
    nlohmann::ordered_json to_json() const;
};

// for each cylinder level t <= t_max and each scale eps_s (s in eps_levels),
// checks the symbolic-orbit statistics against N/N° at every m in 1,2,4,...,2^t
SandwichReport sandwich_report(const std::shared_ptr<const IntervalSystem>& sys, int t_max,
                               const std::vector<int>& eps_levels);

}  // namespace rqdet
