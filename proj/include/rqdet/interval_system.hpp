#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rqdet/rational.hpp"
#include "rqdet/word.hpp"

namespace rqdet {

// sentinel for m = infinity in Bowen-window quantities
inline constexpr std::int64_t kInfSteps = std::numeric_limits<std::int64_t>::max();

struct RationalInterval {
    Rational lo, hi;
    Rational diam() const { return hi - lo; }
};

// gap between closed intervals: 0 if they intersect
Rational interval_gap(const RationalInterval& a, const RationalInterval& b);
// diameter of the convex hull of the union
Rational interval_hull_diam(const RationalInterval& a, const RationalInterval& b);

enum class SystemKind { Ternary, Theorem3, Custom };
std::string to_string(SystemKind k);

struct TheoremStage {
    int n = 0;          // stage index, 1-based
    int t = 0;          // level of the det=1 scale
    Rational eps;       // eps_n
    int t_prime = 0;    // level of the collapse scale
    Rational eps_prime; // eps_n'
};

// Verified (t_n, eps_n) / (t_n', eps_n') sequences of the staged construction.
struct EpsilonLadder {
    std::vector<TheoremStage> stages;
};

// Exact counts of cylinder pairs at one level for every window length m in
// [1, 2^t]; near = dist_m < eps (strict), joint = diam_m <= eps.
class PairCountProfile {
public:
    PairCountProfile(int t, std::vector<std::int64_t> near_suffix,
                     std::vector<std::int64_t> joint_suffix)
        : t_(t), near_(std::move(near_suffix)), joint_(std::move(joint_suffix)) {}

    int level() const { return t_; }
    std::int64_t period() const { return std::int64_t{1} << t_; }
    // counts stabilize at m = 2^t, so any m >= 2^t (incl. kInfSteps) is exact
    std::int64_t near(std::int64_t m) const;
    std::int64_t joint(std::int64_t m) const;

private:
    int t_;
    std::vector<std::int64_t> near_, joint_;  // index m, valid 1..2^t
};

// Admissible system of nested disjoint closed intervals K_a indexed by binary
// words, materialized level by level with exact rational endpoints.  Levels
// are built eagerly at construction; all queries afterwards are const and
// safe from any number of threads.
class IntervalSystem {
public:
    static constexpr int kDefaultDepthCap = 24;

    static IntervalSystem ternary(int depth);
    // builds to depth t_stages' and records the epsilon ladder
    static IntervalSystem theorem3(int stages, int depth_cap = kDefaultDepthCap);
    // arbitrary level tables (tests, corrupted systems); no invariants assumed
    static IntervalSystem custom(std::vector<std::vector<RationalInterval>> levels);

    SystemKind kind() const { return kind_; }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    int stages() const { return static_cast<int>(ladder_.stages.size()); }
    const EpsilonLadder& ladder() const { return ladder_; }

    const RationalInterval& interval(const Word& a) const;  // throws std::out_of_range past depth
    const std::vector<RationalInterval>& level(int t) const;
    Rational nu(int t) const;  // max diam over Sigma^t

    // Bowen-window geometry over the interval orbit; m = kInfSteps uses 2^t
    Rational dist_m(const Word& a, const Word& b, std::int64_t m) const;
    Rational diam_m(const Word& a, const Word& b, std::int64_t m) const;

    // N_m(t, eps): pairs with dist_m < eps (strict)
    std::int64_t count_near(int t, const Rational& eps, std::int64_t m) const;
    // N_m°(t, eps): pairs with diam_m <= eps
    std::int64_t count_joint(int t, const Rational& eps, std::int64_t m) const;
    PairCountProfile pair_count_profile(int t, const Rational& eps) const;

    // eps_t = max over a in Sigma^t of the gap between the extreme
    // grandchildren of K_a; verifies grandchild disjointness and the
    // shared-digit label identity, throwing std::runtime_error on violation
    Rational epsilon_t(int t) const;
    // (ell_t(eps), lambda_t(eps)): count and total length of level-t
    // cylinders with diam >= eps
    std::pair<std::int64_t, Rational> long_cylinders(int t, const Rational& eps) const;

    nlohmann::ordered_json to_json(int max_table_depth = kDefaultDepthCap) const;

    // scaled integer view of one level (shared denominator), used by the
    // counting kernels and exact trajectories
    struct ScaledLevel {
        bool ok = false;       // false when the common denominator exceeds int128
        BigInt den;
        std::vector<__int128> lo, hi;
        std::vector<std::uint32_t> spatial;  // word values sorted by lo
    };
    const ScaledLevel& scaled_level(int t) const;

private:
    IntervalSystem() = default;
    void finalize();  // builds scaled caches

    SystemKind kind_ = SystemKind::Custom;
    std::vector<std::vector<RationalInterval>> levels_;
    EpsilonLadder ladder_;
    std::vector<ScaledLevel> scaled_;
};

struct CheckRecord {
    std::string check;
    int level = -1;  // level or stage the record refers to, -1 when global
    bool pass = false;
    std::string detail;  // exact rational witnesses
};

struct ValidationReport {
    bool pass = true;
    std::vector<CheckRecord> records;
    nlohmann::ordered_json to_json() const;
};

// Admissibility conditions (1)-(3) to the given depth plus, for theorem3
// systems, the per-stage scale inequalities.  Failures are reported, never
// thrown.
ValidationReport validate(const IntervalSystem& sys, int depth);

}  // namespace rqdet
