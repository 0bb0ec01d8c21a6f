#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rqdet/interval_system.hpp"
#include "rqdet/rational.hpp"
#include "rqdet/word.hpp"

namespace rqdet {

// Continuous extension of the odometer over an admissible system: f maps
// K_a affinely-by-pieces onto K_{a+1} for every word a, and is continuous.
//
// Evaluation descends the cylinder tree until x leaves the resolved
// cylinders or the depth cap is hit:
//   - gap between the children of K_a, a != 1^|a|: affine onto the gap of
//     K_{a+1}, orientation preserving ((a u)+1 = (a+1) u keeps child sides);
//   - gap between the children of K_{1^t}: the children swap under +1
//     ((1^t u)+1 = 0^t (1-u)), so the gap folds affinely, orientation
//     reversing, onto [y_{0^{t+1} 1}, z_{0^t}] — the stretch between the two
//     image children.  Address arithmetic pins the endpoints: z_{1^t 0} has
//     address 1^t 0 1^inf, +1 = 0^t 1^inf, the point z_{0^t};
//   - cylinder at the depth cap: affine onto K_{a+1}, reversing only for
//     a = 1^depth.
// Points closer than nu_depth to the residual set see the cap rule; the
// error is below one cylinder diameter at the cap.
class OdometerExtension {
public:
    OdometerExtension(std::shared_ptr<const IntervalSystem> sys, int depth);

    double eval(double x) const;
    Rational eval_exact(const Rational& x) const;

    int depth() const { return depth_; }
    const IntervalSystem& system() const { return *sys_; }

private:
    std::shared_ptr<const IntervalSystem> sys_;
    int depth_;  // clamped to sys->depth() - 1 so fold targets stay resolved
    std::vector<std::vector<double>> dlo_, dhi_;
};

enum class MapKind { Logistic, Tent, Odometer };

struct MapSpec {
    MapKind kind = MapKind::Logistic;
    double param = 4.0;  // logistic r in [0,4], tent s in [0,2]
    std::shared_ptr<const IntervalSystem> sys;
    std::shared_ptr<const OdometerExtension> ext;  // built by make_odometer
    std::string label;

    static MapSpec logistic(double r);
    static MapSpec tent(double s);
    static MapSpec odometer(std::shared_ptr<const IntervalSystem> sys, int depth);
};

// f(x) for x in [0,1]; throws std::domain_error outside
double eval_map(const MapSpec& m, double x);

// Orbit positions with an optional exact integer-scaled representation.
// Recurrence predicates on exact orbits are decided in integer arithmetic.
struct ExactOrbit {
    std::vector<std::int64_t> scaled;  // position i = scaled[i] / den
    BigInt den;
};

struct SymbolicInfo {
    std::shared_ptr<const IntervalSystem> sys;
    Word alpha;
};

struct Trajectory {
    std::vector<double> values;
    std::optional<ExactOrbit> exact;
    std::optional<SymbolicInfo> symbolic;
    std::string source;

    std::size_t size() const { return values.size(); }
};

// float orbit x0, f(x0), ..., length n, by iterated eval_map
Trajectory make_trajectory(const MapSpec& m, double x0, std::int64_t n);

// exact orbit of the slope-2 tent map from x0 = num/den (int64 arithmetic;
// double iteration of tent(2) collapses to 0 after ~55 steps, exact rational
// iteration does not)
Trajectory make_tent2_trajectory(std::int64_t num, std::int64_t den, std::int64_t n);

// exact odometer orbit at address depth |alpha|: step i sits at the left
// endpoint of K_{alpha + i}, an exact rational; requires the level's common
// denominator to fit int64
Trajectory make_symbolic_trajectory(std::shared_ptr<const IntervalSystem> sys, const Word& alpha,
                                    std::int64_t n);

// enclosure interval of step i of a symbolic trajectory
RationalInterval symbolic_enclosure(const Trajectory& traj, std::int64_t i);

// three-valued recurrence decision from cylinder enclosures alone
enum class EnclosureDecision { Yes, No, Undecided };
EnclosureDecision enclosure_recurrent(const IntervalSystem& sys, const Word& a, const Word& b,
                                      const Rational& eps);

// trajectory CSV: (index, value) or, for symbolic orbits,
// (index, address, lo, hi) with exact fraction strings
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace rqdet
