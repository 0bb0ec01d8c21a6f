#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqdet/dynamics.hpp"
#include "rqdet/rational.hpp"

namespace rqdet {

// Recurrence scale.  Exact orbits compared against a rational eps are
// decided in integer arithmetic; everything else falls back to doubles.
struct EpsSpec {
    double value = 0.0;
    std::optional<Rational> exact;
    std::string repr;

    static EpsSpec from_double(double v);
    static EpsSpec from_rational(const Rational& r);
    static EpsSpec parse(const std::string& s);  // fraction or decimal
};

// Pairwise recurrence predicate |x_i - x_j| <= eps over one trajectory,
// optionally starting at an index offset (the offset view is the orbit of
// f^h(x)).  The trajectory must outlive this view.
class PairData {
public:
    PairData(const Trajectory& traj, const EpsSpec& eps, std::int64_t offset = 0);

    std::int64_t size() const { return size_; }
    bool exact() const { return exact_; }

    bool recurrent(std::int64_t i, std::int64_t j) const {
        if (exact_) {
            __int128 d = static_cast<__int128>(ipos_[i]) - ipos_[j];
            if (d < 0) d = -d;
            return d <= ithr_;
        }
        double d = dpos_[i] - dpos_[j];
        return (d < 0 ? -d : d) <= deps_;
    }

private:
    const double* dpos_ = nullptr;
    const std::int64_t* ipos_ = nullptr;
    __int128 ithr_ = 0;
    double deps_ = 0.0;
    bool exact_ = false;
    std::int64_t size_ = 0;
};

// Window pair counts n^2 * C_m for m = 1..M (index m; index 0 unused).
// The trajectory must supply indices 0 .. n+M-2.  The three kernels are
// algorithmically independent and agree exactly.
std::vector<std::int64_t> corr_counts_naive(const PairData& d, std::int64_t n, int M);
std::vector<std::int64_t> corr_counts_runs(const PairData& d, std::int64_t n, int M);
std::vector<std::int64_t> corr_counts_bitparallel(const PairData& d, std::int64_t n, int M);

// diagonal-line accounting: numerator of DET_m over the n x n window,
// equal to n^2 (m C_m - (m-1) C_{m+1}) cell by cell
std::int64_t det_line_numerator(const PairData& d, std::int64_t n, int m, int M_ext);
// same, for several minimum line lengths in one diagonal sweep
std::vector<std::int64_t> det_line_numerators(const PairData& d, std::int64_t n,
                                              const std::vector<int>& ms, int M_ext);

struct RecurrenceMatrix {
    std::int64_t n = 0;
    std::int64_t words_per_row = 0;
    std::vector<std::uint64_t> bits;
    std::string eps_repr;

    static RecurrenceMatrix build(const PairData& d, std::int64_t n, std::string eps_repr);
    bool get(std::int64_t i, std::int64_t j) const {
        return (bits[i * words_per_row + (j >> 6)] >> (j & 63)) & 1u;
    }
    void write_pbm(std::ostream& os) const;          // P4, bit-exact
    void write_pgm_runs(std::ostream& os) const;     // P5, forward diagonal run length
    nlohmann::ordered_json run_length_json() const;  // diagonal run histogram
};

// Correlation-sum / determinism profile over grids of m and n at one eps.
struct CorrelationProfile {
    EpsSpec eps;
    std::vector<std::int64_t> n_grid;
    int M_cap = 0;
    std::vector<int> m_grid;  // subset of 1..M_cap reported in tables
    // counts[ni][m] = n^2 C_m, m in 1..M_cap
    std::vector<std::vector<std::int64_t>> counts;
    int stabilized_at_m = 0;  // first m with counts[m] == counts[M_cap] at every n

    double C(std::size_t ni, int m) const;
    double rdet(std::size_t ni, int m) const;  // C_m / C_1
    // classical diagonal-line DET at minimum line length m; computed by line
    // enumeration, independent of the window counts (m must be a reported
    // grid value below M_cap)
    double rqa_det(std::size_t ni, int m) const;
    std::vector<std::vector<std::int64_t>> det_numer;  // [ni][k] aligned with m_grid[k]
};

CorrelationProfile build_profile(const Trajectory& traj, const EpsSpec& eps,
                                 std::vector<std::int64_t> n_grid, int M_cap,
                                 std::int64_t offset = 0);

// tail statistics over the last ceil(|n_grid|/2) entries: finite-n stand-ins
// for liminf/limsup over n
struct TailStats {
    std::vector<double> c_lo, c_hi;        // index m
    std::vector<double> rdet_lo, rdet_hi;  // index m
};
TailStats tail_stats(const CorrelationProfile& p);

struct DeterminismReport {
    CorrelationProfile profile;
    TailStats tails;
    bool monotone_in_m = true;  // exact on counts
    bool sandwich_ok = true;    // c_lo_m/c_hi_1 <= rdet_lo_m <= rdet_hi_m <= c_hi_m/c_lo_1
    nlohmann::ordered_json to_json() const;
    void write_csv(std::ostream& os) const;  // header m,n,C,rdet,rqa_det
};
DeterminismReport make_report(CorrelationProfile p);

// exact integer form of the trajectory-shift inequality
//   n^2 C_m(f^h x, n, eps) <= (n+h)^2 C_m(x, n+h, eps)
//   (n+h)^2 C_m(x, n+h, eps) - (2hn + h^2) <= n^2 C_m(f^h x, n, eps)
struct ShiftBoundCheck {
    bool ok_upper = true, ok_lower = true;
    std::int64_t base_count = 0, shifted_count = 0;
};
ShiftBoundCheck check_shift_bound(const Trajectory& traj, const EpsSpec& eps, std::int64_t n,
                                  std::int64_t h, int m);

}  // namespace rqdet
