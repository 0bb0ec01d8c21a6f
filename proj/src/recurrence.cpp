#include "rqdet/recurrence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rqdet {

EpsSpec EpsSpec::from_double(double v) {
    EpsSpec e;
    e.value = v;
    e.repr = std::to_string(v);
    return e;
}

EpsSpec EpsSpec::from_rational(const Rational& r) {
    EpsSpec e;
    e.exact = r;
    e.value = r.to_double();
    e.repr = r.to_fraction_string();
    return e;
}

EpsSpec EpsSpec::parse(const std::string& s) {
    EpsSpec e;
    e.exact = Rational::parse(s);
    e.value = e.exact->to_double();
    e.repr = s;
    return e;
}

PairData::PairData(const Trajectory& traj, const EpsSpec& eps, std::int64_t offset) {
    if (offset < 0 || offset > static_cast<std::int64_t>(traj.size()))
        throw std::out_of_range("PairData: bad offset");
    size_ = static_cast<std::int64_t>(traj.size()) - offset;
    if (traj.exact && eps.exact) {
        exact_ = true;
        ipos_ = traj.exact->scaled.data() + offset;
        // |p_i - p_j| <= eps * den  <=>  |p_i - p_j| <= floor(eps * den)
        BigInt q, r;
        BigInt::divmod(eps.exact->num() * traj.exact->den, eps.exact->den(), q, r);
        BigInt cap = traj.exact->den;  // distances never exceed the scaled unit
        if (q > cap) q = cap;
        ithr_ = q.to_int128();
    } else {
        dpos_ = traj.values.data() + offset;
        deps_ = eps.value;
    }
}

namespace {

void check_extent(const PairData& d, std::int64_t n, int M) {
    if (n < 1 || M < 1) throw std::invalid_argument("correlation kernel: n >= 1, M >= 1 required");
    if (d.size() < n + M - 1)
        throw std::invalid_argument("correlation kernel: trajectory must supply n+M-1 points");
}

}  // namespace

std::vector<std::int64_t> corr_counts_naive(const PairData& d, std::int64_t n, int M) {
    check_extent(d, n, M);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(M) + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            int run = 0;
            while (run < M && d.recurrent(i + run, j + run)) ++run;
            for (int m = 1; m <= run; ++m) ++counts[static_cast<std::size_t>(m)];
        }
    }
    return counts;
}

std::vector<std::int64_t> corr_counts_runs(const PairData& d, std::int64_t n, int M) {
    check_extent(d, n, M);
    std::vector<std::int64_t> hist(static_cast<std::size_t>(M) + 1, 0);
    std::vector<char> diag;
    for (std::int64_t h = 0; h < n; ++h) {
        const std::int64_t grid = n - h;          // in-window diagonal cells
        const std::int64_t ext = grid + M - 1;    // cells with window data
        diag.resize(static_cast<std::size_t>(ext));
        for (std::int64_t l = 0; l < ext; ++l) diag[static_cast<std::size_t>(l)] = d.recurrent(l, l + h);
        const std::int64_t mult = h == 0 ? 1 : 2;
        std::int64_t run = 0;
        for (std::int64_t l = ext - 1; l >= 0; --l) {
            run = diag[static_cast<std::size_t>(l)] ? run + 1 : 0;
            if (l < grid) hist[static_cast<std::size_t>(std::min<std::int64_t>(run, M))] += mult;
        }
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(M) + 1, 0);
    std::int64_t acc = 0;
    for (int m = M; m >= 1; --m) {
        acc += hist[static_cast<std::size_t>(m)];
        counts[static_cast<std::size_t>(m)] = acc;
    }
    return counts;
}

namespace {

std::int64_t popcount_prefix(const std::vector<std::uint64_t>& w, std::int64_t bits) {
    std::int64_t full = bits >> 6;
    std::int64_t total = 0;
    for (std::int64_t k = 0; k < full; ++k) total += std::popcount(w[static_cast<std::size_t>(k)]);
    int rem = static_cast<int>(bits & 63);
    if (rem) total += std::popcount(w[static_cast<std::size_t>(full)] & ((std::uint64_t{1} << rem) - 1));
    return total;
}

void shift_right_one(std::vector<std::uint64_t>& w) {
    for (std::size_t k = 0; k + 1 < w.size(); ++k) w[k] = (w[k] >> 1) | (w[k + 1] << 63);
    if (!w.empty()) w.back() >>= 1;
}

}  // namespace

std::vector<std::int64_t> corr_counts_bitparallel(const PairData& d, std::int64_t n, int M) {
    check_extent(d, n, M);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(M) + 1, 0);
    std::vector<std::uint64_t> cur, shifted;
    for (std::int64_t h = 0; h < n; ++h) {
        const std::int64_t grid = n - h;
        const std::int64_t ext = grid + M - 1;
        const std::size_t words = static_cast<std::size_t>((ext + 63) >> 6);
        cur.assign(words, 0);
        for (std::int64_t l = 0; l < ext; ++l) {
            if (d.recurrent(l, l + h))
                cur[static_cast<std::size_t>(l >> 6)] |= std::uint64_t{1} << (l & 63);
        }
        shifted = cur;
        const std::int64_t mult = h == 0 ? 1 : 2;
        counts[1] += mult * popcount_prefix(cur, grid);
        for (int m = 2; m <= M; ++m) {
            shift_right_one(shifted);
            for (std::size_t k = 0; k < words; ++k) cur[k] &= shifted[k];
            counts[static_cast<std::size_t>(m)] += mult * popcount_prefix(cur, grid);
        }
    }
    return counts;
}

std::vector<std::int64_t> det_line_numerators(const PairData& d, std::int64_t n,
                                              const std::vector<int>& ms, int M_ext) {
    check_extent(d, n, M_ext);
    for (int m : ms) {
        if (m < 1 || m >= M_ext)
            throw std::invalid_argument("det_line_numerators: 1 <= m < M_ext required");
    }
    std::vector<std::int64_t> numer(ms.size(), 0);
    std::vector<char> diag;
    for (std::int64_t h = 0; h < n; ++h) {
        const std::int64_t grid = n - h;
        const std::int64_t ext = grid + M_ext - 1;
        diag.resize(static_cast<std::size_t>(ext));
        for (std::int64_t l = 0; l < ext; ++l) diag[static_cast<std::size_t>(l)] = d.recurrent(l, l + h);
        const std::int64_t mult = h == 0 ? 1 : 2;
        std::int64_t l = 0;
        while (l < grid) {
            if (!diag[static_cast<std::size_t>(l)]) {
                ++l;
                continue;
            }
            std::int64_t s = l;
            while (l < ext && diag[static_cast<std::size_t>(l)]) ++l;
            const std::int64_t L = l - s;                  // full line length (window data)
            const std::int64_t g = std::min(l, grid) - s;  // in-window cells
            const std::int64_t c = L - g;                  // cells beyond the window edge
            // cell count consistent with the Bowen-window statistic: a line
            // cut by the window edge keeps its full length while the cut is
            // shorter than m, and only its in-window cells afterwards
            for (std::size_t k = 0; k < ms.size(); ++k) {
                const std::int64_t m = ms[k];
                std::int64_t A = L - std::max<std::int64_t>(c, m - 1);
                std::int64_t B = L - std::max<std::int64_t>(c, m);
                if (A < 0) A = 0;
                if (B < 0) B = 0;
                numer[k] += mult * (m * A - (m - 1) * B);
            }
        }
    }
    return numer;
}

std::int64_t det_line_numerator(const PairData& d, std::int64_t n, int m, int M_ext) {
    return det_line_numerators(d, n, {m}, M_ext)[0];
}

RecurrenceMatrix RecurrenceMatrix::build(const PairData& d, std::int64_t n, std::string eps_repr) {
    if (n < 1 || d.size() < n) throw std::invalid_argument("RecurrenceMatrix: bad n");
    RecurrenceMatrix rm;
    rm.n = n;
    rm.words_per_row = (n + 63) >> 6;
    rm.bits.assign(static_cast<std::size_t>(n * rm.words_per_row), 0);
    rm.eps_repr = std::move(eps_repr);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            if (d.recurrent(i, j))
                rm.bits[static_cast<std::size_t>(i * rm.words_per_row + (j >> 6))] |=
                    std::uint64_t{1} << (j & 63);
        }
    }
    return rm;
}

void RecurrenceMatrix::write_pbm(std::ostream& os) const {
    os << "P4\n" << n << " " << n << "\n";
    const std::int64_t bytes_per_row = (n + 7) >> 3;
    std::string row(static_cast<std::size_t>(bytes_per_row), '\0');
    for (std::int64_t i = 0; i < n; ++i) {
        std::fill(row.begin(), row.end(), '\0');
        for (std::int64_t j = 0; j < n; ++j) {
            if (get(i, j)) row[static_cast<std::size_t>(j >> 3)] |= static_cast<char>(0x80u >> (j & 7));
        }
        os.write(row.data(), bytes_per_row);
    }
}

void RecurrenceMatrix::write_pgm_runs(std::ostream& os) const {
    if (n > 4096) throw std::length_error("write_pgm_runs: plot capped at n = 4096");
    os << "P5\n" << n << " " << n << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(n));
    // forward run length along the diagonal through (i, j), clipped to 255
    std::vector<std::vector<unsigned char>> img(static_cast<std::size_t>(n), row);
    for (std::int64_t i = n - 1; i >= 0; --i) {
        for (std::int64_t j = n - 1; j >= 0; --j) {
            if (!get(i, j)) continue;
            int next = (i + 1 < n && j + 1 < n) ? img[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] : 0;
            img[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                static_cast<unsigned char>(std::min(255, next + 1));
        }
    }
    for (std::int64_t i = 0; i < n; ++i)
        os.write(reinterpret_cast<const char*>(img[static_cast<std::size_t>(i)].data()), n);
}

nlohmann::ordered_json RecurrenceMatrix::run_length_json() const {
    std::vector<std::int64_t> hist;
    for (std::int64_t h = -(n - 1); h < n; ++h) {
        std::int64_t i0 = h >= 0 ? 0 : -h;
        std::int64_t run = 0;
        for (std::int64_t i = i0; i < n && i + h < n; ++i) {
            if (get(i, i + h)) {
                ++run;
            } else if (run) {
                if (static_cast<std::int64_t>(hist.size()) <= run) hist.resize(run + 1, 0);
                ++hist[static_cast<std::size_t>(run)];
                run = 0;
            }
        }
        if (run) {
            if (static_cast<std::int64_t>(hist.size()) <= run) hist.resize(run + 1, 0);
            ++hist[static_cast<std::size_t>(run)];
        }
    }
    nlohmann::ordered_json j;
    j["n"] = n;
    j["eps"] = eps_repr;
    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (std::size_t l = 1; l < hist.size(); ++l) {
        if (hist[l]) lines.push_back({{"length", l}, {"count", hist[l]}});
    }
    j["diagonal_lines"] = std::move(lines);
    return j;
}

// ---------------------------------------------------------------------------
// profiles

double CorrelationProfile::C(std::size_t ni, int m) const {
    double n = static_cast<double>(n_grid[ni]);
    return static_cast<double>(counts[ni][static_cast<std::size_t>(m)]) / (n * n);
}

double CorrelationProfile::rdet(std::size_t ni, int m) const {
    return static_cast<double>(counts[ni][static_cast<std::size_t>(m)]) /
           static_cast<double>(counts[ni][1]);
}

double CorrelationProfile::rqa_det(std::size_t ni, int m) const {
    for (std::size_t k = 0; k < m_grid.size(); ++k) {
        if (m_grid[k] == m) return static_cast<double>(det_numer[ni][k]) /
                                   static_cast<double>(counts[ni][1]);
    }
    throw std::invalid_argument("rqa_det: m not in the reported grid");
}

CorrelationProfile build_profile(const Trajectory& traj, const EpsSpec& eps,
                                 std::vector<std::int64_t> n_grid, int M_cap, std::int64_t offset) {
    if (n_grid.empty()) throw std::invalid_argument("build_profile: empty n grid");
    if (M_cap < 2) throw std::invalid_argument("build_profile: M_cap >= 2 required");
    std::sort(n_grid.begin(), n_grid.end());
    CorrelationProfile p;
    p.eps = eps;
    p.n_grid = std::move(n_grid);
    p.M_cap = M_cap;
    for (int m = 1; m <= M_cap; m *= 2) p.m_grid.push_back(m);
    if (p.m_grid.back() != M_cap) p.m_grid.push_back(M_cap);

    std::vector<int> det_ms;
    for (int m : p.m_grid)
        if (m < M_cap) det_ms.push_back(m);

    PairData data(traj, eps, offset);
    for (std::int64_t n : p.n_grid) {
        auto counts = corr_counts_runs(data, n, M_cap);
        for (int m = 1; m < M_cap; ++m) {
            if (counts[static_cast<std::size_t>(m)] < counts[static_cast<std::size_t>(m) + 1])
                throw std::logic_error("build_profile: counts increase in m");
        }
        auto dn = det_line_numerators(data, n, det_ms, M_cap);
        dn.resize(p.m_grid.size(), 0);  // grid entries >= M_cap carry no DET value
        p.counts.push_back(std::move(counts));
        p.det_numer.push_back(std::move(dn));
    }

    p.stabilized_at_m = M_cap;
    for (int m = 1; m <= M_cap; ++m) {
        bool stable = true;
        for (std::size_t ni = 0; ni < p.n_grid.size() && stable; ++ni)
            stable = p.counts[ni][static_cast<std::size_t>(m)] == p.counts[ni][static_cast<std::size_t>(M_cap)];
        if (stable) {
            p.stabilized_at_m = m;
            break;
        }
    }
    return p;
}

TailStats tail_stats(const CorrelationProfile& p) {
    TailStats t;
    std::size_t nn = p.n_grid.size();
    std::size_t tail = (nn + 1) / 2;
    std::size_t from = nn - tail;
    t.c_lo.assign(static_cast<std::size_t>(p.M_cap) + 1, 0.0);
    t.c_hi.assign(static_cast<std::size_t>(p.M_cap) + 1, 0.0);
    t.rdet_lo.assign(static_cast<std::size_t>(p.M_cap) + 1, 0.0);
    t.rdet_hi.assign(static_cast<std::size_t>(p.M_cap) + 1, 0.0);
    for (int m = 1; m <= p.M_cap; ++m) {
        double clo = 0, chi = 0, rlo = 0, rhi = 0;
        for (std::size_t ni = from; ni < nn; ++ni) {
            double c = p.C(ni, m), r = p.rdet(ni, m);
            if (ni == from || c < clo) clo = c;
            if (ni == from || c > chi) chi = c;
            if (ni == from || r < rlo) rlo = r;
            if (ni == from || r > rhi) rhi = r;
        }
        t.c_lo[static_cast<std::size_t>(m)] = clo;
        t.c_hi[static_cast<std::size_t>(m)] = chi;
        t.rdet_lo[static_cast<std::size_t>(m)] = rlo;
        t.rdet_hi[static_cast<std::size_t>(m)] = rhi;
    }
    return t;
}

DeterminismReport make_report(CorrelationProfile p) {
    DeterminismReport r;
    r.tails = tail_stats(p);
    r.profile = std::move(p);
    const auto& prof = r.profile;
    for (int m = 1; m <= prof.M_cap; ++m) {
        double lhs = r.tails.c_lo[static_cast<std::size_t>(m)] / r.tails.c_hi[1];
        double rhs = r.tails.c_hi[static_cast<std::size_t>(m)] / r.tails.c_lo[1];
        if (r.tails.rdet_lo[static_cast<std::size_t>(m)] < lhs - 1e-12 ||
            r.tails.rdet_hi[static_cast<std::size_t>(m)] > rhs + 1e-12)
            r.sandwich_ok = false;
    }
    return r;
}

nlohmann::ordered_json DeterminismReport::to_json() const {
    nlohmann::ordered_json j;
    j["eps"] = profile.eps.repr;
    j["n_grid"] = profile.n_grid;
    j["M_cap"] = profile.M_cap;
    j["stabilized_at_m"] = profile.stabilized_at_m;
    j["monotone_in_m"] = monotone_in_m;
    j["sandwich_ok"] = sandwich_ok;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t ni = 0; ni < profile.n_grid.size(); ++ni) {
        for (int m : profile.m_grid) {
            nlohmann::ordered_json row;
            row["m"] = m;
            row["n"] = profile.n_grid[ni];
            row["C"] = profile.C(ni, m);
            row["rdet"] = profile.rdet(ni, m);
            if (m < profile.M_cap) row["rqa_det"] = profile.rqa_det(ni, m);
            rows.push_back(std::move(row));
        }
    }
    j["table"] = std::move(rows);
    nlohmann::ordered_json tailsj;
    nlohmann::ordered_json per_m = nlohmann::ordered_json::array();
    for (int m : profile.m_grid) {
        per_m.push_back({{"m", m},
                         {"c_lo", tails.c_lo[static_cast<std::size_t>(m)]},
                         {"c_hi", tails.c_hi[static_cast<std::size_t>(m)]},
                         {"rdet_lo", tails.rdet_lo[static_cast<std::size_t>(m)]},
                         {"rdet_hi", tails.rdet_hi[static_cast<std::size_t>(m)]}});
    }
    tailsj["per_m"] = std::move(per_m);
    j["tails"] = std::move(tailsj);
    return j;
}

void DeterminismReport::write_csv(std::ostream& os) const {
    os << "m,n,C,rdet,rqa_det\n";
    os.precision(17);
    for (std::size_t ni = 0; ni < profile.n_grid.size(); ++ni) {
        for (int m : profile.m_grid) {
            os << m << "," << profile.n_grid[ni] << "," << profile.C(ni, m) << ","
               << profile.rdet(ni, m) << ",";
            if (m < profile.M_cap) os << profile.rqa_det(ni, m);
            os << "\n";
        }
    }
}

ShiftBoundCheck check_shift_bound(const Trajectory& traj, const EpsSpec& eps, std::int64_t n,
                                  std::int64_t h, int m) {
    ShiftBoundCheck r;
    PairData base(traj, eps, 0);
    PairData shifted(traj, eps, h);
    r.base_count = corr_counts_runs(base, n + h, m)[static_cast<std::size_t>(m)];
    r.shifted_count = corr_counts_runs(shifted, n, m)[static_cast<std::size_t>(m)];
    r.ok_upper = r.shifted_count <= r.base_count;
    r.ok_lower = r.base_count - (2 * h * n + h * h) <= r.shifted_count;
    return r;
}

}  // namespace rqdet
