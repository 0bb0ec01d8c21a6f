#include "rqdet/interval_system.hpp"

#include <algorithm>
#include <stdexcept>

namespace rqdet {

namespace {

constexpr int kTwoPointerLevel = 14;  // above this, m == 1 counts go through the sorted sweep

}  // namespace

Rational interval_gap(const RationalInterval& a, const RationalInterval& b) {
    Rational left = max(a.lo, b.lo);
    Rational right = min(a.hi, b.hi);
    if (left <= right) return Rational(0);
    return left - right;
}

Rational interval_hull_diam(const RationalInterval& a, const RationalInterval& b) {
    return max(a.hi, b.hi) - min(a.lo, b.lo);
}

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::Ternary: return "ternary";
        case SystemKind::Theorem3: return "theorem3";
        default: return "custom";
    }
}

std::int64_t PairCountProfile::near(std::int64_t m) const {
    if (m < 1) throw std::invalid_argument("PairCountProfile: m >= 1 required");
    std::int64_t P = period();
    return near_[static_cast<std::size_t>(std::min(m, P))];
}

std::int64_t PairCountProfile::joint(std::int64_t m) const {
    if (m < 1) throw std::invalid_argument("PairCountProfile: m >= 1 required");
    std::int64_t P = period();
    return joint_[static_cast<std::size_t>(std::min(m, P))];
}

// ---------------------------------------------------------------------------
// construction

IntervalSystem IntervalSystem::ternary(int depth) {
    if (depth < 0 || depth > kDefaultDepthCap)
        throw std::out_of_range("ternary: depth outside [0, depth cap]");
    IntervalSystem sys;
    sys.kind_ = SystemKind::Ternary;
    sys.levels_.resize(depth + 1);
    sys.levels_[0] = {RationalInterval{Rational(0), Rational(1)}};
    const Rational third(1, 3);
    for (int t = 0; t < depth; ++t) {
        auto& next = sys.levels_[t + 1];
        next.resize(std::size_t{1} << (t + 1));
        for (std::size_t v = 0; v < sys.levels_[t].size(); ++v) {
            const auto& k = sys.levels_[t][v];
            Rational step = k.diam() * third;
            next[v] = RationalInterval{k.lo, k.lo + step};
            next[v | (std::size_t{1} << t)] = RationalInterval{k.hi - step, k.hi};
        }
    }
    sys.finalize();
    return sys;
}

IntervalSystem IntervalSystem::theorem3(int stages, int depth_cap) {
    if (stages < 1) throw std::invalid_argument("theorem3: stages >= 1 required");
    // t_1 = 1, t_n' = t_n + (n+1), t_{n+1} = t_n' + 1
    {
        int t = 1;
        for (int n = 1; n <= stages; ++n) {
            t += n + 1;  // t_n'
            if (t > depth_cap)
                throw std::out_of_range("theorem3: stage " + std::to_string(n) +
                                        " needs depth " + std::to_string(t) +
                                        " beyond the depth cap " + std::to_string(depth_cap));
            t += 1;  // t_{n+1}
        }
    }

    IntervalSystem sys;
    sys.kind_ = SystemKind::Theorem3;
    sys.levels_.push_back({RationalInterval{Rational(0), Rational(1)}});
    sys.levels_.push_back({RationalInterval{Rational(0), Rational(1, 3)},
                           RationalInterval{Rational(2, 3), Rational(1)}});

    TheoremStage stage;
    stage.n = 1;
    stage.t = 1;
    stage.eps = Rational(1, 3);

    auto add_level = [&sys](auto&& child_rule) {
        int t = sys.depth();
        const auto& cur = sys.levels_[t];
        std::vector<RationalInterval> next(cur.size() * 2);
        for (std::size_t v = 0; v < cur.size(); ++v) {
            auto [left, right] = child_rule(v, cur[v]);
            next[v] = std::move(left);
            next[v | (std::size_t{1} << t)] = std::move(right);
        }
        sys.levels_.push_back(std::move(next));
    };

    for (int n = 1; n <= stages; ++n) {
        const int t = stage.t;
        const std::uint64_t ones = (std::uint64_t{1} << t) - 1;
        const Rational delta = sys.levels_[t][ones].diam();
        Rational pow4(1);
        for (int k = 0; k < n + 2; ++k) pow4 *= Rational(4);
        const Rational eps_prime = stage.eps / pow4;
        const Rational half_eps_prime = eps_prime / Rational(2);

        // level t_n + 1: tiny children everywhere except the all-ones branch,
        // whose right child keeps diameter 2*delta/3 > n*eps_n'
        add_level([&](std::size_t v, const RationalInterval& k) {
            Rational L = k.diam();
            if (v == ones) {
                return std::pair{RationalInterval{k.lo, k.lo + half_eps_prime},
                                 RationalInterval{k.lo + delta / Rational(3), k.hi}};
            }
            Rational m = min(half_eps_prime, L / Rational(4));
            return std::pair{RationalInterval{k.lo, k.lo + m},
                             RationalInterval{k.hi - m, k.hi}};
        });

        // levels t_n + 2 .. t_n': wide gap on the all-ones branch, thirds elsewhere
        for (int s = t + 2; s <= t + n + 1; ++s) {
            const std::uint64_t ones_parent = (std::uint64_t{1} << (s - 1)) - 1;
            add_level([&](std::size_t v, const RationalInterval& k) {
                Rational L = k.diam();
                if (v == ones_parent) {
                    return std::pair{RationalInterval{k.lo, k.lo + L / Rational(8)},
                                     RationalInterval{k.hi - L / Rational(4), k.hi}};
                }
                Rational step = L / Rational(3);
                return std::pair{RationalInterval{k.lo, k.lo + step},
                                 RationalInterval{k.hi - step, k.hi}};
            });
        }

        stage.t_prime = t + n + 1;
        stage.eps_prime = eps_prime;
        sys.ladder_.stages.push_back(stage);
        if (n == stages) break;

        // level t_{n+1}: every child has diameter eps_{n+1}, flush to the
        // parent's endpoints
        const auto& prev = sys.levels_[stage.t_prime];
        Rational min_diam = prev[0].diam();
        for (const auto& k : prev) min_diam = min(min_diam, k.diam());
        const Rational eps_next = min_diam / Rational(3);
        add_level([&](std::size_t, const RationalInterval& k) {
            return std::pair{RationalInterval{k.lo, k.lo + eps_next},
                             RationalInterval{k.hi - eps_next, k.hi}};
        });

        stage = TheoremStage{};
        stage.n = n + 1;
        stage.t = sys.depth();
        stage.eps = eps_next;
    }

    sys.finalize();
    // the placement scheme is an implementation choice; the validator is
    // normative, so a scheme that breaks any stage inequality must not
    // hand out a system
    ValidationReport report = validate(sys, sys.depth());
    if (!report.pass) {
        std::string why = "theorem3: construction failed validation:";
        for (const auto& r : report.records)
            if (!r.pass) why += " [" + r.check + ": " + r.detail + "]";
        throw std::logic_error(why);
    }
    return sys;
}

IntervalSystem IntervalSystem::custom(std::vector<std::vector<RationalInterval>> levels) {
    if (levels.empty()) throw std::invalid_argument("custom: at least the root level required");
    for (std::size_t t = 0; t < levels.size(); ++t) {
        if (levels[t].size() != (std::size_t{1} << t))
            throw std::invalid_argument("custom: level " + std::to_string(t) + " must have 2^t intervals");
    }
    IntervalSystem sys;
    sys.kind_ = SystemKind::Custom;
    sys.levels_ = std::move(levels);
    sys.finalize();
    return sys;
}

void IntervalSystem::finalize() {
    scaled_.resize(levels_.size());
    for (std::size_t t = 0; t < levels_.size(); ++t) {
        const auto& lev = levels_[t];
        auto& sc = scaled_[t];
        BigInt den(1);
        for (const auto& k : lev) {
            den = BigInt::lcm(den, k.lo.den());
            den = BigInt::lcm(den, k.hi.den());
        }
        sc.den = den;
        sc.ok = den.bit_length() <= 120;
        if (sc.ok) {
            sc.lo.resize(lev.size());
            sc.hi.resize(lev.size());
            for (std::size_t v = 0; v < lev.size(); ++v) {
                sc.lo[v] = (lev[v].lo.num() * (den / lev[v].lo.den())).to_int128();
                sc.hi[v] = (lev[v].hi.num() * (den / lev[v].hi.den())).to_int128();
            }
        }
        sc.spatial.resize(lev.size());
        for (std::size_t v = 0; v < lev.size(); ++v) sc.spatial[v] = static_cast<std::uint32_t>(v);
        if (sc.ok) {
            std::sort(sc.spatial.begin(), sc.spatial.end(),
                      [&](std::uint32_t a, std::uint32_t b) { return sc.lo[a] < sc.lo[b]; });
        } else {
            std::sort(sc.spatial.begin(), sc.spatial.end(),
                      [&](std::uint32_t a, std::uint32_t b) { return lev[a].lo < lev[b].lo; });
        }
    }
}

const RationalInterval& IntervalSystem::interval(const Word& a) const {
    if (a.len > depth()) throw std::out_of_range("interval: depth cap exceeded");
    return levels_[a.len][a.bits];
}

const std::vector<RationalInterval>& IntervalSystem::level(int t) const {
    if (t < 0 || t > depth()) throw std::out_of_range("level: depth cap exceeded");
    return levels_[t];
}

const IntervalSystem::ScaledLevel& IntervalSystem::scaled_level(int t) const {
    if (t < 0 || t > depth()) throw std::out_of_range("scaled_level: depth cap exceeded");
    return scaled_[t];
}

Rational IntervalSystem::nu(int t) const {
    const auto& lev = level(t);
    Rational v = lev[0].diam();
    for (const auto& k : lev) v = max(v, k.diam());
    return v;
}

// ---------------------------------------------------------------------------
// Bowen-window geometry

Rational IntervalSystem::dist_m(const Word& a, const Word& b, std::int64_t m) const {
    if (a.len != b.len) throw std::invalid_argument("dist_m: |a| != |b|");
    if (m < 1) throw std::invalid_argument("dist_m: m >= 1 required");
    const auto& lev = level(a.len);
    std::int64_t P = std::int64_t{1} << a.len;
    std::int64_t steps = std::min(m, P);
    std::uint64_t mask = static_cast<std::uint64_t>(P - 1);
    Rational worst(0);
    for (std::int64_t i = 0; i < steps; ++i) {
        std::uint64_t av = (a.bits + static_cast<std::uint64_t>(i)) & mask;
        std::uint64_t bv = (b.bits + static_cast<std::uint64_t>(i)) & mask;
        worst = max(worst, interval_gap(lev[av], lev[bv]));
    }
    return worst;
}

Rational IntervalSystem::diam_m(const Word& a, const Word& b, std::int64_t m) const {
    if (a.len != b.len) throw std::invalid_argument("diam_m: |a| != |b|");
    if (m < 1) throw std::invalid_argument("diam_m: m >= 1 required");
    const auto& lev = level(a.len);
    std::int64_t P = std::int64_t{1} << a.len;
    std::int64_t steps = std::min(m, P);
    std::uint64_t mask = static_cast<std::uint64_t>(P - 1);
    Rational worst(0);
    for (std::int64_t i = 0; i < steps; ++i) {
        std::uint64_t av = (a.bits + static_cast<std::uint64_t>(i)) & mask;
        std::uint64_t bv = (b.bits + static_cast<std::uint64_t>(i)) & mask;
        worst = max(worst, interval_hull_diam(lev[av], lev[bv]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// exact pair counts

namespace {

// scaled thresholds: gap < eps  <=>  gap_scaled <= near_le
//                    hull <= eps <=> hull_scaled <= joint_le
struct ScaledThresholds {
    __int128 near_le;
    __int128 joint_le;
};

ScaledThresholds make_thresholds(const Rational& eps, const BigInt& den) {
    BigInt q, r;
    BigInt::divmod(eps.num() * den, eps.den(), q, r);
    BigInt near = r.is_zero() ? q - BigInt(1) : q;
    // gaps and hulls never exceed the scaled unit interval
    if (q > den) q = den;
    if (near > den) near = den;
    return ScaledThresholds{near.to_int128(), q.to_int128()};
}

struct ScaledGeo {
    const __int128* lo;
    const __int128* hi;
    __int128 thr;
    bool operator()(std::uint64_t c, std::uint64_t d) const {
        __int128 g = lo[d] - hi[c];
        __int128 g2 = lo[c] - hi[d];
        if (g2 > g) g = g2;
        if (g < 0) g = 0;
        return g <= thr;
    }
};

struct ScaledHullGeo {
    const __int128* lo;
    const __int128* hi;
    __int128 thr;
    bool operator()(std::uint64_t c, std::uint64_t d) const {
        __int128 h = (hi[c] > hi[d] ? hi[c] : hi[d]) - (lo[c] < lo[d] ? lo[c] : lo[d]);
        return h <= thr;
    }
};

struct RationalGapGeo {
    const std::vector<RationalInterval>* lev;
    const Rational* eps;
    bool operator()(std::uint64_t c, std::uint64_t d) const {
        return interval_gap((*lev)[c], (*lev)[d]) < *eps;
    }
};

struct RationalHullGeo {
    const std::vector<RationalInterval>* lev;
    const Rational* eps;
    bool operator()(std::uint64_t c, std::uint64_t d) const {
        return interval_hull_diam((*lev)[c], (*lev)[d]) <= *eps;
    }
};

// m >= 2^t: the window covers the whole interval cycle; for each offset h the
// all-ones iterate is probed first, which resolves almost every h in O(1) on
// the staged systems
template <class Ok>
std::int64_t count_full_cycle(std::int64_t P, Ok ok) {
    const std::uint64_t mask = static_cast<std::uint64_t>(P - 1);
    std::int64_t total = 0;
    for (std::int64_t h = 0; h < P; ++h) {
        std::uint64_t probe = (mask - static_cast<std::uint64_t>(h)) & mask;
        if (!ok(probe, mask)) continue;
        bool all = true;
        for (std::int64_t c = 0; c < P; ++c) {
            std::uint64_t cv = static_cast<std::uint64_t>(c);
            if (!ok(cv, (cv + static_cast<std::uint64_t>(h)) & mask)) {
                all = false;
                break;
            }
        }
        if (all) total += P;
    }
    return total;
}

// 1 <= m < 2^t: per offset, count cyclic windows of m consecutive passing
// iterates via forward run lengths
template <class Ok>
std::int64_t count_windows(std::int64_t P, std::int64_t m, Ok ok) {
    const std::uint64_t mask = static_cast<std::uint64_t>(P - 1);
    std::vector<char> okv(static_cast<std::size_t>(P));
    std::int64_t total = 0;
    for (std::int64_t h = 0; h < P; ++h) {
        bool all = true;
        for (std::int64_t c = 0; c < P; ++c) {
            std::uint64_t cv = static_cast<std::uint64_t>(c);
            okv[static_cast<std::size_t>(c)] = ok(cv, (cv + static_cast<std::uint64_t>(h)) & mask);
            all = all && okv[static_cast<std::size_t>(c)];
        }
        if (all) {
            total += P;
            continue;
        }
        std::int64_t run = 0;
        for (std::int64_t i = P - 1; i >= 0; --i) run = okv[static_cast<std::size_t>(i)] ? run + 1 : 0;
        for (std::int64_t i = P - 1; i >= 0; --i) {
            run = okv[static_cast<std::size_t>(i)] ? run + 1 : 0;
            if (run >= m) ++total;
        }
    }
    return total;
}

// sorted sweeps for m == 1 on verified-disjoint levels (used at large t)
std::int64_t count_near_sorted(const IntervalSystem::ScaledLevel& sc, __int128 thr) {
    const auto& ord = sc.spatial;
    std::int64_t P = static_cast<std::int64_t>(ord.size());
    std::int64_t total = P;  // diagonal
    std::size_t j = 1;
    for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
        if (j < i + 1) j = i + 1;
        while (j < ord.size() && sc.lo[ord[j]] - sc.hi[ord[i]] <= thr) ++j;
        total += 2 * static_cast<std::int64_t>(j - i - 1);
    }
    return total;
}

std::int64_t count_joint_sorted(const IntervalSystem::ScaledLevel& sc, __int128 thr) {
    const auto& ord = sc.spatial;
    std::int64_t total = 0;
    for (std::uint32_t v = 0; v < ord.size(); ++v)
        if (sc.hi[v] - sc.lo[v] <= thr) ++total;  // diagonal
    std::size_t j = 1;
    for (std::size_t i = 0; i + 1 < ord.size(); ++i) {
        if (j < i + 1) j = i + 1;
        while (j < ord.size() && sc.hi[ord[j]] - sc.lo[ord[i]] <= thr) ++j;
        total += 2 * static_cast<std::int64_t>(j - i - 1);
    }
    return total;
}

bool level_sorted_disjoint(const IntervalSystem::ScaledLevel& sc) {
    if (!sc.ok) return false;
    for (std::size_t i = 0; i + 1 < sc.spatial.size(); ++i) {
        if (!(sc.hi[sc.spatial[i]] < sc.lo[sc.spatial[i + 1]])) return false;
    }
    return true;
}

}  // namespace

std::int64_t IntervalSystem::count_near(int t, const Rational& eps, std::int64_t m) const {
    if (eps.sign() <= 0) throw std::invalid_argument("count_near: eps > 0 required");
    if (m < 1) throw std::invalid_argument("count_near: m >= 1 required");
    const auto& sc = scaled_level(t);
    std::int64_t P = std::int64_t{1} << t;
    std::int64_t m_eff = std::min(m, P);
    if (sc.ok) {
        auto thr = make_thresholds(eps, sc.den);
        ScaledGeo ok{sc.lo.data(), sc.hi.data(), thr.near_le};
        if (m_eff == P) return count_full_cycle(P, ok);
        if (m_eff == 1 && t >= kTwoPointerLevel && level_sorted_disjoint(sc))
            return count_near_sorted(sc, thr.near_le);
        return count_windows(P, m_eff, ok);
    }
    RationalGapGeo ok{&levels_[t], &eps};
    if (m_eff == P) return count_full_cycle(P, ok);
    return count_windows(P, m_eff, ok);
}

std::int64_t IntervalSystem::count_joint(int t, const Rational& eps, std::int64_t m) const {
    if (eps.sign() <= 0) throw std::invalid_argument("count_joint: eps > 0 required");
    if (m < 1) throw std::invalid_argument("count_joint: m >= 1 required");
    const auto& sc = scaled_level(t);
    std::int64_t P = std::int64_t{1} << t;
    std::int64_t m_eff = std::min(m, P);
    if (sc.ok) {
        auto thr = make_thresholds(eps, sc.den);
        ScaledHullGeo ok{sc.lo.data(), sc.hi.data(), thr.joint_le};
        if (m_eff == P) return count_full_cycle(P, ok);
        if (m_eff == 1 && t >= kTwoPointerLevel && level_sorted_disjoint(sc))
            return count_joint_sorted(sc, thr.joint_le);
        return count_windows(P, m_eff, ok);
    }
    RationalHullGeo ok{&levels_[t], &eps};
    if (m_eff == P) return count_full_cycle(P, ok);
    return count_windows(P, m_eff, ok);
}

PairCountProfile IntervalSystem::pair_count_profile(int t, const Rational& eps) const {
    if (eps.sign() <= 0) throw std::invalid_argument("pair_count_profile: eps > 0 required");
    if (t > 13)
        throw std::length_error("pair_count_profile: O(4^t) scan refused for t > 13; use count_near/count_joint");
    const auto& sc = scaled_level(t);
    const std::int64_t P = std::int64_t{1} << t;
    const std::uint64_t mask = static_cast<std::uint64_t>(P - 1);

    std::vector<std::int64_t> hist_near(static_cast<std::size_t>(P) + 1, 0);
    std::vector<std::int64_t> hist_joint(static_cast<std::size_t>(P) + 1, 0);
    std::vector<char> okn(static_cast<std::size_t>(P)), okj(static_cast<std::size_t>(P));

    auto accumulate = [&](auto near_ok, auto joint_ok) {
        for (std::int64_t h = 0; h < P; ++h) {
            bool alln = true, allj = true;
            for (std::int64_t c = 0; c < P; ++c) {
                std::uint64_t cv = static_cast<std::uint64_t>(c);
                std::uint64_t dv = (cv + static_cast<std::uint64_t>(h)) & mask;
                okn[static_cast<std::size_t>(c)] = near_ok(cv, dv);
                okj[static_cast<std::size_t>(c)] = joint_ok(cv, dv);
                alln = alln && okn[static_cast<std::size_t>(c)];
                allj = allj && okj[static_cast<std::size_t>(c)];
            }
            auto run_hist = [&](const std::vector<char>& okv, std::vector<std::int64_t>& hist, bool all) {
                if (all) {
                    hist[static_cast<std::size_t>(P)] += P;
                    return;
                }
                std::int64_t run = 0;
                for (std::int64_t i = P - 1; i >= 0; --i) run = okv[static_cast<std::size_t>(i)] ? run + 1 : 0;
                for (std::int64_t i = P - 1; i >= 0; --i) {
                    run = okv[static_cast<std::size_t>(i)] ? run + 1 : 0;
                    ++hist[static_cast<std::size_t>(run)];
                }
            };
            run_hist(okn, hist_near, alln);
            run_hist(okj, hist_joint, allj);
        }
    };

    if (sc.ok) {
        auto thr = make_thresholds(eps, sc.den);
        accumulate(ScaledGeo{sc.lo.data(), sc.hi.data(), thr.near_le},
                   ScaledHullGeo{sc.lo.data(), sc.hi.data(), thr.joint_le});
    } else {
        accumulate(RationalGapGeo{&levels_[t], &eps}, RationalHullGeo{&levels_[t], &eps});
    }

    // suffix sums: N_m = number of windows with run >= m
    std::vector<std::int64_t> near_suffix(static_cast<std::size_t>(P) + 1, 0);
    std::vector<std::int64_t> joint_suffix(static_cast<std::size_t>(P) + 1, 0);
    std::int64_t accn = 0, accj = 0;
    for (std::int64_t mvar = P; mvar >= 1; --mvar) {
        accn += hist_near[static_cast<std::size_t>(mvar)];
        accj += hist_joint[static_cast<std::size_t>(mvar)];
        near_suffix[static_cast<std::size_t>(mvar)] = accn;
        joint_suffix[static_cast<std::size_t>(mvar)] = accj;
    }
    return PairCountProfile(t, std::move(near_suffix), std::move(joint_suffix));
}

// ---------------------------------------------------------------------------
// section-4.5 quantities

Rational IntervalSystem::epsilon_t(int t) const {
    if (t + 2 > depth()) throw std::out_of_range("epsilon_t: needs levels to t+2");
    const auto& grand = levels_[t + 2];
    Rational best(0);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << t); ++a) {
        std::uint64_t w[4] = {a, a | (1ull << t), a | (1ull << (t + 1)), a | (1ull << t) | (1ull << (t + 1))};
        std::sort(std::begin(w), std::end(w), [&](std::uint64_t x, std::uint64_t y) {
            return grand[x].lo < grand[y].lo;
        });
        for (int i = 0; i + 1 < 4; ++i) {
            if (!(grand[w[i]].hi < grand[w[i + 1]].lo))
                throw std::runtime_error("epsilon_t: grandchildren of " +
                                         word_to_string(Word::make(a, t)) + " are not pairwise disjoint");
        }
        // the two spatially-low grandchildren share digit t, the two high
        // ones carry the other value
        auto dig = [&](std::uint64_t v) { return (v >> t) & 1u; };
        if (!(dig(w[0]) == dig(w[1]) && dig(w[2]) == dig(w[3]) && dig(w[0]) != dig(w[2])))
            throw std::runtime_error("epsilon_t: star-label identity fails under " +
                                     word_to_string(Word::make(a, t)));
        best = max(best, grand[w[3]].lo - grand[w[0]].hi);
    }
    return best;
}

std::pair<std::int64_t, Rational> IntervalSystem::long_cylinders(int t, const Rational& eps) const {
    const auto& lev = level(t);
    std::int64_t count = 0;
    Rational total(0);
    for (const auto& k : lev) {
        Rational d = k.diam();
        if (d >= eps) {
            ++count;
            total += d;
        }
    }
    return {count, total};
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::ordered_json IntervalSystem::to_json(int max_table_depth) const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind_);
    j["depth"] = depth();
    if (kind_ == SystemKind::Theorem3) {
        nlohmann::ordered_json st = nlohmann::ordered_json::array();
        for (const auto& s : ladder_.stages) {
            st.push_back({{"n", s.n},
                          {"t", s.t},
                          {"eps", s.eps.to_fraction_string()},
                          {"t_prime", s.t_prime},
                          {"eps_prime", s.eps_prime.to_fraction_string()}});
        }
        j["ladder"] = std::move(st);
    }
    nlohmann::ordered_json nus = nlohmann::ordered_json::array();
    for (int t = 0; t <= depth(); ++t) nus.push_back(nu(t).to_fraction_string());
    j["nu"] = std::move(nus);
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (int t = 0; t <= std::min(depth(), max_table_depth); ++t) {
        nlohmann::ordered_json lev = nlohmann::ordered_json::array();
        for (std::uint64_t v = 0; v < levels_[t].size(); ++v) {
            lev.push_back({{"a", word_to_string(Word::make(v, t))},
                           {"lo", levels_[t][v].lo.to_fraction_string()},
                           {"hi", levels_[t][v].hi.to_fraction_string()}});
        }
        levels.push_back(std::move(lev));
    }
    j["levels"] = std::move(levels);
    return j;
}

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = pass;
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        recs.push_back({{"check", r.check}, {"level", r.level}, {"pass", r.pass}, {"detail", r.detail}});
    }
    j["records"] = std::move(recs);
    return j;
}

// ---------------------------------------------------------------------------
// validator

namespace {

struct LevelExtremes {
    Rational max_diam;
    std::uint64_t argmax = 0;
    bool disjoint = true;
    Rational min_gap;  // min over adjacent spatial pairs; meaningful when disjoint
    std::uint64_t gap_left = 0, gap_right = 0;
};

LevelExtremes level_extremes(const IntervalSystem& sys, int t) {
    const auto& lev = sys.level(t);
    const auto& sc = sys.scaled_level(t);
    LevelExtremes e;
    e.max_diam = lev[0].diam();
    for (std::uint64_t v = 0; v < lev.size(); ++v) {
        Rational d = lev[v].diam();
        if (d > e.max_diam) {
            e.max_diam = d;
            e.argmax = v;
        }
    }
    bool first = true;
    for (std::size_t i = 0; i + 1 < sc.spatial.size(); ++i) {
        const auto& a = lev[sc.spatial[i]];
        const auto& b = lev[sc.spatial[i + 1]];
        if (!(a.hi < b.lo)) e.disjoint = false;
        Rational g = b.lo - a.hi;
        if (first || g < e.min_gap) {
            e.min_gap = g;
            e.gap_left = sc.spatial[i];
            e.gap_right = sc.spatial[i + 1];
            first = false;
        }
    }
    return e;
}

}  // namespace

ValidationReport validate(const IntervalSystem& sys, int depth) {
    ValidationReport rep;
    depth = std::min(depth, sys.depth());
    auto add = [&rep](std::string check, int level, bool pass, std::string detail) {
        rep.records.push_back({std::move(check), level, pass, std::move(detail)});
        rep.pass = rep.pass && rep.records.back().pass;
    };

    {
        const auto& root = sys.level(0)[0];
        bool ok = root.lo == Rational(0) && root.hi == Rational(1);
        add("root-unit-interval", 0, ok, "K_o = [" + root.lo.to_fraction_string() + ", " + root.hi.to_fraction_string() + "]");
    }

    for (int t = 1; t <= depth; ++t) {
        const auto& par = sys.level(t - 1);
        const auto& lev = sys.level(t);
        std::int64_t violations = 0;
        std::string witness;
        for (std::uint64_t v = 0; v < par.size(); ++v) {
            const auto& p = par[v];
            const auto& c0 = lev[v];
            const auto& c1 = lev[v | (std::uint64_t{1} << (t - 1))];
            bool ok = p.lo == c0.lo && c1.hi == p.hi && c0.lo < c0.hi && c1.lo < c1.hi && c0.hi < c1.lo;
            if (!ok) {
                ++violations;
                if (witness.empty()) {
                    witness = "parent " + word_to_string(Word::make(v, t - 1)) + ": K_a0 = [" +
                              c0.lo.to_fraction_string() + ", " + c0.hi.to_fraction_string() + "], K_a1 = [" +
                              c1.lo.to_fraction_string() + ", " + c1.hi.to_fraction_string() + "]";
                }
            }
        }
        add("children-order-disjoint", t, violations == 0,
            violations == 0 ? std::to_string(par.size()) + " parents ok" :
                              std::to_string(violations) + " violations; first: " + witness);
    }

    for (int t = 1; t <= depth; ++t) {
        Rational prev = sys.nu(t - 1), cur = sys.nu(t);
        add("nu-strict-decay", t, cur < prev,
            "nu_" + std::to_string(t - 1) + " = " + prev.to_fraction_string() +
                ", nu_" + std::to_string(t) + " = " + cur.to_fraction_string());
    }

    if (sys.kind() == SystemKind::Theorem3) {
        for (const auto& s : sys.ladder().stages) {
            if (s.t_prime > depth) continue;
            auto e1 = level_extremes(sys, s.t);
            add("stage-" + std::to_string(s.n) + "-det1-diam", s.t, e1.max_diam <= s.eps,
                "max diam = " + e1.max_diam.to_fraction_string() + " at " +
                    word_to_string(Word::make(e1.argmax, s.t)) + ", eps_n = " + s.eps.to_fraction_string());
            if (e1.disjoint) {
                add("stage-" + std::to_string(s.n) + "-det1-gap", s.t, e1.min_gap >= s.eps,
                    "min gap = " + e1.min_gap.to_fraction_string() + " between " +
                        word_to_string(Word::make(e1.gap_left, s.t)) + " and " +
                        word_to_string(Word::make(e1.gap_right, s.t)) + ", eps_n = " + s.eps.to_fraction_string());
            } else {
                add("stage-" + std::to_string(s.n) + "-det1-gap", s.t, false, "skipped: cylinders overlap");
            }

            // the collapse scale needs small cylinders at level t_n + 1 away
            // from the all-ones branch, and the wide gap next to K_{1^t'}
            {
                int lvl = s.t + 1;
                const auto& lev = sys.level(lvl);
                std::uint64_t ones = (std::uint64_t{1} << lvl) - 1;
                Rational worst(0);
                std::uint64_t arg = 0;
                for (std::uint64_t v = 0; v < lev.size(); ++v) {
                    if (v == ones) continue;
                    Rational d = lev[v].diam();
                    if (d > worst) {
                        worst = d;
                        arg = v;
                    }
                }
                add("stage-" + std::to_string(s.n) + "-det0-diam", lvl, worst <= s.eps_prime,
                    "max diam off the ones branch = " + worst.to_fraction_string() + " at " +
                        word_to_string(Word::make(arg, lvl)) + ", eps_n' = " + s.eps_prime.to_fraction_string());

                Rational ones_diam = lev[ones].diam();
                Rational bound = Rational(s.n) * s.eps_prime;
                add("stage-" + std::to_string(s.n) + "-ones-cylinder", lvl, ones_diam > bound,
                    "diam K_{1...1} = " + ones_diam.to_fraction_string() + ", n*eps_n' = " + bound.to_fraction_string());
            }
            {
                bool ok = true;
                std::string detail;
                for (int lvl = s.t + 2; lvl <= s.t_prime; ++lvl) {
                    std::uint64_t ones = (std::uint64_t{1} << lvl) - 1;
                    std::uint64_t left = ones ^ (std::uint64_t{1} << (lvl - 1));  // 1^{s-1}0
                    Rational g = interval_gap(sys.level(lvl)[left], sys.level(lvl)[ones]);
                    if (lvl == s.t_prime)
                        detail = "dist(K_{1^{t'-1}0}, K_{1^{t'}}) = " + g.to_fraction_string() +
                                 ", eps_n' = " + s.eps_prime.to_fraction_string();
                    ok = ok && g > s.eps_prime;
                }
                add("stage-" + std::to_string(s.n) + "-det0-gap", s.t_prime, ok, detail);
            }
        }
    }
    return rep;
}

}  // namespace rqdet
