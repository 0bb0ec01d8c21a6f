#include "rqdet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rqdet {

OdometerExtension::OdometerExtension(std::shared_ptr<const IntervalSystem> sys, int depth)
    : sys_(std::move(sys)) {
    if (!sys_) throw std::invalid_argument("OdometerExtension: null system");
    if (sys_->depth() < 2) throw std::invalid_argument("OdometerExtension: system depth >= 2 required");
    if (depth < 1) throw std::invalid_argument("OdometerExtension: depth >= 1 required");
    depth_ = std::min(depth, sys_->depth() - 1);
    dlo_.resize(depth_ + 2);
    dhi_.resize(depth_ + 2);
    for (int t = 0; t <= depth_ + 1; ++t) {
        const auto& lev = sys_->level(t);
        dlo_[t].resize(lev.size());
        dhi_[t].resize(lev.size());
        for (std::size_t v = 0; v < lev.size(); ++v) {
            dlo_[t][v] = lev[v].lo.to_double();
            dhi_[t][v] = lev[v].hi.to_double();
        }
    }
}

namespace {

// one descent step shared by the double and the exact path; Level(t, v)
// yields (lo, hi) in the scalar type
template <class Scalar, class Level>
Scalar odometer_eval_generic(Scalar x, int depth, Level level) {
    std::uint64_t bits = 0;
    int len = 0;
    while (true) {
        std::uint64_t ones = (std::uint64_t{1} << len) - 1;
        if (len == depth) {
            // cap rule: affine K_a -> K_{a+1}
            std::uint64_t next = (bits + 1) & ones;
            auto [alo, ahi] = level(len, bits);
            auto [blo, bhi] = level(len, next);
            Scalar srcd = ahi - alo;
            Scalar dstd = bhi - blo;
            if (!(srcd > Scalar(0))) return blo;
            if (bits == ones) return bhi - (x - alo) * dstd / srcd;  // fold cylinder
            return blo + (x - alo) * dstd / srcd;
        }
        std::uint64_t c0 = bits;
        std::uint64_t c1 = bits | (std::uint64_t{1} << len);
        auto [l0, h0] = level(len + 1, c0);
        auto [l1, h1] = level(len + 1, c1);
        if (x <= h0) {
            ++len;  // left child, same bits
            continue;
        }
        if (x >= l1) {
            bits = c1;
            ++len;
            continue;
        }
        // x lies in the gap between the children of a = bits (level len)
        if (bits != ones) {
            std::uint64_t next = (bits + 1) & ones;
            auto [nl0, nh0] = level(len + 1, next);
            auto [nl1, nh1] = level(len + 1, next | (std::uint64_t{1} << len));
            (void)nl0;
            (void)nh1;
            Scalar srcd = l1 - h0;
            Scalar dstd = nl1 - nh0;
            if (!(srcd > Scalar(0))) return nh0;
            return nh0 + (x - h0) * dstd / srcd;
        }
        // fold gap of K_{1^t}: reversing onto [y_{0^{t+1} 1}, z_{0^t}]
        auto [tlo, tlo_hi] = level(len + 2, std::uint64_t{1} << (len + 1));  // K_{0^{t+1} 1}
        (void)tlo_hi;
        auto [zlo, zhi] = level(len, 0);  // K_{0^t}
        (void)zlo;
        Scalar srcd = l1 - h0;
        Scalar dstd = zhi - tlo;
        if (!(srcd > Scalar(0))) return tlo;
        return zhi - (x - h0) * dstd / srcd;
    }
}

}  // namespace

double OdometerExtension::eval(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("OdometerExtension: x outside [0,1]");
    double y = odometer_eval_generic<double>(
        x, depth_, [this](int t, std::uint64_t v) { return std::pair{dlo_[t][v], dhi_[t][v]}; });
    return std::clamp(y, 0.0, 1.0);
}

Rational OdometerExtension::eval_exact(const Rational& x) const {
    if (x < Rational(0) || x > Rational(1)) throw std::domain_error("OdometerExtension: x outside [0,1]");
    return odometer_eval_generic<Rational>(x, depth_, [this](int t, std::uint64_t v) {
        const auto& k = sys_->level(t)[v];
        return std::pair{k.lo, k.hi};
    });
}

MapSpec MapSpec::logistic(double r) {
    if (!(r >= 0.0 && r <= 4.0)) throw std::domain_error("logistic: r outside [0,4]");
    MapSpec m;
    m.kind = MapKind::Logistic;
    m.param = r;
    m.label = "logistic:" + std::to_string(r);
    return m;
}

MapSpec MapSpec::tent(double s) {
    if (!(s >= 0.0 && s <= 2.0)) throw std::domain_error("tent: s outside [0,2]");
    MapSpec m;
    m.kind = MapKind::Tent;
    m.param = s;
    m.label = "tent:" + std::to_string(s);
    return m;
}

MapSpec MapSpec::odometer(std::shared_ptr<const IntervalSystem> sys, int depth) {
    MapSpec m;
    m.kind = MapKind::Odometer;
    m.sys = sys;
    m.ext = std::make_shared<OdometerExtension>(sys, depth);
    m.param = 0.0;
    m.label = "odometer:" + to_string(sys->kind()) + ":depth" + std::to_string(m.ext->depth());
    return m;
}

double eval_map(const MapSpec& m, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("eval_map: x outside [0,1]");
    switch (m.kind) {
        case MapKind::Logistic:
            return std::clamp(m.param * x * (1.0 - x), 0.0, 1.0);
        case MapKind::Tent:
            return std::clamp(m.param * std::min(x, 1.0 - x), 0.0, 1.0);
        case MapKind::Odometer:
            return m.ext->eval(x);
    }
    throw std::logic_error("eval_map: bad kind");
}

Trajectory make_trajectory(const MapSpec& m, double x0, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("make_trajectory: length >= 1 required");
    Trajectory t;
    t.source = m.label + " x0=" + std::to_string(x0);
    t.values.resize(static_cast<std::size_t>(n));
    double x = x0;
    for (std::int64_t i = 0; i < n; ++i) {
        t.values[static_cast<std::size_t>(i)] = x;
        if (i + 1 < n) x = eval_map(m, x);
    }
    return t;
}

Trajectory make_tent2_trajectory(std::int64_t num, std::int64_t den, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("make_tent2_trajectory: length >= 1 required");
    if (den <= 0 || num < 0 || num > den) throw std::domain_error("make_tent2_trajectory: x0 outside [0,1]");
    if (den > (std::int64_t{1} << 61)) throw std::overflow_error("make_tent2_trajectory: denominator too large");
    Trajectory t;
    t.source = "tent:2 x0=" + std::to_string(num) + "/" + std::to_string(den);
    t.values.resize(static_cast<std::size_t>(n));
    ExactOrbit ex;
    ex.den = BigInt(den);
    ex.scaled.resize(static_cast<std::size_t>(n));
    std::int64_t x = num;
    const double dden = static_cast<double>(den);
    for (std::int64_t i = 0; i < n; ++i) {
        ex.scaled[static_cast<std::size_t>(i)] = x;
        t.values[static_cast<std::size_t>(i)] = static_cast<double>(x) / dden;
        std::int64_t two = 2 * x;
        x = two <= den ? two : 2 * den - two;
    }
    t.exact = std::move(ex);
    return t;
}

Trajectory make_symbolic_trajectory(std::shared_ptr<const IntervalSystem> sys, const Word& alpha,
                                    std::int64_t n) {
    if (!sys) throw std::invalid_argument("make_symbolic_trajectory: null system");
    if (alpha.len < 1) throw std::invalid_argument("make_symbolic_trajectory: |alpha| >= 1 required");
    if (alpha.len > sys->depth()) throw std::out_of_range("make_symbolic_trajectory: depth cap exceeded");
    if (n < 1) throw std::invalid_argument("make_symbolic_trajectory: length >= 1 required");
    const auto& sc = sys->scaled_level(alpha.len);
    if (!sc.ok || !sc.den.fits_int64())
        throw std::length_error("make_symbolic_trajectory: level denominator exceeds int64");
    Trajectory t;
    t.source = "symbolic:" + to_string(sys->kind()) + " alpha=" + word_to_string(alpha);
    t.values.resize(static_cast<std::size_t>(n));
    ExactOrbit ex;
    ex.den = sc.den;
    ex.scaled.resize(static_cast<std::size_t>(n));
    const double dden = sc.den.to_double();
    const std::uint64_t mask = (std::uint64_t{1} << alpha.len) - 1;
    for (std::int64_t i = 0; i < n; ++i) {
        std::uint64_t v = (alpha.bits + static_cast<std::uint64_t>(i)) & mask;
        std::int64_t p = static_cast<std::int64_t>(sc.lo[v]);
        ex.scaled[static_cast<std::size_t>(i)] = p;
        t.values[static_cast<std::size_t>(i)] = static_cast<double>(p) / dden;
    }
    t.exact = std::move(ex);
    t.symbolic = SymbolicInfo{std::move(sys), alpha};
    return t;
}

RationalInterval symbolic_enclosure(const Trajectory& traj, std::int64_t i) {
    if (!traj.symbolic) throw std::logic_error("symbolic_enclosure: not a symbolic trajectory");
    const auto& info = *traj.symbolic;
    return info.sys->interval(word_add(info.alpha, i));
}

EnclosureDecision enclosure_recurrent(const IntervalSystem& sys, const Word& a, const Word& b,
                                      const Rational& eps) {
    const auto& ka = sys.interval(a);
    const auto& kb = sys.interval(b);
    if (interval_hull_diam(ka, kb) <= eps) return EnclosureDecision::Yes;
    if (interval_gap(ka, kb) > eps) return EnclosureDecision::No;
    return EnclosureDecision::Undecided;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.symbolic) {
        os << "index,address,lo,hi\n";
        const auto& info = *traj.symbolic;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            Word w = word_add(info.alpha, static_cast<std::int64_t>(i));
            const auto& k = info.sys->interval(w);
            os << i << "," << word_to_string(w) << "," << k.lo.to_fraction_string() << ","
               << k.hi.to_fraction_string() << "\n";
        }
        return;
    }
    os << "index,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < traj.size(); ++i) os << i << "," << traj.values[i] << "\n";
}

}  // namespace rqdet
