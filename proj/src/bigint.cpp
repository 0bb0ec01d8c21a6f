#include "rqdet/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rqdet {

namespace {
using u64 = std::uint64_t;
using u128 = unsigned __int128;
}  // namespace

BigInt::BigInt(std::int64_t v) {
    if (v == 0) return;
    neg_ = v < 0;
    u64 mag = neg_ ? (~static_cast<u64>(v) + 1u) : static_cast<u64>(v);
    limbs_.push_back(mag);
}

BigInt BigInt::from_uint64(u64 v) {
    BigInt r;
    if (v != 0) r.limbs_.push_back(v);
    return r;
}

BigInt BigInt::pow2(unsigned k) {
    BigInt r = BigInt(1);
    return r.shifted_left(k);
}

BigInt::BigInt(const std::string& decimal) {
    std::size_t i = 0;
    bool neg = false;
    if (i < decimal.size() && (decimal[i] == '-' || decimal[i] == '+')) {
        neg = decimal[i] == '-';
        ++i;
    }
    if (i >= decimal.size()) throw std::invalid_argument("BigInt: empty literal");
    for (; i < decimal.size(); ++i) {
        char c = decimal[i];
        if (c < '0' || c > '9') throw std::invalid_argument("BigInt: bad digit in literal");
        mul_small(10);
        add_small(static_cast<u64>(c - '0'));
    }
    neg_ = neg && !limbs_.empty();
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
}

BigInt BigInt::abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
}

BigInt BigInt::negated() const {
    BigInt r = *this;
    if (!r.limbs_.empty()) r.neg_ = !r.neg_;
    return r;
}

int BigInt::compare_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<u64> BigInt::add_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    const std::vector<u64>&x = a.size() >= b.size() ? a : b;
    const std::vector<u64>&y = a.size() >= b.size() ? b : a;
    std::vector<u64> r(x.size() + 1, 0);
    u64 carry = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        u128 s = static_cast<u128>(x[i]) + (i < y.size() ? y[i] : 0) + carry;
        r[i] = static_cast<u64>(s);
        carry = static_cast<u64>(s >> 64);
    }
    r[x.size()] = carry;
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

std::vector<u64> BigInt::sub_mag(const std::vector<u64>& a, const std::vector<u64>& b) {
    std::vector<u64> r(a.size(), 0);
    u64 borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        u64 bi = i < b.size() ? b[i] : 0;
        u64 t = a[i] - bi;
        u64 br2 = a[i] < bi;
        u64 t2 = t - borrow;
        u64 br3 = t < borrow;
        r[i] = t2;
        borrow = br2 | br3;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.neg_ == b.neg_) {
        r.limbs_ = BigInt::add_mag(a.limbs_, b.limbs_);
        r.neg_ = a.neg_;
    } else {
        int c = BigInt::compare_mag(a.limbs_, b.limbs_);
        if (c == 0) return r;
        if (c > 0) {
            r.limbs_ = BigInt::sub_mag(a.limbs_, b.limbs_);
            r.neg_ = a.neg_;
        } else {
            r.limbs_ = BigInt::sub_mag(b.limbs_, a.limbs_);
            r.neg_ = b.neg_;
        }
    }
    r.trim();
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + b.negated(); }

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.is_zero() || b.is_zero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
        u64 carry = 0;
        for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
            u128 cur = static_cast<u128>(a.limbs_[i]) * b.limbs_[j] + r.limbs_[i + j] + carry;
            r.limbs_[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        r.limbs_[i + b.limbs_.size()] += carry;
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
}

int BigInt::compare(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_ ? -1 : 1;
    int c = compare_mag(a.limbs_, b.limbs_);
    return a.neg_ ? -c : c;
}

unsigned BigInt::bit_length() const {
    if (limbs_.empty()) return 0;
    unsigned top = 64u - static_cast<unsigned>(__builtin_clzll(limbs_.back()));
    return static_cast<unsigned>((limbs_.size() - 1) * 64) + top;
}

BigInt BigInt::shifted_left(unsigned bits) const {
    if (is_zero() || bits == 0) {
        BigInt r = *this;
        return r;
    }
    unsigned words = bits / 64, rem = bits % 64;
    BigInt r;
    r.neg_ = neg_;
    r.limbs_.assign(limbs_.size() + words + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        r.limbs_[i + words] |= rem ? (limbs_[i] << rem) : limbs_[i];
        if (rem) r.limbs_[i + words + 1] |= limbs_[i] >> (64 - rem);
    }
    r.trim();
    return r;
}

BigInt BigInt::shifted_right(unsigned bits) const {
    unsigned words = bits / 64, rem = bits % 64;
    BigInt r;
    if (words >= limbs_.size()) return r;
    r.neg_ = neg_;
    r.limbs_.assign(limbs_.size() - words, 0);
    for (std::size_t i = 0; i < r.limbs_.size(); ++i) {
        u64 lo = limbs_[i + words] >> rem;
        u64 hi = (rem && i + words + 1 < limbs_.size()) ? (limbs_[i + words + 1] << (64 - rem)) : 0;
        r.limbs_[i] = rem ? (lo | hi) : limbs_[i + words];
    }
    r.trim();
    return r;
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
    int cm = compare_mag(a.limbs_, b.limbs_);
    if (cm < 0) {
        q = BigInt();
        r = a;
        return;
    }
    if (b.limbs_.size() == 1) {
        BigInt quot = a;
        quot.neg_ = false;
        u64 rem_small = quot.divmod_small(b.limbs_[0]);
        quot.neg_ = (a.neg_ != b.neg_) && !quot.is_zero();
        q = std::move(quot);
        r = BigInt::from_uint64(rem_small);
        if (a.neg_ && !r.is_zero()) r.neg_ = true;
        return;
    }
    // binary long division on magnitudes
    BigInt rem = a.abs();
    BigInt den = b.abs();
    unsigned shift = rem.bit_length() - den.bit_length();
    BigInt quot;
    quot.limbs_.assign(shift / 64 + 1, 0);
    BigInt d = den.shifted_left(shift);
    for (unsigned s = shift + 1; s-- > 0;) {
        if (compare_mag(d.limbs_, rem.limbs_) <= 0) {
            rem = rem - d;
            quot.limbs_[s / 64] |= (u64{1} << (s % 64));
        }
        d = d.shifted_right(1);
    }
    quot.trim();
    rem.trim();
    quot.neg_ = (a.neg_ != b.neg_) && !quot.is_zero();
    rem.neg_ = a.neg_ && !rem.is_zero();
    q = std::move(quot);
    r = std::move(rem);
}

BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    return r;
}

namespace {

unsigned trailing_zero_bits(const std::vector<std::uint64_t>& limbs) {
    unsigned tz = 0;
    for (std::uint64_t l : limbs) {
        if (l == 0) {
            tz += 64;
        } else {
            tz += static_cast<unsigned>(__builtin_ctzll(l));
            break;
        }
    }
    return tz;
}

std::uint64_t gcd_u64(std::uint64_t x, std::uint64_t y) {
    while (y) {
        std::uint64_t t = x % y;
        x = y;
        y = t;
    }
    return x;
}

}  // namespace

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.neg_ = false;
    b.neg_ = false;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.limbs_.size() == 1 && b.limbs_.size() == 1)
        return from_uint64(gcd_u64(a.limbs_[0], b.limbs_[0]));
    // binary gcd with bulk shifts
    unsigned az = trailing_zero_bits(a.limbs_);
    unsigned bz = trailing_zero_bits(b.limbs_);
    a = a.shifted_right(az);
    b = b.shifted_right(bz);
    unsigned common = std::min(az, bz);
    while (true) {
        if (a.limbs_.size() == 1 && b.limbs_.size() == 1) {
            b = from_uint64(gcd_u64(a.limbs_[0], b.limbs_[0]));
            break;
        }
        int c = compare_mag(a.limbs_, b.limbs_);
        if (c == 0) break;
        if (c < 0) std::swap(a, b);
        a = a - b;
        if (a.is_zero()) break;
        a = a.shifted_right(trailing_zero_bits(a.limbs_));
    }
    return b.shifted_left(common);
}

BigInt BigInt::lcm(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt();
    BigInt g = gcd(a, b);
    return (a.abs() / g) * b.abs();
}

bool BigInt::fits_int64() const {
    if (limbs_.size() > 1) return false;
    if (limbs_.empty()) return true;
    u64 lim = neg_ ? (u64{1} << 63) : ((u64{1} << 63) - 1);
    return limbs_[0] <= lim;
}

std::int64_t BigInt::to_int64() const {
    if (!fits_int64()) throw std::overflow_error("BigInt: does not fit int64");
    if (limbs_.empty()) return 0;
    return neg_ ? -static_cast<std::int64_t>(limbs_[0] - 1) - 1
                : static_cast<std::int64_t>(limbs_[0]);
}

bool BigInt::fits_int128() const { return bit_length() <= 126; }

__int128 BigInt::to_int128() const {
    if (!fits_int128()) throw std::overflow_error("BigInt: does not fit int128");
    u128 mag = 0;
    if (limbs_.size() > 0) mag = limbs_[0];
    if (limbs_.size() > 1) mag |= static_cast<u128>(limbs_[1]) << 64;
    __int128 v = static_cast<__int128>(mag);
    return neg_ ? -v : v;
}

double BigInt::to_double() const {
    if (limbs_.empty()) return 0.0;
    double v = 0.0;
    // the top three limbs carry all double precision
    std::size_t start = limbs_.size() > 3 ? limbs_.size() - 3 : 0;
    for (std::size_t i = limbs_.size(); i-- > start;) v = v * 18446744073709551616.0 + static_cast<double>(limbs_[i]);
    v = std::ldexp(v, static_cast<int>(start) * 64);
    return neg_ ? -v : v;
}

void BigInt::mul_small(u64 f) {
    if (f == 0 || limbs_.empty()) {
        limbs_.clear();
        neg_ = false;
        return;
    }
    u64 carry = 0;
    for (auto& l : limbs_) {
        u128 cur = static_cast<u128>(l) * f + carry;
        l = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    if (carry) limbs_.push_back(carry);
}

void BigInt::add_small(u64 v) {
    u64 carry = v;
    for (std::size_t i = 0; carry && i < limbs_.size(); ++i) {
        u128 cur = static_cast<u128>(limbs_[i]) + carry;
        limbs_[i] = static_cast<u64>(cur);
        carry = static_cast<u64>(cur >> 64);
    }
    if (carry) limbs_.push_back(carry);
}

std::uint64_t BigInt::divmod_small(u64 d) {
    u128 rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        u128 cur = (rem << 64) | limbs_[i];
        limbs_[i] = static_cast<u64>(cur / d);
        rem = cur % d;
    }
    trim();
    return static_cast<u64>(rem);
}

std::string BigInt::to_string() const {
    if (limbs_.empty()) return "0";
    BigInt tmp = *this;
    std::string out;
    while (!tmp.limbs_.empty()) {
        u64 chunk = tmp.divmod_small(1000000000000000000ull);
        if (tmp.limbs_.empty()) {
            out = std::to_string(chunk) + out;
        } else {
            std::string part = std::to_string(chunk);
            out = std::string(18 - part.size(), '0') + part + out;
        }
    }
    return neg_ ? "-" + out : out;
}

}  // namespace rqdet
