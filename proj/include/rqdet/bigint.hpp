#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rqdet {

// Arbitrary-precision signed integer, sign-magnitude with 64-bit limbs
// (little-endian).  Sized for interval-endpoint arithmetic: values stay
// within a few hundred bits, so schoolbook multiplication and binary-shift
// division are fast enough everywhere they are used.
class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v);
    explicit BigInt(const std::string& decimal);

    static BigInt from_uint64(std::uint64_t v);
    static BigInt pow2(unsigned k);

    bool is_zero() const { return limbs_.empty(); }
    int sign() const { return neg_ ? -1 : (limbs_.empty() ? 0 : 1); }
    bool is_negative() const { return neg_; }

    BigInt abs() const;
    BigInt negated() const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    BigInt& operator+=(const BigInt& b) { *this = *this + b; return *this; }
    BigInt& operator-=(const BigInt& b) { *this = *this - b; return *this; }
    BigInt& operator*=(const BigInt& b) { *this = *this * b; return *this; }

    // Quotient truncated toward zero; remainder carries the dividend's sign.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);

    BigInt shifted_left(unsigned bits) const;
    BigInt shifted_right(unsigned bits) const;

    // -1 / 0 / +1 as a < b, a == b, a > b
    static int compare(const BigInt& a, const BigInt& b);
    friend bool operator==(const BigInt& a, const BigInt& b) { return compare(a, b) == 0; }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return compare(a, b) != 0; }
    friend bool operator<(const BigInt& a, const BigInt& b) { return compare(a, b) < 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return compare(a, b) <= 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return compare(a, b) > 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return compare(a, b) >= 0; }

    static BigInt gcd(BigInt a, BigInt b);  // non-negative result
    static BigInt lcm(const BigInt& a, const BigInt& b);

    unsigned bit_length() const;
    bool fits_int64() const;
    std::int64_t to_int64() const;  // requires fits_int64()
    bool fits_int128() const;
    __int128 to_int128() const;     // requires fits_int128()
    double to_double() const;

    std::string to_string() const;

    bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1u); }

private:
    std::vector<std::uint64_t> limbs_;
    bool neg_ = false;

    void trim();
    static int compare_mag(const std::vector<std::uint64_t>& a,
                           const std::vector<std::uint64_t>& b);
    static std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                              const std::vector<std::uint64_t>& b);
    // requires |a| >= |b|
    static std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                              const std::vector<std::uint64_t>& b);
    void mul_small(std::uint64_t f);
    void add_small(std::uint64_t v);
    std::uint64_t divmod_small(std::uint64_t d);  // in place, returns remainder
};

}  // namespace rqdet
