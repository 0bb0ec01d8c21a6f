#include "rqdet/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace rqdet {

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

void Rational::normalize() {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    if (den_.is_negative()) {
        den_ = den_.negated();
        num_ = num_.negated();
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (g != BigInt(1)) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = r.num_.negated();
    return r;
}

int Rational::compare(const Rational& a, const Rational& b) {
    if (a.num_.sign() != b.num_.sign()) return a.num_.sign() < b.num_.sign() ? -1 : 1;
    return BigInt::compare(a.num_ * b.den_, b.num_ * a.den_);
}

Rational Rational::abs() const {
    Rational r = *this;
    r.num_ = r.num_.abs();
    return r;
}

std::string Rational::to_string() const {
    if (den_ == BigInt(1)) return num_.to_string();
    return num_.to_string() + "/" + den_.to_string();
}

std::string Rational::to_fraction_string() const {
    return num_.to_string() + "/" + den_.to_string();
}

Rational Rational::parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rational: empty literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    }
    // decimal, possibly scientific
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '-' || s[i] == '+') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw std::invalid_argument("Rational: bad literal " + s);
            seen_dot = true;
        } else {
            digits += s[i];
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        }
    }
    if (!seen_digit) throw std::invalid_argument("Rational: bad literal " + s);
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        exp10 = std::stol(s.substr(i + 1));
        i = s.size();
    }
    if (i != s.size()) throw std::invalid_argument("Rational: bad literal " + s);

    BigInt num(digits.empty() ? "0" : digits);
    BigInt den(1);
    long e = exp10 - frac_digits;
    BigInt ten(10);
    for (long k = 0; k < e; ++k) num *= ten;
    for (long k = 0; k < -e; ++k) den *= ten;
    if (neg) num = num.negated();
    return Rational(std::move(num), std::move(den));
}

}  // namespace rqdet
