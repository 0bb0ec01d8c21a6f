#pragma once

#include <cstdint>
#include <string>

namespace rqdet {

// Binary address word a_0 a_1 ... a_{t-1} of the 2-adic odometer.  Digit 0 is
// the least significant one, so adding-machine carry (from digit 0 upward) is
// plain integer increment on value().  Rendering puts digit 0 leftmost.
struct Word {
    std::uint64_t bits = 0;  // digit i = (bits >> i) & 1
    int len = 0;

    // Hard structural bound; everyday callers should stay within
    // kDefaultLengthCap (all desk-scale experiments need t <= 20).
    static constexpr int kMaxLength = 63;
    static constexpr int kDefaultLengthCap = 32;

    static Word empty() { return Word{}; }
    static Word make(std::uint64_t value, int length);
    static Word zeros(int length) { return make(0, length); }
    static Word ones(int length);

    std::uint64_t value() const { return bits; }
    int length() const { return len; }
    int digit(int i) const { return static_cast<int>((bits >> i) & 1u); }
    bool is_all_ones() const { return len >= 0 && bits == (len == 64 ? ~0ull : ((1ull << len) - 1)); }
    bool is_zero() const { return bits == 0; }

    friend bool operator==(const Word& a, const Word& b) { return a.bits == b.bits && a.len == b.len; }
    friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }
};

// a + n in the cyclic group Sigma^t (order 2^t); n may be any integer and is
// reduced mod 2^t.  The empty word is its own successor.
Word word_add(const Word& a, std::int64_t n);

// first s digits a_0 ... a_{s-1}; throws std::out_of_range unless 0 <= s <= |a|
Word word_prefix(const Word& a, int s);

// true iff |a| <= |b| and b starts with a
bool word_in_cylinder(const Word& b, const Word& a);

std::string word_to_string(const Word& a);  // digit 0 first, "" for the empty word
Word word_from_string(const std::string& s, int length_cap = Word::kDefaultLengthCap);

}  // namespace rqdet
