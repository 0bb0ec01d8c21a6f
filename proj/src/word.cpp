#include "rqdet/word.hpp"

#include <stdexcept>

namespace rqdet {

Word Word::make(std::uint64_t value, int length) {
    if (length < 0 || length > kMaxLength) throw std::out_of_range("Word: bad length");
    Word w;
    w.len = length;
    w.bits = length == 0 ? 0 : (value & ((1ull << length) - 1));
    return w;
}

Word Word::ones(int length) {
    return make(~0ull, length);
}

Word word_add(const Word& a, std::int64_t n) {
    if (a.len == 0) return a;
    std::uint64_t order = 1ull << a.len;
    std::uint64_t step = static_cast<std::uint64_t>(n % static_cast<std::int64_t>(order));
    // negative n: two's-complement wrap of the masked add already lands on
    // the inverse, so a plain add-and-mask is the whole group operation
    return Word::make(a.bits + step, a.len);
}

Word word_prefix(const Word& a, int s) {
    if (s < 0 || s > a.len) throw std::out_of_range("word_prefix: s out of range");
    return Word::make(a.bits, s);
}

bool word_in_cylinder(const Word& b, const Word& a) {
    if (a.len > b.len) return false;
    return word_prefix(b, a.len) == a;
}

std::string word_to_string(const Word& a) {
    std::string s;
    s.reserve(a.len);
    for (int i = 0; i < a.len; ++i) s.push_back(a.digit(i) ? '1' : '0');
    return s;
}

Word word_from_string(const std::string& s, int length_cap) {
    if (static_cast<int>(s.size()) > length_cap)
        throw std::out_of_range("Word: literal longer than the configured cap");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            bits |= 1ull << i;
        else if (s[i] != '0')
            throw std::invalid_argument("Word: digits must be 0/1");
    }
    return Word::make(bits, static_cast<int>(s.size()));
}

}  // namespace rqdet
