#include "heavy/systems.hpp"

#include <algorithm>

namespace heavy {

MorseSequence::MorseSequence(std::size_t prefix_length)
{
    bits_ = {0};
    const std::size_t want = std::max<std::size_t>(prefix_length, 1);
    while (bits_.size() < want) {
        std::vector<std::uint8_t> next;
        next.reserve(bits_.size() * 2);
        for (auto b : bits_) {
            next.push_back(b);
            next.push_back(static_cast<std::uint8_t>(1 - b));
        }
        bits_ = std::move(next);
    }
    bits_.resize(want);
}

int MorseSequence::bit(std::uint64_t n) const
{
    int flip = 0;
    while (n >= bits_.size()) {
        flip ^= static_cast<int>(n & 1u);
        n >>= 1;
    }
    return bits_[n] ^ flip;
}

std::string morse_prefix(std::size_t length)
{
    MorseSequence seq(length);
    std::string out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        out.push_back(seq.bit(i) ? '1' : '0');
    return out;
}

MorseProfile morse_profile(const MorseSequence& seq, std::uint64_t offset, std::uint64_t horizon)
{
    MorseProfile out;
    std::int64_t d = 0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        d += 2 * seq.bit(offset + n - 1) - 1;
        if (n == 1 || d < out.min_twice_deficit)
            out.min_twice_deficit = d;
        if (d == 0)
            ++out.zero_count;
    }
    return out;
}

}  // namespace heavy
