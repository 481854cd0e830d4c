#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aakern {

// The 20 standard amino acids, single-letter coded, in the fixed row order
// used by the embedded substitution table.
class Alphabet {
public:
    static constexpr std::size_t kSize = 20;

    static constexpr std::array<char, kSize> symbols = {
        'A', 'R', 'N', 'D', 'C', 'Q', 'E', 'G', 'H', 'I',
        'L', 'K', 'M', 'F', 'P', 'S', 'T', 'W', 'Y', 'V'};

    // Index of an uppercase residue letter, or -1 if not in the alphabet.
    static int index_of(char c) noexcept {
        const unsigned char u = static_cast<unsigned char>(c);
        return lookup_table()[u];
    }

    static bool contains(char c) noexcept { return index_of(c) >= 0; }

    static char symbol(std::size_t i) { return symbols.at(i); }

private:
    static const std::array<int, 256>& lookup_table() noexcept {
        static const std::array<int, 256> table = [] {
            std::array<int, 256> t{};
            t.fill(-1);
            for (std::size_t i = 0; i < kSize; ++i)
                t[static_cast<unsigned char>(symbols[i])] = static_cast<int>(i);
            return t;
        }();
        return table;
    }
};

// A validated, nonempty residue sequence over the 20-letter alphabet.
// Stored as alphabet indices; the printable form is recoverable.
class AminoChain {
public:
    AminoChain() = default;

    // Throws DataError on empty input or an illegal character (index reported).
    // Lowercase letters are accepted and normalized.
    static AminoChain parse(std::string_view text);

    std::size_t size() const noexcept { return codes_.size(); }
    std::uint8_t operator[](std::size_t i) const noexcept { return codes_[i]; }
    const std::vector<std::uint8_t>& codes() const noexcept { return codes_; }

    std::string to_string() const;

    bool operator==(const AminoChain& other) const noexcept { return codes_ == other.codes_; }
    bool operator!=(const AminoChain& other) const noexcept { return codes_ != other.codes_; }

private:
    std::vector<std::uint8_t> codes_;
};

// Alias for the ingest-facing name.
AminoChain validate_chain(std::string_view text);

} // namespace aakern
