#include "aakern/alphabet.hpp"

#include <cctype>

#include "aakern/errors.hpp"

namespace aakern {

AminoChain AminoChain::parse(std::string_view text) {
    if (text.empty())
        throw DataError("empty chain");
    AminoChain chain;
    chain.codes_.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        const int idx = Alphabet::index_of(up);
        if (idx < 0)
            throw DataError("illegal residue '" + std::string(1, text[i]) + "' at index " +
                            std::to_string(i));
        chain.codes_.push_back(static_cast<std::uint8_t>(idx));
    }
    return chain;
}

std::string AminoChain::to_string() const {
    std::string out;
    out.reserve(codes_.size());
    for (std::uint8_t c : codes_)
        out.push_back(Alphabet::symbols[c]);
    return out;
}

AminoChain validate_chain(std::string_view text) { return AminoChain::parse(text); }

} // namespace aakern
