#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aakern/alphabet.hpp"

namespace aakern {

struct FastaRecord {
    std::string allele_name; // extracted from the header
    std::string header;      // full header line without '>'
    std::string sequence;    // uppercase, whitespace stripped
};

struct FastaReject {
    std::string allele_name;
    std::string reason; // includes position info where applicable
};

struct FastaParseResult {
    std::vector<FastaRecord> records; // in file order
    std::vector<FastaReject> rejected;
};

// Parses FASTA text. Residues are validated against the 20-letter alphabet
// ('X' and other unknowns reject the record with a reported position);
// lowercase is normalized. Headers must carry a parseable name: the first
// token containing '*', else the first token.
FastaParseResult parse_fasta(std::istream& in);

// Where the markers sit relative to the extracted region.
enum class MarkerConvention {
    Inclusive, // from the start of the first RFL through the end of the last TVQ
    Exclusive, // strictly between the markers
};

struct NormalForm {
    AminoChain chain;
    bool short_flag = false; // length < 81
};

// Extracts the polymorphic region delimited by the first "RFL" and the last
// "TVQ". Returns nullopt with reason "no RFL" / "no TVQ" when a marker is
// missing (or the last TVQ ends before the first RFL).
std::optional<NormalForm> normal_form(const std::string& sequence,
                                      MarkerConvention convention = MarkerConvention::Inclusive,
                                      std::string* reason = nullptr);

struct RegistryEntry {
    std::string allele_name;
    NormalForm form;
};

struct RegistryExclusion {
    std::string allele_name;
    std::string reason;
};

struct AlleleRegistry {
    std::vector<RegistryEntry> entries; // ordered by WHO name
    std::vector<RegistryExclusion> exclusions;

    bool contains(const std::string& allele_name) const;
    const RegistryEntry& find(const std::string& allele_name) const;

    std::string to_tsv() const;            // name, normal form, short flag
    std::string exclusions_to_tsv() const; // name, reason
};

struct RegistryOptions {
    bool drop_nonexpressed = true;             // null alleles (name suffix 'N')
    std::vector<std::string> exclude_families; // e.g. {"DRB1*11", "DRB1*13"}
    MarkerConvention convention = MarkerConvention::Inclusive;
};

// Natural ordering on the asterisk/colon-delimited name fields: gene prefix
// lexically, then each numeric field numerically (suffix letters after).
bool who_name_less(const std::string& a, const std::string& b);

// Family key of a WHO allele name: gene plus the first two digits of the
// first field ("DRB1*11:01" and "DRB1*1101" both map to "DRB1*11").
std::string family_of(const std::string& allele_name);

// Orders records by WHO name, drops non-expressed alleles, extracts normal
// forms, deduplicates equal normal forms keeping the first, and applies the
// family exclusion list. Every dropped record lands in the exclusion log.
AlleleRegistry build_registry(const std::vector<FastaRecord>& records,
                              const RegistryOptions& options = {});

} // namespace aakern
