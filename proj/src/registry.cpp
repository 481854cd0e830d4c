#include "aakern/registry.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>

#include "aakern/errors.hpp"

namespace aakern {

namespace {

std::string extract_allele_name(const std::string& header) {
    std::istringstream tokens(header);
    std::string token, first;
    while (tokens >> token) {
        if (first.empty())
            first = token;
        if (token.find('*') != std::string::npos)
            return token;
    }
    return first;
}

struct NameField {
    long number = -1;   // leading digits, -1 if none
    std::string suffix; // remainder (expression letters etc.)
};

// Splits "DRB1*14:01:01N" into gene "DRB1" and fields {14, 01, 01N}.
struct ParsedName {
    std::string gene;
    std::vector<NameField> fields;
};

ParsedName parse_who_name(const std::string& name) {
    ParsedName parsed;
    const std::size_t star = name.find('*');
    if (star == std::string::npos) {
        parsed.gene = name;
        return parsed;
    }
    parsed.gene = name.substr(0, star);
    std::size_t start = star + 1;
    while (start <= name.size()) {
        const std::size_t colon = name.find(':', start);
        const std::string part =
            name.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        NameField field;
        std::size_t i = 0;
        while (i < part.size() && std::isdigit(static_cast<unsigned char>(part[i])))
            ++i;
        if (i > 0)
            field.number = std::stol(part.substr(0, i));
        field.suffix = part.substr(i);
        parsed.fields.push_back(std::move(field));
        if (colon == std::string::npos)
            break;
        start = colon + 1;
    }
    return parsed;
}

} // namespace

FastaParseResult parse_fasta(std::istream& in) {
    FastaParseResult result;
    std::string line;
    std::string header;
    std::string sequence;
    bool have_record = false;
    std::string reject_reason;

    const auto flush = [&]() {
        if (!have_record)
            return;
        const std::string name = extract_allele_name(header);
        if (name.empty()) {
            result.rejected.push_back({header, "malformed header"});
        } else if (!reject_reason.empty()) {
            result.rejected.push_back({name, reject_reason});
        } else if (sequence.empty()) {
            result.rejected.push_back({name, "empty sequence"});
        } else {
            result.records.push_back({name, header, sequence});
        }
        header.clear();
        sequence.clear();
        reject_reason.clear();
        have_record = false;
    };

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty() && line[0] == '>') {
            flush();
            header = line.substr(1);
            have_record = true;
            continue;
        }
        if (!have_record) {
            if (line.find_first_not_of(" \t") != std::string::npos)
                throw DataError("sequence data before any FASTA header");
            continue;
        }
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c)))
                continue;
            const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (!Alphabet::contains(up)) {
                if (reject_reason.empty())
                    reject_reason = "illegal residue '" + std::string(1, c) + "' at position " +
                                    std::to_string(sequence.size());
                // keep consuming the record so the next one parses cleanly
                sequence.push_back('?');
            } else {
                sequence.push_back(up);
            }
        }
    }
    flush();
    return result;
}

std::optional<NormalForm> normal_form(const std::string& sequence, MarkerConvention convention,
                                      std::string* reason) {
    const std::size_t rfl = sequence.find("RFL");
    if (rfl == std::string::npos) {
        if (reason)
            *reason = "no RFL";
        return std::nullopt;
    }
    const std::size_t tvq = sequence.rfind("TVQ");
    if (tvq == std::string::npos || tvq + 3 <= rfl) {
        if (reason)
            *reason = "no TVQ";
        return std::nullopt;
    }

    std::size_t begin, end; // [begin, end)
    if (convention == MarkerConvention::Inclusive) {
        begin = rfl;
        end = tvq + 3;
    } else {
        begin = rfl + 3;
        end = tvq;
        if (end <= begin) {
            if (reason)
                *reason = "no TVQ";
            return std::nullopt;
        }
    }

    NormalForm form;
    form.chain = AminoChain::parse(sequence.substr(begin, end - begin));
    form.short_flag = form.chain.size() < 81;
    return form;
}

bool who_name_less(const std::string& a, const std::string& b) {
    const ParsedName pa = parse_who_name(a), pb = parse_who_name(b);
    if (pa.gene != pb.gene)
        return pa.gene < pb.gene;
    const std::size_t n = std::max(pa.fields.size(), pb.fields.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= pa.fields.size())
            return true; // shorter name first
        if (i >= pb.fields.size())
            return false;
        if (pa.fields[i].number != pb.fields[i].number)
            return pa.fields[i].number < pb.fields[i].number;
        if (pa.fields[i].suffix != pb.fields[i].suffix)
            return pa.fields[i].suffix < pb.fields[i].suffix;
    }
    return false;
}

std::string family_of(const std::string& allele_name) {
    const ParsedName parsed = parse_who_name(allele_name);
    if (parsed.fields.empty() || parsed.fields[0].number < 0)
        return parsed.gene;
    std::string digits = std::to_string(parsed.fields[0].number);
    if (digits.size() < 2)
        digits = "0" + digits;
    return parsed.gene + "*" + digits.substr(0, 2);
}

namespace {

bool is_nonexpressed(const std::string& allele_name) {
    const ParsedName parsed = parse_who_name(allele_name);
    if (parsed.fields.empty())
        return false;
    const std::string& suffix = parsed.fields.back().suffix;
    return !suffix.empty() && suffix.back() == 'N';
}

} // namespace

bool AlleleRegistry::contains(const std::string& allele_name) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const RegistryEntry& e) { return e.allele_name == allele_name; });
}

const RegistryEntry& AlleleRegistry::find(const std::string& allele_name) const {
    for (const auto& e : entries)
        if (e.allele_name == allele_name)
            return e;
    throw DataError("allele not in registry: " + allele_name);
}

std::string AlleleRegistry::to_tsv() const {
    std::string out = "allele\tnormal_form\tshort\n";
    for (const auto& e : entries) {
        out += e.allele_name;
        out.push_back('\t');
        out += e.form.chain.to_string();
        out.push_back('\t');
        out += e.form.short_flag ? "1" : "0";
        out.push_back('\n');
    }
    return out;
}

std::string AlleleRegistry::exclusions_to_tsv() const {
    std::string out = "allele\treason\n";
    for (const auto& e : exclusions) {
        out += e.allele_name;
        out.push_back('\t');
        out += e.reason;
        out.push_back('\n');
    }
    return out;
}

AlleleRegistry build_registry(const std::vector<FastaRecord>& records,
                              const RegistryOptions& options) {
    std::vector<FastaRecord> ordered = records;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const FastaRecord& a, const FastaRecord& b) {
                         return who_name_less(a.allele_name, b.allele_name);
                     });

    AlleleRegistry registry;
    std::map<std::string, std::string> seen_forms; // normal form -> first allele name
    for (const auto& record : ordered) {
        if (options.drop_nonexpressed && is_nonexpressed(record.allele_name)) {
            registry.exclusions.push_back({record.allele_name, "non-expressed"});
            continue;
        }
        const std::string family = family_of(record.allele_name);
        if (std::find(options.exclude_families.begin(), options.exclude_families.end(), family) !=
            options.exclude_families.end()) {
            registry.exclusions.push_back({record.allele_name, "excluded family " + family});
            continue;
        }
        std::string reason;
        const auto form = normal_form(record.sequence, options.convention, &reason);
        if (!form) {
            registry.exclusions.push_back({record.allele_name, reason});
            continue;
        }
        const std::string key = form->chain.to_string();
        const auto [it, inserted] = seen_forms.emplace(key, record.allele_name);
        if (!inserted) {
            registry.exclusions.push_back(
                {record.allele_name, "duplicate normal form of " + it->second});
            continue;
        }
        registry.entries.push_back({record.allele_name, *form});
    }
    return registry;
}

} // namespace aakern
