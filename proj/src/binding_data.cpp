#include "aakern/binding_data.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "aakern/errors.hpp"

namespace aakern {

namespace {

double parse_double_strict(const std::string& text) {
    std::size_t consumed = 0;
    const double v = std::stod(text, &consumed);
    if (consumed != text.size())
        throw std::invalid_argument("trailing characters");
    return v;
}

int parse_int_strict(const std::string& text) {
    std::size_t consumed = 0;
    const int v = std::stoi(text, &consumed);
    if (consumed != text.size())
        throw std::invalid_argument("trailing characters");
    return v;
}

} // namespace

std::vector<std::string> BindingDataset::alleles() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : records)
        if (seen.insert(r.allele_name).second)
            out.push_back(r.allele_name);
    return out;
}

bool BindingDataset::has_folds() const {
    return !records.empty() &&
           std::all_of(records.begin(), records.end(),
                       [](const BindingRecord& r) { return r.fold.has_value(); });
}

std::pair<BindingDataset, IngestReport> ingest_binding_tsv(std::istream& in,
                                                           const NormalizationSpec& spec,
                                                           DedupPolicy policy) {
    IngestReport report;
    struct Row {
        BindingRecord record;
        std::size_t line;
    };
    std::vector<Row> rows;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos)
                break;
            start = tab + 1;
        }
        if (lineno == 1 && fields[0] == "allele_name")
            continue; // header
        if (fields.size() < 3 || fields.size() > 4)
            throw DataError("line " + std::to_string(lineno) +
                            ": expected allele<TAB>peptide<TAB>value[<TAB>fold]");

        ++report.rows_read;
        Row row;
        row.line = lineno;
        row.record.allele_name = fields[0];
        try {
            row.record.peptide = AminoChain::parse(fields[1]);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(lineno) + ": " + e.what());
        }
        try {
            row.record.affinity = parse_double_strict(fields[2]);
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(lineno) + ": bad value '" + fields[2] + "'");
        }
        if (fields.size() == 4 && !fields[3].empty()) {
            try {
                row.record.fold = parse_int_strict(fields[3]);
            } catch (const std::exception&) {
                throw DataError("line " + std::to_string(lineno) + ": bad fold '" + fields[3] +
                                "'");
            }
        }
        if (spec.values_are_raw_ic50) {
            if (!(row.record.affinity > 0.0))
                throw DataError("line " + std::to_string(lineno) + ": IC50 must be positive");
            row.record.affinity = normalize_ic50(row.record.affinity, spec.base);
        } else if (row.record.affinity < 0.0 || row.record.affinity > 1.0) {
            throw DataError("line " + std::to_string(lineno) +
                            ": affinity outside [0,1]; pass raw IC50 values explicitly");
        }

        if (row.record.peptide.size() < 9) {
            ++report.short_peptides_dropped;
            report.warnings.push_back("line " + std::to_string(lineno) +
                                      ": peptide shorter than 9 dropped");
            continue;
        }
        rows.push_back(std::move(row));
    }

    // Pair-level cleaning.
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_pair;
    for (std::size_t i = 0; i < rows.size(); ++i)
        by_pair[{rows[i].record.allele_name, rows[i].record.peptide.to_string()}].push_back(i);

    std::set<std::size_t> drop;
    for (const auto& [pair, indices] : by_pair) {
        if (indices.size() == 1)
            continue;
        std::set<double> affinities;
        for (std::size_t i : indices)
            affinities.insert(rows[i].record.affinity);
        if (policy == DedupPolicy::KeepFirst || affinities.size() == 1) {
            for (std::size_t k = 1; k < indices.size(); ++k)
                drop.insert(indices[k]);
            report.duplicates_dropped += indices.size() - 1;
        } else {
            for (std::size_t i : indices)
                drop.insert(i);
            report.conflicts_dropped += indices.size();
            report.warnings.push_back("conflicting affinities for " + pair.first + "/" +
                                      pair.second + "; pair removed");
        }
    }

    BindingDataset dataset;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!drop.count(i))
            dataset.records.push_back(std::move(rows[i].record));

    // Alleles with a single class at theta cannot define an AUC.
    std::map<std::string, std::pair<bool, bool>> classes; // (has binder, has non-binder)
    for (const auto& r : dataset.records) {
        auto& c = classes[r.allele_name];
        (r.affinity > spec.theta ? c.first : c.second) = true;
    }
    std::set<std::string> degenerate;
    for (const auto& [allele, c] : classes)
        if (!c.first || !c.second)
            degenerate.insert(allele);
    if (!degenerate.empty()) {
        std::vector<BindingRecord> kept;
        for (auto& r : dataset.records) {
            if (degenerate.count(r.allele_name)) {
                ++report.single_class_alleles_dropped;
            } else {
                kept.push_back(std::move(r));
            }
        }
        dataset.records = std::move(kept);
        for (const auto& allele : degenerate)
            report.warnings.push_back("allele " + allele +
                                      " dropped: AUC undefined (single class at theta)");
    }
    return {std::move(dataset), std::move(report)};
}

void assign_folds(BindingDataset& dataset, int fold_count, std::uint64_t seed) {
    if (fold_count < 2)
        throw DataError("fold count must be at least 2");
    std::map<std::string, std::vector<std::size_t>> by_allele;
    for (std::size_t i = 0; i < dataset.records.size(); ++i)
        by_allele[dataset.records[i].allele_name].push_back(i);
    std::mt19937_64 rng(seed);
    for (auto& [allele, indices] : by_allele) {
        std::shuffle(indices.begin(), indices.end(), rng);
        for (std::size_t k = 0; k < indices.size(); ++k)
            dataset.records[indices[k]].fold = static_cast<int>(k % fold_count) + 1;
    }
}

} // namespace aakern
