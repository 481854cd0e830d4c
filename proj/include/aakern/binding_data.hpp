#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aakern/alphabet.hpp"
#include "aakern/metrics.hpp"

namespace aakern {

// One affinity measurement: peptide bound to a named allele.
struct BindingRecord {
    std::string allele_name;
    AminoChain peptide;
    double affinity = 0.0;        // in [0, 1]
    std::optional<int> fold;      // 1..5 when the split is given
};

enum class DedupPolicy {
    DropConflicting, // identical duplicates keep one; conflicting pairs are removed entirely
    KeepFirst,       // first record per (allele, peptide) wins
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t conflicts_dropped = 0;
    std::size_t short_peptides_dropped = 0;
    std::size_t single_class_alleles_dropped = 0;
    std::vector<std::string> warnings; // carry line numbers where applicable
};

struct BindingDataset {
    std::vector<BindingRecord> records;

    // Distinct allele names in first-appearance order.
    std::vector<std::string> alleles() const;
    bool has_folds() const;
};

// Reads TSV rows: allele_name <TAB> peptide_sequence <TAB> value [<TAB> fold].
// Applies the cleaning rules: exact duplicates keep one; pairs with
// conflicting affinities are removed; peptides shorter than 9 are dropped;
// alleles whose labels cannot define an AUC at spec.theta are dropped.
// Raw IC50 values are squashed through psi when spec.values_are_raw_ic50.
// Malformed rows raise DataError with the line number.
std::pair<BindingDataset, IngestReport> ingest_binding_tsv(std::istream& in,
                                                           const NormalizationSpec& spec,
                                                           DedupPolicy policy =
                                                               DedupPolicy::DropConflicting);

// Deterministic round-robin fold assignment per allele for data without a
// published split.
void assign_folds(BindingDataset& dataset, int fold_count, std::uint64_t seed);

} // namespace aakern
