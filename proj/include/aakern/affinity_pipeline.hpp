#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aakern/binding_data.hpp"
#include "aakern/gram.hpp"
#include "aakern/metrics.hpp"
#include "aakern/registry.hpp"
#include "aakern/regression.hpp"

namespace aakern {

struct FoldChoice {
    std::string allele; // empty for pan runs (one choice per fold)
    int fold = 0;
    double beta = 0.0;
    double lambda = 0.0;
    double loo_rmse = 0.0;
};

struct PredictionRecord {
    std::string allele;
    std::string peptide;
    double observed = 0.0;
    double predicted = 0.0;
    int fold = 0;
};

std::string predictions_to_tsv(const std::vector<PredictionRecord>& predictions);

struct FixedAlleleOptions {
    GridSpec grid = GridSpec::fixed_allele_default();
    NormalizationSpec norm = NormalizationSpec::for_base(50000.0);
    std::optional<std::size_t> k_max;
    unsigned threads = 1;
};

struct FixedAlleleResult {
    MetricsReport report;
    std::vector<PredictionRecord> predictions;
    std::vector<FoldChoice> choices; // one per (allele, fold)
};

// Per allele and fold: tune (beta, lambda) by leave-one-out on the training
// folds, refit the winner, predict the held-out fold; metrics per allele at
// theta from the normalization spec. Requires fold labels on every record.
FixedAlleleResult run_fixed_allele(const BindingDataset& data, const FixedAlleleOptions& options);

// Peptide-count-weighted mean of per-allele fold-averaged betas.
// Each element pairs one allele's fold betas with its peptide count; all
// alleles must supply the same number of folds.
double aggregate_beta(const std::vector<std::pair<std::vector<double>, std::size_t>>& per_allele);

struct PanOptions {
    double beta_peptide = 0.11387;
    GridSpec grid = GridSpec::pan_default(); // betas are the allele-kernel candidates
    NormalizationSpec norm = NormalizationSpec::for_base(15000.0);
    std::optional<std::size_t> k_max;
    unsigned threads = 1;
};

struct PanResult {
    MetricsReport report;
    std::vector<PredictionRecord> predictions;
    std::vector<FoldChoice> choices; // one per fold
};

// Product-kernel pipeline over allele-peptide pairs: the peptide Gram is
// built once at beta_peptide; the allele Gram is rebuilt per candidate
// beta_allele from the registry normal forms. Five-fold CV over pairs with
// per-fold leave-one-out tuning, exactly as the fixed pipeline.
PanResult run_pan_allele(const BindingDataset& data, const AlleleRegistry& registry,
                         const PanOptions& options);

// Largest |pred_p - pred_q| / dist_rkhs(p, q) over distinct peptide pairs.
// Throws DataError on duplicate peptides (zero denominator).
double modulus_of_continuity(const std::vector<double>& predictions,
                             const std::vector<AminoChain>& peptides, const StringKernel& kernel);

} // namespace aakern
