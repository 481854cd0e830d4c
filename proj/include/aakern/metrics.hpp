#pragma once

#include <string>
#include <vector>

namespace aakern {

// Logarithmic squashing of a raw IC50 (nano-molar) into [0,1]:
//   0 for x > b, 1 - log_b(x) for 1 <= x <= b, 1 for x < 1.
// Throws DataError for x <= 0 or b <= 1.
double normalize_ic50(double ic50, double base);

// Base b together with the derived binder threshold psi_b(500).
struct NormalizationSpec {
    double base = 50000.0;
    double theta = 0.0;
    bool values_are_raw_ic50 = false;

    static NormalizationSpec for_base(double b, bool raw = false);
};

double rmse(const std::vector<double>& predicted, const std::vector<double>& observed);

// Fraction of (binder, non-binder) pairs ranked strictly correctly, where a
// sample is a binder when observed > theta. Ties in predictions score zero.
// Throws DataError when either class is empty (AUC undefined).
double auc(const std::vector<double>& predicted, const std::vector<double>& observed,
           double theta);

struct AlleleScore {
    std::string allele;
    std::size_t n_peptides = 0;
    double rmse = 0.0;
    double auc = 0.0;
};

// Per-allele rows plus plain and peptide-count-weighted averages.
struct MetricsReport {
    std::vector<AlleleScore> rows;
    double average_rmse = 0.0;
    double average_auc = 0.0;
    double weighted_rmse = 0.0;
    double weighted_auc = 0.0;

    static MetricsReport from_rows(std::vector<AlleleScore> rows);
    std::string to_tsv() const;
};

} // namespace aakern
