#include "aakern/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "aakern/errors.hpp"

namespace aakern {

double normalize_ic50(double ic50, double base) {
    if (!(ic50 > 0.0))
        throw DataError("IC50 must be positive");
    if (!(base > 1.0))
        throw DataError("normalization base must exceed 1");
    if (ic50 > base)
        return 0.0;
    if (ic50 < 1.0)
        return 1.0;
    return 1.0 - std::log(ic50) / std::log(base);
}

NormalizationSpec NormalizationSpec::for_base(double b, bool raw) {
    NormalizationSpec spec;
    spec.base = b;
    spec.theta = normalize_ic50(500.0, b);
    spec.values_are_raw_ic50 = raw;
    return spec;
}

double rmse(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size() || predicted.empty())
        throw DataError("rmse needs two equal-length nonempty vectors");
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - observed[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(predicted.size()));
}

double auc(const std::vector<double>& predicted, const std::vector<double>& observed,
           double theta) {
    if (predicted.size() != observed.size() || predicted.empty())
        throw DataError("auc needs two equal-length nonempty vectors");
    std::vector<double> binder, nonbinder;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (observed[i] > theta)
            binder.push_back(predicted[i]);
        else
            nonbinder.push_back(predicted[i]);
    }
    if (binder.empty() || nonbinder.empty())
        throw DataError("AUC undefined: only one class present after thresholding");

    // Count pairs with pred_binder > pred_nonbinder; equal predictions count
    // zero. Sorting the non-binders turns this into a lower_bound per binder.
    std::sort(nonbinder.begin(), nonbinder.end());
    std::uint64_t favorable = 0;
    for (double p : binder)
        favorable += static_cast<std::uint64_t>(
            std::lower_bound(nonbinder.begin(), nonbinder.end(), p) - nonbinder.begin());
    return static_cast<double>(favorable) /
           (static_cast<double>(binder.size()) * static_cast<double>(nonbinder.size()));
}

MetricsReport MetricsReport::from_rows(std::vector<AlleleScore> rows) {
    MetricsReport report;
    report.rows = std::move(rows);
    if (report.rows.empty())
        return report;
    double rmse_sum = 0.0, auc_sum = 0.0, w_rmse = 0.0, w_auc = 0.0, weight = 0.0;
    for (const auto& row : report.rows) {
        rmse_sum += row.rmse;
        auc_sum += row.auc;
        w_rmse += static_cast<double>(row.n_peptides) * row.rmse;
        w_auc += static_cast<double>(row.n_peptides) * row.auc;
        weight += static_cast<double>(row.n_peptides);
    }
    const double n = static_cast<double>(report.rows.size());
    report.average_rmse = rmse_sum / n;
    report.average_auc = auc_sum / n;
    report.weighted_rmse = w_rmse / weight;
    report.weighted_auc = w_auc / weight;
    return report;
}

std::string MetricsReport::to_tsv() const {
    std::string out = "allele\tn_peptides\trmse\tauc\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.5f\t%.5f\n", row.allele.c_str(),
                      row.n_peptides, row.rmse, row.auc);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "average\t\t%.5f\t%.5f\n", average_rmse, average_auc);
    out += buf;
    std::snprintf(buf, sizeof(buf), "weighted_average\t\t%.5f\t%.5f\n", weighted_rmse,
                  weighted_auc);
    out += buf;
    return out;
}

} // namespace aakern
