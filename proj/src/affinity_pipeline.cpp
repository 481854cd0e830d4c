#include "aakern/affinity_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "aakern/errors.hpp"

namespace aakern {

namespace {

// Distinct peptides of a record list in first-appearance order, plus the
// row index of each record's peptide.
struct PeptideUniverse {
    std::vector<std::string> ids;
    std::vector<AminoChain> chains;
    std::vector<std::size_t> record_rows;
};

PeptideUniverse peptide_universe(const std::vector<const BindingRecord*>& records) {
    PeptideUniverse u;
    std::map<std::string, std::size_t> index;
    for (const auto* r : records) {
        const std::string key = r->peptide.to_string();
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, u.ids.size()).first;
            u.ids.push_back(key);
            u.chains.push_back(r->peptide);
        }
        u.record_rows.push_back(it->second);
    }
    return u;
}

std::vector<int> fold_values(const std::vector<const BindingRecord*>& records) {
    std::set<int> folds;
    for (const auto* r : records) {
        if (!r->fold)
            throw DataError("record without a fold label; assign folds first");
        folds.insert(*r->fold);
    }
    if (folds.size() < 2)
        throw DataError("cross validation needs at least two folds");
    return {folds.begin(), folds.end()};
}

} // namespace

std::string predictions_to_tsv(const std::vector<PredictionRecord>& predictions) {
    std::string out = "allele\tpeptide\tobserved\tpredicted\tfold\n";
    char buf[64];
    for (const auto& p : predictions) {
        out += p.allele;
        out.push_back('\t');
        out += p.peptide;
        std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\t%d\n", p.observed, p.predicted, p.fold);
        out += buf;
    }
    return out;
}

FixedAlleleResult run_fixed_allele(const BindingDataset& data, const FixedAlleleOptions& options) {
    if (data.records.empty())
        throw DataError("empty binding dataset");

    std::map<std::string, std::vector<const BindingRecord*>> by_allele;
    for (const auto& r : data.records)
        by_allele[r.allele_name].push_back(&r);

    const SubstitutionKernel& base = load_blosum62_2();
    FixedAlleleResult result;
    std::vector<AlleleScore> rows;

    for (const auto& [allele, records] : by_allele) {
        const std::vector<int> folds = fold_values(records);
        const PeptideUniverse universe = peptide_universe(records);

        std::vector<double> observed(records.size()), predicted(records.size());
        for (std::size_t i = 0; i < records.size(); ++i)
            observed[i] = records[i]->affinity;

        for (int fold : folds) {
            std::vector<std::size_t> train_pos, test_pos;
            for (std::size_t i = 0; i < records.size(); ++i)
                (*records[i]->fold == fold ? test_pos : train_pos).push_back(i);
            if (train_pos.empty() || test_pos.empty())
                throw DataError("fold " + std::to_string(fold) + " leaves train or test empty");

            std::vector<AminoChain> train_chains;
            std::vector<std::string> train_ids;
            std::vector<double> train_labels;
            train_chains.reserve(train_pos.size());
            for (std::size_t i : train_pos) {
                train_chains.push_back(records[i]->peptide);
                train_ids.push_back(universe.ids[universe.record_rows[i]]);
                train_labels.push_back(observed[i]);
            }

            const auto builder = [&](double beta) {
                KernelParams params{beta, options.k_max, false};
                const StringKernel kernel(base, params);
                const GramMatrix g = build_gram(train_ids, train_chains, kernel, 1);
                return g.values();
            };
            const GridSearchResult search =
                grid_search(builder, train_labels, options.grid, options.threads);
            result.choices.push_back({allele, fold, search.beta, search.lambda, search.loo_rmse});

            // Refit the winner over the fold's full universe and predict the
            // held-out records.
            KernelParams params{search.beta, options.k_max, false};
            const StringKernel kernel(base, params);
            const GramMatrix full =
                build_gram(universe.ids, universe.chains, kernel, options.threads);
            TrainingSet train;
            for (std::size_t i : train_pos) {
                train.sample_ids.push_back(universe.record_rows[i]);
                train.labels.push_back(observed[i]);
            }
            const RlsModel model = fit(full, train, search.lambda);
            for (std::size_t i : test_pos) {
                std::vector<double> row(train.size());
                for (std::size_t j = 0; j < train.size(); ++j)
                    row[j] = full.at(universe.record_rows[i], train.sample_ids[j]);
                predicted[i] = model.predict_one(row);
            }
        }

        for (std::size_t i = 0; i < records.size(); ++i)
            result.predictions.push_back({allele, records[i]->peptide.to_string(), observed[i],
                                          predicted[i], *records[i]->fold});
        rows.push_back({allele, records.size(), rmse(predicted, observed),
                        auc(predicted, observed, options.norm.theta)});
    }

    result.report = MetricsReport::from_rows(std::move(rows));
    return result;
}

double aggregate_beta(const std::vector<std::pair<std::vector<double>, std::size_t>>& per_allele) {
    if (per_allele.empty())
        throw DataError("aggregate_beta needs at least one allele");
    const std::size_t folds = per_allele.front().first.size();
    double weighted = 0.0, total = 0.0;
    for (const auto& [betas, count] : per_allele) {
        if (betas.size() != folds || betas.empty())
            throw DataError("aggregate_beta needs the same fold count per allele");
        double mean = 0.0;
        for (double b : betas)
            mean += b;
        mean /= static_cast<double>(betas.size());
        weighted += static_cast<double>(count) * mean;
        total += static_cast<double>(count);
    }
    return weighted / total;
}

PanResult run_pan_allele(const BindingDataset& data, const AlleleRegistry& registry,
                         const PanOptions& options) {
    if (data.records.empty())
        throw DataError("empty binding dataset");

    std::vector<const BindingRecord*> records;
    records.reserve(data.records.size());
    for (const auto& r : data.records)
        records.push_back(&r);
    const std::vector<int> folds = fold_values(records);

    // Allele universe from the registry normal forms.
    std::vector<std::string> allele_ids;
    std::vector<AminoChain> allele_chains;
    {
        std::set<std::string> seen;
        for (const auto* r : records) {
            if (!seen.insert(r->allele_name).second)
                continue;
            allele_ids.push_back(r->allele_name);
            allele_chains.push_back(registry.find(r->allele_name).form.chain);
        }
    }

    const PeptideUniverse universe = peptide_universe(records);
    const SubstitutionKernel& base = load_blosum62_2();

    // The peptide Gram is fixed across the whole run.
    KernelParams pep_params{options.beta_peptide, options.k_max, false};
    const StringKernel pep_kernel(base, pep_params);
    const GramMatrix pep_gram =
        build_gram(universe.ids, universe.chains, pep_kernel, options.threads);

    // Allele Grams per candidate beta are cheap; cache them.
    std::map<double, GramMatrix> allele_grams;
    const auto allele_gram_at = [&](double beta) -> const GramMatrix& {
        auto it = allele_grams.find(beta);
        if (it == allele_grams.end()) {
            KernelParams params{beta, options.k_max, false};
            const StringKernel kernel(base, params);
            it = allele_grams.emplace(beta, build_gram(allele_ids, allele_chains, kernel, 1)).first;
        }
        return it->second;
    };

    std::vector<std::size_t> allele_row(records.size());
    {
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < allele_ids.size(); ++i)
            index[allele_ids[i]] = i;
        for (std::size_t i = 0; i < records.size(); ++i)
            allele_row[i] = index.at(records[i]->allele_name);
    }

    std::vector<double> observed(records.size()), predicted(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        observed[i] = records[i]->affinity;

    PanResult result;
    for (int fold : folds) {
        std::vector<std::size_t> train_pos, test_pos;
        for (std::size_t i = 0; i < records.size(); ++i)
            (*records[i]->fold == fold ? test_pos : train_pos).push_back(i);
        if (train_pos.empty() || test_pos.empty())
            throw DataError("fold " + std::to_string(fold) + " leaves train or test empty");

        std::vector<double> train_labels;
        train_labels.reserve(train_pos.size());
        for (std::size_t i : train_pos)
            train_labels.push_back(observed[i]);

        const auto builder = [&](double beta_allele) {
            const GramMatrix& A = allele_gram_at(beta_allele);
            const auto m = static_cast<Eigen::Index>(train_pos.size());
            Eigen::MatrixXd G(m, m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const std::size_t ri = train_pos[static_cast<std::size_t>(i)];
                for (Eigen::Index j = 0; j <= i; ++j) {
                    const std::size_t rj = train_pos[static_cast<std::size_t>(j)];
                    const double v = A.at(allele_row[ri], allele_row[rj]) *
                                     pep_gram.at(universe.record_rows[ri],
                                                 universe.record_rows[rj]);
                    G(i, j) = v;
                    G(j, i) = v;
                }
            }
            return G;
        };

        // Mutating the allele-gram cache is not thread safe; prefill it.
        for (double beta : options.grid.betas)
            allele_gram_at(beta);
        const GridSearchResult search =
            grid_search(builder, train_labels, options.grid, options.threads);
        result.choices.push_back({"", fold, search.beta, search.lambda, search.loo_rmse});

        const GramMatrix& A = allele_gram_at(search.beta);
        const std::vector<double> coeffs = fit_ridge(
            builder(search.beta), train_labels,
            static_cast<double>(train_pos.size()) * search.lambda);
        for (std::size_t i : test_pos) {
            double sum = 0.0;
            for (std::size_t j = 0; j < train_pos.size(); ++j) {
                const std::size_t rj = train_pos[j];
                sum += coeffs[j] * A.at(allele_row[i], allele_row[rj]) *
                       pep_gram.at(universe.record_rows[i], universe.record_rows[rj]);
            }
            predicted[i] = sum;
        }
    }

    for (std::size_t i = 0; i < records.size(); ++i)
        result.predictions.push_back({records[i]->allele_name, records[i]->peptide.to_string(),
                                      observed[i], predicted[i], *records[i]->fold});

    std::vector<AlleleScore> rows;
    std::map<std::string, std::vector<std::size_t>> by_allele;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_allele[records[i]->allele_name].push_back(i);
    for (const auto& [allele, indices] : by_allele) {
        std::vector<double> obs, pred;
        for (std::size_t i : indices) {
            obs.push_back(observed[i]);
            pred.push_back(predicted[i]);
        }
        rows.push_back({allele, indices.size(), rmse(pred, obs),
                        auc(pred, obs, options.norm.theta)});
    }
    result.report = MetricsReport::from_rows(std::move(rows));
    return result;
}

double modulus_of_continuity(const std::vector<double>& predictions,
                             const std::vector<AminoChain>& peptides,
                             const StringKernel& kernel) {
    if (peptides.size() < 2 || predictions.size() != peptides.size())
        throw DataError("modulus of continuity needs >= 2 peptides with predictions");
    std::set<std::string> distinct;
    for (const auto& p : peptides)
        if (!distinct.insert(p.to_string()).second)
            throw DataError("duplicate peptides make the modulus denominator zero");

    std::vector<double> log_diag(peptides.size());
    for (std::size_t i = 0; i < peptides.size(); ++i)
        log_diag[i] = kernel.k3_scaled(peptides[i], peptides[i]).log();

    double best = 0.0;
    for (std::size_t i = 0; i < peptides.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double log_fg = kernel.k3_scaled(peptides[i], peptides[j]).log();
            const double khat = std::exp(log_fg - 0.5 * (log_diag[i] + log_diag[j]));
            const double d = std::sqrt(std::max(0.0, 2.0 - 2.0 * khat));
            if (d <= 0.0)
                throw DataError("zero kernel distance between distinct peptides");
            best = std::max(best, std::abs(predictions[i] - predictions[j]) / d);
        }
    }
    return best;
}

} // namespace aakern
