#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "aakern/gram.hpp"

namespace aakern {

// Training samples addressed by row index into a Gram matrix.
struct TrainingSet {
    std::vector<std::size_t> sample_ids;
    std::vector<double> labels;

    std::size_t size() const noexcept { return sample_ids.size(); }
    void validate() const; // distinct ids, matching lengths
};

// Coefficients of a fitted regularized least-squares model.
struct RlsModel {
    std::vector<double> coefficients;
    double lambda = 0.0;
    std::string params_fingerprint;

    // Sum of c_i * K(x_i, query) over the training samples.
    double predict_one(const std::vector<double>& kernel_row) const;
    std::vector<double> predict(const std::vector<std::vector<double>>& kernel_rows) const;
};

// Solves (G_mm + ridge * I) c = y on an arbitrary submatrix of the Gram.
// Exposed so leave-one-out oracles can retrain with a fixed ridge.
std::vector<double> fit_ridge(const GramMatrix& gram, const std::vector<std::size_t>& sample_ids,
                              const std::vector<double>& labels, double ridge);
std::vector<double> fit_ridge(const Eigen::MatrixXd& train_gram, const std::vector<double>& labels,
                              double ridge);

// Regularized least squares: (G_mm + m * lambda * I) c = y, m the training
// size. Throws NumericError when the solve fails or its residual exceeds
// 1e-8 relative.
RlsModel fit(const GramMatrix& gram, const TrainingSet& train, double lambda);

// Leave-one-out residuals via the hat-matrix shortcut
//   r_i = (y_i - yhat_i) / (1 - H_ii),  H = G (G + m lambda I)^{-1}.
// Equivalent to retraining without sample i under the same ridge m*lambda.
// Samples with H_ii numerically >= 1 are reported in skipped and excluded
// from downstream scores.
struct LooResult {
    std::vector<double> residuals;       // NaN at skipped positions
    std::vector<std::size_t> skipped;
    double rmse = 0.0;                   // over non-skipped samples
};
LooResult loo_residuals(const GramMatrix& gram, const TrainingSet& train, double lambda);
LooResult loo_residuals(const Eigen::MatrixXd& train_gram, const std::vector<double>& labels,
                        double lambda);

// Cross-validated predictions: each sample predicted by the model trained on
// all other folds. Fold labels are arbitrary integers; every fold must be
// nonempty (and there must be at least two).
std::vector<double> kfold_predict(const GramMatrix& gram, const TrainingSet& data,
                                  const std::vector<int>& folds, double lambda);

// Geometric sequence from first to last inclusive.
struct GeometricSeq {
    double first = 1.0;
    double last = 1.0;
    int count = 1;
    std::vector<double> values() const;
};

// Candidate (beta, lambda) values for the grid search.
struct GridSpec {
    std::vector<double> betas;
    std::vector<double> lambdas;

    static GridSpec geometric(GeometricSeq betas, GeometricSeq lambdas);
    // beta in geometric {0.001,...,10} of length 30; lambda in geometric
    // {e^-17,...,e^-3} of length 15.
    static GridSpec fixed_allele_default();
    // beta in {0.02 n : n = 1..8}; lambda in {e^n : n = -17..-9}.
    static GridSpec pan_default();
};

struct GridScore {
    double beta = 0.0;
    double lambda = 0.0;
    double loo_rmse = 0.0;
};

struct GridSearchResult {
    double beta = 0.0;
    double lambda = 0.0;
    double loo_rmse = 0.0;
    std::vector<GridScore> table; // row-major over (beta, lambda)
};

// Minimizes leave-one-out RMSE over the grid. The builder supplies the
// training Gram for each beta (rows aligned with `labels`). Ties break
// toward smaller beta, then smaller lambda. One eigendecomposition per beta
// serves all lambda values; betas may evaluate in parallel.
GridSearchResult grid_search(const std::function<Eigen::MatrixXd(double beta)>& train_gram_builder,
                             const std::vector<double>& labels, const GridSpec& grid,
                             unsigned threads = 1);

// TSV rows beta<TAB>lambda<TAB>loo_rmse with a header line.
std::string score_table_tsv(const std::vector<GridScore>& table);

// Model files carry coefficients, lambda and the gram fingerprint.
std::string rls_model_to_json(const RlsModel& model);
RlsModel rls_model_from_json(const std::string& text);

} // namespace aakern
