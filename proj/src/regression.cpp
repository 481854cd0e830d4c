#include "aakern/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <json.hpp>

#include "aakern/errors.hpp"
#include "aakern/parallel.hpp"

namespace aakern {

namespace {

Eigen::MatrixXd submatrix(const GramMatrix& gram, const std::vector<std::size_t>& ids) {
    const auto m = static_cast<Eigen::Index>(ids.size());
    Eigen::MatrixXd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            G(i, j) = gram.at(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    return G;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

void TrainingSet::validate() const {
    if (sample_ids.size() != labels.size())
        throw DataError("training set ids and labels differ in length");
    if (sample_ids.empty())
        throw DataError("training set is empty");
    std::set<std::size_t> distinct(sample_ids.begin(), sample_ids.end());
    if (distinct.size() != sample_ids.size())
        throw DataError("training set contains repeated sample ids");
}

double RlsModel::predict_one(const std::vector<double>& kernel_row) const {
    if (kernel_row.size() != coefficients.size())
        throw DataError("kernel row width does not match training size");
    double sum = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        sum += coefficients[i] * kernel_row[i];
    return sum;
}

std::vector<double> RlsModel::predict(const std::vector<std::vector<double>>& kernel_rows) const {
    std::vector<double> out;
    out.reserve(kernel_rows.size());
    for (const auto& row : kernel_rows)
        out.push_back(predict_one(row));
    return out;
}

std::vector<double> fit_ridge(const Eigen::MatrixXd& train_gram, const std::vector<double>& labels,
                              double ridge) {
    if (!(ridge > 0.0))
        throw NumericError("ridge must be positive");
    const auto m = train_gram.rows();
    if (train_gram.cols() != m || static_cast<std::size_t>(m) != labels.size())
        throw DataError("training gram shape does not match the label vector");

    Eigen::MatrixXd A = train_gram;
    A.diagonal().array() += ridge;
    const Eigen::VectorXd y = to_vector(labels);

    Eigen::VectorXd c;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
        c = llt.solve(y);
    } else {
        // Float-degenerate Gram: fall back to a least-squares solve.
        c = A.colPivHouseholderQr().solve(y);
    }

    const double ynorm = y.norm();
    if (ynorm > 0.0) {
        const double residual = (A * c - y).norm() / ynorm;
        if (!(residual < 1e-8))
            throw NumericError("RLS solve residual " + std::to_string(residual) +
                               " exceeds 1e-8; gram data corrupted?");
    }
    return std::vector<double>(c.data(), c.data() + c.size());
}

std::vector<double> fit_ridge(const GramMatrix& gram, const std::vector<std::size_t>& sample_ids,
                              const std::vector<double>& labels, double ridge) {
    return fit_ridge(submatrix(gram, sample_ids), labels, ridge);
}

RlsModel fit(const GramMatrix& gram, const TrainingSet& train, double lambda) {
    if (!(lambda > 0.0))
        throw NumericError("lambda must be positive");
    train.validate();
    const double ridge = static_cast<double>(train.size()) * lambda;
    RlsModel model;
    model.coefficients = fit_ridge(gram, train.sample_ids, train.labels, ridge);
    model.lambda = lambda;
    model.params_fingerprint = gram.fingerprint();
    return model;
}

LooResult loo_residuals(const Eigen::MatrixXd& train_gram, const std::vector<double>& labels,
                        double lambda) {
    if (!(lambda > 0.0))
        throw NumericError("lambda must be positive");
    const auto m = train_gram.rows();
    if (m < 2)
        throw DataError("leave-one-out needs at least two samples");
    if (static_cast<std::size_t>(m) != labels.size())
        throw DataError("training gram shape does not match the label vector");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(train_gram);
    if (eig.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed in leave-one-out");

    const double ridge = static_cast<double>(m) * lambda;
    const Eigen::VectorXd y = to_vector(labels);
    const Eigen::VectorXd shrink =
        eig.eigenvalues().array() / (eig.eigenvalues().array() + ridge);
    const Eigen::VectorXd yhat =
        eig.eigenvectors() * (shrink.array() * (eig.eigenvectors().transpose() * y).array()).matrix();

    LooResult out;
    out.residuals.assign(static_cast<std::size_t>(m),
                         std::numeric_limits<double>::quiet_NaN());
    double sq = 0.0;
    std::size_t used = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double hii = (eig.eigenvectors().row(i).array().square() * shrink.transpose().array()).sum();
        if (!(hii < 1.0 - 1e-12)) {
            out.skipped.push_back(static_cast<std::size_t>(i));
            continue;
        }
        const double r = (y(i) - yhat(i)) / (1.0 - hii);
        out.residuals[static_cast<std::size_t>(i)] = r;
        sq += r * r;
        ++used;
    }
    out.rmse = used == 0 ? std::numeric_limits<double>::quiet_NaN()
                         : std::sqrt(sq / static_cast<double>(used));
    return out;
}

LooResult loo_residuals(const GramMatrix& gram, const TrainingSet& train, double lambda) {
    train.validate();
    return loo_residuals(submatrix(gram, train.sample_ids), train.labels, lambda);
}

std::vector<double> kfold_predict(const GramMatrix& gram, const TrainingSet& data,
                                  const std::vector<int>& folds, double lambda) {
    data.validate();
    if (folds.size() != data.size())
        throw DataError("fold labels do not match the sample count");
    std::set<int> fold_set(folds.begin(), folds.end());
    if (fold_set.size() < 2)
        throw DataError("cross validation needs at least two nonempty folds");

    std::vector<double> predictions(data.size(), 0.0);
    for (int fold : fold_set) {
        TrainingSet train;
        std::vector<std::size_t> test_positions;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (folds[i] == fold) {
                test_positions.push_back(i);
            } else {
                train.sample_ids.push_back(data.sample_ids[i]);
                train.labels.push_back(data.labels[i]);
            }
        }
        if (test_positions.empty())
            throw DataError("empty fold " + std::to_string(fold));
        const RlsModel model = fit(gram, train, lambda);
        for (std::size_t pos : test_positions) {
            std::vector<double> row(train.size());
            for (std::size_t j = 0; j < train.size(); ++j)
                row[j] = gram.at(data.sample_ids[pos], train.sample_ids[j]);
            predictions[pos] = model.predict_one(row);
        }
    }
    return predictions;
}

std::vector<double> GeometricSeq::values() const {
    if (count < 1 || !(first > 0.0) || !(last > 0.0))
        throw DataError("geometric sequence needs positive endpoints and count >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        out.push_back(first);
        return out;
    }
    const double ratio = std::pow(last / first, 1.0 / static_cast<double>(count - 1));
    double v = first;
    for (int i = 0; i < count; ++i) {
        out.push_back(v);
        v *= ratio;
    }
    out.back() = last; // pin the endpoint against drift
    return out;
}

GridSpec GridSpec::geometric(GeometricSeq betas, GeometricSeq lambdas) {
    GridSpec spec;
    spec.betas = betas.values();
    spec.lambdas = lambdas.values();
    return spec;
}

GridSpec GridSpec::fixed_allele_default() {
    return geometric({0.001, 10.0, 30}, {std::exp(-17.0), std::exp(-3.0), 15});
}

GridSpec GridSpec::pan_default() {
    GridSpec spec;
    for (int n = 1; n <= 8; ++n)
        spec.betas.push_back(0.02 * n);
    for (int n = -17; n <= -9; ++n)
        spec.lambdas.push_back(std::exp(n));
    return spec;
}

GridSearchResult grid_search(const std::function<Eigen::MatrixXd(double beta)>& train_gram_builder,
                             const std::vector<double>& labels, const GridSpec& grid,
                             unsigned threads) {
    if (grid.betas.empty() || grid.lambdas.empty())
        throw DataError("grid search needs a nonempty grid");

    const std::size_t nb = grid.betas.size(), nl = grid.lambdas.size();
    std::vector<GridScore> table(nb * nl);
    parallel_for(nb, threads, [&](std::size_t bi) {
        const double beta = grid.betas[bi];
        const Eigen::MatrixXd G = train_gram_builder(beta);
        for (std::size_t li = 0; li < nl; ++li) {
            const double lambda = grid.lambdas[li];
            const LooResult loo = loo_residuals(G, labels, lambda);
            table[bi * nl + li] = GridScore{beta, lambda, loo.rmse};
        }
    });

    GridSearchResult result;
    result.table = table;
    const auto key = [](const GridScore& s) {
        return std::isnan(s.loo_rmse) ? std::numeric_limits<double>::infinity() : s.loo_rmse;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        // Strict improvement only: row-major order already walks smaller
        // beta first, then smaller lambda, which is the tie rule.
        if (key(table[i]) < key(table[best]))
            best = i;
    }
    result.beta = table[best].beta;
    result.lambda = table[best].lambda;
    result.loo_rmse = table[best].loo_rmse;
    return result;
}

std::string score_table_tsv(const std::vector<GridScore>& table) {
    std::string out = "beta\tlambda\tloo_rmse\n";
    char buf[96];
    for (const auto& row : table) {
        std::snprintf(buf, sizeof(buf), "%.10g\t%.10g\t%.10g\n", row.beta, row.lambda,
                      row.loo_rmse);
        out += buf;
    }
    return out;
}

std::string rls_model_to_json(const RlsModel& model) {
    nlohmann::json doc;
    doc["format"] = "aakern-rls-model";
    doc["version"] = 1;
    doc["lambda"] = model.lambda;
    doc["fingerprint"] = model.params_fingerprint;
    doc["coefficients"] = model.coefficients;
    return doc.dump(2) + "\n";
}

RlsModel rls_model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad model JSON: ") + e.what());
    }
    if (doc.value("format", "") != "aakern-rls-model")
        throw DataError("not an RLS model file");
    RlsModel model;
    model.lambda = doc.at("lambda").get<double>();
    model.params_fingerprint = doc.value("fingerprint", "");
    model.coefficients = doc.at("coefficients").get<std::vector<double>>();
    return model;
}

} // namespace aakern
