#include "aakern/substitution.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "aakern/errors.hpp"

namespace aakern {

namespace {

constexpr std::size_t N = kAlphabetSize;

Eigen::MatrixXd to_eigen(const std::array<double, N * N>& values) {
    Eigen::MatrixXd M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * N + j];
    return M;
}

} // namespace

double MarginalDistribution::sum() const noexcept {
    return std::accumulate(p.begin(), p.end(), 0.0);
}

double JointFrequencyTable::sum() const noexcept {
    return std::accumulate(q.begin(), q.end(), 0.0);
}

SubstitutionKernel::SubstitutionKernel(std::array<double, N * N> values, double beta)
    : values_(values), beta_(beta) {
    if (!(beta > 0.0))
        throw NumericError("substitution kernel requires beta > 0");
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            if (!(values_[i * N + j] > 0.0))
                throw NumericError("substitution table entries must be positive");
            if (values_[i * N + j] != values_[j * N + i])
                throw NumericError("substitution table must be exactly symmetric");
        }
    }
}

double SubstitutionKernel::at(char x, char y) const {
    const int a = Alphabet::index_of(x);
    const int b = Alphabet::index_of(y);
    if (a < 0 || b < 0)
        throw DataError("symbol not in the amino-acid alphabet");
    return at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
}

std::string SubstitutionKernel::to_tsv() const {
    std::string out;
    for (std::size_t j = 0; j < N; ++j) {
        out.push_back('\t');
        out.push_back(Alphabet::symbols[j]);
    }
    out.push_back('\n');
    char buf[32];
    for (std::size_t i = 0; i < N; ++i) {
        out.push_back(Alphabet::symbols[i]);
        for (std::size_t j = 0; j < N; ++j) {
            std::snprintf(buf, sizeof(buf), "\t%.4f", at(i, j));
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

MarginalDistribution marginal(const SubstitutionKernel& B) {
    const Eigen::MatrixXd M = to_eigen(B.values());
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw NumericError("substitution table is singular; cannot recover marginals");
    const Eigen::VectorXd p = lu.solve(ones);

    MarginalDistribution out;
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (!(p(static_cast<Eigen::Index>(i)) > 0.0))
            throw NumericError("recovered marginal has a non-positive entry");
        out.p[i] = p(static_cast<Eigen::Index>(i));
        total += out.p[i];
    }
    if (std::abs(total - 1.0) > 1e-3)
        throw NumericError("recovered marginal does not sum to 1; table data corrupted");
    return out;
}

JointFrequencyTable recover_joint(const SubstitutionKernel& B, const MarginalDistribution& p) {
    JointFrequencyTable q;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            q.q[i * N + j] = B.at(i, j) * p.p[i] * p.p[j];
    return q;
}

SubstitutionKernel hadamard_power(const SubstitutionKernel& B, double beta) {
    if (!(beta > 0.0))
        throw NumericError("hadamard_power requires beta > 0");
    std::array<double, N * N> values{};
    for (std::size_t i = 0; i < N * N; ++i)
        values[i] = std::pow(B.values()[i], beta);
    return SubstitutionKernel(values, B.beta() * beta);
}

PdReport pd_report(const std::array<double, N * N>& M) {
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            if (M[i * N + j] != M[j * N + i])
                throw NumericError("pd_report requires an exactly symmetric table");

    PdReport report;
    const Eigen::MatrixXd A = to_eigen(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigensolver failed on substitution table");
    report.min_eigenvalue = solver.eigenvalues().minCoeff();

    bool positive = true;
    for (double v : M)
        positive = positive && v > 0.0;
    if (!positive) {
        report.log_projected_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        report.conditionally_pd = false;
        return report;
    }

    Eigen::MatrixXd L(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::log(M[i * N + j]);

    // Orthonormal basis of V = {v : sum v_i = 0}: take the Householder
    // reflector mapping the all-ones direction to e_1 and keep columns 2..N.
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
    Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(ones).householderQ();
    const Eigen::MatrixXd basis = Q.rightCols(N - 1);

    const Eigen::MatrixXd projected = basis.transpose() * L * basis;
    const Eigen::MatrixXd sym = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psolver(sym, Eigen::EigenvaluesOnly);
    if (psolver.info() != Eigen::Success)
        throw NumericError("eigensolver failed on projected Hadamard log");
    report.log_projected_min_eigenvalue = psolver.eigenvalues().minCoeff();
    // Zero spectrum on V (e.g. the all-ones table) counts as conditionally PD.
    report.conditionally_pd = report.log_projected_min_eigenvalue > -1e-10;
    return report;
}

PdReport pd_report(const SubstitutionKernel& B) { return pd_report(B.values()); }

} // namespace aakern
