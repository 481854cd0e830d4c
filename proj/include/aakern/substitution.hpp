#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "aakern/alphabet.hpp"

namespace aakern {

constexpr std::size_t kAlphabetSize = Alphabet::kSize;

// Marginal residue probabilities p over the alphabet.
struct MarginalDistribution {
    std::array<double, kAlphabetSize> p{};

    double sum() const noexcept;
};

// Symmetric pair-probability table q; entries sum to 1.
struct JointFrequencyTable {
    std::array<double, kAlphabetSize * kAlphabetSize> q{};

    double at(std::size_t x, std::size_t y) const noexcept { return q[x * kAlphabetSize + y]; }
    double sum() const noexcept;
};

// A 20x20 positive symmetric substitution table together with the Hadamard
// exponent already applied to it. beta = 1 is the base odds-ratio table.
class SubstitutionKernel {
public:
    SubstitutionKernel() = default;

    // Throws NumericError unless the table is exactly symmetric and positive.
    SubstitutionKernel(std::array<double, kAlphabetSize * kAlphabetSize> values, double beta);

    double at(std::size_t x, std::size_t y) const noexcept {
        return values_[x * kAlphabetSize + y];
    }
    double at(char x, char y) const;

    double beta() const noexcept { return beta_; }
    const std::array<double, kAlphabetSize * kAlphabetSize>& values() const noexcept {
        return values_;
    }

    // 20 header symbols plus 20 labeled rows, 4 decimals.
    std::string to_tsv() const;

private:
    std::array<double, kAlphabetSize * kAlphabetSize> values_{};
    double beta_ = 1.0;
};

// The embedded odds-ratio form of the substitution data, beta = 1.
const SubstitutionKernel& load_blosum62_2();

// Solves B * p = (1,...,1). Throws NumericError if the table is singular
// or the solution is not a positive probability vector.
MarginalDistribution marginal(const SubstitutionKernel& B);

// q(x,y) = B(x,y) * p(x) * p(y). Defined for the beta = 1 table.
JointFrequencyTable recover_joint(const SubstitutionKernel& B, const MarginalDistribution& p);

// Entrywise power; beta must be positive. Exponents compose multiplicatively.
SubstitutionKernel hadamard_power(const SubstitutionKernel& B, double beta);

// Eigen-structure summary of a symmetric table.
//
// conditionally_pd reports whether the entrywise log of M, restricted to the
// zero-sum subspace V (19-dimensional projection), has a nonnegative spectrum
// within 1e-10. The projected minimum is exposed so callers can assert strict
// positivity. For tables with non-positive entries the log does not exist and
// the conditional part is NaN/false.
struct PdReport {
    double min_eigenvalue = 0.0;
    double log_projected_min_eigenvalue = 0.0;
    bool conditionally_pd = false;
};

// Throws NumericError on an asymmetric input.
PdReport pd_report(const std::array<double, kAlphabetSize * kAlphabetSize>& M);
PdReport pd_report(const SubstitutionKernel& B);

} // namespace aakern
