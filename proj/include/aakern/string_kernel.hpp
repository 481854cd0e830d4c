#pragma once

#include <cstdint>
#include <optional>

#include "aakern/alphabet.hpp"
#include "aakern/substitution.hpp"

namespace aakern {

// Parameters of the substring-sum kernel. k_max caps the substring length
// (unset = all lengths); averaged divides the sum by the number of
// equal-length substring pairs.
struct KernelParams {
    double beta = 1.0;
    std::optional<std::size_t> k_max;
    bool averaged = false;
};

// A positive value kept as mantissa * 2^exponent so that diagonal kernel
// values of long chains cannot overflow.
struct ScaledValue {
    double mantissa = 0.0; // in [1, 2) for nonzero values
    std::int64_t exponent = 0;

    static ScaledValue zero() { return {}; }
    static ScaledValue from_double(double x);
    bool is_zero() const noexcept { return mantissa == 0.0; }
    double to_double() const noexcept; // +inf when out of range
    double log() const;                // natural log; -inf for zero
};

// Evaluates the substring-sum kernel and derived quantities for one residue
// substitution table raised to params.beta.
class StringKernel {
public:
    StringKernel(const SubstitutionKernel& base, KernelParams params);

    const KernelParams& params() const noexcept { return params_; }

    // Residue-level value K1(x, y) = base(x, y)^beta.
    double k1(std::uint8_t x, std::uint8_t y) const noexcept {
        return k1_[static_cast<std::size_t>(x) * kAlphabetSize + y];
    }

    // Product kernel on equal-length chains. Throws DataError on a length
    // mismatch.
    double k2(const AminoChain& u, const AminoChain& v) const;

    // Substring-sum kernel by direct enumeration of all equal-length
    // contiguous substring pairs. Reference path; quadratic in the pair count.
    double k3_bruteforce(const AminoChain& f, const AminoChain& g) const;

    // Substring-sum kernel by the cumulative-product recurrence
    //   M(i,j) = K1(f_i, g_j) * (1 + M(i+1, j+1)),   K3 = sum of all M(i,j),
    // O(|f|*|g|) time. Agrees with k3_bruteforce to relative 1e-10.
    double k3(const AminoChain& f, const AminoChain& g) const;

    // Same value in overflow-safe scaled form; preferred for long chains.
    ScaledValue k3_scaled(const AminoChain& f, const AminoChain& g) const;

    // Correlation normalization K3(f,g)/sqrt(K3(f,f) K3(g,g)), in (0, 1].
    // Computed through the scaled representation, so it is finite even when
    // the raw diagonal overflows a double.
    double k3_hat(const AminoChain& f, const AminoChain& g) const;

    // RKHS distance sqrt(2 - 2 k3_hat); zero iff the chains are equal.
    double dist_rkhs(const AminoChain& f, const AminoChain& g) const;

    // Monte Carlo estimate of k3: samples equal-length substring pairs
    // uniformly and rescales by the pair count. Off the default paths.
    double k3_estimate(const AminoChain& f, const AminoChain& g, std::size_t samples,
                       std::uint64_t seed) const;

    // Number of equal-length substring pairs entering the sum (respects k_max).
    static double pair_count(std::size_t len_f, std::size_t len_g,
                             std::optional<std::size_t> k_max);

private:
    std::array<double, kAlphabetSize * kAlphabetSize> k1_{};
    KernelParams params_;
};

} // namespace aakern
