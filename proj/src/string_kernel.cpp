#include "aakern/string_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "aakern/errors.hpp"

namespace aakern {

namespace {

// Row values above this trigger a power-of-two rescale of the running DP
// state; diagonal values of allele-length chains at beta = 1 overflow a
// plain double otherwise.
constexpr double kRescaleThreshold = 1e250;
constexpr int kRescaleShift = 512;

// Accumulates a sum of nonnegative terms, each given as x * 2^exponent.
class ScaledAccumulator {
public:
    void add(double x, std::int64_t exponent) {
        if (x == 0.0)
            return;
        if (acc_ == 0.0) {
            acc_ = x;
            exp_ = exponent;
            normalize();
            return;
        }
        const std::int64_t delta = exponent - exp_;
        if (delta < -1100)
            return; // below representable contribution
        if (delta <= 0) {
            acc_ += std::ldexp(x, static_cast<int>(delta));
        } else {
            // Rebase to the addend's larger scale; the old sum underflows
            // away exactly when it no longer matters.
            acc_ = std::ldexp(acc_, -static_cast<int>(std::min<std::int64_t>(delta, 1100))) + x;
            exp_ = exponent;
        }
        normalize();
    }

    ScaledValue value() const {
        if (acc_ == 0.0)
            return ScaledValue::zero();
        ScaledValue v = ScaledValue::from_double(acc_);
        v.exponent += exp_;
        return v;
    }

private:
    void normalize() {
        while (acc_ >= kRescaleThreshold) {
            acc_ = std::ldexp(acc_, -kRescaleShift);
            exp_ += kRescaleShift;
        }
    }

    double acc_ = 0.0;
    std::int64_t exp_ = 0;
};

} // namespace

ScaledValue ScaledValue::from_double(double x) {
    if (x == 0.0)
        return zero();
    int e = 0;
    const double m = std::frexp(x, &e); // m in [0.5, 1)
    return ScaledValue{m * 2.0, e - 1};
}

double ScaledValue::to_double() const noexcept {
    if (is_zero())
        return 0.0;
    if (exponent > 1024)
        return std::numeric_limits<double>::infinity();
    if (exponent < -1100)
        return 0.0;
    return std::ldexp(mantissa, static_cast<int>(exponent));
}

double ScaledValue::log() const {
    if (is_zero())
        return -std::numeric_limits<double>::infinity();
    return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

StringKernel::StringKernel(const SubstitutionKernel& base, KernelParams params)
    : params_(params) {
    if (!(params.beta > 0.0))
        throw NumericError("kernel requires beta > 0");
    if (params.k_max && *params.k_max < 1)
        throw NumericError("k_max must be >= 1");
    // params.beta applies on top of whatever exponent the base already
    // carries; the conventional call passes the beta = 1 table.
    for (std::size_t i = 0; i < kAlphabetSize * kAlphabetSize; ++i)
        k1_[i] = params.beta == 1.0 ? base.values()[i] : std::pow(base.values()[i], params.beta);
}

double StringKernel::k2(const AminoChain& u, const AminoChain& v) const {
    if (u.size() != v.size())
        throw DataError("k2 requires chains of equal length");
    double prod = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        prod *= k1(u[i], v[i]);
    return prod;
}

double StringKernel::pair_count(std::size_t len_f, std::size_t len_g,
                                std::optional<std::size_t> k_max) {
    std::size_t kmax = std::min(len_f, len_g);
    if (k_max)
        kmax = std::min(kmax, *k_max);
    double count = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k)
        count += static_cast<double>(len_f - k + 1) * static_cast<double>(len_g - k + 1);
    return count;
}

double StringKernel::k3_bruteforce(const AminoChain& f_in, const AminoChain& g_in) const {
    // Canonical argument order makes the accumulation bitwise symmetric.
    const bool swap = g_in.codes() < f_in.codes();
    const AminoChain& f = swap ? g_in : f_in;
    const AminoChain& g = swap ? f_in : g_in;
    const std::size_t n = f.size(), m = g.size();
    std::size_t kmax = std::min(n, m);
    if (params_.k_max)
        kmax = std::min(kmax, *params_.k_max);
    double total = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        for (std::size_t i = 0; i + k <= n; ++i) {
            for (std::size_t j = 0; j + k <= m; ++j) {
                double prod = 1.0;
                for (std::size_t t = 0; t < k; ++t)
                    prod *= k1(f[i + t], g[j + t]);
                total += prod;
            }
        }
    }
    if (params_.averaged)
        total /= pair_count(n, m, params_.k_max);
    return total;
}

ScaledValue StringKernel::k3_scaled(const AminoChain& f_in, const AminoChain& g_in) const {
    const bool swap = g_in.codes() < f_in.codes();
    const AminoChain& f = swap ? g_in : f_in;
    const AminoChain& g = swap ? f_in : g_in;
    const std::size_t n = f.size(), m = g.size();
    ScaledAccumulator acc;

    if (!params_.k_max) {
        // M(i,j) = K1(f_i, g_j) * (1 + M(i+1, j+1)), summed over all cells.
        // Rows are kept at a shared power-of-two scale; the "+1" term is
        // carried in that scale and fades out exactly when it drops below
        // double resolution relative to the row.
        std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
        std::int64_t row_exp = 0;
        for (std::size_t ii = n; ii-- > 0;) {
            const double one = row_exp == 0 ? 1.0 : std::ldexp(1.0, -static_cast<int>(row_exp));
            double row_sum = 0.0;
            double row_max = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double v = k1(f[ii], g[j]) * (one + prev[j + 1]);
                cur[j] = v;
                row_sum += v;
                row_max = std::max(row_max, v);
            }
            cur[m] = 0.0;
            acc.add(row_sum, row_exp);
            if (row_max > kRescaleThreshold) {
                for (std::size_t j = 0; j <= m; ++j)
                    cur[j] = std::ldexp(cur[j], -kRescaleShift);
                row_exp += kRescaleShift;
            }
            std::swap(prev, cur);
        }
    } else {
        // Capped variant: along each diagonal keep the window products of
        // lengths 1..k_max ending at the current cell.
        const std::size_t cap = *params_.k_max;
        std::vector<double> window;
        for (std::size_t d = 0; d < n + m - 1; ++d) {
            const std::size_t i0 = d < m ? 0 : d - m + 1;
            const std::size_t j0 = d < m ? m - 1 - d : 0;
            const std::size_t len = std::min(n - i0, m - j0);
            const std::size_t width = std::min(cap, len);
            window.assign(width, 0.0);
            std::int64_t diag_exp = 0;
            for (std::size_t t = len; t-- > 0;) {
                const double a = k1(f[i0 + t], g[j0 + t]);
                const double one =
                    diag_exp == 0 ? 1.0 : std::ldexp(1.0, -static_cast<int>(diag_exp));
                double cell_sum = 0.0;
                double cell_max = 0.0;
                for (std::size_t k = width; k-- > 0;) {
                    const double below = k == 0 ? one : window[k - 1];
                    window[k] = a * below;
                    cell_sum += window[k];
                    cell_max = std::max(cell_max, window[k]);
                }
                acc.add(cell_sum, diag_exp);
                if (cell_max > kRescaleThreshold) {
                    for (double& w : window)
                        w = std::ldexp(w, -kRescaleShift);
                    diag_exp += kRescaleShift;
                }
            }
        }
    }

    ScaledValue out = acc.value();
    if (params_.averaged && !out.is_zero()) {
        const double count = pair_count(n, m, params_.k_max);
        ScaledValue scaled = ScaledValue::from_double(out.mantissa / count);
        scaled.exponent += out.exponent;
        out = scaled;
    }
    return out;
}

double StringKernel::k3(const AminoChain& f, const AminoChain& g) const {
    return k3_scaled(f, g).to_double();
}

double StringKernel::k3_hat(const AminoChain& f, const AminoChain& g) const {
    if (f == g)
        return 1.0;
    const double log_fg = k3_scaled(f, g).log();
    const double log_ff = k3_scaled(f, f).log();
    const double log_gg = k3_scaled(g, g).log();
    return std::exp(log_fg - 0.5 * (log_ff + log_gg));
}

double StringKernel::dist_rkhs(const AminoChain& f, const AminoChain& g) const {
    if (f == g)
        return 0.0;
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * k3_hat(f, g)));
}

double StringKernel::k3_estimate(const AminoChain& f, const AminoChain& g, std::size_t samples,
                                 std::uint64_t seed) const {
    if (samples == 0)
        throw DataError("k3_estimate requires at least one sample");
    const std::size_t n = f.size(), m = g.size();
    std::size_t kmax = std::min(n, m);
    if (params_.k_max)
        kmax = std::min(kmax, *params_.k_max);

    std::vector<double> weights(kmax);
    for (std::size_t k = 1; k <= kmax; ++k)
        weights[k - 1] = static_cast<double>(n - k + 1) * static_cast<double>(m - k + 1);

    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick_k(weights.begin(), weights.end());
    double mean = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t k = pick_k(rng) + 1;
        std::uniform_int_distribution<std::size_t> pick_i(0, n - k), pick_j(0, m - k);
        const std::size_t i = pick_i(rng), j = pick_j(rng);
        double prod = 1.0;
        for (std::size_t t = 0; t < k; ++t)
            prod *= k1(f[i + t], g[j + t]);
        mean += (prod - mean) / static_cast<double>(s + 1);
    }
    const double count = pair_count(n, m, params_.k_max);
    return params_.averaged ? mean : mean * count;
}

} // namespace aakern
