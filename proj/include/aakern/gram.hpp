#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "aakern/string_kernel.hpp"

namespace aakern {

// Stable content hash (hex text) over a chain set and the kernel parameters
// that shaped a Gram matrix. Order-independent in the chain set.
std::string gram_fingerprint(const std::vector<std::string>& sequences,
                             const KernelParams& params);

// Kernel values tabulated over an indexed chain set. Immutable after build.
class GramMatrix {
public:
    GramMatrix() = default;
    GramMatrix(std::vector<std::string> ids, Eigen::MatrixXd values, std::string fingerprint);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::string& fingerprint() const noexcept { return fingerprint_; }

    double at(std::size_t i, std::size_t j) const { return values_(static_cast<Eigen::Index>(i),
                                                                   static_cast<Eigen::Index>(j)); }

    // Row index of an identifier; throws DataError when unknown.
    std::size_t row_of(const std::string& id) const;
    bool contains(const std::string& id) const noexcept { return lookup_.count(id) != 0; }

    // Binary cache: header (magic, format version, fingerprint, index) plus
    // the row-major lower triangle as little-endian 8-byte floats.
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static GramMatrix load(std::istream& in);
    static GramMatrix load_file(const std::string& path);

private:
    std::vector<std::string> ids_;
    Eigen::MatrixXd values_;
    std::string fingerprint_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

// Correlation-normalized Gram over the given chains: unit diagonal, values
// k3_hat. Duplicate ids are rejected; duplicate sequences are legal but make
// the matrix singular (a warning is recorded if warn_sink is non-null).
GramMatrix build_gram(const std::vector<std::string>& ids, const std::vector<AminoChain>& chains,
                      const StringKernel& kernel, unsigned threads = 1,
                      std::vector<std::string>* warn_sink = nullptr);

// Root-mean-square difference of the two kernel rows over the full reference
// index. Identifiers must resolve in the reference Gram.
double dist_l2(const std::string& x, const std::string& y, const GramMatrix& reference);
double dist_l2_rows(const GramMatrix& reference, std::size_t row_x, std::size_t row_y);

// An (allele, peptide) pair addressing two Grams.
struct PanPoint {
    std::string allele;
    std::string peptide;
};

// Product kernel value between two pairs.
double pan_kernel(const PanPoint& a, const PanPoint& b, const GramMatrix& allele_gram,
                  const GramMatrix& peptide_gram);

// Gram of the product kernel over a list of pairs.
Eigen::MatrixXd build_pan_gram(const std::vector<PanPoint>& points, const GramMatrix& allele_gram,
                               const GramMatrix& peptide_gram);

} // namespace aakern
