#include "aakern/gram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "aakern/errors.hpp"
#include "aakern/parallel.hpp"

namespace aakern {

namespace {

constexpr char kMagic[8] = {'A', 'A', 'K', 'G', 'R', 'A', 'M', '1'};
constexpr std::uint32_t kFormatVersion = 1;

class Fnv1a {
public:
    void feed(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void feed(const std::string& s) {
        const std::uint64_t len = s.size();
        feed(&len, sizeof(len));
        feed(s.data(), s.size());
    }
    void feed(double v) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof(bits));
        feed(&bits, sizeof(bits));
    }
    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const std::uint32_t len = read_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    return s;
}

} // namespace

std::string gram_fingerprint(const std::vector<std::string>& sequences,
                             const KernelParams& params) {
    std::vector<std::string> sorted = sequences;
    std::sort(sorted.begin(), sorted.end());
    Fnv1a hash;
    const std::uint32_t version = kFormatVersion;
    hash.feed(&version, sizeof(version));
    hash.feed(params.beta);
    const std::uint64_t cap = params.k_max ? static_cast<std::uint64_t>(*params.k_max) : 0;
    hash.feed(&cap, sizeof(cap));
    const std::uint8_t averaged = params.averaged ? 1 : 0;
    hash.feed(&averaged, sizeof(averaged));
    const std::uint8_t normalized = 1; // correlation-normalized tables
    hash.feed(&normalized, sizeof(normalized));
    for (const auto& s : sorted)
        hash.feed(s);

    std::ostringstream out;
    out << std::hex << hash.digest();
    return out.str();
}

GramMatrix::GramMatrix(std::vector<std::string> ids, Eigen::MatrixXd values,
                       std::string fingerprint)
    : ids_(std::move(ids)), values_(std::move(values)), fingerprint_(std::move(fingerprint)) {
    if (static_cast<std::size_t>(values_.rows()) != ids_.size() ||
        static_cast<std::size_t>(values_.cols()) != ids_.size())
        throw DataError("gram matrix shape does not match its index");
    lookup_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!lookup_.emplace(ids_[i], i).second)
            throw DataError("duplicate identifier in gram index: " + ids_[i]);
    }
}

std::size_t GramMatrix::row_of(const std::string& id) const {
    const auto it = lookup_.find(id);
    if (it == lookup_.end())
        throw DataError("identifier not in gram index: " + id);
    return it->second;
}

void GramMatrix::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kFormatVersion);
    write_string(out, fingerprint_);
    write_u32(out, static_cast<std::uint32_t>(ids_.size()));
    for (const auto& id : ids_)
        write_string(out, id);
    for (std::size_t i = 0; i < ids_.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            write_f64(out, at(i, j));
    if (!out)
        throw DataError("failed writing gram cache");
}

void GramMatrix::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open gram cache for writing: " + path);
    save(out);
}

GramMatrix GramMatrix::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a gram cache file");
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion)
        throw DataError("unsupported gram cache version " + std::to_string(version));
    std::string fingerprint = read_string(in);
    const std::uint32_t n = read_u32(in);
    std::vector<std::string> ids(n);
    for (auto& id : ids)
        id = read_string(in);
    Eigen::MatrixXd values(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j <= i; ++j) {
            const double v = read_f64(in);
            values(i, j) = v;
            values(j, i) = v;
        }
    }
    if (!in)
        throw DataError("truncated gram cache");
    return GramMatrix(std::move(ids), std::move(values), std::move(fingerprint));
}

GramMatrix GramMatrix::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open gram cache: " + path);
    return load(in);
}

GramMatrix build_gram(const std::vector<std::string>& ids, const std::vector<AminoChain>& chains,
                      const StringKernel& kernel, unsigned threads,
                      std::vector<std::string>* warn_sink) {
    if (ids.empty() || ids.size() != chains.size())
        throw DataError("gram build needs a nonempty id list matching the chain list");

    if (warn_sink) {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < chains.size(); ++i) {
            const std::string s = chains[i].to_string();
            if (!seen.insert(s).second)
                warn_sink->push_back("duplicate sequence in gram input (singular matrix): " +
                                     ids[i]);
        }
    }

    const std::size_t n = ids.size();
    // Self-similarities first, then all pairs; entries are independent.
    std::vector<double> log_diag(n);
    parallel_for(n, threads,
                 [&](std::size_t i) { log_diag[i] = kernel.k3_scaled(chains[i], chains[i]).log(); });

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    const std::size_t pairs = n * (n - 1) / 2;
    parallel_for(pairs, threads, [&](std::size_t flat) {
        // Unrank flat index into (i, j) with i > j.
        std::size_t i = static_cast<std::size_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(flat))) / 2.0);
        while (i * (i - 1) / 2 > flat)
            --i;
        while ((i + 1) * i / 2 <= flat)
            ++i;
        const std::size_t j = flat - i * (i - 1) / 2;
        double v;
        if (chains[i] == chains[j]) {
            v = 1.0;
        } else {
            const double log_fg = kernel.k3_scaled(chains[i], chains[j]).log();
            v = std::exp(log_fg - 0.5 * (log_diag[i] + log_diag[j]));
        }
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    for (std::size_t i = 0; i < n; ++i)
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;

    std::vector<std::string> sequences;
    sequences.reserve(n);
    for (const auto& c : chains)
        sequences.push_back(c.to_string());
    return GramMatrix(ids, std::move(values), gram_fingerprint(sequences, kernel.params()));
}

double dist_l2_rows(const GramMatrix& reference, std::size_t row_x, std::size_t row_y) {
    const auto n = static_cast<Eigen::Index>(reference.size());
    const auto& G = reference.values();
    double sum = 0.0;
    for (Eigen::Index z = 0; z < n; ++z) {
        const double d = G(static_cast<Eigen::Index>(row_x), z) -
                         G(static_cast<Eigen::Index>(row_y), z);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

double dist_l2(const std::string& x, const std::string& y, const GramMatrix& reference) {
    return dist_l2_rows(reference, reference.row_of(x), reference.row_of(y));
}

double pan_kernel(const PanPoint& a, const PanPoint& b, const GramMatrix& allele_gram,
                  const GramMatrix& peptide_gram) {
    return allele_gram.at(allele_gram.row_of(a.allele), allele_gram.row_of(b.allele)) *
           peptide_gram.at(peptide_gram.row_of(a.peptide), peptide_gram.row_of(b.peptide));
}

Eigen::MatrixXd build_pan_gram(const std::vector<PanPoint>& points, const GramMatrix& allele_gram,
                               const GramMatrix& peptide_gram) {
    const std::size_t n = points.size();
    std::vector<std::size_t> arow(n), prow(n);
    for (std::size_t i = 0; i < n; ++i) {
        arow[i] = allele_gram.row_of(points[i].allele);
        prow[i] = peptide_gram.row_of(points[i].peptide);
    }
    Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = allele_gram.at(arow[i], arow[j]) * peptide_gram.at(prow[i], prow[j]);
            G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return G;
}

} // namespace aakern
