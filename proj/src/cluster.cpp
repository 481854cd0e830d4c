#include "aakern/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "aakern/errors.hpp"

namespace aakern {

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd d)
    : ids_(std::move(ids)), d_(std::move(d)) {
    const auto n = static_cast<Eigen::Index>(ids_.size());
    if (d_.rows() != n || d_.cols() != n)
        throw DataError("distance matrix shape does not match its index");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d_(i, i) != 0.0)
            throw DataError("distance matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (d_(i, j) != d_(j, i))
                throw DataError("distance matrix must be symmetric");
            if (d_(i, j) < 0.0)
                throw DataError("distances must be nonnegative");
        }
    }
}

std::string DistanceMatrix::to_tsv() const {
    std::string out = "id";
    for (const auto& id : ids_) {
        out.push_back('\t');
        out += id;
    }
    out.push_back('\n');
    char buf[40];
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        out += ids_[i];
        for (std::size_t j = 0; j < ids_.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "\t%.12g", at(i, j));
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

DistanceMatrix DistanceMatrix::from_tsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("empty distance matrix file");
    std::vector<std::string> ids;
    {
        std::istringstream header(line);
        std::string tok;
        std::getline(header, tok, '\t'); // "id"
        while (std::getline(header, tok, '\t'))
            ids.push_back(tok);
    }
    const auto n = static_cast<Eigen::Index>(ids.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw DataError("truncated distance matrix");
        std::istringstream row(line);
        std::string tok;
        std::getline(row, tok, '\t');
        if (tok != ids[static_cast<std::size_t>(i)])
            throw DataError("distance matrix row label mismatch: " + tok);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::getline(row, tok, '\t'))
                throw DataError("short distance matrix row: " + ids[static_cast<std::size_t>(i)]);
            d(i, j) = std::stod(tok);
        }
    }
    // Symmetrize away text round-trip noise; from_tsv/to_tsv stay inverse at
    // 12 significant digits.
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = 0.5 * (d(i, j) + d(j, i));
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return DistanceMatrix(std::move(ids), std::move(d));
}

DistanceMatrix l2_distance_matrix(const GramMatrix& reference,
                                  const std::vector<std::string>& subset_ids) {
    const std::size_t n = subset_ids.size();
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i] = reference.row_of(subset_ids[i]);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double v = dist_l2_rows(reference, rows[i], rows[j]);
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return DistanceMatrix(subset_ids, std::move(d));
}

std::vector<double> owa_weights(std::size_t n, double gamma) {
    if (n == 0 || !(gamma > 0.0))
        throw DataError("owa_weights needs n >= 1 and gamma > 0");
    const double mu = gamma * (1.0 + static_cast<double>(n));
    // w_i = e^{i/mu} / sum_j e^{j/mu}; factor out e^{n/mu} so the largest
    // term is 1 regardless of n and gamma.
    std::vector<double> w(n);
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double v = std::exp((static_cast<double>(i) - static_cast<double>(n)) / mu);
        w[i - 1] = v;
        sum += v;
    }
    for (double& v : w)
        v /= sum;
    return w;
}

double owa_linkage(const std::vector<std::size_t>& X, const std::vector<std::size_t>& Y,
                   const DistanceMatrix& D, const OwaParams& params) {
    if (X.empty() || Y.empty())
        throw DataError("owa_linkage needs nonempty clusters");
    for (std::size_t x : X)
        for (std::size_t y : Y)
            if (x == y)
                throw DataError("owa_linkage clusters overlap");

    std::vector<double> cross;
    cross.reserve(X.size() * Y.size());
    for (std::size_t x : X)
        for (std::size_t y : Y)
            cross.push_back(D.at(x, y));
    std::sort(cross.begin(), cross.end(), std::greater<double>());

    const std::vector<double> w = owa_weights(cross.size(), params.gamma);
    double linkage = 0.0;
    for (std::size_t i = 0; i < cross.size(); ++i)
        linkage += w[i] * cross[i];
    return linkage;
}

namespace {

struct ActiveCluster {
    std::size_t node = 0; // tree node id (creation order)
    std::vector<std::size_t> members;
    double diameter = 0.0;
};

} // namespace

ClusterTree agglomerate(const DistanceMatrix& D, const OwaParams& params) {
    const std::size_t n = D.size();
    if (n < 2)
        throw DataError("agglomeration needs at least two items");

    ClusterTree tree;
    tree.leaves = D.ids();

    std::vector<ActiveCluster> active(n);
    for (std::size_t i = 0; i < n; ++i)
        active[i] = ActiveCluster{i, {i}, 0.0};

    // Pairwise linkage cache among active clusters, keyed by position.
    std::vector<std::vector<double>> link(n);
    for (std::size_t i = 0; i < n; ++i) {
        link[i].resize(i);
        for (std::size_t j = 0; j < i; ++j)
            link[i][j] = D.at(i, j);
    }

    std::size_t next_node = n;
    while (active.size() > 1) {
        std::size_t bi = 1, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < active.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double v = link[i][j];
                const std::size_t lo = std::min(active[i].node, active[j].node);
                const std::size_t hi = std::max(active[i].node, active[j].node);
                const std::size_t blo = std::min(active[bi].node, active[bj].node);
                const std::size_t bhi = std::max(active[bi].node, active[bj].node);
                if (v < best || (v == best && (lo < blo || (lo == blo && hi < bhi)))) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }

        ActiveCluster merged;
        merged.node = next_node++;
        const ActiveCluster& A = active[bi];
        const ActiveCluster& B = active[bj];
        merged.members.reserve(A.members.size() + B.members.size());
        merged.members.insert(merged.members.end(), A.members.begin(), A.members.end());
        merged.members.insert(merged.members.end(), B.members.begin(), B.members.end());
        std::sort(merged.members.begin(), merged.members.end());

        double cross_max = 0.0;
        for (std::size_t x : A.members)
            for (std::size_t y : B.members)
                cross_max = std::max(cross_max, D.at(x, y));
        merged.diameter = std::max({A.diameter, B.diameter, cross_max});

        tree.merges.push_back({std::min(A.node, B.node), std::max(A.node, B.node), best,
                               merged.diameter});

        // Drop the two merged clusters (larger position first) and their
        // cache rows, then append the union with freshly computed linkages.
        const std::size_t hi_pos = std::max(bi, bj), lo_pos = std::min(bi, bj);
        for (std::size_t pos : {hi_pos, lo_pos}) {
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(pos));
            link.erase(link.begin() + static_cast<std::ptrdiff_t>(pos));
            for (auto& row : link)
                if (row.size() > pos)
                    row.erase(row.begin() + static_cast<std::ptrdiff_t>(pos));
        }
        std::vector<double> fresh(active.size());
        for (std::size_t j = 0; j < active.size(); ++j)
            fresh[j] = owa_linkage(merged.members, active[j].members, D, params);
        active.push_back(std::move(merged));
        link.push_back(std::move(fresh));
    }

    return tree;
}

std::vector<std::size_t> ClusterTree::members(std::size_t node) const {
    const std::size_t n = leaf_count();
    if (node < n)
        return {node};
    const std::size_t m = node - n;
    if (m >= merges.size())
        throw DataError("node id out of range");
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack = {node};
    while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        if (cur < n) {
            out.push_back(cur);
        } else {
            stack.push_back(merges[cur - n].left);
            stack.push_back(merges[cur - n].right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> cut(const ClusterTree& tree, std::size_t k) {
    const std::size_t n = tree.leaf_count();
    if (k < 1 || k > n)
        throw DataError("cut level out of range");

    // Applying the first n-k merges leaves exactly k clusters.
    std::vector<std::size_t> parent(n + tree.merges.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t s = 0; s + k < n; ++s) {
        const auto& m = tree.merges[s];
        const std::size_t target = n + s;
        parent[find(m.left)] = target;
        parent[find(m.right)] = target;
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t leaf = 0; leaf < n; ++leaf)
        groups[find(leaf)].push_back(leaf);

    std::vector<std::vector<std::size_t>> clusters;
    clusters.reserve(groups.size());
    for (auto& [root, members] : groups)
        clusters.push_back(std::move(members));
    if (clusters.size() != k)
        throw NumericError("cut produced an unexpected cluster count");
    return clusters;
}

double diameter(const std::vector<std::size_t>& members, const DistanceMatrix& D) {
    if (members.empty())
        throw DataError("diameter of an empty cluster");
    double best = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
            best = std::max(best, D.at(members[a], members[b]));
    return best;
}

} // namespace aakern
