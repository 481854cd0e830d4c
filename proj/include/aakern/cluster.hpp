#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "aakern/gram.hpp"

namespace aakern {

// Symmetric nonnegative distances with zero diagonal over named items.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::string> ids, Eigen::MatrixXd d);

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    double at(std::size_t i, std::size_t j) const {
        return d_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& values() const noexcept { return d_; }

    std::string to_tsv() const;
    static DistanceMatrix from_tsv(std::istream& in);

private:
    std::vector<std::string> ids_;
    Eigen::MatrixXd d_;
};

// L2 distances among `subset_ids`, averaging over the full reference index.
DistanceMatrix l2_distance_matrix(const GramMatrix& reference,
                                  const std::vector<std::string>& subset_ids);

struct OwaParams {
    double gamma = 0.1;
};

// Normalized weights w_i proportional to e^{i/mu}, mu = gamma (1 + n),
// i = 1..n. Strictly increasing; applied to a descending-ordered distance
// vector they emphasize the small distances.
std::vector<double> owa_weights(std::size_t n, double gamma);

// Ordered-weighted-average linkage: all cross distances between X and Y
// sorted descending, dotted with owa_weights(|X| * |Y|). Clusters are given
// as leaf index lists and must be disjoint and nonempty.
double owa_linkage(const std::vector<std::size_t>& X, const std::vector<std::size_t>& Y,
                   const DistanceMatrix& D, const OwaParams& params);

// Binary merge tree. Leaves are numbered 0..n-1 in distance-matrix order;
// merge s creates node n+s. Heights are the linkage values at merge time;
// diameters are max pairwise distances within each node's leaf set.
struct ClusterTree {
    std::vector<std::string> leaves;
    struct Merge {
        std::size_t left = 0;
        std::size_t right = 0;
        double height = 0.0;
        double diameter = 0.0;
    };
    std::vector<Merge> merges;

    std::size_t leaf_count() const noexcept { return leaves.size(); }
    // Leaf indices under a node id (leaf ids map to singletons).
    std::vector<std::size_t> members(std::size_t node) const;
};

// Bottom-up agglomeration under OWA linkage, recomputing linkages against
// each merged cluster from the raw distances. Ties on the minimal linkage
// break toward the pair whose smaller node id is least, then the larger.
ClusterTree agglomerate(const DistanceMatrix& D, const OwaParams& params = {});

// Partition obtained by undoing the last k-1 merges; clusters are ordered by
// creation and each lists its leaf indices in ascending order.
std::vector<std::vector<std::size_t>> cut(const ClusterTree& tree, std::size_t k);

// Max pairwise distance within the cluster; zero for singletons.
double diameter(const std::vector<std::size_t>& members, const DistanceMatrix& D);

} // namespace aakern
