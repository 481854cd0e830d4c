#pragma once

#include <string>

#include "aakern/cluster.hpp"

namespace aakern {

// Newick text with branch lengths equal to parent/child height differences
// and internal node labels carrying the node diameter.
std::string tree_to_newick(const ClusterTree& tree);

// JSON with full node metadata (members, height, diameter); inverse of
// tree_from_json.
std::string tree_to_json(const ClusterTree& tree);
ClusterTree tree_from_json(const std::string& text);

// One row per cluster of the k-cut: id, size, linkage height at formation,
// diameter, dominant family among the member names, members.
std::string cut_summary_tsv(const ClusterTree& tree, const DistanceMatrix& D, std::size_t k);

} // namespace aakern
