#include "aakern/tree_export.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "aakern/errors.hpp"
#include "aakern/registry.hpp"

namespace aakern {

namespace {

using nlohmann::json;

double node_height(const ClusterTree& tree, std::size_t node) {
    return node < tree.leaf_count() ? 0.0 : tree.merges[node - tree.leaf_count()].height;
}

// Labels with structural characters (WHO names carry ':') get single quotes.
std::string newick_label(const std::string& name) {
    if (name.find_first_of(" (),:;'[]\t") == std::string::npos)
        return name;
    std::string quoted = "'";
    for (char c : name) {
        quoted.push_back(c);
        if (c == '\'')
            quoted.push_back('\'');
    }
    quoted.push_back('\'');
    return quoted;
}

void newick_node(const ClusterTree& tree, std::size_t node, double parent_height,
                 std::string& out) {
    char buf[48];
    if (node < tree.leaf_count()) {
        out += newick_label(tree.leaves[node]);
    } else {
        const auto& m = tree.merges[node - tree.leaf_count()];
        out.push_back('(');
        newick_node(tree, m.left, m.height, out);
        out.push_back(',');
        newick_node(tree, m.right, m.height, out);
        out.push_back(')');
        std::snprintf(buf, sizeof(buf), "%.6g", m.diameter);
        out += buf;
    }
    if (parent_height >= 0.0) {
        std::snprintf(buf, sizeof(buf), ":%.6g", parent_height - node_height(tree, node));
        out += buf;
    }
}

} // namespace

std::string tree_to_newick(const ClusterTree& tree) {
    if (tree.merges.empty())
        throw DataError("cannot export a tree without merges");
    std::string out;
    const std::size_t root = tree.leaf_count() + tree.merges.size() - 1;
    newick_node(tree, root, -1.0, out);
    out += ";\n";
    return out;
}

std::string tree_to_json(const ClusterTree& tree) {
    json doc;
    doc["format"] = "aakern-cluster-tree";
    doc["version"] = 1;
    doc["leaves"] = tree.leaves;
    json merges = json::array();
    for (std::size_t s = 0; s < tree.merges.size(); ++s) {
        const auto& m = tree.merges[s];
        json entry;
        entry["node"] = tree.leaf_count() + s;
        entry["left"] = m.left;
        entry["right"] = m.right;
        entry["height"] = m.height;
        entry["diameter"] = m.diameter;
        json members = json::array();
        for (std::size_t leaf : tree.members(tree.leaf_count() + s))
            members.push_back(tree.leaves[leaf]);
        entry["members"] = members;
        merges.push_back(entry);
    }
    doc["merges"] = merges;
    return doc.dump(2) + "\n";
}

ClusterTree tree_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("bad tree JSON: ") + e.what());
    }
    if (doc.value("format", "") != "aakern-cluster-tree")
        throw DataError("not a cluster tree JSON document");
    ClusterTree tree;
    tree.leaves = doc.at("leaves").get<std::vector<std::string>>();
    for (const auto& entry : doc.at("merges")) {
        ClusterTree::Merge m;
        m.left = entry.at("left").get<std::size_t>();
        m.right = entry.at("right").get<std::size_t>();
        m.height = entry.at("height").get<double>();
        m.diameter = entry.at("diameter").get<double>();
        tree.merges.push_back(m);
    }
    if (tree.merges.size() + 1 != tree.leaves.size())
        throw DataError("tree JSON merge count does not match leaf count");
    return tree;
}

std::string cut_summary_tsv(const ClusterTree& tree, const DistanceMatrix& D, std::size_t k) {
    const auto clusters = cut(tree, k);
    std::string out = "cluster\tsize\tdiameter\tdominant_family\tmembers\n";
    char buf[64];
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::map<std::string, std::size_t> families;
        std::string members;
        for (std::size_t leaf : clusters[c]) {
            const std::string& name = tree.leaves[leaf];
            ++families[family_of(name)];
            if (!members.empty())
                members.push_back(',');
            members += name;
        }
        std::string dominant;
        std::size_t count = 0;
        for (const auto& [family, n] : families) {
            if (n > count) {
                dominant = family;
                count = n;
            }
        }
        std::snprintf(buf, sizeof(buf), "%zu\t%zu\t%.6g\t", c + 1, clusters[c].size(),
                      diameter(clusters[c], D));
        out += buf;
        out += dominant;
        out.push_back('\t');
        out += members;
        out.push_back('\n');
    }
    return out;
}

} // namespace aakern
