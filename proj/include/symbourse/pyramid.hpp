#pragma once

#include "symbourse/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symbourse::pyramid {

struct Cluster {
    std::vector<std::size_t> members;  // object indices, in base order
    int palier = 0;                    // creation rank from 1; 0 for singletons
    double index = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> merged_from;  // cluster ids
    std::vector<std::size_t> merged_into;                           // at most two
};

// Indexed overlapping clustering whose clusters are all intervals of `order`.
// Clusters [0, n) are the singletons (cluster i holds object i); the rest are
// stored by palier.
struct Pyramid {
    std::vector<std::string> labels;
    std::vector<std::size_t> order;  // base order as object indices
    std::vector<Cluster> clusters;

    std::size_t object_count() const { return labels.size(); }
    std::size_t palier_count() const { return clusters.size() - labels.size(); }
};

// Ascending construction with complete linkage. Among admissible merges the
// smallest linkage wins, then the larger union, then the smallest
// (min label of A, min label of B). A merge is admissible when both clusters
// have been merged fewer than twice, the union is not inside any existing
// cluster, and the union can be laid out contiguously in the base order.
Pyramid pyr_cluster(const Matrix& dissimilarity, std::vector<std::string> labels);

// Base order as labels, after re-checking that every cluster is contiguous.
std::vector<std::string> compatible_order(const Pyramid& pyramid);

// One line per palier: `palier <k>: {a,b,c} index=<6 decimals>`.
std::string render_text(const Pyramid& pyramid);
std::string render_svg(const Pyramid& pyramid);

}  // namespace symbourse::pyramid
