#pragma once

#include "symbourse/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace symbourse::div {

// Relative margin under which two gains count as tied.
inline constexpr double kGainTieTolerance = 1e-12;

struct Cut {
    std::size_t variable = 0;
    std::string name;
    double threshold = 0.0;  // original units

    // `[name <= threshold]` with six decimals.
    std::string question() const;
};

// A candidate binary question on one cluster.
struct CutCandidate {
    std::size_t variable = 0;
    double threshold = 0.0;        // in the matrix's own units
    std::size_t below_object = 0;  // largest value kept on the left
    std::size_t above_object = 0;  // smallest value sent right
    double gain = 0.0;             // parent - left - right within-inertia
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
};

enum class Side { Root, Left, Right };

struct Split {
    int number = 0;  // execution order, from 1
    Cut cut;
    double gain = 0.0;
    std::size_t left = 0;  // node indices
    std::size_t right = 0;
};

struct DivisionNode {
    std::vector<std::size_t> members;  // object indices, ascending
    Side side = Side::Root;
    int class_number = 0;  // meaningful on leaves
    double within_inertia = 0.0;
    std::optional<Split> split;

    bool is_leaf() const { return !split.has_value(); }
};

struct DivisionTree {
    std::vector<DivisionNode> nodes;  // nodes[0] is the root
    std::vector<std::string> labels;
    std::vector<std::string> variable_names;
    std::vector<double> scales;  // per-variable divisor applied before clustering
    bool normalized = false;
    std::size_t requested_k = 0;
    std::size_t k = 0;
    double total_inertia = 0.0;
    double explained_inertia = 0.0;  // percent

    bool stopped_early() const { return k < requested_k; }
    // Class number per object.
    std::vector<int> assignments() const;
    // Leaf node indices in left-to-right order.
    std::vector<std::size_t> leaves() const;
};

// Sum over objects of (1/n)·||x_i - g||².
double total_inertia(const Matrix& matrix);
// Within-inertia of a subset, each object weighted 1/rows().
double within_inertia(const Matrix& matrix, std::span<const std::size_t> members);

// Best monothetic cut over all variables and all midpoints between consecutive
// distinct values; ties go to the lower variable, then the lower threshold.
std::optional<CutCandidate> best_cut(std::span<const std::size_t> members, const Matrix& matrix);

// Greedy top-down monothetic clustering into `k` classes. Stops early (with
// `k` < `requested_k`) if no leaf can be split any more.
DivisionTree div_cluster(const Matrix& matrix, std::size_t k, bool normalize,
                         std::vector<std::string> labels = {}, std::vector<std::string> variable_names = {});

std::string render_division_tree(const DivisionTree& tree);
// `label,class`
std::string assignments_csv(const DivisionTree& tree);

}  // namespace symbourse::div
