#include "symbourse/div.hpp"

#include "symbourse/symbolic.hpp"

#include <algorithm>
#include <numeric>

namespace symbourse::div {

namespace {

bool better_gain(double candidate, double incumbent) {
    return candidate > incumbent * (1.0 + kGainTieTolerance);
}

}  // namespace

std::string Cut::question() const {
    return "[" + name + " <= " + format_fixed(threshold, 6) + "]";
}

double within_inertia(const Matrix& matrix, std::span<const std::size_t> members) {
    if (members.empty()) {
        return 0.0;
    }
    const std::size_t p = matrix.cols();
    std::vector<double> g(p, 0.0);
    for (auto i : members) {
        for (std::size_t j = 0; j < p; ++j) g[j] += matrix(i, j);
    }
    for (auto& v : g) v /= static_cast<double>(members.size());
    double sum = 0.0;
    for (auto i : members) {
        for (std::size_t j = 0; j < p; ++j) {
            const double d = matrix(i, j) - g[j];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(matrix.rows());
}

double total_inertia(const Matrix& matrix) {
    if (matrix.rows() == 0) {
        throw Error(ErrorKind::InvalidArgument, "inertia of an empty matrix");
    }
    std::vector<std::size_t> all(matrix.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return within_inertia(matrix, all);
}

std::optional<CutCandidate> best_cut(std::span<const std::size_t> members, const Matrix& matrix) {
    const std::size_t m = members.size();
    const std::size_t p = matrix.cols();
    if (m < 2) {
        return std::nullopt;
    }
    const double weight = 1.0 / static_cast<double>(matrix.rows());

    std::vector<double> total(p, 0.0);
    for (auto i : members) {
        for (std::size_t j = 0; j < p; ++j) total[j] += matrix(i, j);
    }

    std::optional<CutCandidate> best;
    std::vector<std::size_t> order(members.begin(), members.end());
    std::vector<double> prefix(p);
    for (std::size_t var = 0; var < p; ++var) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return matrix(a, var) < matrix(b, var); });
        std::fill(prefix.begin(), prefix.end(), 0.0);
        for (std::size_t s = 0; s + 1 < m; ++s) {
            for (std::size_t j = 0; j < p; ++j) prefix[j] += matrix(order[s], j);
            const double lo = matrix(order[s], var);
            const double hi = matrix(order[s + 1], var);
            if (!(lo < hi)) {
                continue;
            }
            // Between-group inertia of the two parts: w·nL·nR/n·||gL - gR||².
            const double nl = static_cast<double>(s + 1);
            const double nr = static_cast<double>(m - s - 1);
            double dist2 = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = prefix[j] / nl - (total[j] - prefix[j]) / nr;
                dist2 += d * d;
            }
            const double gain = weight * nl * nr / static_cast<double>(m) * dist2;
            if (!best || better_gain(gain, best->gain)) {
                CutCandidate c;
                c.variable = var;
                c.threshold = std::midpoint(lo, hi);
                c.below_object = order[s];
                c.above_object = order[s + 1];
                c.gain = gain;
                c.left.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s + 1));
                c.right.assign(order.begin() + static_cast<std::ptrdiff_t>(s + 1), order.end());
                best = std::move(c);
            }
        }
    }
    if (best) {
        std::sort(best->left.begin(), best->left.end());
        std::sort(best->right.begin(), best->right.end());
    }
    return best;
}

DivisionTree div_cluster(const Matrix& matrix, std::size_t k, bool normalize, std::vector<std::string> labels,
                         std::vector<std::string> variable_names) {
    const std::size_t n = matrix.rows();
    const std::size_t p = matrix.cols();
    if (n == 0 || p == 0) {
        throw Error(ErrorKind::InvalidArgument, "DIV needs at least one object and one variable");
    }
    if (k < 1 || k > n) {
        throw Error(ErrorKind::InvalidArgument,
                    "K must be between 1 and the object count (" + std::to_string(n) + "), got " + std::to_string(k));
    }
    if (labels.empty()) {
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    }
    if (variable_names.empty()) {
        for (std::size_t j = 0; j < p; ++j) variable_names.push_back("x" + std::to_string(j + 1));
    }
    if (labels.size() != n || variable_names.size() != p) {
        throw Error(ErrorKind::InvalidArgument, "DIV: label or variable-name count mismatch");
    }

    DivisionTree tree;
    tree.labels = std::move(labels);
    tree.variable_names = std::move(variable_names);
    tree.normalized = normalize;
    tree.requested_k = k;

    Matrix work = matrix;
    tree.scales.assign(p, 1.0);
    if (normalize && n >= 2) {
        auto norm = symbolic::normalize(matrix, tree.variable_names);
        work = std::move(norm.matrix);
        tree.scales = std::move(norm.scales);
    }

    DivisionNode root;
    root.members.resize(n);
    std::iota(root.members.begin(), root.members.end(), std::size_t{0});
    root.class_number = 1;
    root.within_inertia = within_inertia(work, root.members);
    tree.total_inertia = root.within_inertia;
    tree.nodes.push_back(std::move(root));

    std::vector<std::optional<CutCandidate>> candidates{best_cut(tree.nodes[0].members, work)};
    int next_class = 1;
    int split_number = 0;
    std::size_t leaves = 1;
    while (leaves < k) {
        // Leaf with the largest gain; ties go to the lower class number.
        std::optional<std::size_t> chosen;
        for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
            if (!tree.nodes[node].is_leaf() || !candidates[node]) {
                continue;
            }
            if (!chosen) {
                chosen = node;
                continue;
            }
            const double g = candidates[node]->gain;
            const double best = candidates[*chosen]->gain;
            if (better_gain(g, best) ||
                (!better_gain(best, g) && tree.nodes[node].class_number < tree.nodes[*chosen].class_number)) {
                chosen = node;
            }
        }
        if (!chosen) {
            break;
        }
        const CutCandidate cand = std::move(*candidates[*chosen]);
        candidates[*chosen].reset();

        DivisionNode left;
        left.members = cand.left;
        left.side = Side::Left;
        left.class_number = tree.nodes[*chosen].class_number;
        left.within_inertia = within_inertia(work, left.members);
        DivisionNode right;
        right.members = cand.right;
        right.side = Side::Right;
        right.class_number = ++next_class;
        right.within_inertia = within_inertia(work, right.members);

        Split split;
        split.number = ++split_number;
        split.cut.variable = cand.variable;
        split.cut.name = tree.variable_names[cand.variable];
        split.cut.threshold = std::midpoint(matrix(cand.below_object, cand.variable),
                                            matrix(cand.above_object, cand.variable));
        split.gain = cand.gain;
        split.left = tree.nodes.size();
        split.right = tree.nodes.size() + 1;
        tree.nodes[*chosen].split = split;

        candidates.push_back(best_cut(left.members, work));
        candidates.push_back(best_cut(right.members, work));
        tree.nodes.push_back(std::move(left));
        tree.nodes.push_back(std::move(right));
        ++leaves;
    }

    tree.k = leaves;
    double within = 0.0;
    for (const auto& node : tree.nodes) {
        if (node.is_leaf()) within += node.within_inertia;
    }
    tree.explained_inertia = tree.total_inertia > 0.0 ? 100.0 * (1.0 - within / tree.total_inertia) : 0.0;
    tree.explained_inertia = std::clamp(tree.explained_inertia, 0.0, 100.0);
    return tree;
}

std::vector<std::size_t> DivisionTree::leaves() const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (nodes[node].is_leaf()) {
            out.push_back(node);
        } else {
            stack.push_back(nodes[node].split->right);
            stack.push_back(nodes[node].split->left);
        }
    }
    return out;
}

std::vector<int> DivisionTree::assignments() const {
    std::vector<int> out(labels.size(), 0);
    for (auto leaf : leaves()) {
        for (auto i : nodes[leaf].members) out[i] = nodes[leaf].class_number;
    }
    return out;
}

namespace {

std::string repeat(std::string_view s, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += s;
    return out;
}

void render_node(const DivisionTree& tree, std::size_t node, std::size_t depth, std::vector<std::string>& lines) {
    const auto& nd = tree.nodes[node];
    if (nd.is_leaf()) {
        const char* side = nd.side == Side::Right ? "Nd" : "Ng";
        lines.push_back(repeat("! ", depth) + "+---- Classe " + std::to_string(nd.class_number) + " (" + side + "=" +
                        std::to_string(nd.members.size()) + ")");
        return;
    }
    render_node(tree, nd.split->left, depth + 1, lines);
    lines.push_back(repeat("! ", depth) + "!----" + std::to_string(nd.split->number) + "- " + nd.split->cut.question());
    render_node(tree, nd.split->right, depth + 1, lines);
}

}  // namespace

std::string render_division_tree(const DivisionTree& tree) {
    constexpr std::string_view kIndent = "          ";
    std::string out = "PARTITION IN " + std::to_string(tree.k) + " CLUSTERS :\n";
    out += "Explicated inertia : " + format_fixed(tree.explained_inertia, 6) + "\n\n";
    std::vector<std::string> lines;
    render_node(tree, 0, 0, lines);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) {
            out += std::string(kIndent) + "!\n";
        }
        out += std::string(kIndent) + lines[i] + "\n";
    }
    return out;
}

std::string assignments_csv(const DivisionTree& tree) {
    std::string out = "label,class\n";
    const auto classes = tree.assignments();
    for (std::size_t i = 0; i < tree.labels.size(); ++i) {
        out += csv_field(tree.labels[i]) + "," + std::to_string(classes[i]) + "\n";
    }
    return out;
}

}  // namespace symbourse::div
