#pragma once

// Slow, direct reimplementations used as references in tests. None of them
// call into the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double population_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline std::vector<double> column(const Rows& x, std::size_t j) {
    std::vector<double> out;
    for (const auto& r : x) out.push_back(r[j]);
    return out;
}

// Σ_{i in S} (1/n) ||z_i - mean_S||², straight from the definition.
inline double within(const Rows& z, const std::vector<std::size_t>& members) {
    if (members.empty()) return 0.0;
    const std::size_t p = z[0].size();
    double total = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (auto i : members) m += z[i][j];
        m /= static_cast<double>(members.size());
        for (auto i : members) total += (z[i][j] - m) * (z[i][j] - m);
    }
    return total / static_cast<double>(z.size());
}

struct DivStep {
    int split_class = 0;  // class number of the leaf that was cut
    std::size_t variable = 0;
    double threshold = 0.0;  // original units
    double gain = 0.0;
    double parent = 0.0;
    double left = 0.0;
    double right = 0.0;
};

struct DivResult {
    std::vector<int> assignment;  // class number per object
    std::vector<DivStep> steps;
    double explained = 0.0;
    std::size_t k = 0;
};

// Greedy monothetic division by exhaustive enumeration: every leaf, every
// variable, every midpoint between consecutive distinct values. Gains within
// a relative 1e-12 count as ties and keep the earlier candidate in
// (class, variable, threshold) order. The left part keeps the leaf's class
// number, the right part takes the next unused number.
inline DivResult div_greedy(const Rows& x, std::size_t k, bool normalize) {
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    Rows z = x;
    if (normalize) {
        for (std::size_t j = 0; j < p; ++j) {
            const double sd = population_sd(column(x, j));
            for (auto& r : z) r[j] /= sd;
        }
    }
    std::map<int, std::vector<std::size_t>> leaves;
    for (std::size_t i = 0; i < n; ++i) leaves[1].push_back(i);
    DivResult out;
    int next = 1;
    while (leaves.size() < k) {
        std::optional<DivStep> best;
        std::vector<std::size_t> best_left, best_right;
        for (const auto& [c, members] : leaves) {
            const double parent = within(z, members);
            for (std::size_t j = 0; j < p; ++j) {
                std::set<double> values;
                for (auto i : members) values.insert(x[i][j]);
                for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
                    const double a = *it;
                    const double b = *std::next(it);
                    std::vector<std::size_t> l, r;
                    for (auto i : members) (x[i][j] <= a ? l : r).push_back(i);
                    const double wl = within(z, l);
                    const double wr = within(z, r);
                    const double gain = parent - wl - wr;
                    if (!best || gain > best->gain * (1.0 + 1e-12)) {
                        best = DivStep{c, j, (a + b) / 2.0, gain, parent, wl, wr};
                        best_left = l;
                        best_right = r;
                    }
                }
            }
        }
        if (!best) break;
        leaves[best->split_class] = best_left;
        leaves[++next] = best_right;
        out.steps.push_back(*best);
    }
    out.k = leaves.size();
    out.assignment.assign(n, 0);
    double w = 0.0;
    for (const auto& [c, members] : leaves) {
        for (auto i : members) out.assignment[i] = c;
        w += within(z, members);
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const double total = within(z, all);
    out.explained = total > 0.0 ? 100.0 * (1.0 - w / total) : 0.0;
    return out;
}

// Classical PCA on a point cloud: correlation matrix from the definition,
// eigenpairs by power iteration with deflation.
struct PointPca {
    std::vector<double> eigenvalues;
    Rows axes;  // axes[k] is the k-th unit eigenvector
    Rows standardized;
};

inline PointPca point_pca(const Rows& x, int iterations = 20000) {
    const std::size_t n = x.size();
    const std::size_t p = x[0].size();
    PointPca out;
    out.standardized = x;
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = column(x, j);
        const double m = mean(col);
        const double sd = population_sd(col);
        for (auto& r : out.standardized) r[j] = (r[j] - m) / sd;
    }
    Rows c(p, std::vector<double>(p, 0.0));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            for (const auto& r : out.standardized) c[a][b] += r[a] * r[b];
            c[a][b] /= static_cast<double>(n);
        }
    }
    for (std::size_t k = 0; k < p; ++k) {
        std::vector<double> v(p);
        for (std::size_t j = 0; j < p; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j * j + k);
        double lambda = 0.0;
        for (int it = 0; it < iterations; ++it) {
            std::vector<double> w(p, 0.0);
            for (std::size_t a = 0; a < p; ++a) {
                for (std::size_t b = 0; b < p; ++b) w[a] += c[a][b] * v[b];
            }
            double norm = 0.0;
            for (double e : w) norm += e * e;
            norm = std::sqrt(norm);
            if (norm == 0.0) break;
            for (auto& e : w) e /= norm;
            double diff = 0.0;
            for (std::size_t j = 0; j < p; ++j) diff = std::max(diff, std::abs(w[j] - v[j]));
            v = w;
            lambda = norm;
            if (diff < 1e-15) break;
        }
        // Rayleigh quotient for the eigenvalue.
        double rq = 0.0;
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) rq += v[a] * c[a][b] * v[b];
        }
        lambda = rq;
        out.eigenvalues.push_back(lambda);
        out.axes.push_back(v);
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) c[a][b] -= lambda * v[a] * v[b];
        }
    }
    return out;
}

// Min and max of u·v over the 2^p vertices of the box [lo, hi].
inline std::pair<double, double> vertex_range(const std::vector<double>& u, const std::vector<double>& lo,
                                              const std::vector<double>& hi) {
    const std::size_t p = u.size();
    double mn = INFINITY, mx = -INFINITY;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += u[j] * ((mask >> j) & 1U ? hi[j] : lo[j]);
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    return {mn, mx};
}

// A random binary hierarchy over n leaves with distinct merge heights, and
// its ultrametric: d(i, j) is the height where i and j first meet.
struct Ultrametric {
    Rows d;
    std::set<std::vector<std::size_t>> clusters;  // sorted member lists, singletons included
};

inline Ultrametric random_ultrametric(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups.push_back({i});
    Ultrametric u;
    u.d.assign(n, std::vector<double>(n, 0.0));
    for (const auto& g : groups) u.clusters.insert(g);
    std::uniform_real_distribution<double> step(0.5, 1.5);
    double height = 0.0;
    while (groups.size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
        std::size_t a = pick(rng), b = pick(rng);
        while (b == a) b = pick(rng);
        height += step(rng);
        for (auto i : groups[a]) {
            for (auto j : groups[b]) u.d[i][j] = u.d[j][i] = height;
        }
        auto merged = groups[a];
        merged.insert(merged.end(), groups[b].begin(), groups[b].end());
        std::sort(merged.begin(), merged.end());
        u.clusters.insert(merged);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(std::max(a, b)));
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(std::min(a, b)));
        groups.push_back(merged);
    }
    return u;
}

}  // namespace oracle
