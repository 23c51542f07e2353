#include "symbourse/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace symbourse::pyramid {

namespace {

struct Work {
    std::vector<std::size_t> members;  // sorted object indices
    std::vector<double> farthest;      // per object: max d to any member
    int merges = 0;
    std::size_t min_rank = 0;
    std::vector<std::size_t> ranks;  // sorted label ranks
};

struct Span {
    std::size_t block = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;
};

struct Candidate {
    double linkage = 0.0;
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t union_size = 0;
};

void validate_input(const Matrix& d, const std::vector<std::string>& labels) {
    const std::size_t n = d.rows();
    if (n == 0 || d.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "pyramid needs a non-empty square dissimilarity matrix");
    }
    if (labels.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "pyramid: label count does not match the matrix");
    }
    if (std::set<std::string>(labels.begin(), labels.end()).size() != n) {
        throw Error(ErrorKind::InvalidArgument, "pyramid: labels must be unique");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(d(i, j)));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) {
            throw Error(ErrorKind::InvalidArgument, "dissimilarity diagonal must be zero");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
                throw Error(ErrorKind::InvalidArgument, "dissimilarities must be finite and non-negative");
            }
            if (std::abs(d(i, j) - d(j, i)) > 1e-12 * std::max(1.0, scale)) {
                throw Error(ErrorKind::InvalidArgument, "dissimilarity matrix is not symmetric");
            }
        }
    }
}

}  // namespace

Pyramid pyr_cluster(const Matrix& d, std::vector<std::string> labels) {
    validate_input(d, labels);
    const std::size_t n = d.rows();

    std::vector<std::size_t> by_label(n);
    std::iota(by_label.begin(), by_label.end(), std::size_t{0});
    std::sort(by_label.begin(), by_label.end(), [&](auto x, auto y) { return labels[x] < labels[y]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[by_label[r]] = r;

    Pyramid out;
    out.labels = std::move(labels);
    std::vector<Work> work;
    for (std::size_t i = 0; i < n; ++i) {
        Work w;
        w.members = {i};
        w.farthest.resize(n);
        for (std::size_t j = 0; j < n; ++j) w.farthest[j] = d(i, j);
        w.min_rank = rank[i];
        w.ranks = {rank[i]};
        work.push_back(std::move(w));
        out.clusters.push_back(Cluster{{i}, 0, 0.0, std::nullopt, {}});
    }

    // The base order under construction: disjoint blocks that get
    // concatenated as merges join them.
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<std::size_t> block_of(n);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) {
        blocks.push_back({i});
        block_of[i] = i;
        position[i] = 0;
    }
    const auto span_of = [&](const Work& w) {
        Span s{block_of[w.members.front()], n, 0};
        for (auto m : w.members) {
            s.lo = std::min(s.lo, position[m]);
            s.hi = std::max(s.hi, position[m]);
        }
        return s;
    };
    const auto key_less = [&](const Candidate& x, const Candidate& y) {
        if (x.linkage != y.linkage) return x.linkage < y.linkage;
        if (x.union_size != y.union_size) return x.union_size > y.union_size;
        const auto& xa = work[x.a];
        const auto& xb = work[x.b];
        const auto& ya = work[y.a];
        const auto& yb = work[y.b];
        if (xa.min_rank != ya.min_rank) return xa.min_rank < ya.min_rank;
        if (xb.min_rank != yb.min_rank) return xb.min_rank < yb.min_rank;
        if (xa.ranks != ya.ranks) return xa.ranks < ya.ranks;
        return xb.ranks < yb.ranks;
    };

    bool complete = n == 1;
    while (!complete) {
        std::vector<std::size_t> active;
        std::vector<Span> spans(work.size());
        for (std::size_t c = 0; c < work.size(); ++c) {
            spans[c] = span_of(work[c]);
            if (work[c].merges < 2) active.push_back(c);
        }
        // reach[block][p]: furthest right end of any cluster starting at or
        // before position p. A span [lo, hi] is inside an existing cluster iff
        // reach[block][lo] >= hi.
        std::vector<std::vector<long>> reach(blocks.size());
        for (std::size_t bl = 0; bl < blocks.size(); ++bl) reach[bl].assign(blocks[bl].size(), -1);
        for (const auto& s : spans) {
            reach[s.block][s.lo] = std::max(reach[s.block][s.lo], static_cast<long>(s.hi));
        }
        for (auto& r : reach) {
            for (std::size_t p = 1; p < r.size(); ++p) r[p] = std::max(r[p], r[p - 1]);
        }

        std::optional<Candidate> best;
        for (std::size_t ia = 0; ia < active.size(); ++ia) {
            for (std::size_t ib = ia + 1; ib < active.size(); ++ib) {
                std::size_t a = active[ia];
                std::size_t b = active[ib];
                const Span& sa = spans[a];
                const Span& sb = spans[b];
                std::size_t union_size = 0;
                if (sa.block == sb.block) {
                    if (std::max(sa.lo, sb.lo) > std::min(sa.hi, sb.hi) + 1) {
                        continue;
                    }
                    const std::size_t lo = std::min(sa.lo, sb.lo);
                    const std::size_t hi = std::max(sa.hi, sb.hi);
                    if (reach[sa.block][lo] >= static_cast<long>(hi)) {
                        continue;
                    }
                    union_size = hi - lo + 1;
                } else {
                    const auto at_end = [&](const Span& s) {
                        return s.lo == 0 || s.hi + 1 == blocks[s.block].size();
                    };
                    if (!at_end(sa) || !at_end(sb)) {
                        continue;
                    }
                    union_size = work[a].members.size() + work[b].members.size();
                }
                // Orient the pair so that A has the smaller labels.
                if (std::tie(work[b].min_rank, work[b].ranks) < std::tie(work[a].min_rank, work[a].ranks)) {
                    std::swap(a, b);
                }
                double linkage = 0.0;
                for (auto m : work[b].members) linkage = std::max(linkage, work[a].farthest[m]);
                const Candidate cand{linkage, a, b, union_size};
                if (!best || key_less(cand, *best)) best = cand;
            }
        }
        if (!best) {
            throw Error(ErrorKind::Internal, "pyramid construction stalled with no admissible merge");
        }

        const std::size_t a = best->a;
        const std::size_t b = best->b;
        const Span sa = spans[a];
        const Span sb = spans[b];
        if (sa.block != sb.block) {
            // Lay the blocks side by side with A on the right end of its block
            // and B on the left end of its block.
            auto left = std::move(blocks[sa.block]);
            auto right = std::move(blocks[sb.block]);
            if (sa.hi + 1 != left.size()) std::reverse(left.begin(), left.end());
            if (sb.lo != 0) std::reverse(right.begin(), right.end());
            left.insert(left.end(), right.begin(), right.end());
            blocks[sb.block].clear();
            blocks[sa.block] = std::move(left);
            for (std::size_t p = 0; p < blocks[sa.block].size(); ++p) {
                const auto obj = blocks[sa.block][p];
                block_of[obj] = sa.block;
                position[obj] = p;
            }
        }

        Work merged;
        std::set_union(work[a].members.begin(), work[a].members.end(), work[b].members.begin(),
                       work[b].members.end(), std::back_inserter(merged.members));
        merged.farthest.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            merged.farthest[j] = std::max(work[a].farthest[j], work[b].farthest[j]);
        }
        merged.min_rank = std::min(work[a].min_rank, work[b].min_rank);
        for (auto m : merged.members) merged.ranks.push_back(rank[m]);
        std::sort(merged.ranks.begin(), merged.ranks.end());
        ++work[a].merges;
        ++work[b].merges;

        const std::size_t id = out.clusters.size();
        Cluster cluster;
        cluster.members = merged.members;
        cluster.palier = static_cast<int>(id - n + 1);
        cluster.index = std::max({best->linkage, out.clusters[a].index, out.clusters[b].index});
        cluster.merged_from = std::make_pair(a, b);
        out.clusters[a].merged_into.push_back(id);
        out.clusters[b].merged_into.push_back(id);
        complete = merged.members.size() == n;
        out.clusters.push_back(std::move(cluster));
        work.push_back(std::move(merged));
    }

    const auto& final_block = blocks[block_of[0]];
    out.order = final_block;
    for (auto& c : out.clusters) {
        std::sort(c.members.begin(), c.members.end(), [&](auto x, auto y) { return position[x] < position[y]; });
    }
    return out;
}

std::vector<std::string> compatible_order(const Pyramid& pyramid) {
    const std::size_t n = pyramid.object_count();
    if (pyramid.order.size() != n) {
        throw Error(ErrorKind::Internal, "base order does not cover every object");
    }
    std::vector<std::size_t> position(n, n);
    for (std::size_t p = 0; p < n; ++p) position.at(pyramid.order[p]) = p;
    for (const auto& c : pyramid.clusters) {
        std::size_t lo = n;
        std::size_t hi = 0;
        for (auto m : c.members) {
            lo = std::min(lo, position.at(m));
            hi = std::max(hi, position.at(m));
        }
        if (hi - lo + 1 != c.members.size()) {
            throw Error(ErrorKind::Internal, "cluster of palier " + std::to_string(c.palier) +
                                                 " is not contiguous in the base order");
        }
    }
    std::vector<std::string> out;
    for (auto i : pyramid.order) out.push_back(pyramid.labels[i]);
    return out;
}

std::string render_text(const Pyramid& pyramid) {
    std::string out;
    for (std::size_t id = pyramid.object_count(); id < pyramid.clusters.size(); ++id) {
        const auto& c = pyramid.clusters[id];
        out += "palier " + std::to_string(c.palier) + ": {";
        for (std::size_t k = 0; k < c.members.size(); ++k) {
            if (k > 0) out += ",";
            out += pyramid.labels[c.members[k]];
        }
        out += "} index=" + format_fixed(c.index, 6) + "\n";
    }
    return out;
}

std::string render_svg(const Pyramid& pyramid) {
    const std::size_t n = pyramid.object_count();
    constexpr double kStep = 48.0;
    constexpr double kLeft = 40.0;
    constexpr double kTop = 30.0;
    constexpr double kHeight = 360.0;
    const double width = 2 * kLeft + kStep * static_cast<double>(n > 1 ? n - 1 : 1);
    const double base = kTop + kHeight;

    double max_index = 0.0;
    for (const auto& c : pyramid.clusters) max_index = std::max(max_index, c.index);
    std::vector<double> slot(n);
    for (std::size_t p = 0; p < n; ++p) slot[pyramid.order[p]] = kLeft + kStep * static_cast<double>(p);
    const auto y_of = [&](double index) { return max_index > 0 ? base - index / max_index * kHeight : base; };
    const auto centre = [&](const Cluster& c) {
        double lo = slot[c.members.front()];
        double hi = lo;
        for (auto m : c.members) {
            lo = std::min(lo, slot[m]);
            hi = std::max(hi, slot[m]);
        }
        return 0.5 * (lo + hi);
    };
    const auto f = [](double v) { return format_fixed(v, 2); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(width) + "\" height=\"" + f(base + 60) +
           "\" viewBox=\"0 0 " + f(width) + " " + f(base + 60) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + f(width) + "\" height=\"" + f(base + 60) + "\" fill=\"white\"/>\n";
    out += "<g fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\">\n";
    for (std::size_t id = n; id < pyramid.clusters.size(); ++id) {
        const auto& c = pyramid.clusters[id];
        const auto& a = pyramid.clusters[c.merged_from->first];
        const auto& b = pyramid.clusters[c.merged_from->second];
        const double xa = centre(a);
        const double xb = centre(b);
        const double y = y_of(c.index);
        out += "<path d=\"M" + f(xa) + "," + f(y_of(a.index)) + " L" + f(xa) + "," + f(y) + " L" + f(xb) + "," +
               f(y) + " L" + f(xb) + "," + f(y_of(b.index)) + "\"/>\n";
    }
    out += "</g>\n<g font-family=\"sans-serif\" font-size=\"9\" fill=\"#802020\" text-anchor=\"middle\">\n";
    for (std::size_t id = n; id < pyramid.clusters.size(); ++id) {
        const auto& c = pyramid.clusters[id];
        const double xa = centre(pyramid.clusters[c.merged_from->first]);
        const double xb = centre(pyramid.clusters[c.merged_from->second]);
        out += "<text x=\"" + f(0.5 * (xa + xb)) + "\" y=\"" + f(y_of(c.index) - 3) + "\">" +
               std::to_string(c.palier) + "</text>\n";
    }
    out += "</g>\n<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#202020\" text-anchor=\"middle\">\n";
    for (std::size_t p = 0; p < n; ++p) {
        std::string label;
        for (char ch : pyramid.labels[pyramid.order[p]]) {
            switch (ch) {
                case '&': label += "&amp;"; break;
                case '<': label += "&lt;"; break;
                case '>': label += "&gt;"; break;
                default: label.push_back(ch);
            }
        }
        out += "<text x=\"" + f(kLeft + kStep * static_cast<double>(p)) + "\" y=\"" + f(base + 16) + "\">" + label +
               "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace symbourse::pyramid
