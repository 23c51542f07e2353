#include "doctest.h"

#include "helpers.hpp"
#include "oracles.hpp"
#include "symbourse/pyramid.hpp"

#include <map>
#include <random>
#include <set>

using namespace symbourse;
using namespace symbourse::pyramid;
using testing::error_kind;

namespace {

Matrix to_matrix(const oracle::Rows& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
    }
    return m;
}

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("o" + std::to_string(10 + i));
    return out;
}

Matrix random_dissimilarity(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.1, 10.0);
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i) = u(rng);
    }
    return m;
}

std::set<std::vector<std::size_t>> member_sets(const Pyramid& p) {
    std::set<std::vector<std::size_t>> out;
    for (const auto& c : p.clusters) {
        auto m = c.members;
        std::sort(m.begin(), m.end());
        out.insert(m);
    }
    return out;
}

// Returns the number of violated structural properties.
int audit(const Pyramid& p) {
    const std::size_t n = p.object_count();
    int bad = 0;
    std::vector<std::size_t> pos(n);
    for (std::size_t r = 0; r < n; ++r) pos[p.order[r]] = r;
    bool full = false;
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
        const auto& cl = p.clusters[c];
        if (c < n && (cl.members != std::vector<std::size_t>{c} || cl.index != 0.0 || cl.palier != 0)) ++bad;
        if (cl.members.size() == n) full = true;
        if (cl.merged_into.size() > 2) ++bad;
        std::vector<std::size_t> ranks;
        for (auto m : cl.members) ranks.push_back(pos[m]);
        std::sort(ranks.begin(), ranks.end());
        if (ranks.back() - ranks.front() + 1 != ranks.size()) ++bad;
        if (cl.merged_from) {
            const auto [a, b] = *cl.merged_from;
            if (cl.index < p.clusters[a].index || cl.index < p.clusters[b].index) ++bad;
        }
        if (c >= n && cl.palier != static_cast<int>(c - n + 1)) ++bad;
    }
    if (!full) ++bad;
    if (member_sets(p).size() != p.clusters.size()) ++bad;  // no duplicate clusters
    return bad;
}

}  // namespace

TEST_CASE("two objects") {
    Matrix d(2, 2, 0.0);
    d(0, 1) = d(1, 0) = 0.75;
    const auto p = pyr_cluster(d, {"b", "a"});
    REQUIRE(p.palier_count() == 1);
    CHECK(p.clusters[2].index == 0.75);
    CHECK(p.clusters[2].palier == 1);
    CHECK(compatible_order(p) == std::vector<std::string>{"a", "b"});
    CHECK(render_text(p) == "palier 1: {a,b} index=0.750000\n");
}

TEST_CASE("three points on a line give overlapping clusters") {
    oracle::Rows d{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
    const auto p = pyr_cluster(to_matrix(d), {"x0", "x1", "x2"});
    REQUIRE(p.palier_count() == 3);
    CHECK(p.clusters[3].members == std::vector<std::size_t>{0, 1});
    CHECK(p.clusters[4].members == std::vector<std::size_t>{1, 2});
    CHECK(p.clusters[5].members.size() == 3);
    CHECK(p.clusters[1].merged_into.size() == 2);
    CHECK(audit(p) == 0);
}

TEST_CASE("hand-built ultrametric on four points") {
    // ((a,b):1, (c,d):2):5
    oracle::Rows d{{0, 1, 5, 5}, {1, 0, 5, 5}, {5, 5, 0, 2}, {5, 5, 2, 0}};
    const auto p = pyr_cluster(to_matrix(d), {"a", "b", "c", "d"});
    const std::set<std::vector<std::size_t>> expected{{0}, {1}, {2}, {3}, {0, 1}, {2, 3}, {0, 1, 2, 3}};
    CHECK(member_sets(p) == expected);
    CHECK(p.palier_count() == 3);
    CHECK(audit(p) == 0);
}

TEST_CASE("hand-built ultrametric on eight points") {
    // (((0,1):1,(2,3):2):4, ((4,5):1.5,(6,7):3):5):9
    const double h[8][8] = {
        {0, 1, 4, 4, 9, 9, 9, 9}, {1, 0, 4, 4, 9, 9, 9, 9}, {4, 4, 0, 2, 9, 9, 9, 9}, {4, 4, 2, 0, 9, 9, 9, 9},
        {9, 9, 9, 9, 0, 1.5, 5, 5}, {9, 9, 9, 9, 1.5, 0, 5, 5}, {9, 9, 9, 9, 5, 5, 0, 3}, {9, 9, 9, 9, 5, 5, 3, 0}};
    Matrix d(8, 8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) d(i, j) = h[i][j];
    }
    const auto p = pyr_cluster(d, default_labels(8));
    std::set<std::vector<std::size_t>> expected{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 1, 2, 3}, {4, 5, 6, 7},
                                                {0, 1, 2, 3, 4, 5, 6, 7}};
    for (std::size_t i = 0; i < 8; ++i) expected.insert({i});
    CHECK(member_sets(p) == expected);
    CHECK(audit(p) == 0);
}

TEST_CASE("random ultrametrics reproduce their hierarchy") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 11);
        const auto u = oracle::random_ultrametric(n, rng);
        const auto p = pyr_cluster(to_matrix(u.d), default_labels(n));
        CHECK(member_sets(p) == u.clusters);
        CHECK(p.palier_count() == n - 1);
    }
}

TEST_CASE("structural audit on random matrices") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const auto p = pyr_cluster(random_dissimilarity(rng, n), default_labels(n));
        CHECK(audit(p) == 0);
        CHECK(p.palier_count() >= n - 1);
        CHECK(compatible_order(p).size() == n);
    }
}

TEST_CASE("consistent relabelling gives the same pyramid") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng() % 8;
        const auto d = random_dissimilarity(rng, n);
        const auto labels = default_labels(n);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Matrix dp(n, n);
        std::vector<std::string> lp(n);
        for (std::size_t i = 0; i < n; ++i) {
            lp[i] = labels[perm[i]];
            for (std::size_t j = 0; j < n; ++j) dp(i, j) = d(perm[i], perm[j]);
        }
        const auto canonical = [](const Pyramid& p) {
            std::map<int, std::pair<std::set<std::string>, double>> out;
            for (const auto& c : p.clusters) {
                if (c.palier == 0) continue;
                std::set<std::string> names;
                for (auto m : c.members) names.insert(p.labels[m]);
                out[c.palier] = {names, c.index};
            }
            return out;
        };
        CHECK(canonical(pyr_cluster(d, labels)) == canonical(pyr_cluster(dp, lp)));
    }
}

TEST_CASE("input validation") {
    Matrix asym(2, 2, 0.0);
    asym(0, 1) = 1.0;
    asym(1, 0) = 2.0;
    CHECK(error_kind([&] { pyr_cluster(asym, {"a", "b"}); }) == ErrorKind::InvalidArgument);
    Matrix neg(2, 2, 0.0);
    neg(0, 1) = neg(1, 0) = -1.0;
    CHECK(error_kind([&] { pyr_cluster(neg, {"a", "b"}); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([&] { pyr_cluster(Matrix(2, 2, 0.0), {"a", "a"}); }) == ErrorKind::InvalidArgument);
    const auto one = pyr_cluster(Matrix(1, 1, 0.0), {"solo"});
    CHECK(one.palier_count() == 0);
    CHECK(render_text(one).empty());
}

TEST_CASE("renderings are deterministic") {
    std::mt19937_64 rng(73);
    const auto d = random_dissimilarity(rng, 12);
    const auto a = pyr_cluster(d, default_labels(12));
    const auto b = pyr_cluster(d, default_labels(12));
    CHECK(render_text(a) == render_text(b));
    CHECK(render_svg(a) == render_svg(b));
    CHECK(render_svg(a).rfind("<?xml", 0) == 0);
    CHECK(render_svg(a).find("</svg>") != std::string::npos);
}
