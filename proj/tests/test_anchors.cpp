#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "dream/dream.hpp"
#include "oracles.hpp"

namespace {

dream::Graph path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    dream::Mat features(n, 1);
    return dream::build_graph(edges, std::move(features));
}

// Z rows on the unit circle: rescaled cosine against row 0 = (cos(angle)+1)/2.
dream::Mat circle_z(const std::vector<double>& angles) {
    dream::Mat z(static_cast<int>(angles.size()), 2);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        z(static_cast<int>(i), 0) = std::cos(angles[i]);
        z(static_cast<int>(i), 1) = std::sin(angles[i]);
    }
    return z;
}

}  // namespace

TEST_CASE("build_candidates: shared-label nodes become mutual proximity candidates") {
    const auto g = path_graph(3);
    const std::vector<int> s_nodes{0, 1, 2};
    const std::vector<int> y_obs{0, 0, 0};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 1);
    CHECK(cs.cp[0] == std::vector<int>{1, 2});
    CHECK(cs.cp[1] == std::vector<int>{0, 2});
    CHECK(cs.cp[2] == std::vector<int>{0, 1});
}

TEST_CASE("build_candidates: topology side honors the geodesic bound") {
    const auto g = path_graph(6);
    const std::vector<int> s_nodes{0};
    const std::vector<int> y_obs{0, 0, 0, 0, 0, 0};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 4);
    CHECK(cs.ct[0] == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("build_candidates matches direct comprehension on a random graph") {
    dream::SplitMix64 rng(91);
    const int n = 40;
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < 0.06) edges.emplace_back(u, v);
    dream::Mat features(n, 2);
    const auto g = dream::build_graph(edges, std::move(features));

    std::vector<int> y_obs(n);
    std::vector<int> s_nodes;
    for (int i = 0; i < n; ++i) {
        y_obs[i] = static_cast<int>(rng.next_below(3));
        if (rng.next_double() < 0.5) s_nodes.push_back(i);
    }
    const int d_max = 3;
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, d_max);
    const auto apsp = oracle::floyd_warshall(g);
    for (std::size_t k = 0; k < s_nodes.size(); ++k) {
        REQUIRE(cs.cp[k] == oracle::comprehension_cp(s_nodes[k], s_nodes, y_obs));
        REQUIRE(cs.ct[k] == oracle::comprehension_ct(s_nodes[k], apsp, d_max));
    }
}

TEST_CASE("rescaled cosine endpoints") {
    const std::vector<double> z{1.0, 2.0, -3.0};
    const std::vector<double> neg{-1.0, -2.0, 3.0};
    const std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(dream::rescaled_cosine(z, z) == 1.0);
    CHECK(dream::rescaled_cosine(z, neg) == 0.0);
    CHECK(dream::rescaled_cosine(std::vector<double>{1.0, 0.0},
                                 std::vector<double>{0.0, 5.0}) == 0.5);
    CHECK(dream::rescaled_cosine(z, zero) == 0.5);
    CHECK(dream::rescaled_cosine(zero, zero) == 0.5);
    CHECK_THROWS_AS(dream::rescaled_cosine(z, std::vector<double>{1.0}), dream::DataError);
}

TEST_CASE("select_top_k picks the highest similarities") {
    // Angles chosen so sims vs row 0 are 0.9, 0.2, 0.8 at nodes 5, 7, 9.
    std::vector<double> angles(10, 3.0);
    angles[0] = 0.0;
    angles[5] = std::acos(2 * 0.9 - 1);
    angles[7] = std::acos(2 * 0.2 - 1);
    angles[9] = std::acos(2 * 0.8 - 1);
    const auto z = circle_z(angles);
    const std::vector<int> cands{5, 7, 9};
    CHECK(dream::select_top_k(0, cands, z, 2) == std::vector<int>{5, 9});
    CHECK(dream::select_top_k(0, cands, z, 5) == std::vector<int>{5, 9, 7});
}

TEST_CASE("select_top_k breaks exact ties toward the lower node index") {
    dream::Mat z(4, 2);
    z(0, 0) = 1.0;
    z(2, 0) = 2.0;  // same direction as target: sim 1
    z(3, 0) = 3.0;  // same direction: sim 1 as well
    z(1, 1) = 1.0;  // orthogonal: sim 0.5
    const std::vector<int> cands{3, 2, 1};
    CHECK(dream::select_top_k(0, cands, z, 1) == std::vector<int>{2});
    CHECK(dream::select_top_k(0, cands, z, 2) == std::vector<int>{2, 3});
    CHECK_THROWS_AS(dream::select_top_k(0, cands, z, 0), dream::ConfigError);
}

TEST_CASE("select_top_k equals exhaustive subset maximization") {
    dream::SplitMix64 rng(93);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 13;
        dream::Mat z(n, 3);
        for (double& v : z.a) v = rng.next_uniform(-1.0, 1.0);
        // Seed exact ties: clone some rows (scaled clones keep cosine equal).
        if (trial % 2 == 0) {
            for (int j = 0; j < 3; ++j) z(4, j) = 2.0 * z(2, j);
            for (int j = 0; j < 3; ++j) z(7, j) = z(3, j);
        }
        std::vector<int> cands;
        for (int i = 1; i < n; ++i)
            if (rng.next_double() < 0.8) cands.push_back(i);
        if (cands.empty()) cands.push_back(1);
        const int k = 1 + static_cast<int>(rng.next_below(4));
        REQUIRE(dream::select_top_k(0, cands, z, k) ==
                oracle::exhaustive_top_k(0, cands, z, k));
    }
}

TEST_CASE("homogeneity algebra at the pinned points") {
    // Anchors identical to the target: every similarity 1, h = 1 at any tau.
    dream::Mat z(3, 2);
    z(0, 0) = 1.0;
    z(1, 0) = 2.0;
    z(2, 0) = 0.5;
    const std::vector<int> anchors{1, 2};
    CHECK(dream::homogeneity(0, anchors, z, 0.04) == 1.0);
    CHECK(dream::homogeneity(0, anchors, z, 1.0) == 1.0);

    // One orthogonal anchor: mean similarity 0.5.
    dream::Mat zo(2, 2);
    zo(0, 0) = 1.0;
    zo(1, 1) = 1.0;
    const std::vector<int> one{1};
    CHECK(dream::homogeneity(0, one, zo, 1.0) == 0.5);
    CHECK(dream::homogeneity(0, one, zo, 0.04) ==
          Catch::Approx(2.9802322387695312e-08).epsilon(1e-12));

    CHECK(dream::homogeneity(0, {}, zo, 0.04) == 0.0);
    CHECK_THROWS_AS(dream::homogeneity(0, one, zo, 0.0), dream::ConfigError);
    CHECK_THROWS_AS(dream::homogeneity(0, one, zo, -1.0), dream::ConfigError);
}

TEST_CASE("homogeneity rises strictly when any anchor similarity rises") {
    dream::SplitMix64 rng(95);
    for (int trial = 0; trial < 200; ++trial) {
        const double base = rng.next_uniform(0.05, 0.9);
        std::vector<double> angles{0.0, std::acos(2 * base - 1),
                                   std::acos(2 * rng.next_uniform(0.1, 0.95) - 1)};
        auto z = circle_z(angles);
        const std::vector<int> anchors{1, 2};
        const double before = dream::homogeneity(0, anchors, z, 0.1);
        // Nudge anchor 1 strictly closer to the target.
        const double closer = std::acos(2 * std::min(base + 0.05, 0.999) - 1);
        z(1, 0) = std::cos(closer);
        z(1, 1) = std::sin(closer);
        const double after = dream::homogeneity(0, anchors, z, 0.1);
        REQUIRE(after > before);
    }
}

TEST_CASE("smaller tau sharpens the ratio between low and high means") {
    dream::SplitMix64 rng(97);
    for (int trial = 0; trial < 200; ++trial) {
        const double m_lo = rng.next_uniform(0.05, 0.8);
        const double m_hi = rng.next_uniform(m_lo + 0.05, 0.95);
        double prev_ratio = 2.0;
        for (const double tau : {1.0, 0.1, 0.04}) {
            const double ratio = std::pow(m_lo, 1.0 / tau) / std::pow(m_hi, 1.0 / tau);
            REQUIRE(ratio < prev_ratio);
            prev_ratio = ratio;
        }
    }
}

TEST_CASE("score_all: identical representations give identical scores") {
    const auto g = path_graph(5);
    const std::vector<int> s_nodes{0, 1, 2, 3, 4};
    const std::vector<int> y_obs{0, 0, 0, 0, 0};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 2);
    dream::Mat z(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) z(i, j) = 1.0 + j;
    const auto [scores, sets] = dream::score_all(cs, z, 2, 2, 0.5);
    for (double s : scores.score) CHECK(s == scores.score[0]);
    CHECK(scores.score[0] == 1.0);  // all similarities exactly 1
}

TEST_CASE("score_all: a target with no candidates scores zero and is flagged") {
    // Node 0 is isolated and the only carrier of label 0.
    dream::Mat features(3, 1);
    const auto g = dream::build_graph(std::vector<std::pair<int, int>>{{1, 2}},
                                      std::move(features));
    const std::vector<int> s_nodes{0, 1, 2};
    const std::vector<int> y_obs{0, 1, 1};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 4);
    CHECK(cs.cp[0].empty());
    CHECK(cs.ct[0].empty());
    dream::Mat z(3, 2);
    for (double& v : z.a) v = 1.0;
    const auto [scores, sets] = dream::score_all(cs, z, 2, 2, 1.0);
    CHECK(scores.score[0] == 0.0);
    CHECK(scores.anchor_count[0] == 0);
    CHECK(scores.empty_unions == 1);
    CHECK(scores.score[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("score_all: overlapping anchors count once in the union") {
    const auto g = path_graph(2);
    const std::vector<int> s_nodes{0, 1};
    const std::vector<int> y_obs{0, 0};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 1);
    // For target 0 both sides can only pick node 1.
    dream::Mat z(2, 2);
    z(0, 0) = 1.0;
    z(1, 0) = 1.0;
    const auto [scores, sets] = dream::score_all(cs, z, 3, 3, 1.0);
    CHECK(sets[0].ap == std::vector<int>{1});
    CHECK(sets[0].at == std::vector<int>{1});
    CHECK(sets[0].members == std::vector<int>{1});
    CHECK(scores.anchor_count[0] == 1);
}

TEST_CASE("score_all equals a straight-line composition of the single-target ops") {
    dream::SplitMix64 rng(99);
    const int n = 30;
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < 0.12) edges.emplace_back(u, v);
    dream::Mat features(n, 2);
    const auto g = dream::build_graph(edges, std::move(features));

    std::vector<int> y_obs(n);
    std::vector<int> s_nodes;
    for (int i = 0; i < n; ++i) {
        y_obs[i] = static_cast<int>(rng.next_below(3));
        if (rng.next_double() < 0.6) s_nodes.push_back(i);
    }
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 3);
    dream::Mat z(n, 4);
    for (double& v : z.a) v = rng.next_gaussian();

    const int k_p = 3, k_t = 2;
    const double tau = 0.25;
    const auto [scores, sets] = dream::score_all(cs, z, k_p, k_t, tau);

    for (std::size_t k = 0; k < s_nodes.size(); ++k) {
        const int t = s_nodes[k];
        std::vector<int> ap, at;
        if (!cs.cp[k].empty()) ap = dream::select_top_k(t, cs.cp[k], z, k_p);
        if (!cs.ct[k].empty()) at = dream::select_top_k(t, cs.ct[k], z, k_t);
        std::set<int> u(ap.begin(), ap.end());
        u.insert(at.begin(), at.end());
        const std::vector<int> members(u.begin(), u.end());

        REQUIRE(sets[k].ap == ap);
        REQUIRE(sets[k].at == at);
        REQUIRE(sets[k].members == members);
        REQUIRE(scores.anchor_count[k] == static_cast<int>(members.size()));
        const double want = dream::homogeneity(t, members, z, tau);
        REQUIRE(scores.score[k] == want);
    }
}

TEST_CASE("score_all with k=0 drops that side") {
    const auto g = path_graph(4);
    const std::vector<int> s_nodes{0, 1, 2, 3};
    const std::vector<int> y_obs{0, 0, 1, 1};
    const auto cs = dream::build_candidates(g, s_nodes, y_obs, 2);
    dream::SplitMix64 rng(101);
    dream::Mat z(4, 3);
    for (double& v : z.a) v = rng.next_gaussian();

    const auto [p_only, p_sets] = dream::score_all(cs, z, 2, 0, 0.5);
    for (const auto& s : p_sets) {
        CHECK(s.at.empty());
        std::vector<int> sorted_ap = s.ap;
        std::sort(sorted_ap.begin(), sorted_ap.end());
        CHECK(s.members == sorted_ap);
    }
    const auto [t_only, t_sets] = dream::score_all(cs, z, 0, 2, 0.5);
    for (const auto& s : t_sets) CHECK(s.ap.empty());
}
