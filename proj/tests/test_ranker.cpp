#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "ncdrank/ncdrank.hpp"
#include "oracles.hpp"

using namespace ncdrank;
namespace t = ncdrank::testing;

namespace {

struct Model {
    HyperlinkOperator h;
    ProximityFactors f;
};

Model model_of(const t::Instance& inst, DanglingPolicy policy = DanglingPolicy::OwnBlock) {
    return Model{build_hyperlink(inst.graph, policy, inst.decomp), build_factors(inst.decomp, inst.graph)};
}

RankParams params(double eta, double mu, double teleport, double tol = 1e-9, std::size_t max_iter = 1000) {
    RankParams p;
    p.eta = eta;
    p.mu = mu;
    p.teleport = teleport;
    p.tol = tol;
    p.max_iter = max_iter;
    return p;
}

DenseMatrix dense_model(const Model& m, const RankParams& p) {
    const std::size_t n = m.h.size();
    DenseMatrix e(n, n, 1.0 / static_cast<double>(n));
    return p.eta * m.h.to_dense() + p.mu * materialize_m(m.f) + p.teleport * e;
}

// Exact stationary vectors on the reference graph, from rational arithmetic.
const std::vector<double> kG4Model = {19.0 / 60.0, 3.0 / 10.0, 11.0 / 60.0, 1.0 / 5.0};
const std::vector<double> kG4PageRank085 = {1429.0 / 4356.0, 689.0 / 2178.0, 749.0 / 4356.0, 200.0 / 1089.0};

}  // namespace

TEST(Rank, TwoNodeCycleSingleBlock) {
    const Graph g = parse_edge_list("a b\nb a");
    const t::Instance inst{g, Decomposition(2, {"all"}, {{0, 1}})};
    const auto m = model_of(inst);
    const auto r = rank(m.h, m.f, params(0.5, 0.5, 0.0));
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.scores[0], 0.5);
    EXPECT_DOUBLE_EQ(r.scores[1], 0.5);
}

TEST(Rank, ReferenceGraphMatchesDenseOracle) {
    const auto m = model_of(t::g4());
    const auto p = params(0.5, 0.5, 0.0);
    const auto r = rank(m.h, m.f, p);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.residual, p.tol);
    const auto pi = dense_stationary(dense_model(m, p), 1e-14, 100000);
    EXPECT_LE(t::l1(r.scores, pi), 1e-8);
    EXPECT_LE(t::l1(r.scores, kG4Model), 1e-8);
}

TEST(Rank, SingleBlockModelIsPageRank) {
    const Graph g = parse_edge_list("a b\nb a\nb c\nc d\nd a\nd b\n");
    const t::Instance inst{g, Decomposition(4, {"all"}, {{0, 1, 2, 3}})};
    const auto m = model_of(inst);
    for (const double eta : {0.3, 0.5, 0.85}) {
        const auto model = rank(m.h, m.f, params(eta, 1.0 - eta, 0.0, 1e-13, 10000));
        const auto pr = pagerank(m.h, eta, 1e-13, 10000);
        EXPECT_LE(t::l1(model.scores, pr.scores), 1e-12) << "eta=" << eta;
    }
}

TEST(Rank, ThreeTermModelIsStochasticAndMatchesDense) {
    const auto m = model_of(t::g4());
    const auto p = params(0.6, 0.2, 0.2, 1e-13, 10000);
    EXPECT_LE(implied_row_sum_error(m.h, m.f, p), 1e-12);
    const auto r = rank(m.h, m.f, p);
    EXPECT_LE(t::l1(r.scores, dense_stationary(dense_model(m, p), 1e-14, 100000)), 1e-10);
}

TEST(Rank, PersonalizedTeleportation) {
    const auto m = model_of(t::g4());
    auto p = params(0.5, 0.25, 0.25, 1e-13, 10000);
    p.personalization = std::vector<double>{0.125, 0.125, 0.25, 0.5};
    const auto r = rank(m.h, m.f, p);
    const std::size_t n = 4;
    DenseMatrix e(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e(i, j) = (*p.personalization)[j];
    const auto dense = 0.5 * m.h.to_dense() + 0.25 * materialize_m(m.f) + 0.25 * e;
    EXPECT_LE(t::l1(r.scores, dense_stationary(dense, 1e-14, 100000)), 1e-10);
}

TEST(Rank, StrictModeRefusesReducibleIndicator) {
    const auto m = model_of(t::disjoint_cycles());
    try {
        rank(m.h, m.f, params(0.5, 0.5, 0.0));
        FAIL() << "expected ReducibleError";
    } catch (const ReducibleError& e) {
        EXPECT_EQ(e.components(), (std::vector<std::vector<std::size_t>>{{0}, {1}}));
    }
    auto relaxed = params(0.5, 0.5, 0.0);
    relaxed.strict = false;
    const auto r = rank(m.h, m.f, relaxed);
    double sum = 0.0;
    for (const double v : r.scores) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // With teleportation the check is not needed.
    EXPECT_NO_THROW(rank(m.h, m.f, params(0.5, 0.3, 0.2)));
}

TEST(Rank, StrictModeNeedsProximityWeightWithoutTeleportation) {
    const auto m = model_of(t::g4());
    EXPECT_THROW(rank(m.h, m.f, params(1.0, 0.0, 0.0)), ConfigError);
}

TEST(Rank, NonConvergenceIsReportedNotThrown) {
    const auto m = model_of(t::g4());
    const auto r = rank(m.h, m.f, params(0.5, 0.5, 0.0, 1e-15, 2));
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 2u);
    EXPECT_GT(r.residual, 1e-15);
}

TEST(Rank, ParameterValidation) {
    const auto m = model_of(t::g4());
    EXPECT_THROW(rank(m.h, m.f, params(0.5, 0.4, 0.0)), ConfigError);
    EXPECT_THROW(rank(m.h, m.f, params(0.0, 1.0, 0.0)), ConfigError);
    EXPECT_THROW(rank(m.h, m.f, params(0.5, 0.5, 0.0, 0.0)), ConfigError);
    auto p = params(0.5, 0.3, 0.2);
    p.personalization = std::vector<double>{0.5, 0.5, 0.0, 0.0};
    EXPECT_THROW(rank(m.h, m.f, p), ConfigError);
    p.personalization = std::vector<double>{0.5, 0.5};
    EXPECT_THROW(rank(m.h, m.f, p), DimensionError);

    const auto other = model_of(t::Instance{parse_edge_list("x y"), Decomposition(2, {"B"}, {{0, 1}})});
    EXPECT_THROW(rank(m.h, other.f, params(0.5, 0.5, 0.0)), DimensionError);
}

TEST(PageRank, PureTeleportationReturnsV) {
    const auto m = model_of(t::g4());
    const std::vector<double> v{0.125, 0.375, 0.25, 0.25};
    const auto r = pagerank(m.h, 0.0, v);
    EXPECT_EQ(r.scores, v);
}

TEST(PageRank, TwoNodeCycle) {
    const Graph g = parse_edge_list("a b\nb a");
    const auto h = build_hyperlink(g, DanglingPolicy::UniformAll);
    const auto r = pagerank(h, 0.85);
    EXPECT_DOUBLE_EQ(r.scores[0], 0.5);
    EXPECT_DOUBLE_EQ(r.scores[1], 0.5);
}

TEST(PageRank, ReferenceGraphMatchesDenseOracle) {
    const auto inst = t::g4();
    const auto h = build_hyperlink(inst.graph, DanglingPolicy::UniformAll);
    const auto r = pagerank(h, 0.85);
    DenseMatrix e(4, 4, 0.25);
    const auto pi = dense_stationary(0.85 * h.to_dense() + 0.15 * e, 1e-14, 100000);
    EXPECT_LE(t::l1(r.scores, pi), 1e-8);
    EXPECT_LE(t::l1(r.scores, kG4PageRank085), 1e-8);
}

TEST(PageRank, Validation) {
    const auto h = build_hyperlink(parse_edge_list("a b\nb a"), DanglingPolicy::UniformAll);
    EXPECT_THROW(pagerank(h, 1.0), ConfigError);
    EXPECT_THROW(pagerank(h, 0.5, std::vector<double>{1.0, 0.0}), ConfigError);
    EXPECT_THROW(pagerank(h, 0.5, std::vector<double>{1.0}), DimensionError);
}

TEST(Compare, IdenticalResults) {
    RankResult a;
    a.scores = {0.1, 0.6, 0.3};
    const auto rep = compare(a, a, {"x", "y", "z"}, 2);
    EXPECT_EQ(rep.l1, 0.0);
    EXPECT_EQ(rep.overlap, 1.0);
    EXPECT_EQ(rep.top_a, (std::vector<node_id>{1, 2}));
}

TEST(Compare, DisjointTopSets) {
    RankResult a, b;
    a.scores = {0.4, 0.4, 0.1, 0.1};
    b.scores = {0.1, 0.1, 0.4, 0.4};
    const auto rep = compare(a, b, {"a", "b", "c", "d"}, 2);
    EXPECT_EQ(rep.overlap, 0.0);
    EXPECT_DOUBLE_EQ(rep.l1, 1.2);
}

TEST(Compare, TiesBrokenByAscendingLabel) {
    RankResult a;
    a.scores = {0.25, 0.25, 0.25, 0.25};
    const auto rep = compare(a, a, {"d", "b", "c", "a"}, 2);
    EXPECT_EQ(rep.top_a, (std::vector<node_id>{3, 1}));
}

TEST(Compare, KClippedToN) {
    RankResult a;
    a.scores = {0.5, 0.5};
    const auto rep = compare(a, a, {"a", "b"}, 10);
    EXPECT_TRUE(rep.clipped);
    EXPECT_EQ(rep.k, 2u);
    EXPECT_EQ(rep.overlap, 1.0);
}

TEST(Compare, ReferenceGraphModelVersusPageRank) {
    const auto inst = t::g4();
    const auto m = model_of(inst);
    const auto model = rank(m.h, m.f, params(0.5, 0.5, 0.0));
    const auto pr = pagerank(m.h, 0.85);
    // Frozen from the rational-arithmetic stationary vectors above.
    EXPECT_NEAR(compare(model, pr, inst.graph.labels(), 4).l1, t::l1(kG4Model, kG4PageRank085), 1e-8);
    EXPECT_NEAR(t::l1(kG4Model, kG4PageRank085), 0.05546372819100092, 1e-15);
    for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(compare(model, pr, inst.graph.labels(), k).overlap, 1.0);
    const auto rep = compare(model, pr, inst.graph.labels(), 3);
    EXPECT_EQ(rep.top_a, (std::vector<node_id>{0, 1, 3}));
    EXPECT_EQ(rep.top_b, (std::vector<node_id>{0, 1, 3}));
}

// Invariants over random instances with dangling nodes and overlapping
// blocks mixed in.
TEST(RankProperties, FixedPointResidualAndPositivity) {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<std::size_t> size(2, 200);
    int tested = 0;
    while (tested < 25) {
        const std::size_t n = size(rng);
        const auto inst = t::random_instance(rng, n, 1 + n / 10, std::min(1.0, 4.0 / static_cast<double>(n)),
                                             tested % 3 == 0 ? 0.2 : 0.0);
        const auto m = model_of(inst);
        if (!teleportation_free_check(indicator(m.f)).irreducible) continue;
        const auto p = params(0.5, 0.5, 0.0, 1e-10, 100000);
        const auto r = rank(m.h, m.f, p);
        ASSERT_TRUE(r.converged);
        const auto next = dense_model(m, p).left_multiply(r.scores);
        EXPECT_LE(t::l1(next, r.scores), 2 * p.tol);
        EXPECT_GT(*std::min_element(r.scores.begin(), r.scores.end()), 0.0);
        ++tested;
    }
}

TEST(RankProperties, FactoredIterationMatchesDenseAtEveryStep) {
    std::mt19937_64 rng(161);
    std::uniform_int_distribution<std::size_t> size(2, 200);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = size(rng);
        const auto inst = t::random_instance(rng, n, 1 + n / 10, std::min(1.0, 3.0 / static_cast<double>(n)), 0.1);
        const auto m = model_of(inst, trial % 2 ? DanglingPolicy::UniformAll : DanglingPolicy::OwnBlock);
        auto p = params(0.6, 0.3, 0.1, 1e-300, 1);
        const auto dense = dense_model(m, p);
        for (std::size_t steps = 1; steps <= 25; ++steps) {
            p.max_iter = steps;
            const auto r = rank(m.h, m.f, p);
            EXPECT_LE(t::l1(r.scores, t::dense_iterate(dense, steps)), 1e-12) << "steps=" << steps;
        }
    }
}

TEST(RankProperties, ZeroProximityWeightReducesToPageRank) {
    std::mt19937_64 rng(314);
    std::uniform_int_distribution<std::size_t> size(2, 150);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = size(rng);
        const auto inst = t::random_instance(rng, n, 1 + n / 10, std::min(1.0, 3.0 / static_cast<double>(n)));
        const auto m = model_of(inst, DanglingPolicy::UniformAll);
        const double eta = 0.85;
        const auto model = rank(m.h, m.f, params(eta, 0.0, 1.0 - eta, 1e-13, 10000));
        const auto pr = pagerank(m.h, eta, 1e-13, 10000);
        EXPECT_LE(t::l1(model.scores, pr.scores), 1e-12);
    }
}

TEST(RankProperties, TopNodeStableUnderTighterTolerance) {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<std::size_t> size(5, 80);
    int tested = 0;
    while (tested < 30) {
        const std::size_t n = size(rng);
        const auto inst = t::random_instance(rng, n, 1 + n / 6, std::min(1.0, 4.0 / static_cast<double>(n)));
        const auto m = model_of(inst);
        if (!teleportation_free_check(indicator(m.f)).irreducible) continue;
        const auto coarse = rank(m.h, m.f, params(0.5, 0.5, 0.0, 1e-9, 100000));
        const auto fine = rank(m.h, m.f, params(0.5, 0.5, 0.0, 1e-10, 100000));
        auto sorted = fine.scores;
        std::sort(sorted.rbegin(), sorted.rend());
        if (sorted[0] - sorted[1] < 1e-8) continue;  // near-tie, excluded from the corpus
        const auto top = [](const std::vector<double>& s) { return std::max_element(s.begin(), s.end()) - s.begin(); };
        EXPECT_EQ(top(coarse.scores), top(fine.scores));
        ++tested;
    }
}

TEST(RankProperties, LabelKeyedScoresIgnoreEdgeOrder) {
    std::mt19937_64 rng(9001);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 30;
        const auto inst = t::random_instance(rng, n, 4, 0.12);
        std::vector<std::string> lines;
        for (node_id u = 0; u < n; ++u)
            for (const node_id v : inst.graph.successors(u)) lines.push_back(inst.graph.label(u) + " " + inst.graph.label(v));
        auto scores_by_label = [&](const std::vector<std::string>& ls) {
            std::string text;
            for (const auto& l : ls) text += l + "\n";
            const Graph g = parse_edge_list(text);
            // Isolated nodes cannot appear in an edge list; leave them out.
            std::string blocks;
            for (std::size_t k = 0; k < inst.decomp.block_count(); ++k)
                for (const node_id u : inst.decomp.members(static_cast<block_id>(k)))
                    if (g.find(inst.graph.label(u)))
                        blocks += inst.graph.label(u) + " " + inst.decomp.block_label(static_cast<block_id>(k)) + "\n";
            const Decomposition d = parse_blocks(blocks, g);
            const auto h = build_hyperlink(g, DanglingPolicy::OwnBlock, d);
            auto p = params(0.5, 0.5, 0.0, 1e-12, 100000);
            p.strict = false;
            const auto r = rank(h, build_factors(d, g), p);
            std::map<std::string, double> out;
            for (node_id u = 0; u < g.size(); ++u) out[g.label(u)] = r.scores[u];
            return out;
        };
        const auto base = scores_by_label(lines);
        std::shuffle(lines.begin(), lines.end(), rng);
        const auto shuffled = scores_by_label(lines);
        ASSERT_EQ(base.size(), shuffled.size());
        for (const auto& [label, s] : base) EXPECT_NEAR(s, shuffled.at(label), 1e-12) << label;
    }
}
