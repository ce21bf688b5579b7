#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "wssp/core.hpp"
#include "wssp/policies.hpp"

using namespace wssp;

namespace {

WsspInstance make(int n, int b, std::vector<Score> ref, std::vector<std::uint8_t> avail, std::vector<Score> cand) {
    WsspInstance inst;
    inst.n = n;
    inst.b = b;
    inst.reference_scores = std::move(ref);
    inst.availability = std::move(avail);
    inst.candidate_scores = std::move(cand);
    return inst;
}

// Enumerates every b-subset of the selectable items and returns the smallest rank sum.
long brute_force_offline(const WsspInstance& inst) {
    std::vector<Score> pool = inst.reference_scores;
    pool.insert(pool.end(), inst.candidate_scores.begin(), inst.candidate_scores.end());
    const int total = inst.n + inst.b;
    std::vector<int> ranks(total);
    for (int i = 0; i < total; ++i) {
        int better = 0;
        for (int k = 0; k < total; ++k)
            if (pool[k] > pool[i] || (pool[k] == pool[i] && k < i)) ++better;
        ranks[i] = better + 1;
    }
    long best = -1;
    for (unsigned mask = 0; mask < (1u << total); ++mask) {
        if (std::popcount(mask) != inst.b) continue;
        bool ok = true;
        long sum = 0;
        for (int i = 0; i < total; ++i) {
            if (!(mask >> i & 1u)) continue;
            if (i < inst.b && !inst.availability[i]) ok = false;
            sum += ranks[i];
        }
        if (ok && (best < 0 || sum < best)) best = sum;
    }
    return best;
}

}  // namespace

TEST(Ranks, HighestScoreIsRankOne) {
    const std::vector<Score> pool{0.3, 0.9, 0.5};
    EXPECT_EQ(rank_of(0.9, pool), 1);
    EXPECT_EQ(rank_of(0.5, pool), 2);
    EXPECT_EQ(rank_of(0.3, pool), 3);
    EXPECT_THROW(rank_of(0.4, pool), std::domain_error);
}

TEST(Ranks, TiesFavourReferentsThenEarlierArrivals) {
    auto inst = make(3, 1, {0.5}, {1}, {0.5, 0.7, 0.5});
    const auto ctx = build_rank_context(inst);
    EXPECT_EQ(ctx.candidate_ranks[1], 1);
    EXPECT_EQ(ctx.referent_ranks[0], 2);
    EXPECT_EQ(ctx.candidate_ranks[0], 3);
    EXPECT_EQ(ctx.candidate_ranks[2], 4);
}

TEST(Ranks, AlwaysAPermutation) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto inst = generate_instance(30, 7, 0.6, 3, seed);
        const auto ctx = build_rank_context(inst);
        std::vector<int> all = ctx.referent_ranks;
        all.insert(all.end(), ctx.candidate_ranks.begin(), ctx.candidate_ranks.end());
        std::sort(all.begin(), all.end());
        for (int i = 0; i < 37; ++i) ASSERT_EQ(all[i], i + 1);
    }
}

TEST(Quality, ExtremeReferenceSets) {
    EXPECT_DOUBLE_EQ(compute_quality(make(3, 2, {0.9, 0.8}, {1, 1}, {0.1, 0.2, 0.3})), 1.0);
    EXPECT_DOUBLE_EQ(compute_quality(make(3, 2, {0.02, 0.01}, {1, 1}, {0.1, 0.2, 0.3})), 0.0);
}

TEST(Quality, MediumAnchorIsMidPoolMeanRank) {
    // Mean referent rank (n+b+1)/2 gives q = 1/2: ranks 2 and 3 of 4 for n=2, b=2.
    EXPECT_DOUBLE_EQ(compute_quality(make(2, 2, {0.6, 0.4}, {1, 1}, {0.7, 0.1})), 0.5);
}

TEST(Quality, GeneratorHitsTargetOnAverage) {
    for (double q : {0.5, 2.0 / 3.0, 0.75, 0.8}) {
        for (auto [n, b] : {std::pair{100, 5}, std::pair{100, 50}}) {
            const int T = 10000;
            double sum = 0.0, ss = 0.0;
            Rng rng(derive_seed(17, static_cast<std::uint64_t>(q * 1000) * 1000 + b));
            for (int t = 0; t < T; ++t) {
                const double v = compute_quality(generate_instance(n, b, q, 0, rng));
                sum += v;
                ss += v * v;
            }
            const double mean = sum / T;
            const double se = std::sqrt((ss / T - mean * mean) / (T - 1));
            EXPECT_NEAR(mean, q, 3 * se) << "q=" << q << " b=" << b;
        }
    }
}

TEST(Generate, ShapeAndResignationCount) {
    const auto inst = generate_instance(50, 10, 0.8, 4, 99);
    EXPECT_NO_THROW(inst.validate());
    EXPECT_EQ(inst.resignations(), 4);
    for (Score s : inst.reference_scores) {
        EXPECT_GE(s, 0.6);
        EXPECT_LE(s, 1.0);
    }
    EXPECT_THROW(generate_instance(5, 6, 0.5, 0, 1), std::domain_error);
    EXPECT_THROW(generate_instance(5, 2, 0.5, 3, 1), std::domain_error);
    EXPECT_THROW(generate_instance(5, 2, 1.0, 0, 1), std::domain_error);
}

TEST(Generate, SameSeedSameInstance) {
    const auto a = generate_instance(40, 6, 0.7, 2, 1234);
    const auto b = generate_instance(40, 6, 0.7, 2, 1234);
    EXPECT_EQ(a.reference_scores, b.reference_scores);
    EXPECT_EQ(a.candidate_scores, b.candidate_scores);
    EXPECT_EQ(a.availability, b.availability);
}

TEST(Validate, RejectsMalformedInstances) {
    EXPECT_THROW(make(2, 1, {0.5}, {1}, {0.1}).validate(), std::domain_error);
    EXPECT_THROW(make(2, 1, {1.5}, {1}, {0.1, 0.2}).validate(), std::domain_error);
    EXPECT_THROW(make(2, 1, {NAN}, {1}, {0.1, 0.2}).validate(), std::domain_error);
    EXPECT_THROW(make(2, 2, {0.1, 0.5}, {1, 1}, {0.1, 0.2}).validate(), std::domain_error);
    EXPECT_THROW(make(2, 1, {0.5}, {2}, {0.1, 0.2}).validate(), std::domain_error);
}

TEST(Offline, HandExamples) {
    EXPECT_EQ(offline_optimum(make(2, 1, {0.9}, {1}, {0.1, 0.2})), 1);
    EXPECT_EQ(offline_optimum(make(3, 1, {0.5}, {0}, {0.9, 0.1, 0.3})), 1);
}

TEST(Offline, MatchesSubsetEnumeration) {
    Rng rng(2024);
    for (int t = 0; t < 1000; ++t) {
        const int total = 2 + static_cast<int>(uniform_index(rng, 9));  // 2..10
        const int b = 1 + static_cast<int>(uniform_index(rng, total / 2));
        const int n = total - b;
        const int r = static_cast<int>(uniform_index(rng, b + 1));
        const double q = 0.05 + 0.9 * uniform01(rng);
        const auto inst = generate_instance(n, b, q, r, rng);
        ASSERT_EQ(offline_optimum(inst), brute_force_offline(inst)) << "trial " << t;
    }
}

TEST(Regret, HandTrace) {
    const auto inst = make(3, 1, {0.5}, {0}, {0.9, 0.1, 0.3});
    SelectionOutcome out;
    out.candidate_decisions = {0, 1, 0};
    out.referent_decisions = {0};
    EXPECT_EQ(realized_regret(inst, out), 3);
    out.candidate_decisions = {1, 0, 0};
    EXPECT_EQ(realized_regret(inst, out), 0);
}

TEST(Regret, FillViolationsAreContractErrors) {
    const auto inst = make(3, 1, {0.5}, {0}, {0.9, 0.1, 0.3});
    SelectionOutcome out;
    out.candidate_decisions = {0, 0, 0};
    out.referent_decisions = {0};
    EXPECT_THROW(realized_regret(inst, out), contract_error);
    out.referent_decisions = {1};
    EXPECT_THROW(realized_regret(inst, out), contract_error);
    out.candidate_decisions = {1, 1, 0};
    out.referent_decisions = {0};
    EXPECT_THROW(realized_regret(inst, out), contract_error);
}

TEST(Regret, InvariantUnderMonotoneTransform) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto inst = generate_instance(40, 6, 0.6, static_cast<int>(seed % 7), seed);
        const auto out = run_csm(inst, static_cast<int>(seed % 30));
        auto warped = inst;
        for (auto& s : warped.reference_scores) s = std::pow(s, 3.0);
        for (auto& s : warped.candidate_scores) s = std::pow(s, 3.0);
        EXPECT_EQ(realized_regret(warped, out), realized_regret(inst, out));
    }
}
