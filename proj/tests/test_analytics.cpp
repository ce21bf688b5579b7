#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wssp/analytics.hpp"
#include "wssp/core.hpp"
#include "wssp/rng.hpp"

using namespace wssp;

namespace {

double poisson_cdf_below(int x, double lambda) {
    double term = std::exp(-lambda), sum = 0.0;
    for (int k = 0; k < x; ++k) {
        sum += term;
        term *= lambda / (k + 1);
    }
    return sum;
}

}  // namespace

TEST(Gamma0, OrderStatisticValues) {
    EXPECT_NEAR(gamma0(0.5, 100, 5), 530.0 / 6.0, 1e-12);
    EXPECT_NEAR(gamma0(0.5, 100, 5), 5.0 * 106 / 6.0, 1e-12);
    EXPECT_NEAR(gamma0(1.0, 100, 5), 10.0 / 6.0, 1e-12);
    EXPECT_NEAR(gamma0(0.5, 1, 1), 1.5, 1e-12);
}

TEST(AvailableRank, MatchesUniformSubsetOrderStatistic) {
    // At q = 1/2 the available referents are a uniform (b-r)-subset of the pool.
    for (auto [n, b, r] : {std::tuple{100, 5, 0}, std::tuple{100, 5, 2}, std::tuple{30, 8, 5}}) {
        for (int l = 1; l <= b - r; ++l)
            EXPECT_NEAR(expected_available_rank(l, 0.5, n, b, r), l * (n + b + 1.0) / (b - r + 1.0), 1e-9);
    }
    EXPECT_THROW(expected_available_rank(0, 0.5, 10, 3, 0), std::domain_error);
    EXPECT_THROW(expected_available_rank(3, 0.5, 10, 3, 1), std::domain_error);
}

TEST(AvailableRank, MonteCarloPermutations) {
    const int n = 20, b = 6, r = 2, T = 40000;
    Rng rng(31);
    std::vector<double> sum(b - r, 0.0);
    std::vector<int> pool(n + b);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n + b; ++i) pool[i] = i + 1;
        for (int i = 0; i < b - r; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n + b - i)]);
        std::vector<int> avail(pool.begin(), pool.begin() + (b - r));
        std::sort(avail.begin(), avail.end());
        for (int l = 0; l < b - r; ++l) sum[l] += avail[l];
    }
    for (int l = 1; l <= b - r; ++l)
        EXPECT_NEAR(sum[l - 1] / T, expected_available_rank(l, 0.5, n, b, r), 0.1);
}

TEST(ExpectedOffline, NoResignationIsTriangular) {
    EXPECT_DOUBLE_EQ(expected_offline(100, 5, 0, 0.5), 15.0);
    EXPECT_DOUBLE_EQ(expected_offline(100, 20, 0, 0.5), 210.0);
}

TEST(Gfn, AgreesWithPoissonSeriesAtIntegers) {
    for (double lam : {0.01, 0.5, 1.0, 3.7, 12.0})
        for (int x = 1; x <= 25; ++x) EXPECT_NEAR(g_fn(x, lam), poisson_cdf_below(x, lam), 1e-12) << x << ' ' << lam;
}

TEST(Gfn, EdgeCasesAndMonotonicity) {
    EXPECT_EQ(g_fn(0.0, 2.0), 0.0);
    EXPECT_EQ(g_fn(-1.0, 2.0), 0.0);
    EXPECT_EQ(g_fn(3.0, 0.0), 1.0);
    EXPECT_THROW(g_fn(1.0, -0.1), std::domain_error);
    for (double x = 0.25; x < 10; x += 0.25) {
        for (double lam = 0.0; lam < 8; lam += 0.5) {
            const double v = g_fn(x, lam);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            EXPECT_GE(g_fn(x, lam), g_fn(x, lam + 0.5) - 1e-15);
            EXPECT_LE(g_fn(x, lam), g_fn(x + 0.25, lam) + 1e-15);
        }
    }
}

TEST(Gfn, FirstBranchByStepIndex) {
    // Fewer than x selection steps before step j: certain survival.
    EXPECT_EQ(survival_at(3.0, 50.0, 13, 10), 1.0);
    EXPECT_LT(survival_at(2.0, 5.0, 13, 10), 1.0);
}

TEST(Curve, FullCutoffHasNoHires) {
    const auto cv = threshold_curve({100, 5, 0, 0.5, 100});
    EXPECT_EQ(cv.expected_hires, 0.0);
    EXPECT_EQ(cv.lambda_total(), 0.0);
}

TEST(Curve, ShapeInvariants) {
    for (auto [b, r] : {std::pair{5, 0}, std::pair{5, 5}, std::pair{20, 10}}) {
        for (int c : {0, 10, 37, 80}) {
            const auto cv = threshold_curve({100, b, r, 0.5, c});
            for (int j = 1; j <= 100; ++j) {
                EXPECT_GE(cv.gamma_j[j - 1], 1.0);
                EXPECT_LE(cv.gamma_j[j - 1], 100.0 + b);
                EXPECT_GE(cv.g_b[j - 1], 0.0);
                EXPECT_LE(cv.g_b[j - 1], 1.0);
                if (j > 1) {
                    EXPECT_LE(cv.g_b[j - 1], cv.g_b[j - 2] + 1e-12);
                    EXPECT_LE(cv.g_delta[j - 1], cv.g_delta[j - 2] + 1e-12);
                    EXPECT_GE(cv.lambda[j - 1], cv.lambda[j - 2]);
                }
                if (j <= c) EXPECT_EQ(cv.p[j - 1], 0.0);
            }
            EXPECT_GE(cv.expected_hires, 0.0);
            EXPECT_LE(cv.expected_hires, b);
        }
    }
}

TEST(Curve, LearningThresholdRank) {
    const auto cv = threshold_curve({100, 5, 2, 0.5, 20});
    EXPECT_DOUBLE_EQ(cv.gamma, 5.0 * 105 / 25);
    EXPECT_DOUBLE_EQ(cv.delta, 2 + 20 * (cv.gamma - 1) / 105);
}

TEST(Curve, HiresNonIncreasingInCutoff) {
    for (auto [b, r] : {std::pair{5, 0}, std::pair{5, 5}, std::pair{20, 0}, std::pair{20, 20}}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int c = 0; c <= 100; ++c) {
            const double h = threshold_curve({100, b, r, 0.5, c}).expected_hires;
            EXPECT_LE(h, prev + 1e-12) << b << ' ' << r << ' ' << c;
            prev = h;
        }
    }
}

TEST(Curve, RejectsOtherQualities) {
    EXPECT_THROW(threshold_curve({100, 5, 0, 0.75, 10}), std::domain_error);
    EXPECT_THROW(threshold_curve({100, 5, 6, 0.5, 10}), std::domain_error);
    EXPECT_THROW(threshold_curve({100, 5, 0, 0.5, 101}), std::domain_error);
}

TEST(MaxHires, FullResignationIsExactlyB) {
    EXPECT_EQ(expected_max_hires(threshold_curve({100, 5, 5, 0.5, 30})), 5.0);
    const auto cv = threshold_curve({100, 5, 2, 0.5, 30});
    const double v = expected_max_hires(cv);
    EXPECT_GE(v, 2.0);
    EXPECT_LE(v, 5.0);
}

TEST(OptimalCutoff, ScaleInvariantArgmin) {
    for (auto [b, r] : {std::pair{5, 0}, std::pair{5, 5}, std::pair{15, 3}}) {
        const auto a = optimal_cutoff(60, b, r, RegretNormalization::AsTheorem);
        const auto p = optimal_cutoff(60, b, r, RegretNormalization::PerItem);
        EXPECT_EQ(a.cutoff, p.cutoff);
        EXPECT_NEAR(p.expected_regret * b, a.expected_regret, 1e-9);
    }
}

TEST(OptimalCutoff, IsTheScanMinimum) {
    const auto best = optimal_cutoff(50, 4, 1);
    for (int c = 0; c <= 50; ++c) {
        const double v = threshold_curve({50, 4, 1, 0.5, c}).expected_regret;
        if (c < best.cutoff) EXPECT_GT(v, best.expected_regret);
        else EXPECT_GE(v, best.expected_regret);
    }
}

TEST(Translate, IdentityAtMediumQuality) {
    const auto src = analytic_cutoff_source();
    for (int b : {1, 5, 15}) {
        const auto tr = translate_cutoff(100, b, 0.5, 0, src);
        EXPECT_EQ(tr.n_source, 100);
        EXPECT_EQ(tr.c_target, tr.c_source);
        EXPECT_EQ(tr.c_source, optimal_cutoff(100, b, 0).cutoff);
    }
}

TEST(Translate, SourceSizeFormula) {
    const auto fixed = [](int, int, int) { return 10; };
    const auto tr = translate_cutoff(100, 15, 0.8, 0, fixed);
    EXPECT_EQ(tr.n_source, 31);  // floor(114 * 0.4 - 14) = floor(31.6)
    EXPECT_EQ(tr.c_target, 10 * 115 / 46);
    EXPECT_EQ(translate_cutoff(100, 5, 0.75, 0, fixed).n_source, 48);
}

TEST(Translate, DegenerateHighQuality) {
    const auto tr = translate_cutoff(100, 15, 0.95, 0, analytic_cutoff_source());
    EXPECT_TRUE(tr.degenerate);
    EXPECT_EQ(tr.c_target, 0);
}

TEST(Translate, RejectsBadInput) {
    const auto src = analytic_cutoff_source();
    EXPECT_THROW(translate_cutoff(100, 5, 1.0, 0, src), std::domain_error);
    EXPECT_THROW(translate_cutoff(100, 5, 0.0, 0, src), std::domain_error);
    EXPECT_THROW(translate_cutoff(100, 5, 0.5, 6, src), std::domain_error);
}

TEST(MuHat, ZeroDuringLearning) {
    const auto mu = mu_hat_curve(threshold_curve({100, 5, 5, 0.5, 30}));
    for (int j = 1; j <= 30; ++j) EXPECT_EQ(mu[j - 1], 0.0);
    EXPECT_GT(mu[99], 0.0);
}

TEST(MuHat, UnitDenominatorWithoutResignations) {
    const auto cv = threshold_curve({100, 5, 0, 0.5, 20});
    const auto mu = mu_hat_curve(cv);
    const double ln = cv.lambda_total();
    EXPECT_NEAR(mu[99], ln * cv.survival_after(100, 4) + 5 * (1 - cv.survival_after(100, 5)), 1e-12);
}

TEST(MuHat, ImpossibleConditioning) {
    // c = n with r > 0: no selection step, so hires >= r never happens.
    EXPECT_THROW(mu_hat_curve(threshold_curve({20, 3, 2, 0.5, 20})), std::domain_error);
}

TEST(CutoffTable, MemoizesAndAcceptsRows) {
    CutoffTable t;
    const auto a = t.lookup(40, 3, 0);
    EXPECT_EQ(a.cutoff, optimal_cutoff(40, 3, 0).cutoff);
    t.insert({40, 3, 1, 7, 1.5});
    EXPECT_EQ(t.lookup(40, 3, 1).cutoff, 7);
    EXPECT_EQ(t.source()(40, 3, 1), 7);
    EXPECT_EQ(t.rows().size(), 2u);
}
