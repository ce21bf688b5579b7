#pragma once

// Multi-round driver: each round is a warm-started selection on a fresh sample
// from a fixed population, and its final assignment becomes the next round's
// reference set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wssp/analytics.hpp"
#include "wssp/core.hpp"
#include "wssp/montecarlo.hpp"
#include "wssp/parallel.hpp"
#include "wssp/policies.hpp"
#include "wssp/rng.hpp"

namespace wssp {

struct PopulationSpec {
    int size = 1000;
    int n = 100;  // candidates per round
    int b = 5;

    void validate() const {
        if (b < 1 || b > n) throw std::domain_error("population: need 1 <= b <= n");
        if (n + b > size) throw std::domain_error("population: need n + b <= |C|");
    }
};

struct Population {
    std::vector<Score> scores;
    std::vector<int> employed;  // indices of the current referents
};

struct RoundRecord {
    int round = 0;  // 1-based
    std::vector<int> referents;  // population indices, descending by score
    std::vector<std::uint8_t> resigned;  // aligned with referents
    std::vector<int> candidates;  // population indices in arrival order
    int r = 0;
    double q = 0.0;
    int cutoff = 0;
    WsspInstance instance;
    SelectionOutcome outcome;
    long regret = 0;
};

/// Chooses the policy for a round from (n, b, r_k, q_k).
using PolicySelector = std::function<PolicySpec(int n, int b, int r, double q)>;

/// Named selectors: csm-star, acsm-star, csm-e, csm-0, csm-<c>, mean, rand.
/// Cutoffs for the -star variants come from the translation method.
inline PolicySelector make_selector(const std::string& name, CutoffTable& table) {
    auto star = [&table](int n, int b, int r, double q) {
        // Observed quality can hit the closed endpoints; translation needs (0,1).
        const double qc = std::clamp(q, 1e-6, 1.0 - 1e-6);
        const auto tr = translate_cutoff(n, b, qc, r, table.source());
        return tr.degenerate ? 0 : tr.c_target;
    };
    if (name == "csm-star") return [star](int n, int b, int r, double q) { return PolicySpec::csm(star(n, b, r, q)); };
    if (name == "acsm-star")
        return [star](int n, int b, int r, double q) {
            const int c = star(n, b, r, q);
            return PolicySpec::acsm(c, default_zone(n, b, r, c));
        };
    if (name == "csm-e")
        return [](int n, int, int, double) { return PolicySpec::csm(static_cast<int>(std::floor(n / std::exp(1.0)))); };
    if (name == "mean") return [](int, int, int, double) { return PolicySpec::mean(); };
    if (name == "rand") return [](int, int, int, double) { return PolicySpec::rand(0); };
    if (name.rfind("csm-", 0) == 0) {
        std::size_t used = 0;
        int c = -1;
        try {
            c = std::stoi(name.substr(4), &used);
        } catch (const std::exception&) {
        }
        if (c >= 0 && used == name.size() - 4)
            return [c](int n, int, int, double) { return PolicySpec::csm(std::min(c, n)); };
    }
    throw std::invalid_argument("unknown policy '" + name + "'");
}

inline Population initial_population(const PopulationSpec& pop, std::uint64_t seed) {
    pop.validate();
    Rng rng(derive_seed(seed, {0x706f70ULL}));
    Population p;
    p.scores.resize(pop.size);
    for (auto& s : p.scores) s = uniform01(rng);
    std::vector<int> idx(pop.size);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < pop.b; ++i) std::swap(idx[i], idx[i + uniform_index(rng, pop.size - i)]);
    p.employed.assign(idx.begin(), idx.begin() + pop.b);
    return p;
}

/// K chained rounds. Round k draws resignations and its candidate sample from
/// substreams of (seed, k), so runs with the same seed but different policies
/// see the same population and the same random draws.
inline std::vector<RoundRecord> run_mssp(const PopulationSpec& pop, int rounds, double p_res,
                                         const PolicySelector& selector, std::uint64_t seed) {
    if (!(p_res >= 0.0 && p_res <= 1.0)) throw std::domain_error("run_mssp: p_res must lie in [0,1]");
    if (rounds < 1) throw std::domain_error("run_mssp: rounds must be >= 1");
    Population state = initial_population(pop, seed);
    const int N = pop.size, n = pop.n, b = pop.b;

    std::vector<RoundRecord> records;
    records.reserve(rounds);
    for (int k = 1; k <= rounds; ++k) {
        RoundRecord rec;
        rec.round = k;

        rec.referents = state.employed;
        std::sort(rec.referents.begin(), rec.referents.end(),
                  [&](int a, int c) { return state.scores[a] > state.scores[c] || (state.scores[a] == state.scores[c] && a < c); });

        // One uniform per seat, seats ordered by score.
        Rng res_rng(derive_seed(seed, {static_cast<std::uint64_t>(k), 1}));
        rec.resigned.assign(b, 0);
        for (int i = 0; i < b; ++i) rec.resigned[i] = uniform01(res_rng) < p_res ? 1 : 0;
        rec.r = static_cast<int>(std::count(rec.resigned.begin(), rec.resigned.end(), 1));

        // A random permutation of the population; the first n members outside
        // the reference set are interviewed in that order.
        Rng smp_rng(derive_seed(seed, {static_cast<std::uint64_t>(k), 2}));
        std::vector<int> perm(N);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::uint8_t> in_ref(N, 0);
        for (int i : rec.referents) in_ref[i] = 1;
        rec.candidates.reserve(n);
        for (int i = 0; i < N && static_cast<int>(rec.candidates.size()) < n; ++i) {
            std::swap(perm[i], perm[i + uniform_index(smp_rng, N - i)]);
            if (!in_ref[perm[i]]) rec.candidates.push_back(perm[i]);
        }

        WsspInstance& inst = rec.instance;
        inst.n = n;
        inst.b = b;
        for (int i : rec.referents) inst.reference_scores.push_back(state.scores[i]);
        inst.availability.resize(b);
        for (int i = 0; i < b; ++i) inst.availability[i] = rec.resigned[i] ? 0 : 1;
        for (int i : rec.candidates) inst.candidate_scores.push_back(state.scores[i]);

        const RankContext ctx = build_rank_context(inst);
        rec.q = compute_quality(inst, ctx);
        PolicySpec policy = selector(n, b, rec.r, rec.q);
        if (policy.variant == PolicyVariant::Rand) policy.rand_seed = derive_seed(seed, {static_cast<std::uint64_t>(k), 3});
        rec.cutoff = policy.cutoff;
        rec.outcome = run_policy(inst, policy);
        rec.regret = rec.outcome.regret;

        state.employed.clear();
        for (int i = 0; i < b; ++i)
            if (rec.outcome.referent_decisions[i]) state.employed.push_back(rec.referents[i]);
        for (int j = 0; j < n; ++j)
            if (rec.outcome.candidate_decisions[j]) state.employed.push_back(rec.candidates[j]);
        if (static_cast<int>(state.employed.size()) != b) throw std::logic_error("run_mssp: employed set lost its size");

        records.push_back(std::move(rec));
    }
    return records;
}

struct RoundSummary {
    int round = 0;
    std::string policy;
    double mean_regret = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

struct RunRow {
    int run = 0;
    int round = 0;
    std::string policy;
    long regret = 0;
    int hires = 0;
    int failures = 0;
    double q = 0.0;
    int cutoff = 0;
};

struct PolicyComparison {
    std::vector<RunRow> runs;  // run-major, then policy, then round
    std::vector<RoundSummary> summary;  // round-major, then policy

    const RoundSummary& at(int round, const std::string& policy) const {
        for (const auto& s : summary)
            if (s.round == round && s.policy == policy) return s;
        throw std::out_of_range("no summary for policy '" + policy + "'");
    }
};

/// Paired runs: run i of every policy uses seed derive_seed(seed, i).
/// Intervals are mean +- 1.96 standard errors.
inline PolicyComparison compare_policies(const PopulationSpec& pop, int rounds, double p_res,
                                         const std::vector<std::string>& policies, int runs, std::uint64_t seed,
                                         int workers = 1, CutoffTable* table = nullptr) {
    if (policies.empty()) throw std::domain_error("compare_policies: policy list is empty");
    if (runs < 1) throw std::domain_error("compare_policies: runs must be >= 1");
    CutoffTable local;
    CutoffTable& tab = table ? *table : local;
    std::vector<PolicySelector> selectors;
    for (const auto& p : policies) selectors.push_back(make_selector(p, tab));

    const std::size_t P = policies.size();
    std::vector<std::vector<RoundRecord>> results(static_cast<std::size_t>(runs) * P);
    parallel_for(results.size(), workers, [&](std::size_t idx) {
        const std::size_t run = idx / P, pol = idx % P;
        results[idx] = run_mssp(pop, rounds, p_res, selectors[pol], derive_seed(seed, run));
    });

    PolicyComparison cmp;
    for (int run = 0; run < runs; ++run)
        for (std::size_t pol = 0; pol < P; ++pol)
            for (const auto& rec : results[run * P + pol])
                cmp.runs.push_back({run, rec.round, policies[pol], rec.regret, rec.outcome.hires, rec.outcome.failures,
                                    rec.q, rec.cutoff});

    for (int k = 1; k <= rounds; ++k) {
        for (std::size_t pol = 0; pol < P; ++pol) {
            double sum = 0.0, ss = 0.0;
            for (int run = 0; run < runs; ++run) sum += static_cast<double>(results[run * P + pol][k - 1].regret);
            const double mean = sum / runs;
            for (int run = 0; run < runs; ++run) {
                const double d = static_cast<double>(results[run * P + pol][k - 1].regret) - mean;
                ss += d * d;
            }
            const double se = runs > 1 ? std::sqrt(ss / (runs - 1.0) / runs) : 0.0;
            cmp.summary.push_back({k, policies[pol], mean, mean - 1.96 * se, mean + 1.96 * se});
        }
    }
    return cmp;
}

}  // namespace wssp
