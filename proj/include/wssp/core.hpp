#pragma once

// Domain types for one warm-started selection round: the reference set with its
// availability, the candidate sequence, absolute ranks over the joint pool,
// reference-set quality, instance generation and the offline oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wssp/rng.hpp"

namespace wssp {

using Score = double;

/// Raised when a caller breaks an operation's precondition on an otherwise
/// well-formed value (e.g. an outcome that leaves a position empty).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct WsspInstance {
    int n = 0;  // candidates
    int b = 0;  // job positions
    std::vector<Score> reference_scores;  // descending
    std::vector<std::uint8_t> availability;  // 1 = available
    std::vector<Score> candidate_scores;  // arrival order

    int resignations() const {
        return b - static_cast<int>(std::count(availability.begin(), availability.end(), 1));
    }

    int pool_size() const { return n + b; }

    void validate() const {
        if (b < 1 || n < 1 || b > n)
            throw std::domain_error("instance requires 1 <= b <= n");
        if (static_cast<int>(reference_scores.size()) != b ||
            static_cast<int>(availability.size()) != b ||
            static_cast<int>(candidate_scores.size()) != n)
            throw std::domain_error("instance vector lengths do not match n and b");
        auto bad = [](Score s) { return !std::isfinite(s) || s < 0.0 || s > 1.0; };
        if (std::any_of(reference_scores.begin(), reference_scores.end(), bad) ||
            std::any_of(candidate_scores.begin(), candidate_scores.end(), bad))
            throw std::domain_error("scores must be finite values in [0,1]");
        if (!std::is_sorted(reference_scores.begin(), reference_scores.end(), std::greater<>{}))
            throw std::domain_error("reference scores must be sorted in descending order");
        for (auto a : availability)
            if (a > 1) throw std::domain_error("availability entries must be 0 or 1");
    }
};

/// Absolute ranks over the joint pool (referents first, then candidates).
/// Rank 1 is the highest score.
struct RankContext {
    std::vector<int> referent_ranks;
    std::vector<int> candidate_ranks;
};

struct SelectionOutcome {
    std::vector<std::uint8_t> candidate_decisions;  // A
    std::vector<std::uint8_t> referent_decisions;  // kept referents after n steps
    int hires = 0;
    int failures = 0;
    long regret = 0;
    // tau_j for j = c+1..n; NaN once all positions have been assigned.
    std::vector<double> threshold_trace;

    int filled() const {
        return static_cast<int>(std::count(candidate_decisions.begin(), candidate_decisions.end(), 1) +
                                std::count(referent_decisions.begin(), referent_decisions.end(), 1));
    }
};

/// 1 + number of pool elements strictly greater than s.
inline int rank_of(Score s, std::span<const Score> pool) {
    if (std::find(pool.begin(), pool.end(), s) == pool.end())
        throw std::domain_error("rank_of: score is not an element of the pool");
    return 1 + static_cast<int>(std::count_if(pool.begin(), pool.end(), [s](Score v) { return v > s; }));
}

inline RankContext build_rank_context(const WsspInstance& inst) {
    const int total = inst.pool_size();
    std::vector<Score> pool;
    pool.reserve(total);
    pool.insert(pool.end(), inst.reference_scores.begin(), inst.reference_scores.end());
    pool.insert(pool.end(), inst.candidate_scores.begin(), inst.candidate_scores.end());

    // Stable order: equal scores keep pool order, so referents beat candidates
    // and earlier arrivals beat later ones.
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pool[a] > pool[b]; });

    std::vector<int> rank(total, 0);
    for (int pos = 0; pos < total; ++pos) rank[order[pos]] = pos + 1;

    RankContext ctx;
    ctx.referent_ranks.assign(rank.begin(), rank.begin() + inst.b);
    ctx.candidate_ranks.assign(rank.begin() + inst.b, rank.end());
    return ctx;
}

/// Normalized mean referent rank; 1 when the referents hold the top b ranks,
/// 0 when they hold the bottom b.
inline double compute_quality(const WsspInstance& inst, const RankContext& ctx) {
    const double mean = std::accumulate(ctx.referent_ranks.begin(), ctx.referent_ranks.end(), 0.0) / inst.b;
    const double x_min = (inst.b + 1) / 2.0;
    return 1.0 - (mean - x_min) / static_cast<double>(inst.n);
}

inline double compute_quality(const WsspInstance& inst) {
    return compute_quality(inst, build_rank_context(inst));
}

/// Candidates ~ U(0,1); referents ~ U(max(0,2q-1), min(1,2q)) sorted
/// descending; exactly r referents marked resigned, uniformly at random.
template <class Urbg>
WsspInstance generate_instance(int n, int b, double q, int r, Urbg& rng) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("generate_instance: q must lie in (0,1)");
    if (b < 1 || b > n || r < 0 || r > b) throw std::domain_error("generate_instance: need 0 <= r <= b <= n, b >= 1");

    const double lo = std::max(0.0, 2.0 * q - 1.0);
    const double hi = std::min(1.0, 2.0 * q);

    WsspInstance inst;
    inst.n = n;
    inst.b = b;
    inst.reference_scores.resize(b);
    for (auto& s : inst.reference_scores) s = lo + (hi - lo) * uniform01(rng);
    std::sort(inst.reference_scores.begin(), inst.reference_scores.end(), std::greater<>{});

    inst.candidate_scores.resize(n);
    for (auto& s : inst.candidate_scores) s = uniform01(rng);

    inst.availability.assign(b, 1);
    std::vector<int> slots(b);
    std::iota(slots.begin(), slots.end(), 0);
    // Partial Fisher-Yates: the first r slots of the permutation resign.
    for (int i = 0; i < r; ++i) {
        const int k = i + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(b - i)));
        std::swap(slots[i], slots[k]);
        inst.availability[slots[i]] = 0;
    }
    return inst;
}

inline WsspInstance generate_instance(int n, int b, double q, int r, std::uint64_t seed) {
    Rng rng(seed);
    return generate_instance(n, b, q, r, rng);
}

/// Minimal rank sum over b items drawn from the candidates and the available
/// referents.
inline long offline_optimum(const WsspInstance& inst, const RankContext& ctx) {
    std::vector<int> selectable;
    selectable.reserve(inst.pool_size());
    for (int i = 0; i < inst.b; ++i)
        if (inst.availability[i]) selectable.push_back(ctx.referent_ranks[i]);
    selectable.insert(selectable.end(), ctx.candidate_ranks.begin(), ctx.candidate_ranks.end());
    if (static_cast<int>(selectable.size()) < inst.b)
        throw std::logic_error("offline_optimum: fewer selectable items than positions");
    std::nth_element(selectable.begin(), selectable.begin() + (inst.b - 1), selectable.end());
    return std::accumulate(selectable.begin(), selectable.begin() + inst.b, 0L);
}

inline long offline_optimum(const WsspInstance& inst) { return offline_optimum(inst, build_rank_context(inst)); }

inline void check_fill(const WsspInstance& inst, const SelectionOutcome& out) {
    if (static_cast<int>(out.candidate_decisions.size()) != inst.n ||
        static_cast<int>(out.referent_decisions.size()) != inst.b)
        throw contract_error("outcome decision vectors do not match the instance");
    if (out.filled() != inst.b) throw contract_error("outcome does not fill exactly b positions");
    for (int i = 0; i < inst.b; ++i)
        if (out.referent_decisions[i] && !inst.availability[i])
            throw contract_error("outcome keeps a resigned referent");
}

/// Rank sum of the final assignment minus the offline optimum.
inline long realized_regret(const WsspInstance& inst, const SelectionOutcome& out, const RankContext& ctx) {
    check_fill(inst, out);
    long total = 0;
    for (int i = 0; i < inst.b; ++i)
        if (out.referent_decisions[i]) total += ctx.referent_ranks[i];
    for (int j = 0; j < inst.n; ++j)
        if (out.candidate_decisions[j]) total += ctx.candidate_ranks[j];
    return total - offline_optimum(inst, ctx);
}

inline long realized_regret(const WsspInstance& inst, const SelectionOutcome& out) {
    return realized_regret(inst, out, build_rank_context(inst));
}

}  // namespace wssp
