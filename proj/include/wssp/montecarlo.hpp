#pragma once

// Seed-reproducible trial harness. Trial i of a cell draws from the substream
// derive_seed(cell_seed, i); per-trial results are reduced in index order so
// the statistics are bit-identical for any worker count.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wssp/analytics.hpp"
#include "wssp/core.hpp"
#include "wssp/parallel.hpp"
#include "wssp/policies.hpp"
#include "wssp/rng.hpp"

namespace wssp {

/// Resignations as an absolute count or as a fraction of b (floored).
struct ResignationRule {
    enum class Kind { Absolute, Fraction };
    Kind kind = Kind::Absolute;
    double value = 0.0;

    static ResignationRule absolute(int r) { return {Kind::Absolute, static_cast<double>(r)}; }
    static ResignationRule fraction(double f) { return {Kind::Fraction, f}; }

    int resolve(int b) const {
        const int r = kind == Kind::Absolute ? static_cast<int>(value)
                                             : static_cast<int>(std::floor(value * b + 1e-9));
        if (r < 0 || r > b) throw std::domain_error("resignation rule yields r outside [0, b]");
        return r;
    }
};

struct CellSpec {
    int n = 100;
    int b = 5;
    int c = 0;
    double q = 0.5;
    int r = 0;
    PolicySpec policy = PolicySpec::csm(0);
};

struct TrialResult {
    long regret = 0;
    int hires = 0;
    int failures = 0;
};

struct CellStats {
    double mean_regret = 0.0;
    double stderr_regret = 0.0;
    double mean_hires = 0.0;
    double failure_rate = 0.0;  // failures summed over trials / trials
    double failure_probability = 0.0;  // share of trials with at least one failure
    long trials = 0;
};

/// One trial: instance from substream 0 of the trial seed, RAND thresholds
/// from substream 1. The policy's own cutoff is overridden by cell.c for CSM
/// and ACSM.
inline SelectionOutcome run_trial_outcome(const CellSpec& cell, std::uint64_t trial_seed, WsspInstance* instance_out = nullptr) {
    Rng gen(derive_seed(trial_seed, 0));
    WsspInstance inst = generate_instance(cell.n, cell.b, cell.q, cell.r, gen);
    PolicySpec policy = cell.policy;
    if (policy.variant == PolicyVariant::Csm || policy.variant == PolicyVariant::Acsm) policy.cutoff = cell.c;
    if (policy.variant == PolicyVariant::Rand) policy.rand_seed = derive_seed(trial_seed, 1);
    SelectionOutcome out = run_policy(inst, policy);
    if (instance_out) *instance_out = std::move(inst);
    return out;
}

inline TrialResult run_trial(const CellSpec& cell, std::uint64_t trial_seed) {
    const SelectionOutcome out = run_trial_outcome(cell, trial_seed);
    return {out.regret, out.hires, out.failures};
}

inline CellStats summarize(const std::vector<TrialResult>& results) {
    CellStats st;
    st.trials = static_cast<long>(results.size());
    if (results.empty()) return st;
    double sum = 0.0, hires = 0.0, fails = 0.0, any = 0.0;
    for (const auto& t : results) {
        sum += static_cast<double>(t.regret);
        hires += t.hires;
        fails += t.failures;
        any += t.failures > 0 ? 1.0 : 0.0;
    }
    const double T = static_cast<double>(results.size());
    st.mean_regret = sum / T;
    st.mean_hires = hires / T;
    st.failure_rate = fails / T;
    st.failure_probability = any / T;
    if (results.size() > 1) {
        double ss = 0.0;
        for (const auto& t : results) {
            const double d = static_cast<double>(t.regret) - st.mean_regret;
            ss += d * d;
        }
        st.stderr_regret = std::sqrt(ss / (T - 1.0) / T);
    }
    return st;
}

inline std::vector<TrialResult> run_cell_trials(const CellSpec& cell, long trials, std::uint64_t seed, int workers = 1) {
    if (trials < 1) throw std::domain_error("run_cell: trials must be >= 1");
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    parallel_for(results.size(), workers, [&](std::size_t i) { results[i] = run_trial(cell, derive_seed(seed, i)); });
    return results;
}

inline CellStats run_cell(const CellSpec& cell, long trials, std::uint64_t seed, int workers = 1) {
    return summarize(run_cell_trials(cell, trials, seed, workers));
}

/// ACSM zone built from the medium-quality acceptance curve of (n, b, r, c)
/// with the standard width and unit increments. Falls back to an unbounded
/// zone (plain CSM behaviour) when the no-failure event has zero probability.
inline ZoneConfig default_zone(int n, int b, int r, int c) {
    try {
        return ZoneConfig::standard(mu_hat_curve(threshold_curve({n, b, r, 0.5, c})), b);
    } catch (const std::domain_error&) {
        return ZoneConfig::unbounded(n);
    }
}

struct HeatmapSpec {
    int n = 100;
    std::vector<int> b_values;
    std::vector<int> c_values;  // empty: every c in [0, n]
    double q = 0.5;
    ResignationRule resignations;
    PolicyVariant variant = PolicyVariant::Csm;
    long trials = 1000;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct HeatmapCell {
    int b = 0;
    int c = 0;
    int r = 0;
    CellStats stats;
    double analytic_regret = std::numeric_limits<double>::quiet_NaN();  // q = 1/2 only
};

struct CutoffPathPoint {
    int b = 0;
    int r = 0;
    int c_star_sim = 0;
    int c_star_analytic = 0;
};

struct Heatmap {
    std::vector<HeatmapCell> cells;  // b-major, then c ascending
    std::vector<CutoffPathPoint> path;
};

inline int analytic_cutoff(int n, int b, double q, int r, CutoffTable* table = nullptr) {
    CutoffTable local;
    CutoffTable& t = table ? *table : local;
    if (std::abs(q - 0.5) < 1e-12) return t.lookup(n, b, r).cutoff;
    const auto tr = translate_cutoff(n, b, q, r, t.source());
    return tr.degenerate ? 0 : tr.c_target;
}

/// Empirical regret over the (b, c) grid. All cells that share b use the same
/// trial substreams (common random numbers), so the per-b argmin compares
/// cutoffs on identical instances.
inline Heatmap regret_heatmap(const HeatmapSpec& spec, CutoffTable* table = nullptr) {
    if (spec.b_values.empty()) throw std::domain_error("heatmap: b range is empty");
    std::vector<int> cs = spec.c_values;
    if (cs.empty())
        for (int c = 0; c <= spec.n; ++c) cs.push_back(c);

    CutoffTable local;
    CutoffTable& tab = table ? *table : local;
    const bool medium = std::abs(spec.q - 0.5) < 1e-12;

    Heatmap hm;
    for (int b : spec.b_values) {
        const int r = spec.resignations.resolve(b);
        const std::uint64_t b_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(b));
        CutoffPathPoint pt{b, r, 0, analytic_cutoff(spec.n, b, spec.q, r, &tab)};
        double best = std::numeric_limits<double>::infinity();
        for (int c : cs) {
            if (c > spec.n) continue;
            CellSpec cell{spec.n, b, c, spec.q, r, PolicySpec::csm(c)};
            if (spec.variant == PolicyVariant::Acsm) cell.policy = PolicySpec::acsm(c, default_zone(spec.n, b, r, c));
            HeatmapCell hc{b, c, r, run_cell(cell, spec.trials, b_seed, spec.workers)};
            if (medium) hc.analytic_regret = threshold_curve({spec.n, b, r, 0.5, c}).expected_regret;
            if (hc.stats.mean_regret < best) {
                best = hc.stats.mean_regret;
                pt.c_star_sim = c;
            }
            hm.cells.push_back(hc);
        }
        hm.path.push_back(pt);
    }
    return hm;
}

struct CutoffCurveRow {
    double q = 0.5;
    int b = 0;
    int c_star_sim = 0;
    int c_star_analytic = 0;
};

/// Empirical and translated-analytic optimal cutoffs as functions of b, one
/// curve per quality.
inline std::vector<CutoffCurveRow> cutoff_curves(int n, ResignationRule resignations, const std::vector<double>& qs,
                                                 const std::vector<int>& b_values, const std::vector<int>& c_values,
                                                 long trials, std::uint64_t seed, int workers = 1,
                                                 CutoffTable* table = nullptr) {
    CutoffTable local;
    CutoffTable& tab = table ? *table : local;
    std::vector<CutoffCurveRow> rows;
    for (std::size_t k = 0; k < qs.size(); ++k) {
        if (!(qs[k] > 0.0 && qs[k] < 1.0)) throw std::domain_error("cutoff_curves: q must lie in (0,1)");
        HeatmapSpec hs{n, b_values, c_values, qs[k], resignations, PolicyVariant::Csm, trials, derive_seed(seed, k), workers};
        const Heatmap hm = regret_heatmap(hs, &tab);
        for (const auto& pt : hm.path) rows.push_back({qs[k], pt.b, pt.c_star_sim, pt.c_star_analytic});
    }
    return rows;
}

}  // namespace wssp
