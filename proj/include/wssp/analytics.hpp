#pragma once

// Closed-form expectations for the cutoff policy at medium reference quality,
// the exhaustive optimal-cutoff search and the quality translation that maps
// any quality onto the medium-quality setting sharing the same referent ranks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace wssp {

enum class RegretNormalization {
    AsTheorem,  // expected rank-sum difference
    PerItem,  // the same divided by b
};

struct AnalyticParams {
    int n = 0;
    int b = 0;
    int r = 0;
    double q = 0.5;
    int c = 0;

    void validate() const {
        if (b < 1 || b > n || r < 0 || r > b) throw std::domain_error("analytics: need 0 <= r <= b <= n, b >= 1");
        if (c < 0 || c > n) throw std::domain_error("analytics: cutoff must lie in [0, n]");
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("analytics: q must lie in (0,1)");
    }
};

/// Expected rank of the worst referent.
inline double gamma0(double q, int n, int b) {
    return (1.0 - q) * 2.0 * b * (n + b - 1) / (b + 1.0) + 2.0 * b / (b + 1.0);
}

/// Expected rank of the l-th best available referent, 1 <= l <= b - r.
inline double expected_available_rank(int l, double q, int n, int b, int r) {
    if (l < 1 || l > b - r) throw std::domain_error("expected_available_rank: l must lie in [1, b - r]");
    return gamma0(q, n, b) * (b + 1.0) * l / (b * (b - r + 1.0));
}

/// Expected offline optimum (sum of the b best available ranks).
inline double expected_offline(int n, int b, int r, double q) {
    const double g0 = gamma0(q, n, b);
    return b * (b + 1.0) / 2.0 + r * static_cast<double>(b) * b * (g0 + r) / (2.0 * g0 * g0);
}

/// P(N < x) for N ~ Poisson(lambda), extended to real x by the regularized
/// upper incomplete gamma Q(x, lambda).
inline double g_fn(double x, double lambda) {
    if (!(lambda >= 0.0)) throw std::domain_error("g_fn: lambda must be non-negative");
    if (x <= 0.0) return 0.0;
    if (lambda == 0.0) return 1.0;
    return boost::math::gamma_q(x, lambda);
}

/// P(A~_{j-1} < x) given lambda_{j-1}: certain while fewer than x selection
/// steps have elapsed before step j.
inline double survival_at(double x, double lambda_prev, int j, int c) {
    if (x > static_cast<double>(j - c - 1)) return 1.0;
    return g_fn(x, lambda_prev);
}

struct AnalyticCurve {
    AnalyticParams params;
    // Per step j = 1..n at index j-1. For j <= c: p = 0, lambda = 0, g = 1 and
    // gamma_j holds the learning threshold rank.
    std::vector<double> p;  // acceptance probability
    std::vector<double> lambda;  // sum_{i=c+1}^{j} p_i
    std::vector<double> g_b;  // P(A~_{j-1} < b)
    std::vector<double> g_delta;  // P(A~_{j-1} < Delta)
    std::vector<double> gamma_j;  // expected threshold rank
    double gamma = 0.0;  // expected rank of Y_(b) after learning
    double delta = 0.0;
    double gamma0 = 0.0;
    double expected_hires = 0.0;  // E[A~_n]
    double expected_offline = 0.0;
    double expected_regret = 0.0;  // as-theorem

    double lambda_total() const { return lambda.empty() ? 0.0 : lambda.back(); }

    /// P(A~_j < x) evaluated at step j+1, i.e. with lambda_j; j in [0, n].
    double survival_after(int j, double x) const {
        const double lam = j <= 0 ? 0.0 : lambda[j - 1];
        return survival_at(x, lam, j + 1, params.c);
    }

    double regret(RegretNormalization norm) const {
        return norm == RegretNormalization::PerItem ? expected_regret / params.b : expected_regret;
    }
};

/// Forward recursion for the expected threshold ranks, acceptance intensities,
/// expected hires and expected regret of CSM with cutoff c at q = 1/2.
inline AnalyticCurve threshold_curve(const AnalyticParams& params) {
    params.validate();
    if (std::abs(params.q - 0.5) > 1e-12)
        throw std::domain_error("threshold_curve: closed forms hold at q = 1/2; translate other qualities first");

    const int n = params.n, b = params.b, r = params.r, c = params.c;
    const double pool = n + b;

    AnalyticCurve cv;
    cv.params = params;
    cv.gamma0 = gamma0(params.q, n, b);
    cv.gamma = b * pool / (b + c);
    cv.delta = r + c * (cv.gamma - 1.0) / pool;
    cv.expected_offline = expected_offline(n, b, r, params.q);
    cv.p.assign(n, 0.0);
    cv.lambda.assign(n, 0.0);
    cv.g_b.assign(n, 1.0);
    cv.g_delta.assign(n, 1.0);
    cv.gamma_j.assign(n, cv.gamma);

    const double referent_scale = cv.gamma0 * (b + 1.0) / (b * (b - r + 1.0));
    double lambda = 0.0;  // lambda_{j-1}
    double hires = 0.0;  // sum_{i<j} p_i g_i(b)
    double candidate_term = 0.0;
    for (int j = c + 1; j <= n; ++j) {
        const double gd = survival_at(cv.delta, lambda, j, c);
        const double gb = survival_at(b, lambda, j, c);
        const double gj = cv.gamma * gd + referent_scale * (b - hires) * (1.0 - gd);
        const double pj = (gj - 1.0) / pool;
        cv.g_delta[j - 1] = gd;
        cv.g_b[j - 1] = gb;
        cv.gamma_j[j - 1] = gj;
        cv.p[j - 1] = pj;
        candidate_term += gb * gj * (gj - 1.0) / 2.0;
        hires += pj * gb;
        lambda += pj;
        cv.lambda[j - 1] = lambda;
    }
    // The Poisson survival terms do not truncate at b, so the raw sum can overshoot.
    cv.expected_hires = hires = std::min(hires, static_cast<double>(b));
    const double referent_term = cv.gamma0 * (b + 1.0) / (2.0 * b * (b - r + 1.0)) * (b - hires) * (b + 1.0 - hires);
    cv.expected_regret = candidate_term / pool + referent_term - cv.expected_offline;
    return cv;
}

/// E[max(A~_n, r)] with A~_n ~ Poisson(lambda_n) truncated at b.
inline double expected_max_hires(const AnalyticCurve& cv) {
    const int b = cv.params.b, r = cv.params.r;
    if (r == b) return static_cast<double>(b);
    const double lam = cv.lambda_total();
    double total = 0.0, mass_below_b = 0.0;
    double pmf = std::exp(-lam);
    for (int k = 0; k < b; ++k) {
        total += std::max(k, r) * pmf;
        mass_below_b += pmf;
        pmf *= lam / (k + 1);
    }
    total += b * std::max(0.0, 1.0 - mass_below_b);
    return total;
}

struct CutoffResult {
    int cutoff = 0;
    double expected_regret = 0.0;
};

/// Exhaustive scan over c in [0, n]; ties go to the smaller cutoff.
inline CutoffResult optimal_cutoff(int n, int b, int r, RegretNormalization norm = RegretNormalization::AsTheorem) {
    CutoffResult best{0, std::numeric_limits<double>::infinity()};
    for (int c = 0; c <= n; ++c) {
        const double er = threshold_curve({n, b, r, 0.5, c}).regret(norm);
        if (er < best.expected_regret) best = {c, er};
    }
    return best;
}

/// Maps (n, b, r) at q = 1/2 to an optimal cutoff.
using CutoffSource = std::function<int(int n, int b, int r)>;

inline CutoffSource analytic_cutoff_source() {
    return [](int n, int b, int r) { return optimal_cutoff(n, b, r).cutoff; };
}

struct TranslationResult {
    int n_source = 0;
    int c_source = 0;
    int c_target = 0;
    bool degenerate = false;  // source setting has fewer than b candidates
};

/// Optimal cutoff at quality q_t via the medium-quality setting with the same
/// expected referent ranks.
inline TranslationResult translate_cutoff(int n_t, int b, double q_t, int r, const CutoffSource& source) {
    if (!(q_t > 0.0 && q_t < 1.0)) throw std::domain_error("translate_cutoff: q must lie in (0,1)");
    if (b < 1 || b > n_t || r < 0 || r > b) throw std::domain_error("translate_cutoff: need 0 <= r <= b <= n, b >= 1");
    constexpr double q_s = 0.5;
    // The guard keeps exact products such as 52.0 from flooring to 51.
    const double raw = (n_t + b - 1.0) * (1.0 - q_t) / (1.0 - q_s) - b + 1.0;
    TranslationResult tr;
    tr.n_source = static_cast<int>(std::floor(raw + 1e-9));
    if (tr.n_source < b) {
        tr.degenerate = true;
        return tr;
    }
    tr.c_source = source(tr.n_source, b, r);
    const double scaled = tr.c_source * static_cast<double>(n_t + b) / (tr.n_source + b);
    tr.c_target = std::min(n_t, static_cast<int>(std::floor(scaled + 1e-9)));
    return tr;
}

/// Expected acceptances after step j given no failure, j = 1..n.
inline std::vector<double> mu_hat_curve(const AnalyticCurve& cv) {
    const int n = cv.params.n, b = cv.params.b, r = cv.params.r;
    const double denom = 1.0 - cv.survival_after(n, r);
    if (!(denom > 0.0)) throw std::domain_error("mu_hat_curve: conditioning event has probability zero");
    std::vector<double> mu(n);
    for (int j = 1; j <= n; ++j) {
        const double lam = cv.lambda[j - 1];
        mu[j - 1] = lam * cv.survival_after(j, b - 1) + b * (1.0 - cv.survival_after(j, b)) / denom;
    }
    return mu;
}

/// Memoized q = 1/2 optimal cutoffs, safe to share between worker threads.
class CutoffTable {
public:
    struct Row {
        int n, b, r, c_star;
        double expected_regret;
    };

    explicit CutoffTable(RegretNormalization norm = RegretNormalization::AsTheorem) : norm_(norm) {}

    CutoffResult lookup(int n, int b, int r) {
        const auto key = std::make_tuple(n, b, r);
        {
            std::lock_guard lock(mu_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        const CutoffResult res = optimal_cutoff(n, b, r, norm_);
        std::lock_guard lock(mu_);
        cache_.emplace(key, res);
        return res;
    }

    void insert(const Row& row) {
        std::lock_guard lock(mu_);
        cache_[std::make_tuple(row.n, row.b, row.r)] = {row.c_star, row.expected_regret};
    }

    CutoffSource source() {
        return [this](int n, int b, int r) { return lookup(n, b, r).cutoff; };
    }

    std::vector<Row> rows() const {
        std::lock_guard lock(mu_);
        std::vector<Row> out;
        out.reserve(cache_.size());
        for (const auto& [k, v] : cache_)
            out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), v.cutoff, v.expected_regret});
        return out;
    }

private:
    RegretNormalization norm_;
    mutable std::mutex mu_;
    std::map<std::tuple<int, int, int>, CutoffResult> cache_;
};

}  // namespace wssp
