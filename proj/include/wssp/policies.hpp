#pragma once

// Online selection engines. Candidates are fed one at a time to a threshold
// rule that only sees the reference set, the scores already examined and the
// decisions taken so far; every decision is final once made.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wssp/core.hpp"
#include "wssp/rng.hpp"

namespace wssp {

enum class PolicyVariant { Csm, Acsm, Mean, Rand };

inline std::string to_string(PolicyVariant v) {
    switch (v) {
    case PolicyVariant::Csm: return "csm";
    case PolicyVariant::Acsm: return "acsm";
    case PolicyVariant::Mean: return "mean";
    case PolicyVariant::Rand: return "rand";
    }
    return "?";
}

/// Band around the expected acceptance count, all vectors indexed by step
/// j = 1..n at position j-1.
struct ZoneConfig {
    std::vector<double> expected_hires;  // mu_hat_j
    std::vector<double> width;  // w_j >= 0
    std::vector<double> increment;  // d_j >= 0

    /// w_j = (b/2)(1 - j/n), d_j = 1.
    static ZoneConfig standard(std::vector<double> mu_hat, int b) {
        const int n = static_cast<int>(mu_hat.size());
        ZoneConfig z;
        z.expected_hires = std::move(mu_hat);
        z.width.resize(n);
        z.increment.assign(n, 1.0);
        for (int j = 1; j <= n; ++j) z.width[j - 1] = 0.5 * b * (1.0 - static_cast<double>(j) / n);
        return z;
    }

    /// Infinite width: the adjusted policy never leaves the zone.
    static ZoneConfig unbounded(int n) {
        ZoneConfig z;
        z.expected_hires.assign(n, 0.0);
        z.width.assign(n, std::numeric_limits<double>::infinity());
        z.increment.assign(n, 1.0);
        return z;
    }

    void validate(int n) const {
        if (static_cast<int>(expected_hires.size()) != n || static_cast<int>(width.size()) != n ||
            static_cast<int>(increment.size()) != n)
            throw std::domain_error("zone curves must have one entry per candidate");
        for (int i = 0; i < n; ++i)
            if (!(width[i] >= 0.0) || !(increment[i] >= 0.0))
                throw std::domain_error("zone width and increment must be non-negative");
    }
};

struct PolicySpec {
    PolicyVariant variant = PolicyVariant::Csm;
    int cutoff = 0;
    std::optional<ZoneConfig> zone;  // ACSM only
    std::uint64_t rand_seed = 0;  // RAND only

    static PolicySpec csm(int c) { return {PolicyVariant::Csm, c, std::nullopt, 0}; }
    static PolicySpec acsm(int c, ZoneConfig z) { return {PolicyVariant::Acsm, c, std::move(z), 0}; }
    static PolicySpec mean() { return {PolicyVariant::Mean, 0, std::nullopt, 0}; }
    static PolicySpec rand(std::uint64_t seed) { return {PolicyVariant::Rand, 0, std::nullopt, seed}; }

    void validate(int n) const {
        if (cutoff < 0 || cutoff > n) throw std::domain_error("cutoff must lie in [0, n]");
        if (zone.has_value() != (variant == PolicyVariant::Acsm))
            throw std::domain_error("a zone configuration is required for ACSM and only for ACSM");
        if (zone) zone->validate(n);
    }
};

struct SelectionState {
    int n = 0;
    int b = 0;
    int r = 0;
    int cutoff = 0;
    int step = 0;  // j, the candidate being examined (1-based)
    int hires = 0;  // l: candidates accepted before step j
    int learning_beaten = 0;  // n_rej
    std::vector<Score> updated_reference;  // top b of referents and the first c candidates, descending
    std::span<const Score> reference_scores;
    std::vector<int> remaining_referents;  // available, not fired; descending by score

    Score learning_threshold() const { return updated_reference.back(); }
};

/// CSM acceptance threshold for step j > c.
inline Score threshold_at(const SelectionState& s) {
    if (s.step <= s.cutoff) throw contract_error("threshold_at: no threshold during the learning phase");
    if (s.hires >= s.b) throw contract_error("threshold_at: all positions already assigned");
    if (s.hires < s.learning_beaten + s.r) return s.learning_threshold();
    // Here l >= r, so exactly b - l available referents remain and S+_(b-l) is the worst of them.
    const auto idx = static_cast<std::size_t>(s.b - s.hires - 1);
    return s.reference_scores[s.remaining_referents.at(idx)];
}

inline bool is_forced_step(const SelectionState& s) {
    return s.step - s.hires == s.n - s.r + 1 && s.hires < s.r;
}

/// Forced acceptance of a candidate that did not beat its threshold.
inline bool detect_failure(const SelectionState& s, Score score, Score threshold) {
    return s.step - s.hires == s.n - s.r + 1 && score < threshold;
}

/// Shared engine. `Rule` provides
///   void start(const SelectionState&, std::span<const Score> learning_scores);
///   Score threshold(const SelectionState&);
///   void observe(const SelectionState& after_step, Score score, bool accepted);
template <class Rule>
SelectionOutcome run_selection(const WsspInstance& inst, int cutoff, Rule& rule) {
    inst.validate();
    if (cutoff < 0 || cutoff > inst.n) throw std::domain_error("cutoff must lie in [0, n]");

    SelectionState st;
    st.n = inst.n;
    st.b = inst.b;
    st.r = inst.resignations();
    st.cutoff = cutoff;
    st.reference_scores = inst.reference_scores;
    for (int i = 0; i < inst.b; ++i)
        if (inst.availability[i]) st.remaining_referents.push_back(i);

    SelectionOutcome out;
    out.candidate_decisions.assign(inst.n, 0);
    out.referent_decisions.assign(inst.b, 0);

    auto accept = [&](int j) {
        out.candidate_decisions[j - 1] = 1;
        if (st.hires >= st.r) st.remaining_referents.pop_back();
        ++st.hires;
    };

    // Learning phase. Rejection is by default, except that the fill rule wins
    // when the cutoff leaves too few candidates for the resigned seats.
    for (int j = 1; j <= cutoff; ++j) {
        st.step = j;
        if (is_forced_step(st)) {
            ++out.failures;
            accept(j);
        }
    }

    const std::span<const Score> learning(inst.candidate_scores.data(), static_cast<std::size_t>(cutoff));
    st.updated_reference = inst.reference_scores;
    st.updated_reference.insert(st.updated_reference.end(), learning.begin(), learning.end());
    std::sort(st.updated_reference.begin(), st.updated_reference.end(), std::greater<>{});
    st.updated_reference.resize(inst.b);
    const Score yb = st.updated_reference.back();
    st.learning_beaten = static_cast<int>(std::count_if(learning.begin(), learning.end(), [yb](Score s) { return s > yb; }));

    rule.start(st, learning);

    out.threshold_trace.reserve(inst.n - cutoff);
    for (int j = cutoff + 1; j <= inst.n; ++j) {
        st.step = j;
        const Score s = inst.candidate_scores[j - 1];
        bool accepted = false;
        if (st.hires < st.b) {
            const Score tau = rule.threshold(st);
            out.threshold_trace.push_back(tau);
            const bool forced = is_forced_step(st);
            if (s > tau || forced) {
                if (forced && detect_failure(st, s, tau)) ++out.failures;
                accept(j);
                accepted = true;
            }
        } else {
            out.threshold_trace.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        rule.observe(st, s, accepted);
    }

    for (int i : st.remaining_referents) out.referent_decisions[i] = 1;
    out.hires = st.hires;
    out.regret = realized_regret(inst, out);
    return out;
}

struct CsmRule {
    void start(const SelectionState&, std::span<const Score>) {}
    Score threshold(const SelectionState& s) { return threshold_at(s); }
    void observe(const SelectionState&, Score, bool) {}
};

/// CSM threshold while the running acceptance count stays inside the zone;
/// outside it the threshold slides along the ordered list of all scores seen
/// so far, relaxing when behind and tightening when ahead.
class AcsmRule {
public:
    explicit AcsmRule(const ZoneConfig& zone) : zone_(zone) {}

    void start(const SelectionState& s, std::span<const Score> learning) {
        seen_.assign(s.reference_scores.begin(), s.reference_scores.end());
        seen_.insert(seen_.end(), learning.begin(), learning.end());
        std::sort(seen_.begin(), seen_.end(), std::greater<>{});
    }

    Score threshold(const SelectionState& s) {
        const Score base = threshold_at(s);
        if (status_ == Zone::Inside) return base;
        // base is always a seen score: Y_(b) or an available referent.
        const auto it = std::find(seen_.begin(), seen_.end(), base);
        const long m = static_cast<long>(it - seen_.begin()) + 1;
        long idx = status_ == Zone::Below ? m + static_cast<long>(std::floor(relax_))
                                          : m - static_cast<long>(std::floor(tighten_));
        idx = std::clamp(idx, 1L, static_cast<long>(seen_.size()));
        return seen_[idx - 1];
    }

    void observe(const SelectionState& s, Score score, bool) {
        seen_.insert(std::upper_bound(seen_.begin(), seen_.end(), score, std::greater<>{}), score);
        const int j = s.step;
        const double accepted = s.hires;  // A~_j after the decision at step j
        const double mu = zone_.expected_hires[j - 1];
        const double w = zone_.width[j - 1];
        if (accepted < mu - w) {
            status_ = Zone::Below;
            relax_ += zone_.increment[j - 1];
        } else if (accepted > mu + w) {
            status_ = Zone::Above;
            tighten_ += zone_.increment[j - 1];
        } else {
            status_ = Zone::Inside;
            relax_ = 0.0;
            tighten_ = 0.0;
        }
    }

private:
    enum class Zone { Inside, Below, Above };
    const ZoneConfig& zone_;
    std::vector<Score> seen_;  // descending
    Zone status_ = Zone::Inside;
    double relax_ = 0.0;  // D+
    double tighten_ = 0.0;  // D-
};

/// Hire above the mean of the current (available, not fired) referents.
struct MeanRule {
    void start(const SelectionState&, std::span<const Score>) {}
    Score threshold(const SelectionState& s) {
        if (s.remaining_referents.empty()) return 0.5;
        double sum = 0.0;
        for (int i : s.remaining_referents) sum += s.reference_scores[i];
        return sum / static_cast<double>(s.remaining_referents.size());
    }
    void observe(const SelectionState&, Score, bool) {}
};

/// Fresh uniform threshold at every open step.
class RandRule {
public:
    explicit RandRule(std::uint64_t seed) : rng_(seed) {}
    void start(const SelectionState&, std::span<const Score>) {}
    Score threshold(const SelectionState&) { return uniform01(rng_); }
    void observe(const SelectionState&, Score, bool) {}

private:
    Rng rng_;
};

inline SelectionOutcome run_csm(const WsspInstance& inst, int cutoff) {
    CsmRule rule;
    return run_selection(inst, cutoff, rule);
}

inline SelectionOutcome run_acsm(const WsspInstance& inst, int cutoff, const ZoneConfig& zone) {
    zone.validate(inst.n);
    AcsmRule rule(zone);
    return run_selection(inst, cutoff, rule);
}

inline SelectionOutcome run_mean_baseline(const WsspInstance& inst) {
    MeanRule rule;
    return run_selection(inst, 0, rule);
}

inline SelectionOutcome run_rand_baseline(const WsspInstance& inst, std::uint64_t seed) {
    RandRule rule(seed);
    return run_selection(inst, 0, rule);
}

inline SelectionOutcome run_policy(const WsspInstance& inst, const PolicySpec& spec) {
    spec.validate(inst.n);
    switch (spec.variant) {
    case PolicyVariant::Csm: return run_csm(inst, spec.cutoff);
    case PolicyVariant::Acsm: return run_acsm(inst, spec.cutoff, *spec.zone);
    case PolicyVariant::Mean: return run_mean_baseline(inst);
    case PolicyVariant::Rand: return run_rand_baseline(inst, spec.rand_seed);
    }
    throw std::logic_error("unknown policy variant");
}

}  // namespace wssp
