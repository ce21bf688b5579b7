#pragma once

// JSON for instances and outcomes, CSV for experiment tables. Reals in CSV
// are printed with six fixed decimals so reruns diff cleanly.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wssp/analytics.hpp"
#include "wssp/core.hpp"
#include "wssp/montecarlo.hpp"
#include "wssp/multiround.hpp"

namespace wssp {

using json = nlohmann::json;

inline std::string fixed6(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline json to_json(const WsspInstance& inst) {
    json j;
    j["n"] = inst.n;
    j["b"] = inst.b;
    j["reference_scores"] = inst.reference_scores;
    std::vector<int> avail(inst.availability.begin(), inst.availability.end());
    j["availability"] = avail;
    j["candidate_scores"] = inst.candidate_scores;
    return j;
}

inline WsspInstance instance_from_json(const json& j) {
    WsspInstance inst;
    try {
        inst.n = j.at("n").get<int>();
        inst.b = j.at("b").get<int>();
        inst.reference_scores = j.at("reference_scores").get<std::vector<Score>>();
        for (int a : j.at("availability").get<std::vector<int>>()) {
            if (a != 0 && a != 1) throw std::domain_error("availability entries must be 0 or 1");
            inst.availability.push_back(static_cast<std::uint8_t>(a));
        }
        inst.candidate_scores = j.at("candidate_scores").get<std::vector<Score>>();
    } catch (const json::exception& e) {
        throw std::domain_error(std::string("malformed instance: ") + e.what());
    }
    inst.validate();
    return inst;
}

inline json to_json(const SelectionOutcome& out) {
    json j;
    j["decisions"] = std::vector<int>(out.candidate_decisions.begin(), out.candidate_decisions.end());
    j["referent_decisions"] = std::vector<int>(out.referent_decisions.begin(), out.referent_decisions.end());
    j["hires"] = out.hires;
    j["failures"] = out.failures;
    j["regret"] = out.regret;
    json th = json::array();
    for (double t : out.threshold_trace) th.push_back(std::isnan(t) ? json(nullptr) : json(t));
    j["thresholds"] = th;
    return j;
}

inline void write_heatmap_csv(std::ostream& os, const Heatmap& hm) {
    os << "b,c,mean_regret,stderr,mean_hires,failure_rate,trials\n";
    for (const auto& c : hm.cells)
        os << c.b << ',' << c.c << ',' << fixed6(c.stats.mean_regret) << ',' << fixed6(c.stats.stderr_regret) << ','
           << fixed6(c.stats.mean_hires) << ',' << fixed6(c.stats.failure_rate) << ',' << c.stats.trials << '\n';
}

inline void write_cutoff_curves_csv(std::ostream& os, const std::vector<CutoffCurveRow>& rows) {
    os << "q,b,c_star_sim,c_star_analytic\n";
    for (const auto& r : rows) os << fixed6(r.q) << ',' << r.b << ',' << r.c_star_sim << ',' << r.c_star_analytic << '\n';
}

inline void write_cutoff_table_csv(std::ostream& os, const std::vector<CutoffTable::Row>& rows) {
    os << "n,b,r,c_star,expected_regret\n";
    for (const auto& r : rows) os << r.n << ',' << r.b << ',' << r.r << ',' << r.c_star << ',' << fixed6(r.expected_regret) << '\n';
}

/// Loads rows into `table`; the header must match the writer's.
inline void read_cutoff_table_csv(std::istream& is, CutoffTable& table) {
    std::string line;
    if (!std::getline(is, line) || line != "n,b,r,c_star,expected_regret")
        throw std::domain_error("cutoff table: unexpected header");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        CutoffTable::Row row{};
        char c1, c2, c3, c4;
        if (!(ls >> row.n >> c1 >> row.b >> c2 >> row.r >> c3 >> row.c_star >> c4 >> row.expected_regret) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw std::domain_error("cutoff table: malformed row at line " + std::to_string(lineno));
        table.insert(row);
    }
}

inline void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
    os << "run,round,policy,regret,hires,failures,q,c_used\n";
    for (const auto& r : rows)
        os << r.run << ',' << r.round << ',' << r.policy << ',' << r.regret << ',' << r.hires << ',' << r.failures << ','
           << fixed6(r.q) << ',' << r.cutoff << '\n';
}

inline void write_round_summary_csv(std::ostream& os, const std::vector<RoundSummary>& rows) {
    os << "round,policy,mean_regret,ci95_low,ci95_high\n";
    for (const auto& r : rows)
        os << r.round << ',' << r.policy << ',' << fixed6(r.mean_regret) << ',' << fixed6(r.ci95_low) << ','
           << fixed6(r.ci95_high) << '\n';
}

}  // namespace wssp
