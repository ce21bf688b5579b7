// wssp: command-line front end for the warm-started selection toolkit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wssp/wssp.hpp"

#ifndef WSSP_VERSION
#define WSSP_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace wssp;

namespace {

struct Common {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = "wssp-out";
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
    sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    if (with_out) {
        sub->add_option("--out", c.out, "output directory")->capture_default_str();
        sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    }
}

std::vector<int> int_range(int lo, int hi, int step = 1) {
    if (lo > hi || step < 1) throw std::domain_error("empty range");
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

ResignationRule resignation_rule(CLI::App* sub, int r, double frac) {
    if (sub->count("--r-frac")) return ResignationRule::fraction(frac);
    return ResignationRule::absolute(r);
}

RegretNormalization normalization(const std::string& s) {
    return s == "per-item" ? RegretNormalization::PerItem : RegretNormalization::AsTheorem;
}

void load_table(const std::string& path, CutoffTable& table) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cutoff table '" + path + "'");
    read_cutoff_table_csv(in, table);
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

json flags_of(const CLI::App* sub) {
    json flags = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
        std::string name = opt->get_name();
        while (!name.empty() && name.front() == '-') name.erase(name.begin());
        if (opt->count() > 0) {
            const auto& res = opt->results();
            flags[name] = res.size() == 1 ? json(res.front()) : json(res);
        } else if (!opt->get_default_str().empty()) {
            flags[name] = opt->get_default_str();
        }
    }
    return flags;
}

void write_manifest(const fs::path& dir, const CLI::App* sub, const Common& c, double seconds) {
    json m;
    m["command"] = sub->get_name();
    m["flags"] = flags_of(sub);
    m["seed"] = c.seed;
    m["version"] = WSSP_VERSION;
    m["wall_time_seconds"] = seconds;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

json cell_json(const CellStats& s) {
    return {{"mean_regret", s.mean_regret}, {"stderr", s.stderr_regret}, {"mean_hires", s.mean_hires},
            {"failure_rate", s.failure_rate}, {"trials", s.trials}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warm-started sequential selection: analysis, simulation and multi-round experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", WSSP_VERSION);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "closed-form expectations and the optimal cutoff");
    int an_n = 100, an_b = 5, an_r = 0, an_c = -1;
    double an_q = 0.5;
    std::string an_norm = "as-theorem", an_table, an_format = "text";
    analyze->add_option("--n", an_n, "candidates")->required();
    analyze->add_option("--b", an_b, "positions")->required();
    analyze->add_option("--r", an_r, "resignations")->capture_default_str();
    analyze->add_option("--q", an_q, "reference quality in (0,1)")->capture_default_str();
    analyze->add_option("--c", an_c, "evaluate this cutoff instead of the optimum");
    analyze->add_option("--normalization", an_norm)->check(CLI::IsMember({"as-theorem", "per-item"}))->capture_default_str();
    analyze->add_option("--cutoff-table", an_table, "precomputed cutoff CSV");
    analyze->add_option("--format", an_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    // translate
    auto* translate = app.add_subcommand("translate", "optimal cutoff at any quality via the medium-quality setting");
    int tr_n = 100, tr_b = 5, tr_r = 0;
    double tr_q = 0.5;
    std::string tr_table;
    translate->add_option("--n", tr_n)->required();
    translate->add_option("--b", tr_b)->required();
    translate->add_option("--q", tr_q)->required();
    translate->add_option("--r", tr_r)->capture_default_str();
    translate->add_option("--cutoff-table", tr_table);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo statistics for one cell");
    Common sim_common;
    int sim_n = 100, sim_b = 5, sim_r = 0, sim_c = -1;
    double sim_q = 0.5;
    long sim_trials = 1000;
    std::string sim_policy = "csm";
    simulate->add_option("--n", sim_n)->capture_default_str();
    simulate->add_option("--b", sim_b)->capture_default_str();
    simulate->add_option("--r", sim_r)->capture_default_str();
    simulate->add_option("--q", sim_q)->capture_default_str();
    simulate->add_option("--c", sim_c, "cutoff (default: translated optimum)");
    simulate->add_option("--policy", sim_policy)->check(CLI::IsMember({"csm", "acsm", "mean", "rand"}))->capture_default_str();
    simulate->add_option("--trials", sim_trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(simulate, sim_common);

    // heatmap
    auto* heatmap = app.add_subcommand("heatmap", "empirical regret over the (b, c) grid");
    Common hm_common;
    int hm_n = 100, hm_r = 0, hm_bmin = 1, hm_bmax = 50, hm_cstep = 1;
    double hm_q = 0.5, hm_rfrac = 0.0;
    long hm_trials = 1000;
    std::string hm_policy = "csm";
    heatmap->add_option("--n", hm_n)->capture_default_str();
    heatmap->add_option("--q", hm_q)->capture_default_str();
    heatmap->add_option("--r", hm_r, "absolute resignations")->capture_default_str();
    heatmap->add_option("--r-frac", hm_rfrac, "resignations as a fraction of b");
    heatmap->add_option("--b-min", hm_bmin)->capture_default_str();
    heatmap->add_option("--b-max", hm_bmax)->capture_default_str();
    heatmap->add_option("--c-step", hm_cstep)->capture_default_str();
    heatmap->add_option("--policy", hm_policy)->check(CLI::IsMember({"csm", "acsm"}))->capture_default_str();
    heatmap->add_option("--trials", hm_trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(heatmap, hm_common);

    // cutoff-table
    auto* table_cmd = app.add_subcommand("cutoff-table", "precompute medium-quality optimal cutoffs");
    Common tb_common;
    std::vector<int> tb_ns{100};
    int tb_bmin = 1, tb_bmax = 50;
    std::string tb_norm = "as-theorem";
    table_cmd->add_option("--n", tb_ns, "candidate counts")->delimiter(',')->capture_default_str();
    table_cmd->add_option("--b-min", tb_bmin)->capture_default_str();
    table_cmd->add_option("--b-max", tb_bmax)->capture_default_str();
    table_cmd->add_option("--normalization", tb_norm)->check(CLI::IsMember({"as-theorem", "per-item"}))->capture_default_str();
    add_common(table_cmd, tb_common);

    // curves
    auto* curves = app.add_subcommand("curves", "empirical and translated optimal cutoffs against b");
    Common cv_common;
    int cv_n = 100, cv_r = 0, cv_bmin = 1, cv_bmax = 50, cv_cstep = 1;
    double cv_rfrac = 0.0;
    std::vector<double> cv_qs{0.5, 2.0 / 3.0, 0.75, 0.8};
    long cv_trials = 1000;
    curves->add_option("--n", cv_n)->capture_default_str();
    curves->add_option("--r", cv_r)->capture_default_str();
    curves->add_option("--r-frac", cv_rfrac);
    curves->add_option("--q", cv_qs, "qualities")->delimiter(',')->capture_default_str();
    curves->add_option("--b-min", cv_bmin)->capture_default_str();
    curves->add_option("--b-max", cv_bmax)->capture_default_str();
    curves->add_option("--c-step", cv_cstep)->capture_default_str();
    curves->add_option("--trials", cv_trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(curves, cv_common);

    // multiround
    auto* multi = app.add_subcommand("multiround", "chained rounds over a fixed population");
    Common mr_common;
    int mr_pop = 1000, mr_n = 100, mr_b = 5, mr_rounds = 10, mr_runs = 200;
    double mr_pres = 0.0;
    std::vector<std::string> mr_policies{"csm-star", "csm-e", "csm-0", "mean", "rand"};
    multi->add_option("--population", mr_pop)->capture_default_str();
    multi->add_option("--n", mr_n)->capture_default_str();
    multi->add_option("--b", mr_b)->capture_default_str();
    multi->add_option("--rounds", mr_rounds)->capture_default_str();
    multi->add_option("--runs", mr_runs)->capture_default_str();
    multi->add_option("--p-res", mr_pres)->capture_default_str();
    multi->add_option("--policies", mr_policies)->delimiter(',')->capture_default_str();
    add_common(multi, mr_common);

    // failure
    auto* failure = app.add_subcommand("failure", "failure rate of CSM and, on paired seeds, ACSM");
    Common fl_common;
    int fl_n = 100, fl_b = 20, fl_r = 20, fl_c = -1;
    double fl_q = 0.81;
    long fl_trials = 10000;
    std::string fl_policy = "both";
    failure->add_option("--n", fl_n)->capture_default_str();
    failure->add_option("--b", fl_b)->capture_default_str();
    failure->add_option("--r", fl_r)->capture_default_str();
    failure->add_option("--q", fl_q)->capture_default_str();
    failure->add_option("--c", fl_c, "cutoff (default: translated optimum)");
    failure->add_option("--policy", fl_policy)->check(CLI::IsMember({"csm", "acsm", "both"}))->capture_default_str();
    failure->add_option("--trials", fl_trials)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(failure, fl_common);

    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    try {
        if (analyze->parsed()) {
            AnalyticParams target{an_n, an_b, an_r, an_q, an_c < 0 ? 0 : an_c};
            target.validate();
            CutoffTable table(normalization(an_norm));
            load_table(an_table, table);
            const auto norm = normalization(an_norm);

            // Everything is evaluated in the medium-quality setting that shares
            // the target's expected referent ranks.
            int n_s = an_n, c_s = 0, c_t = 0;
            bool degenerate = false;
            const bool medium = std::abs(an_q - 0.5) < 1e-12;
            if (medium) {
                c_s = an_c >= 0 ? an_c : table.lookup(an_n, an_b, an_r).cutoff;
                c_t = c_s;
            } else {
                const auto tr = translate_cutoff(an_n, an_b, an_q, an_r, table.source());
                n_s = tr.n_source;
                degenerate = tr.degenerate;
                if (!degenerate) {
                    c_s = an_c >= 0 ? static_cast<int>(std::floor(an_c * static_cast<double>(n_s + an_b) / (an_n + an_b) + 1e-9))
                                    : tr.c_source;
                    c_t = an_c >= 0 ? an_c : tr.c_target;
                }
            }
            json rep;
            rep["n"] = an_n;
            rep["b"] = an_b;
            rep["r"] = an_r;
            rep["q"] = an_q;
            rep["gamma0"] = gamma0(an_q, an_n, an_b);
            rep["expected_offline"] = expected_offline(an_n, an_b, an_r, an_q);
            rep["normalization"] = an_norm;
            if (degenerate) {
                std::cerr << "warning: the medium-quality equivalent has fewer than b candidates; using c = 0\n";
                rep["degenerate"] = true;
                rep["c_star"] = 0;
            } else {
                const auto cv = threshold_curve({n_s, an_b, an_r, 0.5, std::min(c_s, n_s)});
                rep["n_source"] = n_s;
                rep["c_source"] = c_s;
                rep[an_c >= 0 ? "c" : "c_star"] = c_t;
                rep["gamma_learning"] = cv.gamma;
                rep["delta"] = cv.delta;
                rep["gamma_first"] = cv.gamma_j[std::min(c_s, n_s - 1)];
                rep["gamma_last"] = cv.gamma_j.back();
                rep["expected_selected"] = cv.expected_hires;
                rep["expected_hires"] = expected_max_hires(cv);
                rep["expected_regret"] = cv.regret(norm);
            }
            if (an_format == "json") {
                std::cout << rep.dump(2) << "\n";
            } else {
                for (const auto& [k, v] : rep.items()) std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            }
            return 0;
        }

        if (translate->parsed()) {
            CutoffTable table;
            load_table(tr_table, table);
            const auto tr = translate_cutoff(tr_n, tr_b, tr_q, tr_r, table.source());
            if (tr.degenerate) {
                std::cerr << "warning: the medium-quality equivalent has fewer than b candidates; using c = 0\n";
                std::cout << "n_s: " << tr.n_source << "\nc_star_t: 0\n";
            } else {
                std::cout << "n_s: " << tr.n_source << "\nc_star_s: " << tr.c_source << "\nc_star_t: " << tr.c_target << "\n";
            }
            return 0;
        }

        CutoffTable table;
        auto default_cutoff = [&](int n, int b, int r, double q, int given) {
            if (given >= 0) return given;
            return analytic_cutoff(n, b, q, r, &table);
        };

        if (simulate->parsed()) {
            const int c = default_cutoff(sim_n, sim_b, sim_r, sim_q, sim_c);
            CellSpec cell{sim_n, sim_b, c, sim_q, sim_r, PolicySpec::csm(c)};
            if (sim_policy == "acsm") cell.policy = PolicySpec::acsm(c, default_zone(sim_n, sim_b, sim_r, c));
            if (sim_policy == "mean") cell.policy = PolicySpec::mean();
            if (sim_policy == "rand") cell.policy = PolicySpec::rand(0);
            const auto st = run_cell(cell, sim_trials, sim_common.seed, sim_common.workers);
            const auto dir = prepare_dir(sim_common.out);
            if (sim_common.format == "json") {
                json j = cell_json(st);
                j["b"] = sim_b;
                j["c"] = c;
                write_file(dir / "cell.json", j.dump(2) + "\n");
            } else {
                Heatmap hm;
                hm.cells.push_back({sim_b, c, sim_r, st});
                std::ostringstream os;
                write_heatmap_csv(os, hm);
                write_file(dir / "cell.csv", os.str());
            }
            std::cout << "mean_regret: " << fixed6(st.mean_regret) << " stderr: " << fixed6(st.stderr_regret)
                      << " mean_hires: " << fixed6(st.mean_hires) << " failure_rate: " << fixed6(st.failure_rate) << "\n";
            write_manifest(dir, simulate, sim_common, elapsed());
            return 0;
        }

        if (heatmap->parsed()) {
            HeatmapSpec spec;
            spec.n = hm_n;
            spec.b_values = int_range(hm_bmin, hm_bmax);
            spec.c_values = int_range(0, hm_n, hm_cstep);
            spec.q = hm_q;
            spec.resignations = resignation_rule(heatmap, hm_r, hm_rfrac);
            spec.variant = hm_policy == "acsm" ? PolicyVariant::Acsm : PolicyVariant::Csm;
            spec.trials = hm_trials;
            spec.seed = hm_common.seed;
            spec.workers = hm_common.workers;
            const auto hm = regret_heatmap(spec, &table);
            const auto dir = prepare_dir(hm_common.out);
            std::vector<CutoffCurveRow> path;
            for (const auto& p : hm.path) path.push_back({hm_q, p.b, p.c_star_sim, p.c_star_analytic});
            if (hm_common.format == "json") {
                json cells = json::array(), jp = json::array();
                for (const auto& c : hm.cells) {
                    json j = cell_json(c.stats);
                    j["b"] = c.b;
                    j["c"] = c.c;
                    if (!std::isnan(c.analytic_regret)) j["analytic_regret"] = c.analytic_regret;
                    cells.push_back(j);
                }
                for (const auto& p : path) jp.push_back({{"q", p.q}, {"b", p.b}, {"c_star_sim", p.c_star_sim}, {"c_star_analytic", p.c_star_analytic}});
                write_file(dir / "heatmap.json", json{{"cells", cells}, {"path", jp}}.dump(2) + "\n");
            } else {
                std::ostringstream a, b;
                write_heatmap_csv(a, hm);
                write_cutoff_curves_csv(b, path);
                write_file(dir / "heatmap.csv", a.str());
                write_file(dir / "cutoff_path.csv", b.str());
            }
            write_manifest(dir, heatmap, hm_common, elapsed());
            return 0;
        }

        if (table_cmd->parsed()) {
            CutoffTable tab(normalization(tb_norm));
            struct Triple { int n, b, r; };
            std::vector<Triple> triples;
            for (int n : tb_ns)
                for (int b : int_range(tb_bmin, std::min(tb_bmax, n)))
                    for (int r = 0; r <= b; ++r) triples.push_back({n, b, r});
            parallel_for(triples.size(), tb_common.workers, [&](std::size_t i) { tab.lookup(triples[i].n, triples[i].b, triples[i].r); });
            const auto dir = prepare_dir(tb_common.out);
            if (tb_common.format == "json") {
                json rows = json::array();
                for (const auto& r : tab.rows())
                    rows.push_back({{"n", r.n}, {"b", r.b}, {"r", r.r}, {"c_star", r.c_star}, {"expected_regret", r.expected_regret}});
                write_file(dir / "cutoff_table.json", rows.dump(2) + "\n");
            } else {
                std::ostringstream os;
                write_cutoff_table_csv(os, tab.rows());
                write_file(dir / "cutoff_table.csv", os.str());
            }
            write_manifest(dir, table_cmd, tb_common, elapsed());
            return 0;
        }

        if (curves->parsed()) {
            const auto rows = cutoff_curves(cv_n, resignation_rule(curves, cv_r, cv_rfrac), cv_qs, int_range(cv_bmin, cv_bmax),
                                            int_range(0, cv_n, cv_cstep), cv_trials, cv_common.seed, cv_common.workers, &table);
            const auto dir = prepare_dir(cv_common.out);
            if (cv_common.format == "json") {
                json jr = json::array();
                for (const auto& p : rows) jr.push_back({{"q", p.q}, {"b", p.b}, {"c_star_sim", p.c_star_sim}, {"c_star_analytic", p.c_star_analytic}});
                write_file(dir / "cutoff_curves.json", jr.dump(2) + "\n");
            } else {
                std::ostringstream os;
                write_cutoff_curves_csv(os, rows);
                write_file(dir / "cutoff_curves.csv", os.str());
            }
            write_manifest(dir, curves, cv_common, elapsed());
            return 0;
        }

        if (multi->parsed()) {
            const auto cmp = compare_policies({mr_pop, mr_n, mr_b}, mr_rounds, mr_pres, mr_policies, mr_runs, mr_common.seed,
                                              mr_common.workers, &table);
            const auto dir = prepare_dir(mr_common.out);
            if (mr_common.format == "json") {
                json runs = json::array(), summary = json::array();
                for (const auto& r : cmp.runs)
                    runs.push_back({{"run", r.run}, {"round", r.round}, {"policy", r.policy}, {"regret", r.regret}, {"hires", r.hires},
                                    {"failures", r.failures}, {"q", r.q}, {"c_used", r.cutoff}});
                for (const auto& s : cmp.summary)
                    summary.push_back({{"round", s.round}, {"policy", s.policy}, {"mean_regret", s.mean_regret},
                                       {"ci95_low", s.ci95_low}, {"ci95_high", s.ci95_high}});
                write_file(dir / "multiround.json", json{{"runs", runs}, {"summary", summary}}.dump(2) + "\n");
            } else {
                std::ostringstream a, b;
                write_runs_csv(a, cmp.runs);
                write_round_summary_csv(b, cmp.summary);
                write_file(dir / "multiround_runs.csv", a.str());
                write_file(dir / "multiround_summary.csv", b.str());
            }
            for (const auto& s : cmp.summary)
                if (s.round == mr_rounds)
                    std::cout << s.policy << ": " << fixed6(s.mean_regret) << " [" << fixed6(s.ci95_low) << ", " << fixed6(s.ci95_high) << "]\n";
            write_manifest(dir, multi, mr_common, elapsed());
            return 0;
        }

        if (failure->parsed()) {
            const int c = default_cutoff(fl_n, fl_b, fl_r, fl_q, fl_c);
            std::vector<std::pair<std::string, PolicySpec>> runs;
            if (fl_policy != "acsm") runs.push_back({"csm", PolicySpec::csm(c)});
            if (fl_policy != "csm") runs.push_back({"acsm", PolicySpec::acsm(c, default_zone(fl_n, fl_b, fl_r, c))});
            std::ostringstream csv;
            csv << "policy,c,failure_rate,failure_probability,mean_regret,trials\n";
            json j = json::array();
            for (const auto& [name, policy] : runs) {
                // Same seed for both policies: paired instances.
                const auto st = run_cell({fl_n, fl_b, c, fl_q, fl_r, policy}, fl_trials, fl_common.seed, fl_common.workers);
                std::cout << name << " c=" << c << " failure_rate: " << fixed6(st.failure_rate)
                          << " failure_probability: " << fixed6(st.failure_probability) << "\n";
                csv << name << ',' << c << ',' << fixed6(st.failure_rate) << ',' << fixed6(st.failure_probability) << ','
                    << fixed6(st.mean_regret) << ',' << st.trials << '\n';
                json cj = cell_json(st);
                cj["policy"] = name;
                cj["c"] = c;
                cj["failure_probability"] = st.failure_probability;
                j.push_back(cj);
            }
            const auto dir = prepare_dir(fl_common.out);
            if (fl_common.format == "json") {
                write_file(dir / "failure.json", j.dump(2) + "\n");
            } else {
                write_file(dir / "failure.csv", csv.str());
            }
            write_manifest(dir, failure, fl_common, elapsed());
            return 0;
        }
    } catch (const contract_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
