#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spin1bell/analyzer.hpp"
#include "spin1bell/bell.hpp"
#include "spin1bell/experiment.hpp"
#include "spin1bell/noisevis.hpp"
#include "spin1bell/optimizer.hpp"
#include "spin1bell/qstate.hpp"

using nlohmann::json;
using namespace spin1bell;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// All emitted JSON numbers are rounded to 10 significant digits so repeated
// runs diff cleanly.
double round10(double v)
{
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::strtod(buf, nullptr);
}

void print_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    std::cout << buf << '\n';
}

json grid_json(const OutcomeGrid& grid)
{
    json rows = json::array();
    for (int ia = 0; ia < kTripletDim; ++ia) {
        json row = json::array();
        for (int ib = 0; ib < kTripletDim; ++ib)
            row.push_back(round10(grid.at(ia, ib)));
        rows.push_back(row);
    }
    return rows;
}

json counts_json(const std::array<double, kJointDim>& counts)
{
    json rows = json::array();
    for (int ia = 0; ia < kTripletDim; ++ia) {
        json row = json::array();
        for (int ib = 0; ib < kTripletDim; ++ib)
            row.push_back(round10(counts[joint_index(ia, ib)]));
        rows.push_back(row);
    }
    return rows;
}

json settings_json(const BellSettings& s)
{
    return {{"alpha", round10(s.alpha)},
            {"alpha_prime", round10(s.alpha_prime)},
            {"beta", round10(s.beta)},
            {"beta_prime", round10(s.beta_prime)}};
}

BellSettings settings_from_flag(const std::vector<double>& angles)
{
    if (angles.size() != 4)
        throw CLI::ValidationError("--angles",
                                   "expected 4 comma-separated angles a,a',b,b'");
    return {angles[0], angles[1], angles[2], angles[3]};
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> keys,
                         const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : keys)
            if (key == k) known = true;
        if (!known)
            throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    const json j = json::parse(in);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown_keys(j,
                        {"settings", "p", "det", "corrected_rate", "n_intervals",
                         "interval_s", "seed"},
                        "config");

    ExperimentConfig cfg;
    if (j.contains("settings")) {
        const json& s = j.at("settings");
        reject_unknown_keys(s, {"alpha", "alpha_prime", "beta", "beta_prime"},
                            "config.settings");
        if (s.contains("alpha")) cfg.settings.alpha = s.at("alpha").get<double>();
        if (s.contains("alpha_prime"))
            cfg.settings.alpha_prime = s.at("alpha_prime").get<double>();
        if (s.contains("beta")) cfg.settings.beta = s.at("beta").get<double>();
        if (s.contains("beta_prime"))
            cfg.settings.beta_prime = s.at("beta_prime").get<double>();
    }
    if (j.contains("p")) cfg.p = j.at("p").get<double>();
    if (j.contains("det")) {
        const json& d = j.at("det");
        reject_unknown_keys(d, {"eta_a", "eta_b"}, "config.det");
        if (d.contains("eta_a")) cfg.det.eta_a = d.at("eta_a").get<double>();
        if (d.contains("eta_b")) cfg.det.eta_b = d.at("eta_b").get<double>();
    }
    if (j.contains("corrected_rate"))
        cfg.corrected_rate = j.at("corrected_rate").get<double>();
    if (j.contains("n_intervals")) cfg.n_intervals = j.at("n_intervals").get<int>();
    if (j.contains("interval_s")) cfg.interval_s = j.at("interval_s").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json config_json(const ExperimentConfig& cfg)
{
    return {{"settings", settings_json(cfg.settings)},
            {"p", round10(cfg.p)},
            {"det",
             {{"eta_a", round10(cfg.det.eta_a)}, {"eta_b", round10(cfg.det.eta_b)}}},
            {"corrected_rate", round10(cfg.corrected_rate)},
            {"n_intervals", cfg.n_intervals},
            {"interval_s", round10(cfg.interval_s)},
            {"seed", cfg.seed}};
}

int run_analyze(const std::string& counts_path, const DetectionModel& det,
                const EstimateOptions& options)
{
    CountTable table;
    if (counts_path == "-") {
        table = read_counts_csv(std::cin);
    } else {
        std::ifstream in(counts_path);
        if (!in)
            throw std::invalid_argument("cannot open counts file '" + counts_path +
                                        "'");
        table = read_counts_csv(in);
    }

    const CountTable corrected = correct_counts(table, det);

    json out;
    out["efficiencies"] = {{"eta_a", round10(det.eta_a)},
                           {"eta_b", round10(det.eta_b)}};
    json corr = json::array();
    json probs = json::array();
    for (const auto& block : corrected.settings) {
        corr.push_back({{"label", block.label},
                        {"alpha_deg", round10(block.alpha_deg)},
                        {"beta_deg", round10(block.beta_deg)},
                        {"n_intervals", block.n_intervals},
                        {"interval_s", round10(block.interval_s)},
                        {"mean_counts", counts_json(block.mean_counts)}});
        probs.push_back(
            {{"label", block.label}, {"grid", grid_json(probability_table(block))}});
    }
    out["corrected"] = corr;
    out["probabilities"] = probs;

    // The Bell estimate needs the four canonical settings, each exactly once.
    std::array<int, 4> label_count{};
    bool only_known = true;
    for (const auto& block : table.settings) {
        bool known = false;
        for (int k = 0; k < 4; ++k)
            if (block.label == kSettingLabels[k]) {
                ++label_count[k];
                known = true;
            }
        if (!known) only_known = false;
    }
    const bool complete = only_known && label_count[0] == 1 &&
                          label_count[1] == 1 && label_count[2] == 1 &&
                          label_count[3] == 1;

    if (complete) {
        const BellEstimate est = estimate_bell(table, det, options);
        json e_map;
        for (const auto& ps : est.per_setting)
            e_map[ps.label] = {{"value", round10(ps.e)},
                               {"sigma", round10(ps.sigma_e)},
                               {"alpha_deg", round10(ps.alpha_deg)},
                               {"beta_deg", round10(ps.beta_deg)}};
        json ej = {{"S", round10(est.S)},
                   {"sigma", round10(est.sigma)},
                   {"method", est.method},
                   {"E", e_map},
                   {"settings",
                    settings_json({est.per_setting[0].alpha_deg,
                                   est.per_setting[2].alpha_deg,
                                   est.per_setting[0].beta_deg,
                                   est.per_setting[1].beta_deg})},
                   {"efficiencies",
                    {{"eta_a", round10(det.eta_a)}, {"eta_b", round10(det.eta_b)}}},
                   {"sigma_bootstrap", round10(est.sigma_bootstrap)},
                   {"sigma_poisson", round10(est.sigma_poisson)},
                   {"sigma_scatter", round10(est.sigma_scatter)},
                   {"cross_check_ok", est.cross_check_ok}};
        out["estimate"] = ej;
        if (!est.cross_check_ok)
            std::cerr << "warning: bootstrap and Poisson uncertainties disagree "
                         "by more than 30%\n";
    } else {
        out["estimate"] = nullptr;
        std::cerr << "note: Bell estimate skipped; it needs the four settings "
                     "ab, ab', a'b, a'b' exactly once each\n";
    }

    std::cout << out.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spin-1 Bell-test calculator: analyzer probabilities, CHSH "
                 "values, noise and visibility models, and the counting "
                 "experiment pipeline"};
    app.require_subcommand(1);

    // predict
    auto* predict = app.add_subcommand(
        "predict", "3x3 joint outcome probabilities and E at one angle pair");
    double pr_alpha = 0.0, pr_beta = 0.0, pr_p = 1.0;
    predict->add_option("--alpha", pr_alpha, "Alice analyzer angle (deg)")
        ->required();
    predict->add_option("--beta", pr_beta, "Bob analyzer angle (deg)")->required();
    predict->add_option("--p", pr_p, "noise parameter p in [0,1]")
        ->capture_default_str();

    // chsh
    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH S for four settings");
    std::vector<double> chsh_angles;
    double chsh_p = 1.0, chsh_vis = 1.0;
    chsh_cmd
        ->add_option("--angles", chsh_angles,
                     "four settings a,a',b,b' in degrees")
        ->required()
        ->delimiter(',');
    auto* chsh_p_opt =
        chsh_cmd->add_option("--p", chsh_p, "noise parameter p in [0,1]");
    auto* chsh_vis_opt = chsh_cmd->add_option(
        "--visibility", chsh_vis, "entanglement visibility (>= 0.4) instead of p");
    chsh_p_opt->excludes(chsh_vis_opt);
    chsh_vis_opt->excludes(chsh_p_opt);

    // scan
    auto* scan_cmd = app.add_subcommand(
        "scan", "CSV of S versus dphi for one curve per visibility");
    std::string scan_range = "0:45:0.25";
    std::vector<double> scan_vis;
    scan_cmd->add_option("--dphi", scan_range, "range START:STOP:STEP in degrees")
        ->capture_default_str();
    scan_cmd
        ->add_option("--visibility", scan_vis,
                     "comma-separated visibilities, one curve each")
        ->required()
        ->delimiter(',');

    // optimize
    auto* opt_cmd =
        app.add_subcommand("optimize", "maximize S over analyzer settings");
    double opt_p = 1.0;
    bool opt_free = false;
    opt_cmd->add_option("--p", opt_p, "noise parameter p in [0,1]")
        ->capture_default_str();
    opt_cmd->add_flag("--free", opt_free,
                      "optimize all four angles instead of the symmetric dphi");

    // lhv-bound
    app.add_subcommand("lhv-bound",
                       "local-hidden-variable bound on S (exhaustive)");

    // fringe
    auto* fringe_cmd = app.add_subcommand(
        "fringe", "CSV coincidence fringe: Alice fixed, Bob scanned");
    double fr_p = 1.0, fr_fixed = 0.0, fr_step = 1.0;
    fringe_cmd->add_option("--p", fr_p, "noise parameter p in [0,1]")->required();
    fringe_cmd->add_option("--fixed-angle", fr_fixed, "Alice angle (deg)")
        ->required();
    fringe_cmd->add_option("--step", fr_step, "scan step in degrees (0, 5]")
        ->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand(
        "simulate", "draw a Poisson count table for the full experiment");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--config", sim_config,
                        "experiment config JSON (defaults when omitted)");
    auto* sim_seed_opt =
        sim_cmd->add_option("--seed", sim_seed, "override the config seed");
    sim_cmd->add_option("--out", sim_out,
                        "write the CSV here and echo the resolved config");

    // analyze
    auto* an_cmd = app.add_subcommand(
        "analyze", "correct, normalize and estimate S from a count table");
    std::string an_counts;
    DetectionModel an_det;
    std::string an_method = "bootstrap";
    EstimateOptions an_opts;
    an_cmd->add_option("--counts", an_counts, "count CSV path, or - for stdin")
        ->required();
    an_cmd->add_option("--eta-a", an_det.eta_a, "Alice pair efficiency")
        ->capture_default_str();
    an_cmd->add_option("--eta-b", an_det.eta_b, "Bob pair efficiency")
        ->capture_default_str();
    an_cmd
        ->add_option("--method", an_method,
                     "uncertainty method: bootstrap, poisson, scatter")
        ->check(CLI::IsMember({"bootstrap", "poisson", "scatter"}))
        ->capture_default_str();
    an_cmd->add_option("--bootstrap-B", an_opts.bootstrap_B,
                       "bootstrap replicates")
        ->capture_default_str();
    an_cmd->add_option("--bootstrap-seed", an_opts.bootstrap_seed,
                       "bootstrap RNG seed")
        ->capture_default_str();

    // pairs-model
    auto* pairs_cmd = app.add_subcommand(
        "pairs-model", "S when the four photons stay two distinguishable pairs");
    std::vector<double> pairs_angles;
    pairs_cmd
        ->add_option("--angles", pairs_angles,
                     "four settings a,a',b,b' in degrees")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (predict->parsed()) {
            const OutcomeGrid grid =
                joint_probabilities(make_noisy_state(pr_p), pr_alpha, pr_beta);
            const json out = {{"alpha_deg", round10(pr_alpha)},
                              {"beta_deg", round10(pr_beta)},
                              {"p", round10(pr_p)},
                              {"grid", grid_json(grid)},
                              {"E", round10(expectation(grid))}};
            std::cout << out.dump(2) << '\n';
        } else if (chsh_cmd->parsed()) {
            const BellSettings s = settings_from_flag(chsh_angles);
            const double p =
                chsh_vis_opt->count() ? p_from_visibility(chsh_vis) : chsh_p;
            print_number(chsh(make_noisy_state(p), s));
        } else if (scan_cmd->parsed()) {
            double start = 0.0, stop = 45.0, step = 0.25;
            if (std::sscanf(scan_range.c_str(), "%lf:%lf:%lf", &start, &stop,
                            &step) != 3)
                throw CLI::ValidationError("--dphi",
                                           "expected START:STOP:STEP, got '" +
                                               scan_range + "'");
            bool first = true;
            for (double v : scan_vis) {
                const double p = p_from_visibility(v);
                auto curve = scan_dphi(p, start, stop, step);
                for (auto& pt : curve) pt.visibility = v;
                write_curve_csv(std::cout, curve, first);
                first = false;
            }
        } else if (opt_cmd->parsed()) {
            json out;
            if (opt_free) {
                const FreeOptimum r = optimize_free(make_noisy_state(opt_p));
                out = {{"p", round10(opt_p)},
                       {"free", true},
                       {"settings", settings_json(r.settings)},
                       {"S", round10(r.S)}};
            } else {
                const SymmetricOptimum r = optimize_symmetric(opt_p);
                out = {{"p", round10(opt_p)},
                       {"free", false},
                       {"dphi_star", round10(r.dphi_star)},
                       {"S_star", round10(r.S_star)},
                       {"center", 0.0},
                       {"settings",
                        settings_json(SymmetricSettings{r.dphi_star}.expand())},
                       {"violation_threshold_p", round10(violation_threshold())}};
            }
            std::cout << out.dump(2) << '\n';
        } else if (app.get_subcommand("lhv-bound")->parsed()) {
            print_number(lhv_max());
        } else if (fringe_cmd->parsed()) {
            write_fringe_csv(std::cout, fringe_scan(fr_p, fr_fixed, fr_step));
        } else if (sim_cmd->parsed()) {
            ExperimentConfig cfg;
            if (!sim_config.empty()) cfg = load_config(sim_config);
            if (sim_seed_opt->count()) cfg.seed = sim_seed;
            const CountTable table = simulate_counts(cfg);
            if (!sim_out.empty()) {
                std::ofstream out(sim_out);
                if (!out)
                    throw std::invalid_argument("cannot open output file '" +
                                                sim_out + "'");
                write_counts_csv(out, table);
                json echo = config_json(cfg);
                echo["out"] = sim_out;
                std::cout << echo.dump(2) << '\n';
            } else {
                write_counts_csv(std::cout, table);
            }
        } else if (an_cmd->parsed()) {
            if (an_method == "poisson") an_opts.method = SigmaMethod::poisson;
            else if (an_method == "scatter") an_opts.method = SigmaMethod::scatter;
            else an_opts.method = SigmaMethod::bootstrap;
            return run_analyze(an_counts, an_det, an_opts);
        } else if (pairs_cmd->parsed()) {
            print_number(pairs_model_chsh(settings_from_flag(pairs_angles)));
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const CsvError& e) {
        std::cerr << "counts CSV, row " << e.row << ", field " << e.field << ": "
                  << e.what() << '\n';
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "config JSON: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
