#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spin1bell/experiment.hpp"

using namespace spin1bell;

namespace {

CountTable table_from_model(double p, const BellSettings& settings,
                            const DetectionModel& det, double total)
{
    // Expected (infinite statistics) counts: no sampling noise at all.
    const JointState state = make_noisy_state(p);
    const std::array<std::pair<double, double>, 4> angles{
        {{settings.alpha, settings.beta},
         {settings.alpha, settings.beta_prime},
         {settings.alpha_prime, settings.beta},
         {settings.alpha_prime, settings.beta_prime}}};
    CountTable table;
    for (int k = 0; k < 4; ++k) {
        SettingBlock block;
        block.label = kSettingLabels[k];
        block.alpha_deg = angles[k].first;
        block.beta_deg = angles[k].second;
        block.n_intervals = 12;
        block.interval_s = 60.0;
        block.mean_counts = expected_counts(
            joint_probabilities(state, angles[k].first, angles[k].second), det,
            total);
        table.settings.push_back(std::move(block));
    }
    return table;
}

CountTable scale_table(CountTable table, double factor)
{
    for (auto& block : table.settings) {
        for (auto& m : block.mean_counts) m *= factor;
        for (auto& interval : block.intervals)
            for (auto& c : interval) c *= factor;
    }
    return table;
}

} // namespace

TEST_CASE("simulation is deterministic in the seed")
{
    ExperimentConfig cfg;
    const CountTable a = simulate_counts(cfg);
    const CountTable b = simulate_counts(cfg);
    REQUIRE(a.settings.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(a.settings[k].label == kSettingLabels[k]);
        CHECK(a.settings[k].mean_counts == b.settings[k].mean_counts);
        CHECK(a.settings[k].intervals == b.settings[k].intervals);
    }

    cfg.seed = 2;
    const CountTable c = simulate_counts(cfg);
    bool same = true;
    for (std::size_t k = 0; k < 4; ++k)
        if (a.settings[k].intervals != c.settings[k].intervals) same = false;
    CHECK(!same);
}

TEST_CASE("config validation")
{
    ExperimentConfig cfg;
    cfg.n_intervals = 1;
    CHECK_THROWS_AS(simulate_counts(cfg), std::invalid_argument);
    cfg = {};
    cfg.corrected_rate = 0.0;
    CHECK_THROWS_AS(simulate_counts(cfg), std::invalid_argument);
    cfg = {};
    cfg.p = 1.2;
    CHECK_THROWS_AS(simulate_counts(cfg), std::invalid_argument);
    cfg = {};
    cfg.det.eta_a = 0.0;
    CHECK_THROWS_AS(simulate_counts(cfg), std::invalid_argument);
}

TEST_CASE("structurally forbidden outcomes draw zero counts")
{
    ExperimentConfig cfg;
    cfg.p = 1.0;
    cfg.settings = {0.0, 0.0, 0.0, 0.0};
    cfg.det = {1.0, 1.0};
    cfg.corrected_rate = 1e6;
    const CountTable table = simulate_counts(cfg);
    for (const auto& block : table.settings)
        for (int ia = 0; ia < kTripletDim; ++ia)
            for (int ib = 0; ib < kTripletDim; ++ib) {
                const bool allowed = (ia == 0 && ib == 2) || (ia == 1 && ib == 1) ||
                                     (ia == 2 && ib == 0);
                if (!allowed) {
                    CHECK(block.mean_counts[joint_index(ia, ib)] == 0.0);
                    for (const auto& interval : block.intervals)
                        CHECK(interval[joint_index(ia, ib)] == 0.0);
                } else {
                    CHECK(block.mean_counts[joint_index(ia, ib)] > 0.0);
                }
            }
}

TEST_CASE("corrected totals recover the configured rate on average")
{
    ExperimentConfig cfg;
    double acc = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        cfg.seed = seed;
        const CountTable corrected =
            correct_counts(simulate_counts(cfg), cfg.det);
        for (const auto& block : corrected.settings) {
            double total = 0.0;
            for (double c : block.mean_counts) total += c;
            acc += total;
            ++n;
        }
    }
    CHECK(n == 400);
    CHECK(std::abs(acc / n - 520.35) < 2.0);
}

TEST_CASE("count correction matches the published worked values")
{
    CountTable table;
    SettingBlock block;
    block.label = "ab'";
    block.alpha_deg = -16.0;
    block.beta_deg = 14.0;
    block.n_intervals = 12;
    block.interval_s = 60.0;
    block.mean_counts[joint_index(0, 0)] = 2.20;   // (+1,+1)
    block.mean_counts[joint_index(0, 1)] = 21.92;  // (+1, 0)
    block.mean_counts[joint_index(1, 1)] = 66.50;  // ( 0, 0)
    table.settings.push_back(block);

    const DetectionModel det;
    const CountTable corrected = correct_counts(table, det);
    const auto& m = corrected.settings[0].mean_counts;

    CHECK(std::abs(m[joint_index(0, 0)] - 2.20 / (0.431 * 0.434)) < 1e-12);
    CHECK(std::abs(m[joint_index(0, 1)] - 21.92 / 0.431) < 1e-12);
    CHECK(m[joint_index(1, 1)] == 66.50);

    // Published corrected values: 11.71, 50.47, 66.50 (within 1 %).
    CHECK(std::abs(m[joint_index(0, 0)] - 11.71) / 11.71 < 0.01);
    CHECK(std::abs(m[joint_index(0, 1)] - 50.47) / 50.47 < 0.01);

    CHECK_THROWS_AS(correct_counts(table, {0.0, 0.434}), std::invalid_argument);
}

TEST_CASE("probability normalization of the published table")
{
    std::ifstream in(TEST_DATA_DIR "/measured_counts.csv");
    REQUIRE(in.good());
    const CountTable table = read_counts_csv(in);
    REQUIRE(table.settings.size() == 1);
    const CountTable corrected = correct_counts(table, DetectionModel{});
    const OutcomeGrid grid = probability_table(corrected.settings[0]);
    CHECK(std::abs(grid.sum() - 1.0) < 1e-12);
    // Published percentages: 2.25 for (+1,+1) and 18.46 for (+1,-1).
    CHECK(std::abs(grid.at(0, 0) - 0.0225) < 0.001);
    CHECK(std::abs(grid.at(0, 2) - 0.1846) < 0.001);

    SettingBlock empty;
    empty.label = "ab";
    CHECK_THROWS_AS(probability_table(empty), std::invalid_argument);
}

TEST_CASE("noiseless tables reproduce the model S exactly")
{
    const BellSettings settings{-16.0, 4.0, -6.0, 14.0};
    const DetectionModel det;
    const CountTable table = table_from_model(0.69, settings, det, 520.35);
    const BellEstimate est = estimate_bell(table, det);
    CHECK(est.method == "poisson-propagation");  // no per-interval data
    CHECK(std::abs(est.S - chsh(make_noisy_state(0.69), settings)) < 1e-10);
    CHECK(std::isnan(est.sigma_bootstrap));
    CHECK(std::isnan(est.sigma_scatter));
    CHECK(est.sigma > 0.0);
    CHECK(est.cross_check_ok);
    for (const auto& ps : est.per_setting) CHECK(ps.sigma_e > 0.0);
}

TEST_CASE("scaling counts by 100 shrinks sigma by 10")
{
    const BellSettings settings{-16.0, 4.0, -6.0, 14.0};
    const DetectionModel det;
    const CountTable base = table_from_model(0.69, settings, det, 520.35);
    const CountTable big = scale_table(base, 100.0);
    const BellEstimate e1 = estimate_bell(base, det);
    const BellEstimate e2 = estimate_bell(big, det);
    CHECK(std::abs(e1.sigma_poisson / e2.sigma_poisson - 10.0) < 1e-9);
    CHECK(std::abs(e1.S - e2.S) < 1e-12);
}

TEST_CASE("estimates from simulated data behave statistically")
{
    ExperimentConfig cfg;
    const CountTable table = simulate_counts(cfg);
    const BellEstimate est = estimate_bell(table, cfg.det);
    CHECK(est.method == "bootstrap");
    CHECK(est.S > 2.0);
    CHECK(est.sigma > 0.0);
    CHECK(est.sigma_bootstrap > 0.0);
    CHECK(est.sigma_poisson > 0.0);
    CHECK(est.sigma_scatter > 0.0);
    CHECK(est.cross_check_ok);

    // Bootstrap is deterministic in its seed and sensitive to it.
    EstimateOptions opts;
    const BellEstimate again = estimate_bell(table, cfg.det, opts);
    CHECK(again.sigma_bootstrap == est.sigma_bootstrap);
    opts.bootstrap_seed = 999;
    const BellEstimate other = estimate_bell(table, cfg.det, opts);
    CHECK(other.sigma_bootstrap != est.sigma_bootstrap);
    CHECK(std::abs(other.sigma_bootstrap - est.sigma_bootstrap) <
          0.2 * est.sigma_bootstrap);

    // Method selection.
    opts = {};
    opts.method = SigmaMethod::poisson;
    CHECK(estimate_bell(table, cfg.det, opts).method == "poisson-propagation");
    opts.method = SigmaMethod::scatter;
    const BellEstimate sc = estimate_bell(table, cfg.det, opts);
    CHECK(sc.method == "interval-scatter");
    CHECK(sc.sigma == sc.sigma_scatter);
}

TEST_CASE("estimator ignores the interval labeling")
{
    ExperimentConfig cfg;
    cfg.seed = 17;
    const CountTable table = simulate_counts(cfg);
    CountTable shuffled = table;
    for (auto& block : shuffled.settings) {
        std::reverse(block.intervals.begin(), block.intervals.end());
        std::rotate(block.intervals.begin(), block.intervals.begin() + 5,
                    block.intervals.end());
    }
    const BellEstimate a = estimate_bell(table, cfg.det);
    const BellEstimate b = estimate_bell(shuffled, cfg.det);
    CHECK(a.S == b.S);
    CHECK(a.sigma_bootstrap == b.sigma_bootstrap);
    CHECK(a.sigma_scatter == b.sigma_scatter);
}

TEST_CASE("higher rates converge to the model value")
{
    ExperimentConfig cfg;
    cfg.corrected_rate = 520.35 * 1000.0;
    const CountTable table = simulate_counts(cfg);
    const BellEstimate est = estimate_bell(table, cfg.det);
    const double model = chsh(make_noisy_state(cfg.p), cfg.settings);
    CHECK(std::abs(est.S - model) < 0.01);
}

TEST_CASE("estimate_bell validates the setting pattern")
{
    const BellSettings settings{-16.0, 4.0, -6.0, 14.0};
    const DetectionModel det;
    CountTable table = table_from_model(0.69, settings, det, 520.35);

    SUBCASE("missing setting")
    {
        table.settings.pop_back();
        CHECK_THROWS_AS(estimate_bell(table, det), std::invalid_argument);
    }
    SUBCASE("duplicate setting")
    {
        table.settings.push_back(table.settings[0]);
        CHECK_THROWS_AS(estimate_bell(table, det), std::invalid_argument);
    }
    SUBCASE("unknown label")
    {
        table.settings[3].label = "bb'";
        CHECK_THROWS_AS(estimate_bell(table, det), std::invalid_argument);
    }
    SUBCASE("inconsistent angles")
    {
        table.settings[1].alpha_deg = -15.0;  // ab' must share alpha with ab
        CHECK_THROWS_AS(estimate_bell(table, det), std::invalid_argument);
    }
    SUBCASE("bad bootstrap size")
    {
        EstimateOptions opts;
        opts.bootstrap_B = 0;
        CHECK_THROWS_AS(estimate_bell(table, det, opts), std::invalid_argument);
    }
}

TEST_CASE("count CSV round trip")
{
    ExperimentConfig cfg;
    cfg.seed = 23;
    const CountTable table = simulate_counts(cfg);

    std::ostringstream os;
    write_counts_csv(os, table);
    const std::string text = os.str();
    CHECK(text.rfind("setting_label,alpha_deg,beta_deg,outcome_a,outcome_b,"
                     "mean_counts,n_intervals,interval_s,c1,",
                     0) == 0);

    std::istringstream is(text);
    const CountTable back = read_counts_csv(is);
    REQUIRE(back.settings.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(back.settings[k].label == table.settings[k].label);
        CHECK(back.settings[k].alpha_deg == table.settings[k].alpha_deg);
        CHECK(back.settings[k].intervals == table.settings[k].intervals);
        for (int i = 0; i < kJointDim; ++i)
            CHECK(std::abs(back.settings[k].mean_counts[i] -
                           table.settings[k].mean_counts[i]) < 1e-7);
    }

    const BellEstimate a = estimate_bell(table, cfg.det);
    const BellEstimate b = estimate_bell(back, cfg.det);
    CHECK(std::abs(a.S - b.S) < 1e-9);
    CHECK(std::abs(a.sigma_bootstrap - b.sigma_bootstrap) < 1e-9);
}

TEST_CASE("CSV parse errors carry row and field diagnostics")
{
    const auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_counts_csv(is);
    };
    const std::string header =
        "setting_label,alpha_deg,beta_deg,outcome_a,outcome_b,mean_counts,"
        "n_intervals,interval_s";

    SUBCASE("bad header")
    {
        try {
            parse("foo,bar\n");
            FAIL("expected CsvError");
        } catch (const CsvError& e) {
            CHECK(e.row == 0);
        }
    }
    SUBCASE("bad outcome code")
    {
        try {
            parse(header + "\nab,-16,-6,2,1,5.0,12,60\n");
            FAIL("expected CsvError");
        } catch (const CsvError& e) {
            CHECK(e.row == 1);
            CHECK(e.field == "outcome_a");
        }
    }
    SUBCASE("unparseable number")
    {
        try {
            parse(header + "\nab,-16,-6,1,1,abc,12,60\n");
            FAIL("expected CsvError");
        } catch (const CsvError& e) {
            CHECK(e.row == 1);
            CHECK(e.field == "mean_counts");
        }
    }
    SUBCASE("wrong field count")
    {
        CHECK_THROWS_AS(parse(header + "\nab,-16,-6,1,1,5.0,12\n"), CsvError);
    }
    SUBCASE("negative counts")
    {
        CHECK_THROWS_AS(parse(header + "\nab,-16,-6,1,1,-5.0,12,60\n"), CsvError);
    }
    SUBCASE("duplicate outcome row")
    {
        CHECK_THROWS_AS(parse(header + "\nab,-16,-6,1,1,5.0,12,60\n" +
                              "ab,-16,-6,1,1,5.0,12,60\n"),
                        CsvError);
    }
    SUBCASE("incomplete setting")
    {
        CHECK_THROWS_AS(parse(header + "\nab,-16,-6,1,1,5.0,12,60\n"), CsvError);
    }
    SUBCASE("mean inconsistent with intervals")
    {
        try {
            parse(header + ",c1,c2\nab,-16,-6,1,1,5.0,2,60,1,2\n");
            FAIL("expected CsvError");
        } catch (const CsvError& e) {
            CHECK(e.row == 1);
            CHECK(e.field == "mean_counts");
        }
    }
    SUBCASE("interval columns disagree with n_intervals")
    {
        CHECK_THROWS_AS(parse(header + ",c1,c2\nab,-16,-6,1,1,1.5,12,60,1,2\n"),
                        CsvError);
    }
    SUBCASE("angle changes mid-setting")
    {
        CHECK_THROWS_AS(parse(header + "\nab,-16,-6,1,1,5.0,12,60\n" +
                              "ab,-15,-6,1,0,5.0,12,60\n"),
                        CsvError);
    }
}
