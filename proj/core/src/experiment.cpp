#include "spin1bell/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>

namespace spin1bell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent substream per (setting, interval): hash chain keeps the draw
// deterministic no matter which cells are evaluated first.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t setting,
                             std::uint64_t interval)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h + setting);
    h = splitmix64(h + interval);
    return h;
}

std::array<std::pair<double, double>, 4> setting_angles(const BellSettings& s)
{
    return {{{s.alpha, s.beta},
             {s.alpha, s.beta_prime},
             {s.alpha_prime, s.beta},
             {s.alpha_prime, s.beta_prime}}};
}

void check_detection(const DetectionModel& det)
{
    if (!(det.eta_a > 0.0 && det.eta_a <= 1.0) ||
        !(det.eta_b > 0.0 && det.eta_b <= 1.0))
        throw std::invalid_argument("detection efficiencies must lie in (0, 1]");
}

// E of one corrected snapshot (nine cells); throws on zero total.
double snapshot_expectation(const std::array<double, kJointDim>& counts)
{
    double total = 0.0, acc = 0.0;
    for (int ia = 0; ia < kTripletDim; ++ia)
        for (int ib = 0; ib < kTripletDim; ++ib) {
            const double c = counts[joint_index(ia, ib)];
            total += c;
            acc += kOutcomeValue[ia] * kOutcomeValue[ib] * c;
        }
    if (total <= 0.0)
        throw std::invalid_argument("corrected counts sum to zero; cannot "
                                    "normalize to probabilities");
    return acc / total;
}

std::string format_g(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_double(const std::string& s, int row, const char* field)
{
    if (s.empty()) throw CsvError(row, field, "empty numeric field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw CsvError(row, field,
                       std::string("cannot parse '") + s + "' as a number");
    return v;
}

long parse_long(const std::string& s, int row, const char* field)
{
    if (s.empty()) throw CsvError(row, field, "empty numeric field");
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw CsvError(row, field,
                       std::string("cannot parse '") + s + "' as an integer");
    return v;
}

int parse_outcome(const std::string& s, int row, const char* field)
{
    const long v = parse_long(s, row, field);
    if (v != 1 && v != 0 && v != -1)
        throw CsvError(row, field,
                       "outcome must be one of 1, 0, -1, got " + s);
    return outcome_to_index(static_cast<int>(v));
}

constexpr const char* kBaseColumns[] = {
    "setting_label", "alpha_deg", "beta_deg",   "outcome_a",
    "outcome_b",     "mean_counts", "n_intervals", "interval_s"};
constexpr int kNumBaseColumns = 8;

} // namespace

CountTable simulate_counts(const ExperimentConfig& cfg)
{
    if (cfg.n_intervals < 2)
        throw std::invalid_argument("n_intervals must be at least 2, got " +
                                    std::to_string(cfg.n_intervals));
    if (!(cfg.interval_s > 0.0))
        throw std::invalid_argument("interval_s must be positive, got " +
                                    std::to_string(cfg.interval_s));
    if (!(cfg.corrected_rate > 0.0))
        throw std::invalid_argument("corrected_rate must be positive, got " +
                                    std::to_string(cfg.corrected_rate));
    check_detection(cfg.det);

    const JointState state = make_noisy_state(cfg.p);
    const auto angles = setting_angles(cfg.settings);

    CountTable table;
    for (int k = 0; k < 4; ++k) {
        const auto [alpha, beta] = angles[k];
        const OutcomeGrid grid = joint_probabilities(state, alpha, beta);
        const auto mu = expected_counts(grid, cfg.det, cfg.corrected_rate);

        SettingBlock block;
        block.label = kSettingLabels[k];
        block.alpha_deg = alpha;
        block.beta_deg = beta;
        block.n_intervals = cfg.n_intervals;
        block.interval_s = cfg.interval_s;
        block.intervals.resize(cfg.n_intervals);

        for (int t = 0; t < cfg.n_intervals; ++t) {
            std::mt19937_64 eng(substream_seed(cfg.seed, k, t));
            auto& counts = block.intervals[t];
            for (int i = 0; i < kJointDim; ++i) {
                if (mu[i] > 0.0) {
                    std::poisson_distribution<long long> poisson(mu[i]);
                    counts[i] = static_cast<double>(poisson(eng));
                } else {
                    counts[i] = 0.0;
                }
                block.mean_counts[i] += counts[i];
            }
        }
        for (double& m : block.mean_counts) m /= cfg.n_intervals;
        table.settings.push_back(std::move(block));
    }
    return table;
}

CountTable correct_counts(const CountTable& table, const DetectionModel& det)
{
    check_detection(det);
    CountTable out = table;
    for (auto& block : out.settings)
        for (int ia = 0; ia < kTripletDim; ++ia)
            for (int ib = 0; ib < kTripletDim; ++ib) {
                const double f = efficiency_factor(det, ia, ib);
                const int i = joint_index(ia, ib);
                block.mean_counts[i] /= f;
                for (auto& interval : block.intervals) interval[i] /= f;
            }
    return out;
}

OutcomeGrid probability_table(const SettingBlock& corrected)
{
    double total = 0.0;
    for (double c : corrected.mean_counts) total += c;
    if (total <= 0.0)
        throw std::invalid_argument("corrected counts sum to zero; cannot "
                                    "normalize to probabilities");
    OutcomeGrid grid;
    for (int i = 0; i < kJointDim; ++i) grid.p[i] = corrected.mean_counts[i] / total;
    return grid;
}

BellEstimate estimate_bell(const CountTable& table, const DetectionModel& det,
                           const EstimateOptions& options)
{
    check_detection(det);
    if (options.bootstrap_B < 1)
        throw std::invalid_argument("bootstrap_B must be at least 1, got " +
                                    std::to_string(options.bootstrap_B));

    // Locate the four labeled settings, exactly once each.
    std::array<const SettingBlock*, 4> blocks{};
    for (const auto& block : table.settings) {
        int k = -1;
        for (int j = 0; j < 4; ++j)
            if (block.label == kSettingLabels[j]) k = j;
        if (k < 0)
            throw std::invalid_argument("unexpected setting label '" +
                                        block.label + "'");
        if (blocks[k])
            throw std::invalid_argument("duplicate setting label '" +
                                        block.label + "'");
        blocks[k] = &block;
    }
    for (int k = 0; k < 4; ++k)
        if (!blocks[k])
            throw std::invalid_argument(std::string("missing setting '") +
                                        kSettingLabels[k] + "'");

    // The four settings must share the two Alice and the two Bob angles.
    const auto angles_differ = [](double x, double y) {
        return std::abs(x - y) > 1e-9;
    };
    if (angles_differ(blocks[0]->alpha_deg, blocks[1]->alpha_deg))
        throw std::invalid_argument("settings ab and ab' disagree on alpha");
    if (angles_differ(blocks[2]->alpha_deg, blocks[3]->alpha_deg))
        throw std::invalid_argument("settings a'b and a'b' disagree on alpha'");
    if (angles_differ(blocks[0]->beta_deg, blocks[2]->beta_deg))
        throw std::invalid_argument("settings ab and a'b disagree on beta");
    if (angles_differ(blocks[1]->beta_deg, blocks[3]->beta_deg))
        throw std::invalid_argument("settings ab' and a'b' disagree on beta'");

    BellEstimate est;

    // Point estimate and per-setting analytic Poisson propagation.
    double s_signed = 0.0;
    std::array<std::array<double, kJointDim>, 4> corrected_mean{};
    for (int k = 0; k < 4; ++k) {
        const SettingBlock& block = *blocks[k];
        const int n = block.intervals.empty()
                          ? block.n_intervals
                          : static_cast<int>(block.intervals.size());
        if (n < 1)
            throw std::invalid_argument("setting '" + block.label +
                                        "' reports no intervals");

        double total = 0.0;
        for (int ia = 0; ia < kTripletDim; ++ia)
            for (int ib = 0; ib < kTripletDim; ++ib) {
                const int i = joint_index(ia, ib);
                corrected_mean[k][i] =
                    block.mean_counts[i] / efficiency_factor(det, ia, ib);
                total += corrected_mean[k][i];
            }
        if (total <= 0.0)
            throw std::invalid_argument("setting '" + block.label +
                                        "' has zero corrected counts");

        const double e = snapshot_expectation(corrected_mean[k]);

        // Var(E) by the delta method: corrected cell variances are
        // raw/(factor^2) = corrected/factor, over n intervals of exposure.
        double var = 0.0;
        for (int ia = 0; ia < kTripletDim; ++ia)
            for (int ib = 0; ib < kTripletDim; ++ib) {
                const int i = joint_index(ia, ib);
                const double s = kOutcomeValue[ia] * kOutcomeValue[ib];
                var += (s - e) * (s - e) * corrected_mean[k][i] /
                       efficiency_factor(det, ia, ib);
            }
        var /= n * total * total;

        est.per_setting[k] = {kSettingLabels[k], block.alpha_deg, block.beta_deg,
                              e, std::sqrt(var)};
        s_signed += kSettingSigns[k] * e;
    }
    est.S = std::abs(s_signed);

    double var_poisson = 0.0;
    for (const auto& ps : est.per_setting) var_poisson += ps.sigma_e * ps.sigma_e;
    est.sigma_poisson = std::sqrt(var_poisson);

    // Resampling methods need per-interval data for every setting. Interval
    // snapshots are sorted into a canonical order first, so estimates do not
    // depend on how the intervals happened to be numbered.
    bool have_intervals = true;
    for (int k = 0; k < 4; ++k)
        if (blocks[k]->intervals.empty()) have_intervals = false;

    est.sigma_bootstrap = kNaN;
    est.sigma_scatter = kNaN;

    if (have_intervals) {
        std::array<std::vector<std::array<double, kJointDim>>, 4> sorted;
        for (int k = 0; k < 4; ++k) {
            sorted[k] = blocks[k]->intervals;
            for (auto& snapshot : sorted[k])
                for (int ia = 0; ia < kTripletDim; ++ia)
                    for (int ib = 0; ib < kTripletDim; ++ib)
                        snapshot[joint_index(ia, ib)] /=
                            efficiency_factor(det, ia, ib);
            std::sort(sorted[k].begin(), sorted[k].end());
        }

        // Bootstrap over intervals, jointly across the nine cells.
        std::mt19937_64 eng(options.bootstrap_seed);
        double sum = 0.0, sumsq = 0.0;
        for (int b = 0; b < options.bootstrap_B; ++b) {
            double rep_signed = 0.0;
            for (int k = 0; k < 4; ++k) {
                const int n = static_cast<int>(sorted[k].size());
                std::uniform_int_distribution<int> pick(0, n - 1);
                std::array<double, kJointDim> mean{};
                for (int t = 0; t < n; ++t) {
                    const auto& snapshot = sorted[k][pick(eng)];
                    for (int i = 0; i < kJointDim; ++i) mean[i] += snapshot[i];
                }
                for (double& m : mean) m /= n;
                rep_signed += kSettingSigns[k] * snapshot_expectation(mean);
            }
            const double rep = std::abs(rep_signed);
            sum += rep;
            sumsq += rep * rep;
        }
        const double b_mean = sum / options.bootstrap_B;
        est.sigma_bootstrap =
            std::sqrt(std::max(0.0, sumsq / options.bootstrap_B - b_mean * b_mean));

        // Interval scatter: the spread of per-interval S values, when the
        // four settings report the same number of intervals.
        const std::size_t n0 = sorted[0].size();
        bool equal_n = n0 >= 2;
        for (int k = 1; k < 4; ++k)
            if (sorted[k].size() != n0) equal_n = false;
        if (equal_n) {
            std::vector<double> s_t(n0);
            for (std::size_t t = 0; t < n0; ++t) {
                double signed_t = 0.0;
                for (int k = 0; k < 4; ++k)
                    signed_t += kSettingSigns[k] * snapshot_expectation(sorted[k][t]);
                s_t[t] = signed_t;
            }
            double m = 0.0;
            for (double v : s_t) m += v;
            m /= n0;
            double ss = 0.0;
            for (double v : s_t) ss += (v - m) * (v - m);
            est.sigma_scatter = std::sqrt(ss / (n0 - 1)) / std::sqrt(double(n0));
        }
    }

    SigmaMethod method = options.method;
    if (!have_intervals && method != SigmaMethod::poisson)
        method = SigmaMethod::poisson;
    if (method == SigmaMethod::scatter && !std::isfinite(est.sigma_scatter))
        method = SigmaMethod::poisson;

    switch (method) {
        case SigmaMethod::bootstrap:
            est.sigma = est.sigma_bootstrap;
            est.method = "bootstrap";
            break;
        case SigmaMethod::poisson:
            est.sigma = est.sigma_poisson;
            est.method = "poisson-propagation";
            break;
        case SigmaMethod::scatter:
            est.sigma = est.sigma_scatter;
            est.method = "interval-scatter";
            break;
    }

    if (std::isfinite(est.sigma_bootstrap) && est.sigma_poisson > 0.0)
        est.cross_check_ok = std::abs(est.sigma_bootstrap - est.sigma_poisson) <=
                             0.30 * est.sigma_poisson;
    else
        est.cross_check_ok = true;

    return est;
}

void write_counts_csv(std::ostream& os, const CountTable& table)
{
    std::size_t n_cols = table.settings.empty() ? 0 : table.settings[0].intervals.size();
    for (const auto& block : table.settings)
        if (block.intervals.size() != n_cols)
            throw std::invalid_argument(
                "settings disagree on the number of recorded intervals");

    for (int c = 0; c < kNumBaseColumns; ++c)
        os << (c ? "," : "") << kBaseColumns[c];
    for (std::size_t j = 1; j <= n_cols; ++j) os << ",c" << j;
    os << '\n';

    for (const auto& block : table.settings)
        for (int ia = 0; ia < kTripletDim; ++ia)
            for (int ib = 0; ib < kTripletDim; ++ib) {
                const int i = joint_index(ia, ib);
                os << block.label << ',' << format_g(block.alpha_deg) << ','
                   << format_g(block.beta_deg) << ',' << index_to_outcome(ia)
                   << ',' << index_to_outcome(ib) << ','
                   << format_g(block.mean_counts[i]) << ',' << block.n_intervals
                   << ',' << format_g(block.interval_s);
                for (const auto& interval : block.intervals)
                    os << ',' << format_g(interval[i]);
                os << '\n';
            }
}

CountTable read_counts_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw CsvError(0, "header", "empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv(line);
    if (static_cast<int>(header.size()) < kNumBaseColumns)
        throw CsvError(0, "header",
                       "expected at least 8 columns, got " +
                           std::to_string(header.size()));
    for (int c = 0; c < kNumBaseColumns; ++c)
        if (header[c] != kBaseColumns[c])
            throw CsvError(0, kBaseColumns[c],
                           "column " + std::to_string(c + 1) + " must be '" +
                               kBaseColumns[c] + "', got '" + header[c] + "'");
    const int n_cols = static_cast<int>(header.size()) - kNumBaseColumns;
    for (int j = 0; j < n_cols; ++j) {
        const std::string expect = "c" + std::to_string(j + 1);
        if (header[kNumBaseColumns + j] != expect)
            throw CsvError(0, "header",
                           "interval column " + std::to_string(j + 1) +
                               " must be named '" + expect + "'");
    }

    CountTable table;
    std::map<std::string, std::size_t> block_index;
    std::map<std::string, std::array<bool, kJointDim>> seen;

    int row = 0;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;

        const auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw CsvError(row, "row",
                           "expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(fields.size()));

        const std::string& label = fields[0];
        if (label.empty()) throw CsvError(row, "setting_label", "empty label");
        const double alpha = parse_double(fields[1], row, "alpha_deg");
        const double beta = parse_double(fields[2], row, "beta_deg");
        const int ia = parse_outcome(fields[3], row, "outcome_a");
        const int ib = parse_outcome(fields[4], row, "outcome_b");
        const double mean = parse_double(fields[5], row, "mean_counts");
        if (mean < 0.0)
            throw CsvError(row, "mean_counts", "counts must be nonnegative");
        const long n_intervals = parse_long(fields[6], row, "n_intervals");
        if (n_intervals < 1)
            throw CsvError(row, "n_intervals", "must be at least 1");
        const double interval_s = parse_double(fields[7], row, "interval_s");
        if (!(interval_s > 0.0))
            throw CsvError(row, "interval_s", "must be positive");
        if (n_cols > 0 && n_intervals != n_cols)
            throw CsvError(row, "n_intervals",
                           "does not match the " + std::to_string(n_cols) +
                               " interval columns");

        auto it = block_index.find(label);
        if (it == block_index.end()) {
            SettingBlock block;
            block.label = label;
            block.alpha_deg = alpha;
            block.beta_deg = beta;
            block.n_intervals = static_cast<int>(n_intervals);
            block.interval_s = interval_s;
            block.intervals.resize(n_cols);
            it = block_index.emplace(label, table.settings.size()).first;
            table.settings.push_back(std::move(block));
            seen.emplace(label, std::array<bool, kJointDim>{});
        }
        SettingBlock& block = table.settings[it->second];
        if (std::abs(block.alpha_deg - alpha) > 1e-9)
            throw CsvError(row, "alpha_deg",
                           "setting '" + label + "' changes alpha mid-table");
        if (std::abs(block.beta_deg - beta) > 1e-9)
            throw CsvError(row, "beta_deg",
                           "setting '" + label + "' changes beta mid-table");
        if (block.n_intervals != n_intervals)
            throw CsvError(row, "n_intervals",
                           "setting '" + label + "' changes n_intervals mid-table");
        if (std::abs(block.interval_s - interval_s) > 1e-9)
            throw CsvError(row, "interval_s",
                           "setting '" + label + "' changes interval_s mid-table");

        const int i = joint_index(ia, ib);
        auto& cell_seen = seen[label];
        if (cell_seen[i])
            throw CsvError(row, "outcome_a",
                           "duplicate outcome pair for setting '" + label + "'");
        cell_seen[i] = true;
        block.mean_counts[i] = mean;

        if (n_cols > 0) {
            double avg = 0.0;
            for (int j = 0; j < n_cols; ++j) {
                const std::string col = "c" + std::to_string(j + 1);
                const double c =
                    parse_double(fields[kNumBaseColumns + j], row, col.c_str());
                if (c < 0.0)
                    throw CsvError(row, col.c_str(), "counts must be nonnegative");
                block.intervals[j][i] = c;
                avg += c;
            }
            avg /= n_cols;
            if (std::abs(avg - mean) > 1e-6 * std::max(1.0, std::abs(mean)))
                throw CsvError(row, "mean_counts",
                               "mean_counts " + format_g(mean) +
                                   " does not match the interval average " +
                                   format_g(avg));
        }
    }

    if (table.settings.empty()) throw CsvError(0, "header", "no data rows");
    for (const auto& block : table.settings) {
        const auto& cell_seen = seen[block.label];
        int have = 0;
        for (bool b : cell_seen) have += b;
        if (have != kJointDim)
            throw CsvError(row, "outcome_a",
                           "setting '" + block.label + "' has " +
                               std::to_string(have) + " of 9 outcome rows");
    }
    return table;
}

} // namespace spin1bell
