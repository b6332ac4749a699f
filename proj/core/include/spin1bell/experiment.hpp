#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spin1bell/analyzer.hpp"
#include "spin1bell/bell.hpp"

namespace spin1bell {

// The four CHSH setting labels, in combination order: E(ab) - E(ab') +
// E(a'b) + E(a'b').
inline constexpr std::array<const char*, 4> kSettingLabels{"ab", "ab'", "a'b", "a'b'"};
inline constexpr std::array<int, 4> kSettingSigns{+1, -1, +1, +1};

struct ExperimentConfig {
    BellSettings settings{-16.0, 4.0, -6.0, 14.0};  // dphi = 10, center -1
    double p = 0.69;
    DetectionModel det{};
    double corrected_rate = 520.35;  // corrected four-folds per interval per setting
    int n_intervals = 12;
    double interval_s = 60.0;
    std::uint64_t seed = 1;
};

// Counts for one labeled analyzer setting: mean counts per interval for the
// nine outcomes (canonical (A,B) order), optionally with the per-interval
// counts that produced them.
struct SettingBlock {
    std::string label;
    double alpha_deg = 0.0;
    double beta_deg = 0.0;
    int n_intervals = 0;
    double interval_s = 0.0;
    std::array<double, kJointDim> mean_counts{};
    std::vector<std::array<double, kJointDim>> intervals;  // empty if not recorded
};

struct CountTable {
    std::vector<SettingBlock> settings;
};

// CSV parse failure with location: 1-based data row (0 = header) and field name.
struct CsvError : std::runtime_error {
    CsvError(int row_, std::string field_, const std::string& what_)
        : std::runtime_error(what_), row(row_), field(std::move(field_)) {}
    int row;
    std::string field;
};

// Draw the raw counts of the full experiment: per setting and interval,
// independent Poisson counts with mean expected_counts(...). Deterministic
// for a given (seed, config) regardless of evaluation order (each
// (setting, interval) cell uses its own derived substream).
CountTable simulate_counts(const ExperimentConfig& cfg);

// Divide every count by its efficiency factor (the table's "Mod." column).
CountTable correct_counts(const CountTable& table, const DetectionModel& det);

// Normalize one corrected setting to probabilities; throws on zero total.
OutcomeGrid probability_table(const SettingBlock& corrected);

enum class SigmaMethod { bootstrap, poisson, scatter };

struct EstimateOptions {
    SigmaMethod method = SigmaMethod::bootstrap;
    int bootstrap_B = 1000;
    std::uint64_t bootstrap_seed = 7451;
};

struct SettingEstimate {
    std::string label;
    double alpha_deg = 0.0;
    double beta_deg = 0.0;
    double e = 0.0;
    double sigma_e = 0.0;  // analytic Poisson propagation
};

struct BellEstimate {
    double S = 0.0;
    double sigma = 0.0;         // by `method`
    std::string method;          // "bootstrap", "poisson-propagation", "interval-scatter"
    std::array<SettingEstimate, 4> per_setting{};
    double sigma_bootstrap = 0.0;  // NaN when per-interval data is missing
    double sigma_poisson = 0.0;
    double sigma_scatter = 0.0;    // NaN when per-interval data is missing
    bool cross_check_ok = true;    // bootstrap vs poisson within 30 % relative
};

// S and its uncertainty from a table holding the four labeled settings.
// sigma defaults to a bootstrap over intervals (resampled jointly across the
// nine cells of a setting, after sorting interval snapshots into a canonical
// order so the estimate is invariant under interval relabeling); analytic
// Poisson propagation is always computed as a cross-check. Tables without
// per-interval data fall back to Poisson propagation.
BellEstimate estimate_bell(const CountTable& table, const DetectionModel& det,
                           const EstimateOptions& options = {});

// Count CSV, header:
// setting_label,alpha_deg,beta_deg,outcome_a,outcome_b,mean_counts,n_intervals,interval_s[,c1..cN]
void write_counts_csv(std::ostream& os, const CountTable& table);
CountTable read_counts_csv(std::istream& is);

} // namespace spin1bell
