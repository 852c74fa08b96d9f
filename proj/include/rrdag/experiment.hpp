#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrdag/montecarlo.hpp"

namespace rrdag {

inline constexpr int kConfigSchemaVersion = 1;

/// Reads an experiment config object. Unknown or mistyped fields raise
/// ConfigError with the field's JSON pointer.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig read_experiment_config(std::istream& in);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

nlohmann::json to_json(const GofReport& report);

struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const CsvTable& table);

/// Result document plus plot tables for one aggregate.
///
/// Columns per kind:
///   degree_tail   degree_tail.csv, joint_tail.csv: d, empirical, reference, ci_lo, ci_hi
///   count_profile counts.csv: trial, max_degree, x_<j>..., x_ge_<j>...
///                 max_degree.csv: i, empirical, reference, ci_lo, ci_hi
///   depth_label   samples.csv: depth, label, z_depth, z_log_label
///   multi_label   samples.csv: label_<j>..., z_<j>...
///   tau_k         tau_tail.csv: t, empirical, bound, ci_lo, ci_hi
struct ExperimentReport {
  nlohmann::json result;
  std::vector<CsvTable> tables;
};

ExperimentReport summarize(const Aggregate& agg);

/// Fixed-precision rendering shared by every data file.
std::string format_number(double x);

}  // namespace rrdag
