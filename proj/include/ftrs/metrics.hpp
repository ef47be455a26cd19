#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ftrs/types.hpp"

namespace ftrs {

struct SampleEval {
  std::int64_t r_char = 0;
  std::int64_t n_char = 0;
  bool all_correct = false;
};

void to_json(json& j, const SampleEval& s);
void from_json(const json& j, SampleEval& s);

/// Sum of correct strings over sum of strings.
double p_char(std::span<const SampleEval> samples);
/// Fraction of samples with every information field correct.
double p_ticket(std::span<const SampleEval> samples);

/// One string per ground-truth field; a field counts when recognized exactly.
SampleEval evaluate_fields(const std::map<std::string, std::string>& truth,
                           const std::map<std::string, std::string>& recognized);

struct TimingLogEntry {
  int w_px = 0;
  int h_px = 0;
  double a_text = 0.0;
  double a_information = 0.0;
  double t_ms = 0.0;
};

void to_json(json& j, const TimingLogEntry& e);
void from_json(const json& j, TimingLogEntry& e);

/// T = alpha (w + h) + beta A_text + gamma A_information + c
struct CostModel {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, c = 0.0;
  std::array<double, 4> std_errors{};  // same order; 0 when n == 4
  double residual_rms = 0.0;
  std::size_t n = 0;

  double predict(const TimingLogEntry& e) const {
    return alpha * (e.w_px + e.h_px) + beta * e.a_text + gamma * e.a_information + c;
  }
};

json to_json(const CostModel& m);

CostModel fit_cost_model(std::span<const TimingLogEntry> log);

struct CategoryTiming {
  std::string category;
  double fast_ms = 0.0;
  double general_ms = 0.0;
  double weight = 0.0;
};

struct SpeedupReport {
  struct Row {
    std::string category;
    double fast_ms, general_ms, weight, ratio;
  };
  std::vector<Row> rows;
  double ratio_of_weighted_sums = 0.0;  // the reported aggregate
  double weighted_mean_ratio = 0.0;
  double mean_fast_ms = 0.0, weighted_fast_ms = 0.0;
  double mean_general_ms = 0.0, weighted_general_ms = 0.0;

  static constexpr const char* kAggregateFormula = "sum(w_i * general_i) / sum(w_i * fast_i)";
  static constexpr const char* kAlternateFormula = "sum(w_i * general_i / fast_i)";

  json to_json() const;
  std::string table() const;
};

SpeedupReport speedup_report(std::span<const CategoryTiming> timings);

}  // namespace ftrs
