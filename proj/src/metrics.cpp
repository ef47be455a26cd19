#include "ftrs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ftrs/error.hpp"

namespace ftrs {

void to_json(json& j, const SampleEval& s) {
  j = json{{"R_char", s.r_char}, {"N_char", s.n_char}, {"info_fields_all_correct", s.all_correct}};
}

void from_json(const json& j, SampleEval& s) {
  s.r_char = j.at("R_char").get<std::int64_t>();
  s.n_char = j.at("N_char").get<std::int64_t>();
  s.all_correct = j.at("info_fields_all_correct").get<bool>();
  if (s.r_char < 0 || s.n_char < 0 || s.r_char > s.n_char)
    throw Error(ErrorCode::InvalidArgument, "sample needs 0 <= R_char <= N_char");
}

double p_char(std::span<const SampleEval> samples) {
  std::int64_t r = 0, n = 0;
  for (const auto& s : samples) {
    r += s.r_char;
    n += s.n_char;
  }
  if (n == 0) throw Error(ErrorCode::EmptyEvaluation, "no strings to evaluate");
  return static_cast<double>(r) / static_cast<double>(n);
}

double p_ticket(std::span<const SampleEval> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyEvaluation, "no samples to evaluate");
  const auto ok = std::count_if(samples.begin(), samples.end(), [](const SampleEval& s) { return s.all_correct; });
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

SampleEval evaluate_fields(const std::map<std::string, std::string>& truth,
                           const std::map<std::string, std::string>& recognized) {
  SampleEval s;
  for (const auto& [k, v] : truth) {
    ++s.n_char;
    const auto it = recognized.find(k);
    if (it != recognized.end() && it->second == v) ++s.r_char;
  }
  s.all_correct = s.r_char == s.n_char;
  return s;
}

void to_json(json& j, const TimingLogEntry& e) {
  j = json{{"w_px", e.w_px}, {"h_px", e.h_px}, {"A_text", e.a_text}, {"A_information", e.a_information},
           {"t_ms", e.t_ms}};
}

void from_json(const json& j, TimingLogEntry& e) {
  e.w_px = j.at("w_px").get<int>();
  e.h_px = j.at("h_px").get<int>();
  e.a_text = j.at("A_text").get<double>();
  e.a_information = j.at("A_information").get<double>();
  e.t_ms = j.at("t_ms").get<double>();
}

json to_json(const CostModel& m) {
  return json{{"alpha", m.alpha},
              {"beta", m.beta},
              {"gamma", m.gamma},
              {"C", m.c},
              {"std_errors", {{"alpha", m.std_errors[0]}, {"beta", m.std_errors[1]}, {"gamma", m.std_errors[2]}, {"C", m.std_errors[3]}}},
              {"residual_rms", m.residual_rms},
              {"n", m.n}};
}

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;
using Vec4 = std::array<double, 4>;

Vec4 design_row(const TimingLogEntry& e) {
  return {static_cast<double>(e.w_px + e.h_px), e.a_text, e.a_information, 1.0};
}

// LU with partial pivoting; false when a pivot vanishes relative to `scale`.
bool lu_decompose(Mat4& a, std::array<int, 4>& perm, double scale) {
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < 4; ++k) {
    int p = k;
    for (int i = k + 1; i < 4; ++i)
      if (std::fabs(a[i][k]) > std::fabs(a[p][k])) p = i;
    if (std::fabs(a[p][k]) <= 1e-12 * scale) return false;
    std::swap(a[k], a[p]);
    std::swap(perm[k], perm[p]);
    for (int i = k + 1; i < 4; ++i) {
      a[i][k] /= a[k][k];
      for (int j = k + 1; j < 4; ++j) a[i][j] -= a[i][k] * a[k][j];
    }
  }
  return true;
}

Vec4 lu_solve(const Mat4& lu, const std::array<int, 4>& perm, const Vec4& b) {
  Vec4 x;
  for (int i = 0; i < 4; ++i) {
    x[i] = b[perm[i]];
    for (int j = 0; j < i; ++j) x[i] -= lu[i][j] * x[j];
  }
  for (int i = 3; i >= 0; --i) {
    for (int j = i + 1; j < 4; ++j) x[i] -= lu[i][j] * x[j];
    x[i] /= lu[i][i];
  }
  return x;
}

}  // namespace

CostModel fit_cost_model(std::span<const TimingLogEntry> log) {
  if (log.size() < 4) throw Error(ErrorCode::Underdetermined, "need at least 4 timing entries");
  Vec4 scale{};
  for (const auto& e : log) {
    const Vec4 row = design_row(e);
    for (int j = 0; j < 4; ++j) scale[j] = std::max(scale[j], std::fabs(row[j]));
  }
  for (double s : scale)
    if (s == 0.0) throw Error(ErrorCode::Underdetermined, "a design column is identically zero");

  Mat4 gram{};
  Vec4 rhs{};
  for (const auto& e : log) {
    Vec4 row = design_row(e);
    for (int j = 0; j < 4; ++j) row[j] /= scale[j];
    for (int i = 0; i < 4; ++i) {
      rhs[i] += row[i] * e.t_ms;
      for (int j = 0; j < 4; ++j) gram[i][j] += row[i] * row[j];
    }
  }
  double gmax = 0.0;
  for (const auto& r : gram)
    for (double v : r) gmax = std::max(gmax, std::fabs(v));
  Mat4 lu = gram;
  std::array<int, 4> perm{};
  if (!lu_decompose(lu, perm, gmax)) throw Error(ErrorCode::Underdetermined, "design matrix has rank < 4");

  Vec4 beta = lu_solve(lu, perm, rhs);
  // Refine against the residual of the normal equations.
  for (int iter = 0; iter < 3; ++iter) {
    Vec4 g{};
    for (const auto& e : log) {
      Vec4 row = design_row(e);
      for (int j = 0; j < 4; ++j) row[j] /= scale[j];
      double r = e.t_ms;
      for (int j = 0; j < 4; ++j) r -= row[j] * beta[j];
      for (int j = 0; j < 4; ++j) g[j] += row[j] * r;
    }
    const Vec4 d = lu_solve(lu, perm, g);
    for (int j = 0; j < 4; ++j) beta[j] += d[j];
  }

  CostModel m;
  m.n = log.size();
  Vec4 coef;
  for (int j = 0; j < 4; ++j) coef[j] = beta[j] / scale[j];
  m.alpha = coef[0];
  m.beta = coef[1];
  m.gamma = coef[2];
  m.c = coef[3];
  double rss = 0.0;
  for (const auto& e : log) {
    const double r = e.t_ms - m.predict(e);
    rss += r * r;
  }
  m.residual_rms = std::sqrt(rss / static_cast<double>(log.size()));
  if (log.size() > 4) {
    const double sigma2 = rss / static_cast<double>(log.size() - 4);
    for (int j = 0; j < 4; ++j) {
      Vec4 unit{};
      unit[j] = 1.0;
      const Vec4 col = lu_solve(lu, perm, unit);
      m.std_errors[j] = std::sqrt(std::max(0.0, sigma2 * col[j])) / scale[j];
    }
  }
  return m;
}

SpeedupReport speedup_report(std::span<const CategoryTiming> timings) {
  if (timings.empty()) throw Error(ErrorCode::InvalidArgument, "no timings");
  double wsum = 0.0;
  for (const auto& t : timings) {
    if (!(t.fast_ms > 0.0) || !(t.general_ms > 0.0))
      throw Error(ErrorCode::InvalidArgument, "timings must be positive for '" + t.category + "'");
    if (t.weight < 0.0) throw Error(ErrorCode::InvalidWeights, "negative weight for '" + t.category + "'");
    wsum += t.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidWeights, "weights sum to " + std::to_string(wsum));

  SpeedupReport rep;
  double wg = 0.0, wf = 0.0;
  for (const auto& t : timings) {
    const double ratio = t.general_ms / t.fast_ms;
    rep.rows.push_back({t.category, t.fast_ms, t.general_ms, t.weight, ratio});
    wg += t.weight * t.general_ms;
    wf += t.weight * t.fast_ms;
    rep.weighted_mean_ratio += t.weight * ratio;
    rep.mean_fast_ms += t.fast_ms;
    rep.mean_general_ms += t.general_ms;
  }
  rep.ratio_of_weighted_sums = wg / wf;
  rep.weighted_fast_ms = wf;
  rep.weighted_general_ms = wg;
  rep.mean_fast_ms /= static_cast<double>(timings.size());
  rep.mean_general_ms /= static_cast<double>(timings.size());
  return rep;
}

json SpeedupReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"category", r.category}, {"fast_ms", r.fast_ms}, {"general_ms", r.general_ms},
                      {"weight", r.weight}, {"ratio", r.ratio}});
  return json{{"rows", rows_j},
              {"aggregate", {{"value", ratio_of_weighted_sums}, {"formula", kAggregateFormula}}},
              {"alternate_aggregate", {{"value", weighted_mean_ratio}, {"formula", kAlternateFormula}}},
              {"mean_ms", {{"fast", {{"arithmetic", mean_fast_ms}, {"weighted", weighted_fast_ms}}},
                           {"general", {{"arithmetic", mean_general_ms}, {"weighted", weighted_general_ms}}}}}};
}

std::string SpeedupReport::table() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %10s %12s %8s %8s\n", "category", "fast_ms", "general_ms", "weight", "ratio");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %10.2f %12.2f %8.4f %8.2f\n", r.category.c_str(), r.fast_ms, r.general_ms,
                  r.weight, r.ratio);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "aggregate  %.4f = %s\n", ratio_of_weighted_sums, kAggregateFormula);
  out += buf;
  std::snprintf(buf, sizeof buf, "alternate  %.4f = %s\n", weighted_mean_ratio, kAlternateFormula);
  out += buf;
  std::snprintf(buf, sizeof buf, "mean fast_ms     arithmetic %.2f  weighted %.2f\n", mean_fast_ms, weighted_fast_ms);
  out += buf;
  std::snprintf(buf, sizeof buf, "mean general_ms  arithmetic %.2f  weighted %.2f\n", mean_general_ms,
                weighted_general_ms);
  out += buf;
  return out;
}

}  // namespace ftrs
