#pragma once

#include "ftrs/fixtures.hpp"
#include "ftrs/preprocess.hpp"

namespace ftrs::test {

/// Fraction of `count` rotated fixtures whose class the Hough baseline
/// recovers; fixture i is rotated by (i mod n_class) steps.
inline double hough_accuracy(double theta_deg, int count, std::uint64_t seed = 1) {
  const int n = static_cast<int>(std::lround(360.0 / theta_deg));
  HoughOrientationClassifier::Options o;
  o.n_class = n;
  const HoughOrientationClassifier clf(o);
  int hits = 0;
  for (int i = 0; i < count; ++i) {
    const int k = i % n;
    const RawTicketImage img = rotate_by_classes(rotation_fixture(seed, i), k, n);
    if (clf.estimate(img).class_k == k) ++hits;
  }
  return static_cast<double>(hits) / count;
}

/// Rotate-then-correct with the oracle classifier; counts fixtures that come
/// back as class 0.
inline int oracle_restored(int n_class, int count, std::uint64_t seed = 2) {
  PipelineConfig cfg;
  cfg.n_class = n_class;
  const OracleRotationClassifier oracle(n_class);
  int ok = 0;
  for (int i = 0; i < count; ++i) {
    const int k = i % n_class;
    const RawTicketImage rotated = rotate_by_classes(rotation_fixture(seed, i), k, n_class);
    const RawTicketImage fixed = correct_direction(rotated, detect_rotation(rotated, oracle, cfg), cfg);
    if (detect_rotation(fixed, oracle, cfg).class_k == 0) ++ok;
  }
  return ok;
}

}  // namespace ftrs::test
