#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "vizrec/evaluate.hpp"
#include "vizrec/learner.hpp"
#include "vizrec/spec_model.hpp"

namespace vizrec {

// Binary indicator per soft constraint: does any pair of the paper exercise
// the constraint in either its positive or negative spec?
struct CoverageVector {
  std::string paper_id;
  std::vector<int> bits;
};

enum class ShiftKind { sign, normalized_exp, normalized_multi };

inline const char* to_string(ShiftKind k) {
  switch (k) {
    case ShiftKind::sign: return "sign";
    case ShiftKind::normalized_exp: return "normalized_exp";
    case ShiftKind::normalized_multi: return "normalized_multi";
  }
  return "?";
}

struct ShiftVector {
  std::string paper_id;
  ShiftKind kind = ShiftKind::sign;
  std::vector<double> values;
  // Set when the normalizer vanished (all-zero experimental model) and the
  // result was forced to zero rather than dividing by zero.
  bool degenerate = false;
};

namespace detail {

inline void check_same_layout(const WeightModel& a, const WeightModel& b) {
  if (a.constraint_names != b.constraint_names)
    throw ValidationError("weight models have different constraint layouts");
}

}  // namespace detail

inline CoverageVector coverage(const std::string& paper_id,
                               const std::vector<RankedPair>& pairs,
                               const ConstraintSet& set) {
  CoverageVector cv;
  cv.paper_id = paper_id;
  cv.bits.assign(set.soft.size(), 0);
  for (const auto& p : pairs) {
    FeatureVector pos = featurize(p.positive, set);
    FeatureVector neg = featurize(p.negative, set);
    for (std::size_t i = 0; i < cv.bits.size(); ++i)
      if (pos.counts[i] > 0 || neg.counts[i] > 0) cv.bits[i] = 1;
  }
  return cv;
}

// Shift tolerance used throughout: training is floating point, so weight
// differences below this are treated as no change at all.
inline double default_shift_eps(const WeightModel& baseline) {
  return 1e-6 * baseline.max_abs_weight();
}

// Per-constraint direction of change, with an epsilon dead zone.
inline ShiftVector sign_shift(const WeightModel& baseline,
                              const WeightModel& plusone, double eps) {
  detail::check_same_layout(baseline, plusone);
  if (eps < 0) throw ValidationError("sign_shift: eps must be >= 0");
  ShiftVector sv;
  sv.kind = ShiftKind::sign;
  sv.values.reserve(baseline.weights.size());
  for (std::size_t i = 0; i < baseline.weights.size(); ++i) {
    double d = plusone.weights[i] - baseline.weights[i];
    sv.values.push_back(std::abs(d) < eps ? 0.0 : (d > 0 ? 1.0 : -1.0));
  }
  return sv;
}

// Weight shift scaled by a single normalizer: the largest absolute weight of
// the experimental model. A degenerate all-zero experimental model yields an
// all-zero vector with the degenerate flag set.
inline ShiftVector normalized_shift_exp(const WeightModel& baseline,
                                        const WeightModel& experimental) {
  detail::check_same_layout(baseline, experimental);
  ShiftVector sv;
  sv.kind = ShiftKind::normalized_exp;
  double e_max = experimental.max_abs_weight();
  if (e_max == 0.0) {
    sv.values.assign(baseline.weights.size(), 0.0);
    sv.degenerate = true;
    return sv;
  }
  sv.values.reserve(baseline.weights.size());
  for (std::size_t i = 0; i < baseline.weights.size(); ++i)
    sv.values.push_back((experimental.weights[i] - baseline.weights[i]) / e_max);
  return sv;
}

// Weight shift scaled per constraint by the largest absolute weight that
// constraint takes across the baseline and every plus-one model. Constraints
// at zero in all models shift by zero.
inline ShiftVector normalized_shift_multi(const WeightModel& baseline,
                                          const std::vector<WeightModel>& plusones,
                                          std::size_t target,
                                          const std::string& paper_id = "") {
  if (plusones.empty())
    throw ValidationError("normalized_shift_multi: need at least one plus-one model");
  if (target >= plusones.size())
    throw ValidationError("normalized_shift_multi: target index out of range");
  for (const auto& m : plusones) detail::check_same_layout(baseline, m);
  ShiftVector sv;
  sv.paper_id = paper_id;
  sv.kind = ShiftKind::normalized_multi;
  sv.values.reserve(baseline.weights.size());
  for (std::size_t i = 0; i < baseline.weights.size(); ++i) {
    double w_max = std::abs(baseline.weights[i]);
    for (const auto& m : plusones) w_max = std::max(w_max, std::abs(m.weights[i]));
    double d = plusones[target].weights[i] - baseline.weights[i];
    sv.values.push_back(w_max == 0.0 ? 0.0 : d / w_max);
  }
  return sv;
}

// L1 norm of a per-constraint normalized shift: how much a paper moves the
// baseline in total.
inline double influence(const ShiftVector& shift) {
  if (shift.kind != ShiftKind::normalized_multi)
    throw ValidationError("influence is defined on normalized_multi shift vectors");
  double total = 0.0;
  for (double v : shift.values) total += std::abs(v);
  return total;
}

}  // namespace vizrec
