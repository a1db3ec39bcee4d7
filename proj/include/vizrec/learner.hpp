#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "vizrec/evaluate.hpp"
#include "vizrec/rules.hpp"
#include "vizrec/spec_model.hpp"

namespace vizrec {

struct TrainConfig {
  double margin = 1.0;
  double regularization = 1e-3;
  double learning_rate = 3e-3;
  int epochs = 2000;
  unsigned int seed = 1;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct WeightModel {
  std::vector<std::string> constraint_names;  // soft layout, file order
  std::vector<double> weights;
  std::size_t pair_count = 0;
  TrainConfig config;

  double weight_of(const std::string& name) const {
    for (std::size_t i = 0; i < constraint_names.size(); ++i)
      if (constraint_names[i] == name) return weights[i];
    throw ValidationError("model has no constraint named '" + name + "'");
  }

  double max_abs_weight() const {
    double m = 0.0;
    for (double w : weights) m = std::max(m, std::abs(w));
    return m;
  }

  friend bool operator==(const WeightModel&, const WeightModel&) = default;
};

inline void check_layout(const WeightModel& model, const ConstraintSet& set) {
  if (model.constraint_names != set.soft_names())
    throw ValidationError(
        "weight model layout does not match the rule file's soft constraints");
}

// Ranking loss over pairwise feature deltas d = featurize(neg) - featurize(pos):
//
//   L(w) = sum_p [ sqh(margin - w.d_p) + sqh(margin + w.(-d_p)) ] + reg * |w|^2
//
// with sqh(z) = max(0, z)^2. Each pair enters twice (the sample and its
// label-mirrored copy), so a pair and its swapped counterpart contribute
// exactly opposite gradients while the margin stays inside the band, which is
// what makes redundant/conflicting corpora cancel instead of drifting.
// Optimized by deterministic full-batch gradient descent from zero weights;
// cfg.seed fixes the pair iteration order (and with it the floating-point
// summation order).
inline WeightModel train(const std::vector<RankedPair>& pairs,
                         const ConstraintSet& set, const TrainConfig& cfg = {}) {
  if (pairs.empty()) throw ValidationError("train: no pairs");
  if (cfg.epochs < 1) throw ValidationError("train: epochs < 1");
  if (cfg.margin <= 0) throw ValidationError("train: margin must be positive");
  if (cfg.regularization < 0 || cfg.learning_rate <= 0)
    throw ValidationError("train: bad hyperparameters");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].significant)
      throw ValidationError("train: pair " + std::to_string(i) +
                            " is not statistically significant");
    auto vpos = check_hard(pairs[i].positive, set);
    auto vneg = check_hard(pairs[i].negative, set);
    if (!vpos.empty() || !vneg.empty())
      throw ValidationError("train: pair " + std::to_string(i) +
                            " violates hard constraint '" +
                            (vpos.empty() ? vneg.front() : vpos.front()) + "'");
  }

  const std::size_t dim = set.soft.size();
  std::vector<std::vector<double>> deltas;
  deltas.reserve(pairs.size());
  for (const auto& p : pairs) deltas.push_back(feature_delta(p, set));

  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> w(dim, 0.0), grad(dim, 0.0);
  const double shrink = 1.0 - 2.0 * cfg.learning_rate * cfg.regularization;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t idx : order) {
      const auto& d = deltas[idx];
      double x = 0.0;
      for (std::size_t i = 0; i < dim; ++i) x += w[i] * d[i];
      double a = cfg.margin - x;
      if (a > 0)
        for (std::size_t i = 0; i < dim; ++i) grad[i] += a * d[i];
    }
    for (std::size_t i = 0; i < dim; ++i)
      w[i] = w[i] * shrink + 4.0 * cfg.learning_rate * grad[i];
  }

  WeightModel model;
  model.constraint_names = set.soft_names();
  model.weights = std::move(w);
  model.pair_count = pairs.size();
  model.config = cfg;
  return model;
}

// cost(negative) - cost(positive); positive means the model agrees with the
// study outcome.
inline double rank_margin(const WeightModel& model, const RankedPair& pair,
                          const ConstraintSet& set) {
  check_layout(model, set);
  auto d = feature_delta(pair, set);
  double x = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) x += model.weights[i] * d[i];
  return x;
}

inline double agreement_rate(const WeightModel& model,
                             const std::vector<RankedPair>& pairs,
                             const ConstraintSet& set) {
  if (pairs.empty()) throw ValidationError("agreement_rate: no pairs");
  check_layout(model, set);
  std::size_t agree = 0;
  for (const auto& p : pairs)
    if (rank_margin(model, p, set) > 0) ++agree;
  return static_cast<double>(agree) / static_cast<double>(pairs.size());
}

inline ojson to_json(const WeightModel& model) {
  ojson j;
  j["schema_version"] = "1";
  ojson weights = ojson::object();
  for (std::size_t i = 0; i < model.constraint_names.size(); ++i)
    weights[model.constraint_names[i]] = model.weights[i];
  j["weights"] = std::move(weights);
  ojson meta;
  meta["pair_count"] = model.pair_count;
  meta["seed"] = model.config.seed;
  meta["margin"] = model.config.margin;
  meta["regularization"] = model.config.regularization;
  meta["learning_rate"] = model.config.learning_rate;
  meta["epochs"] = model.config.epochs;
  j["meta"] = std::move(meta);
  return j;
}

inline std::string serialize_model(const WeightModel& model) {
  return to_json(model).dump(2) + "\n";
}

inline WeightModel parse_model(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_object())
    throw ParseError("model: expected object with 'weights'");
  WeightModel m;
  for (const auto& [name, value] : j["weights"].items()) {
    if (!value.is_number()) throw ParseError("model.weights." + name + ": expected number");
    m.constraint_names.push_back(name);
    m.weights.push_back(value.get<double>());
  }
  if (j.contains("meta")) {
    const ojson& meta = j["meta"];
    if (meta.contains("pair_count")) m.pair_count = meta["pair_count"].get<std::size_t>();
    if (meta.contains("seed")) m.config.seed = meta["seed"].get<unsigned int>();
    if (meta.contains("margin")) m.config.margin = meta["margin"].get<double>();
    if (meta.contains("regularization"))
      m.config.regularization = meta["regularization"].get<double>();
    if (meta.contains("learning_rate"))
      m.config.learning_rate = meta["learning_rate"].get<double>();
    if (meta.contains("epochs")) m.config.epochs = meta["epochs"].get<int>();
  }
  return m;
}

// Model holding the rule file's hand-assigned default weights; used as the
// ranking model when no trained model is supplied.
inline WeightModel default_weight_model(const ConstraintSet& set) {
  WeightModel m;
  m.constraint_names = set.soft_names();
  m.weights = set.default_weights();
  return m;
}

}  // namespace vizrec
