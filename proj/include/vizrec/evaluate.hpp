#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vizrec/rules.hpp"
#include "vizrec/spec_model.hpp"

namespace vizrec {

// Violation counts aligned to ConstraintSet::soft, in file order.
struct FeatureVector {
  std::vector<int> counts;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace detail {

struct SpecCtx {
  int mark;
  int task;
  double encoding_count;
  bool has_facet;
  int x_kind;
  int y_kind;
};

struct EncCtx {
  int channel;
  bool has_field;
  int field_type;
  int scale_type;
  int aggregate;
  bool binned;
  bool has_cardinality;
  double cardinality;
  bool has_min;
  double field_min;
  bool has_max;
  double field_max;
};

inline int scale_kind_of(const VizSpec& s, Channel ch) {
  for (const auto& e : s.encodings)
    if (e.channel == ch)
      return static_cast<int>(is_continuous(e.scale_type) ? ScaleKind::continuous
                                                          : ScaleKind::discrete);
  return static_cast<int>(ScaleKind::none);
}

inline SpecCtx make_spec_ctx(const VizSpec& s) {
  SpecCtx ctx;
  ctx.mark = static_cast<int>(s.mark);
  ctx.task = static_cast<int>(s.task);
  ctx.encoding_count = static_cast<double>(s.encodings.size());
  ctx.has_facet = false;
  for (const auto& e : s.encodings)
    if (is_facet(e.channel)) ctx.has_facet = true;
  ctx.x_kind = scale_kind_of(s, Channel::x);
  ctx.y_kind = scale_kind_of(s, Channel::y);
  return ctx;
}

inline EncCtx make_enc_ctx(const Encoding& e) {
  EncCtx ctx{};
  ctx.channel = static_cast<int>(e.channel);
  ctx.has_field = e.field.has_value();
  ctx.field_type = ctx.has_field ? static_cast<int>(e.field->field_type) : -1;
  ctx.scale_type = static_cast<int>(e.scale_type);
  ctx.aggregate = static_cast<int>(e.aggregate);
  ctx.binned = e.binned;
  ctx.has_cardinality = ctx.has_field;
  ctx.cardinality = ctx.has_field ? static_cast<double>(e.field->cardinality) : 0;
  ctx.has_min = ctx.has_field && e.field->min_value.has_value();
  ctx.field_min = ctx.has_min ? *e.field->min_value : 0;
  ctx.has_max = ctx.has_field && e.field->max_value.has_value();
  ctx.field_max = ctx.has_max ? *e.field->max_value : 0;
  return ctx;
}

inline bool cmp_num(double lhs, CmpOp op, double rhs) {
  switch (op) {
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
  }
  return false;
}

inline bool cmp_code(int lhs, CmpOp op, int rhs) {
  return op == CmpOp::eq ? lhs == rhs : lhs != rhs;
}

// Conditions over attributes absent on the instance are false regardless of
// the operator, so 'field_min <= 0' cannot match a count encoding.
inline bool eval_condition(const Condition& c, const SpecCtx& spec,
                           const EncCtx* enc) {
  switch (c.attr) {
    case AttrKey::mark: return cmp_code(spec.mark, c.op, c.enum_code);
    case AttrKey::task: return cmp_code(spec.task, c.op, c.enum_code);
    case AttrKey::encoding_count:
      return cmp_num(spec.encoding_count, c.op, c.number);
    case AttrKey::has_facet:
      return cmp_code(spec.has_facet ? 1 : 0, c.op, c.boolean ? 1 : 0);
    case AttrKey::x_scale_kind: return cmp_code(spec.x_kind, c.op, c.enum_code);
    case AttrKey::y_scale_kind: return cmp_code(spec.y_kind, c.op, c.enum_code);
    case AttrKey::channel: return enc && cmp_code(enc->channel, c.op, c.enum_code);
    case AttrKey::field_type:
      return enc && enc->has_field && cmp_code(enc->field_type, c.op, c.enum_code);
    case AttrKey::scale_type:
      return enc && cmp_code(enc->scale_type, c.op, c.enum_code);
    case AttrKey::aggregate:
      return enc && cmp_code(enc->aggregate, c.op, c.enum_code);
    case AttrKey::binned:
      return enc && cmp_code(enc->binned ? 1 : 0, c.op, c.boolean ? 1 : 0);
    case AttrKey::cardinality:
      return enc && enc->has_cardinality && cmp_num(enc->cardinality, c.op, c.number);
    case AttrKey::field_min:
      return enc && enc->has_min && cmp_num(enc->field_min, c.op, c.number);
    case AttrKey::field_max:
      return enc && enc->has_max && cmp_num(enc->field_max, c.op, c.number);
  }
  return false;
}

inline int count_matches(const ConstraintDef& def, const SpecCtx& spec,
                         const std::vector<EncCtx>& encs) {
  if (def.scope == Scope::spec) {
    for (const auto& c : def.conditions)
      if (!eval_condition(c, spec, nullptr)) return 0;
    return 1;
  }
  int n = 0;
  for (const auto& e : encs) {
    bool all = true;
    for (const auto& c : def.conditions)
      if (!eval_condition(c, spec, &e)) { all = false; break; }
    if (all) ++n;
  }
  return n;
}

}  // namespace detail

// Names of violated hard constraints, in rule-file order.
inline std::vector<std::string> check_hard(const VizSpec& spec,
                                           const ConstraintSet& set) {
  auto sctx = detail::make_spec_ctx(spec);
  std::vector<detail::EncCtx> encs;
  encs.reserve(spec.encodings.size());
  for (const auto& e : spec.encodings) encs.push_back(detail::make_enc_ctx(e));
  std::vector<std::string> out;
  for (const auto& def : set.hard)
    if (detail::count_matches(def, sctx, encs) > 0) out.push_back(def.name);
  return out;
}

inline bool hard_valid(const VizSpec& spec, const ConstraintSet& set) {
  return check_hard(spec, set).empty();
}

inline FeatureVector featurize(const VizSpec& spec, const ConstraintSet& set) {
  auto sctx = detail::make_spec_ctx(spec);
  std::vector<detail::EncCtx> encs;
  encs.reserve(spec.encodings.size());
  for (const auto& e : spec.encodings) encs.push_back(detail::make_enc_ctx(e));
  FeatureVector fv;
  fv.counts.reserve(set.soft.size());
  for (const auto& def : set.soft)
    fv.counts.push_back(detail::count_matches(def, sctx, encs));
  return fv;
}

// Weighted preference cost: sum of weight_i * count_i over soft constraints.
inline double cost(const FeatureVector& fv, const std::vector<double>& weights) {
  if (fv.counts.size() != weights.size())
    throw ValidationError("cost: feature vector length " +
                          std::to_string(fv.counts.size()) +
                          " does not match weight vector length " +
                          std::to_string(weights.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    total += weights[i] * fv.counts[i];
  return total;
}

// featurize(negative) - featurize(positive); training drives w . delta > 0
// so that dispreferred specs cost more.
inline std::vector<double> feature_delta(const RankedPair& pair,
                                         const ConstraintSet& set) {
  FeatureVector pos = featurize(pair.positive, set);
  FeatureVector neg = featurize(pair.negative, set);
  std::vector<double> d(pos.counts.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<double>(neg.counts[i] - pos.counts[i]);
  return d;
}

}  // namespace vizrec
