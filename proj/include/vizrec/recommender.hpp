#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "vizrec/evaluate.hpp"
#include "vizrec/learner.hpp"
#include "vizrec/spec_model.hpp"
#include "vizrec/stats.hpp"

namespace vizrec {

struct DatasetSchema {
  std::string name;
  long long row_count = 0;
  std::vector<FieldDef> fields;

  const FieldDef& field(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return f;
    throw ValidationError("schema '" + this->name + "' has no field named '" +
                          name + "'");
  }
};

inline DatasetSchema parse_schema(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schema JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("schema: expected object");
  DatasetSchema s;
  s.name = detail::require_string(j, "name", "schema");
  const ojson& rows = detail::require(j, "row_count", "schema");
  if (!rows.is_number_integer()) throw ParseError("schema.row_count: expected integer");
  s.row_count = rows.get<long long>();
  if (s.row_count < 0) throw ValidationError("schema: negative row_count");
  const ojson& fields = detail::require(j, "fields", "schema");
  if (!fields.is_array() || fields.empty())
    throw ParseError("schema.fields: expected non-empty array");
  for (std::size_t i = 0; i < fields.size(); ++i)
    s.fields.push_back(
        field_from_json(fields[i], "schema.fields[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < s.fields.size(); ++i)
    for (std::size_t k = i + 1; k < s.fields.size(); ++k)
      if (s.fields[i].name == s.fields[k].name)
        throw ValidationError("schema: duplicate field '" + s.fields[i].name + "'");
  return s;
}

inline ojson to_json(const DatasetSchema& s) {
  ojson j;
  j["name"] = s.name;
  j["row_count"] = s.row_count;
  ojson fields = ojson::array();
  for (const auto& f : s.fields) fields.push_back(to_json(f));
  j["fields"] = std::move(fields);
  return j;
}

struct Query {
  std::vector<std::string> field_names;
  Task task = Task::value;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Recommendation {
  VizSpec spec;
  double cost = 0.0;
  int rank = 0;
};

namespace detail {

inline std::vector<ScaleType> scale_options(const FieldDef& f) {
  switch (f.field_type) {
    case FieldType::number: {
      std::vector<ScaleType> opts = {ScaleType::linear};
      if (f.min_value && *f.min_value > 0) opts.push_back(ScaleType::log);
      return opts;
    }
    case FieldType::datetime: return {ScaleType::linear};
    case FieldType::string: return {ScaleType::ordinal, ScaleType::categorical};
    case FieldType::boolean: return {ScaleType::categorical};
  }
  return {ScaleType::linear};
}

}  // namespace detail

// Design space for a query: every assignment of the query fields to distinct
// data channels (x, y, color, size, shape), every mark, the per-type scale
// choices, at most one mean-aggregated number encoding, and for single-field
// queries an optional count encoding on the free position channel. Hard
// violations are filtered out; the result is ordered by canonical
// serialization.
inline std::vector<VizSpec> enumerate_space(const DatasetSchema& schema,
                                            const Query& query,
                                            const ConstraintSet& set) {
  if (query.field_names.empty())
    throw ValidationError("enumerate_space: query has no fields");
  if (query.field_names.size() > 3)
    throw ValidationError("enumerate_space: at most 3 query fields supported");
  std::vector<const FieldDef*> fields;
  for (const auto& name : query.field_names) {
    fields.push_back(&schema.field(name));
    for (std::size_t i = 0; i + 1 < fields.size(); ++i)
      if (fields[i]->name == name)
        throw ValidationError("enumerate_space: duplicate query field '" + name + "'");
  }

  static constexpr Channel kDataChannels[] = {Channel::x, Channel::y, Channel::color,
                                              Channel::size, Channel::shape};
  static constexpr Mark kAllMarks[] = {Mark::bar, Mark::line, Mark::point,
                                       Mark::tick, Mark::area, Mark::rect};
  const std::size_t nf = fields.size();

  std::vector<std::pair<std::string, VizSpec>> keyed;
  std::vector<int> channel_idx(nf, 0);

  auto emit_assignment = [&](const std::vector<int>& chans) {
    // Scale choices per field, then aggregate placement, then mark.
    std::vector<std::vector<ScaleType>> scales;
    for (const auto* f : fields) scales.push_back(detail::scale_options(*f));
    std::vector<std::size_t> scale_idx(nf, 0);
    while (true) {
      // agg = -1: no aggregation; agg = i: mean over field i (number only).
      for (int agg = -1; agg < static_cast<int>(nf); ++agg) {
        if (agg >= 0 && (fields[agg]->field_type != FieldType::number ||
                         !is_continuous(scales[agg][scale_idx[agg]])))
          continue;
        for (int count_pos = 0; count_pos < 2; ++count_pos) {
          if (count_pos == 1 && nf != 1) continue;
          for (Mark mark : kAllMarks) {
            VizSpec s;
            s.mark = mark;
            s.task = query.task;
            bool position = false;
            for (std::size_t i = 0; i < nf; ++i) {
              Encoding e;
              e.channel = kDataChannels[chans[i]];
              e.field = *fields[i];
              e.scale_type = scales[i][scale_idx[i]];
              e.aggregate = static_cast<int>(i) == agg ? Aggregate::mean
                                                       : Aggregate::none;
              s.encodings.push_back(std::move(e));
              if (is_position(kDataChannels[chans[i]])) position = true;
            }
            if (count_pos == 1) {
              Channel free = s.encodings[0].channel == Channel::x ? Channel::y
                                                                  : Channel::x;
              s.encodings.push_back(
                  {free, std::nullopt, ScaleType::linear, Aggregate::count, false});
              position = true;
            }
            if (!position) continue;
            if (!hard_valid(s, set)) continue;
            s = canonicalize(s);
            keyed.emplace_back(canonical_json(s), std::move(s));
          }
        }
      }
      // next scale combination
      std::size_t i = 0;
      for (; i < nf; ++i) {
        if (++scale_idx[i] < scales[i].size()) break;
        scale_idx[i] = 0;
      }
      if (i == nf) break;
    }
  };

  // All injections of fields into data channels.
  std::vector<int> chans(nf, 0);
  auto distinct = [&](const std::vector<int>& c) {
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (c[i] == c[j]) return false;
    return true;
  };
  while (true) {
    if (distinct(chans)) emit_assignment(chans);
    std::size_t i = 0;
    for (; i < nf; ++i) {
      if (++chans[i] < 5) break;
      chans[i] = 0;
    }
    if (i == nf) break;
  }

  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  std::vector<VizSpec> out;
  out.reserve(keyed.size());
  for (auto& [key, spec] : keyed) out.push_back(std::move(spec));
  return out;
}

// Top-k by ascending cost; exact cost ties fall back to canonical
// serialization order, so the result is a prefix-stable total order.
inline std::vector<Recommendation> recommend(const DatasetSchema& schema,
                                             const Query& query,
                                             const ConstraintSet& set,
                                             const WeightModel& model,
                                             std::size_t k) {
  if (k < 1) throw ValidationError("recommend: k must be >= 1");
  check_layout(model, set);
  auto specs = enumerate_space(schema, query, set);
  struct Row {
    double cost;
    std::string key;
    const VizSpec* spec;
  };
  std::vector<Row> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs)
    rows.push_back({cost(featurize(s, set), model.weights), canonical_json(s), &s});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.key < b.key;
  });
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < rows.size() && i < k; ++i)
    out.push_back({*rows[i].spec, rows[i].cost, static_cast<int>(i + 1)});
  return out;
}

// Fractional ranks of the candidates under a model; cost ties share averaged
// ranks, e.g. costs [2, 2, 5] -> ranks [1.5, 1.5, 3].
inline std::vector<double> rerank(const std::vector<VizSpec>& candidates,
                                  const ConstraintSet& set,
                                  const WeightModel& model) {
  check_layout(model, set);
  std::vector<double> costs;
  costs.reserve(candidates.size());
  for (const auto& s : candidates)
    costs.push_back(cost(featurize(s, set), model.weights));
  return fractional_ranks(costs);
}

// Field subsets of size 1..max_fields crossed with both tasks, in
// deterministic order: subset size, then field index lexicographic, then
// task (value before summary).
inline std::vector<Query> attribute_combinations(const DatasetSchema& schema,
                                                 std::size_t max_fields) {
  if (max_fields < 1 || max_fields > 3)
    throw ValidationError("attribute_combinations: max_fields must be 1..3");
  std::vector<Query> out;
  const std::size_t n = schema.fields.size();
  std::vector<std::size_t> idx;
  auto emit = [&]() {
    for (Task t : {Task::value, Task::summary}) {
      Query q;
      q.task = t;
      for (std::size_t i : idx) q.field_names.push_back(schema.fields[i].name);
      out.push_back(std::move(q));
    }
  };
  auto rec = [&](auto&& self, std::size_t start, std::size_t remaining) -> void {
    if (remaining == 0) {
      emit();
      return;
    }
    for (std::size_t i = start; i + remaining <= n; ++i) {
      idx.push_back(i);
      self(self, i + 1, remaining - 1);
      idx.pop_back();
    }
  };
  for (std::size_t size = 1; size <= max_fields && size <= n; ++size)
    rec(rec, 0, size);
  return out;
}

}  // namespace vizrec
