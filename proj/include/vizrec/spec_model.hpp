#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vizrec/common.hpp"

namespace vizrec {

using ojson = nlohmann::ordered_json;

enum class FieldType { number, string, datetime, boolean };
enum class Channel { x, y, color, size, shape, facet_x, facet_y };
enum class ScaleType { linear, log, ordinal, categorical };
enum class Aggregate { none, count, mean, sum, median };
enum class Mark { bar, line, point, tick, area, rect };
enum class Task { value, summary };

namespace detail {

template <typename E>
struct EnumEntry {
  E value;
  const char* name;
};

inline constexpr EnumEntry<FieldType> kFieldTypes[] = {
    {FieldType::number, "number"},
    {FieldType::string, "string"},
    {FieldType::datetime, "datetime"},
    {FieldType::boolean, "boolean"},
};
inline constexpr EnumEntry<Channel> kChannels[] = {
    {Channel::x, "x"},           {Channel::y, "y"},
    {Channel::color, "color"},   {Channel::size, "size"},
    {Channel::shape, "shape"},   {Channel::facet_x, "facet_x"},
    {Channel::facet_y, "facet_y"},
};
inline constexpr EnumEntry<ScaleType> kScaleTypes[] = {
    {ScaleType::linear, "linear"},
    {ScaleType::log, "log"},
    {ScaleType::ordinal, "ordinal"},
    {ScaleType::categorical, "categorical"},
};
inline constexpr EnumEntry<Aggregate> kAggregates[] = {
    {Aggregate::none, "none"},   {Aggregate::count, "count"},
    {Aggregate::mean, "mean"},   {Aggregate::sum, "sum"},
    {Aggregate::median, "median"},
};
inline constexpr EnumEntry<Mark> kMarks[] = {
    {Mark::bar, "bar"},   {Mark::line, "line"}, {Mark::point, "point"},
    {Mark::tick, "tick"}, {Mark::area, "area"}, {Mark::rect, "rect"},
};
inline constexpr EnumEntry<Task> kTasks[] = {
    {Task::value, "value"},
    {Task::summary, "summary"},
};

template <typename E, std::size_t N>
const char* enum_name(const EnumEntry<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  throw ValidationError("unmapped enum value");
}

template <typename E, std::size_t N>
E enum_parse(const EnumEntry<E> (&table)[N], std::string_view s,
             const char* what) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  throw ParseError(std::string("unknown ") + what + ": '" + std::string(s) + "'");
}

}  // namespace detail

inline const char* to_string(FieldType v) { return detail::enum_name(detail::kFieldTypes, v); }
inline const char* to_string(Channel v) { return detail::enum_name(detail::kChannels, v); }
inline const char* to_string(ScaleType v) { return detail::enum_name(detail::kScaleTypes, v); }
inline const char* to_string(Aggregate v) { return detail::enum_name(detail::kAggregates, v); }
inline const char* to_string(Mark v) { return detail::enum_name(detail::kMarks, v); }
inline const char* to_string(Task v) { return detail::enum_name(detail::kTasks, v); }

inline FieldType field_type_from(std::string_view s) { return detail::enum_parse(detail::kFieldTypes, s, "field_type"); }
inline Channel channel_from(std::string_view s) { return detail::enum_parse(detail::kChannels, s, "channel"); }
inline ScaleType scale_type_from(std::string_view s) { return detail::enum_parse(detail::kScaleTypes, s, "scale_type"); }
inline Aggregate aggregate_from(std::string_view s) { return detail::enum_parse(detail::kAggregates, s, "aggregate"); }
inline Mark mark_from(std::string_view s) { return detail::enum_parse(detail::kMarks, s, "mark"); }
inline Task task_from(std::string_view s) { return detail::enum_parse(detail::kTasks, s, "task"); }

inline bool is_continuous(ScaleType s) {
  return s == ScaleType::linear || s == ScaleType::log;
}
inline bool is_position(Channel c) { return c == Channel::x || c == Channel::y; }
inline bool is_facet(Channel c) {
  return c == Channel::facet_x || c == Channel::facet_y;
}

struct FieldDef {
  std::string name;
  FieldType field_type = FieldType::number;
  int cardinality = 1;
  std::optional<double> min_value;
  std::optional<double> max_value;
  // Present in dataset descriptions but invisible to the rule language.
  std::optional<double> entropy;

  friend bool operator==(const FieldDef&, const FieldDef&) = default;
};

struct Encoding {
  Channel channel = Channel::x;
  std::optional<FieldDef> field;
  ScaleType scale_type = ScaleType::linear;
  Aggregate aggregate = Aggregate::none;
  bool binned = false;

  friend bool operator==(const Encoding&, const Encoding&) = default;
};

struct VizSpec {
  Mark mark = Mark::point;
  Task task = Task::value;
  std::vector<Encoding> encodings;

  friend bool operator==(const VizSpec&, const VizSpec&) = default;
};

inline void validate(const FieldDef& f, const std::string& ctx) {
  if (f.name.empty()) throw ValidationError(ctx + ": field name empty");
  if (f.cardinality < 1) throw ValidationError(ctx + ": cardinality < 1");
  if (f.min_value && f.max_value && *f.min_value > *f.max_value)
    throw ValidationError(ctx + ": min_value > max_value");
  if (f.entropy && *f.entropy < 0)
    throw ValidationError(ctx + ": negative entropy");
}

inline void validate(const Encoding& e, const std::string& ctx) {
  if (!e.field) {
    if (e.aggregate != Aggregate::count)
      throw ValidationError(ctx + ": encoding without field requires aggregate=count");
  } else {
    validate(*e.field, ctx);
    if (e.aggregate == Aggregate::count)
      throw ValidationError(ctx + ": count aggregate carries no field");
    bool numeric_field = e.field->field_type == FieldType::number ||
                         e.field->field_type == FieldType::datetime;
    if (e.aggregate != Aggregate::none && e.field->field_type != FieldType::number)
      throw ValidationError(ctx + ": " + to_string(e.aggregate) +
                            " aggregate requires a number field");
    if (is_continuous(e.scale_type) && !numeric_field &&
        e.aggregate == Aggregate::none)
      throw ValidationError(ctx + ": continuous scale on non-numeric field");
    // A log scale over a non-positive domain stays representable; the shipped
    // hard constraint log_non_positive is what rejects it.
  }
  if (!is_continuous(e.scale_type) && !e.field)
    throw ValidationError(ctx + ": count aggregate requires a continuous scale");
}

inline void validate(const VizSpec& s, const std::string& ctx) {
  if (s.encodings.empty() || s.encodings.size() > 4)
    throw ValidationError(ctx + ": encoding count must be 1..4");
  bool has_position = false;
  for (std::size_t i = 0; i < s.encodings.size(); ++i) {
    validate(s.encodings[i], ctx + ".encodings[" + std::to_string(i) + "]");
    if (is_position(s.encodings[i].channel)) has_position = true;
    for (std::size_t j = i + 1; j < s.encodings.size(); ++j)
      if (s.encodings[i].channel == s.encodings[j].channel)
        throw ValidationError(ctx + ": duplicate channel " +
                              to_string(s.encodings[i].channel));
  }
  if (!has_position) throw ValidationError(ctx + ": no x or y encoding");
}

// Fixed channel order x, y, color, size, shape, facet_x, facet_y.
inline VizSpec canonicalize(VizSpec s) {
  std::sort(s.encodings.begin(), s.encodings.end(),
            [](const Encoding& a, const Encoding& b) {
              return static_cast<int>(a.channel) < static_cast<int>(b.channel);
            });
  return s;
}

inline ojson to_json(const FieldDef& f) {
  ojson j;
  j["name"] = f.name;
  j["field_type"] = to_string(f.field_type);
  j["cardinality"] = f.cardinality;
  if (f.min_value) j["min_value"] = *f.min_value;
  if (f.max_value) j["max_value"] = *f.max_value;
  if (f.entropy) j["entropy"] = *f.entropy;
  return j;
}

inline ojson to_json(const Encoding& e) {
  ojson j;
  j["channel"] = to_string(e.channel);
  j["field"] = e.field ? to_json(*e.field) : ojson(nullptr);
  j["scale_type"] = to_string(e.scale_type);
  j["aggregate"] = e.aggregate == Aggregate::none ? ojson(nullptr)
                                                  : ojson(to_string(e.aggregate));
  j["binned"] = e.binned;
  return j;
}

inline ojson to_json(const VizSpec& s) {
  ojson j;
  j["mark"] = to_string(s.mark);
  j["task"] = to_string(s.task);
  ojson encs = ojson::array();
  for (const auto& e : s.encodings) encs.push_back(to_json(e));
  j["encodings"] = std::move(encs);
  return j;
}

// Canonical serialization: compact JSON of the canonicalized spec. Used for
// dedup, deterministic ordering, and rank tie-breaking.
inline std::string canonical_json(const VizSpec& s) {
  return to_json(canonicalize(s)).dump();
}

namespace detail {

inline const ojson& require(const ojson& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(ctx + ": missing key '" + key + "'");
  return *it;
}

inline std::string require_string(const ojson& j, const char* key,
                                  const std::string& ctx) {
  const ojson& v = require(j, key, ctx);
  if (!v.is_string()) throw ParseError(ctx + "." + key + ": expected string");
  return v.get<std::string>();
}

}  // namespace detail

inline FieldDef field_from_json(const ojson& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected field object");
  FieldDef f;
  f.name = detail::require_string(j, "name", ctx);
  f.field_type = field_type_from(detail::require_string(j, "field_type", ctx));
  const ojson& card = detail::require(j, "cardinality", ctx);
  if (!card.is_number_integer())
    throw ParseError(ctx + ".cardinality: expected integer");
  f.cardinality = card.get<int>();
  if (j.contains("min_value")) f.min_value = j["min_value"].get<double>();
  if (j.contains("max_value")) f.max_value = j["max_value"].get<double>();
  if (j.contains("entropy")) f.entropy = j["entropy"].get<double>();
  validate(f, ctx);
  return f;
}

inline Encoding encoding_from_json(const ojson& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected encoding object");
  Encoding e;
  e.channel = channel_from(detail::require_string(j, "channel", ctx));
  const ojson& field = detail::require(j, "field", ctx);
  if (!field.is_null()) e.field = field_from_json(field, ctx + ".field");
  e.scale_type = scale_type_from(detail::require_string(j, "scale_type", ctx));
  const ojson& agg = detail::require(j, "aggregate", ctx);
  if (agg.is_null()) {
    e.aggregate = Aggregate::none;
  } else if (agg.is_string()) {
    e.aggregate = aggregate_from(agg.get<std::string>());
  } else {
    throw ParseError(ctx + ".aggregate: expected string or null");
  }
  const ojson& binned = detail::require(j, "binned", ctx);
  if (!binned.is_boolean()) throw ParseError(ctx + ".binned: expected bool");
  e.binned = binned.get<bool>();
  return e;
}

inline VizSpec spec_from_json(const ojson& j, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected spec object");
  VizSpec s;
  s.mark = mark_from(detail::require_string(j, "mark", ctx));
  s.task = task_from(detail::require_string(j, "task", ctx));
  const ojson& encs = detail::require(j, "encodings", ctx);
  if (!encs.is_array()) throw ParseError(ctx + ".encodings: expected array");
  for (std::size_t i = 0; i < encs.size(); ++i)
    s.encodings.push_back(
        encoding_from_json(encs[i], ctx + ".encodings[" + std::to_string(i) + "]"));
  validate(s, ctx);
  return canonicalize(s);
}

struct RankedPair {
  std::string paper_id;
  VizSpec positive;
  VizSpec negative;
  std::string task_label;
  std::string metric;
  bool significant = true;

  friend bool operator==(const RankedPair&, const RankedPair&) = default;
};

struct StudyCorpus {
  std::string schema_version = "1";
  std::map<std::string, std::vector<RankedPair>> papers;

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& [id, pairs] : papers) n += pairs.size();
    return n;
  }
};

inline StudyCorpus parse_corpus(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("corpus JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("corpus: expected top-level object");
  StudyCorpus corpus;
  corpus.schema_version = detail::require_string(j, "schema_version", "corpus");
  if (corpus.schema_version != "1")
    throw ValidationError("corpus: unsupported schema_version '" +
                          corpus.schema_version + "'");
  const ojson& papers = detail::require(j, "papers", "corpus");
  if (!papers.is_object()) throw ParseError("corpus.papers: expected object");
  for (const auto& [paper_id, pairs] : papers.items()) {
    if (!pairs.is_array())
      throw ParseError("papers." + paper_id + ": expected array of pairs");
    std::vector<RankedPair> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string ctx = "papers." + paper_id + "/pair " + std::to_string(i);
      const ojson& p = pairs[i];
      if (!p.is_object()) throw ParseError(ctx + ": expected object");
      RankedPair rp;
      rp.paper_id = paper_id;
      rp.positive = spec_from_json(detail::require(p, "positive", ctx), ctx + ".positive");
      rp.negative = spec_from_json(detail::require(p, "negative", ctx), ctx + ".negative");
      rp.task_label = detail::require_string(p, "task_label", ctx);
      rp.metric = detail::require_string(p, "metric", ctx);
      const ojson& sig = detail::require(p, "significant", ctx);
      if (!sig.is_boolean()) throw ParseError(ctx + ".significant: expected bool");
      rp.significant = sig.get<bool>();
      if (canonical_json(rp.positive) == canonical_json(rp.negative))
        throw ValidationError(ctx + ": positive and negative specs are identical");
      out.push_back(std::move(rp));
    }
    corpus.papers.emplace(paper_id, std::move(out));
  }
  return corpus;
}

inline ojson to_json(const StudyCorpus& corpus) {
  ojson j;
  j["schema_version"] = corpus.schema_version;
  ojson papers = ojson::object();
  for (const auto& [id, pairs] : corpus.papers) {
    ojson arr = ojson::array();
    for (const auto& p : pairs) {
      ojson jp;
      jp["positive"] = to_json(p.positive);
      jp["negative"] = to_json(p.negative);
      jp["task_label"] = p.task_label;
      jp["metric"] = p.metric;
      jp["significant"] = p.significant;
      arr.push_back(std::move(jp));
    }
    papers[id] = std::move(arr);
  }
  j["papers"] = std::move(papers);
  return j;
}

inline std::string serialize_corpus(const StudyCorpus& corpus) {
  return to_json(corpus).dump(2) + "\n";
}

// Pairs eligible for training: statistically significant ones only.
inline std::vector<RankedPair> training_pairs(const std::vector<RankedPair>& pairs) {
  std::vector<RankedPair> out;
  for (const auto& p : pairs)
    if (p.significant) out.push_back(p);
  return out;
}

inline std::vector<RankedPair> training_pairs(const StudyCorpus& corpus) {
  std::vector<RankedPair> out;
  for (const auto& [id, pairs] : corpus.papers)
    for (const auto& p : pairs)
      if (p.significant) out.push_back(p);
  return out;
}

}  // namespace vizrec
