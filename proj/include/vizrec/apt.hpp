#pragma once

#include <map>
#include <string>
#include <vector>

#include "vizrec/spec_model.hpp"

namespace vizrec {

// Channel-effectiveness rankings in decreasing effectiveness order, one per
// perceptual data class. The defaults follow the classic ranking tables;
// they are plain data and can be overridden from a JSON file.

enum class AptDataType { quantitative, ordinal, nominal };

inline const char* to_string(AptDataType t) {
  switch (t) {
    case AptDataType::quantitative: return "quantitative";
    case AptDataType::ordinal: return "ordinal";
    case AptDataType::nominal: return "nominal";
  }
  throw ValidationError("unmapped apt data type");
}

inline AptDataType apt_data_type_from(std::string_view s) {
  if (s == "quantitative") return AptDataType::quantitative;
  if (s == "ordinal") return AptDataType::ordinal;
  if (s == "nominal") return AptDataType::nominal;
  throw ParseError("unknown data type: '" + std::string(s) + "'");
}

struct AptTable {
  std::map<AptDataType, std::vector<Channel>> rankings;

  friend bool operator==(const AptTable&, const AptTable&) = default;
};

inline AptTable default_apt_table() {
  AptTable t;
  t.rankings[AptDataType::quantitative] = {Channel::x, Channel::y, Channel::size,
                                           Channel::color};
  t.rankings[AptDataType::ordinal] = {Channel::x, Channel::y, Channel::size,
                                      Channel::color};
  t.rankings[AptDataType::nominal] = {Channel::x, Channel::y, Channel::color,
                                      Channel::shape};
  return t;
}

inline AptTable apt_table_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("apt table JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("apt table: expected object");
  AptTable t;
  for (const auto& [key, arr] : j.items()) {
    AptDataType dt = apt_data_type_from(key);
    if (!arr.is_array()) throw ParseError("apt table." + key + ": expected array");
    std::vector<Channel> ranking;
    for (const auto& ch : arr) {
      if (!ch.is_string()) throw ParseError("apt table." + key + ": expected channel names");
      Channel c = channel_from(ch.get<std::string>());
      if (is_facet(c))
        throw ValidationError("apt table." + key + ": facet channels are not rankable");
      for (Channel prev : ranking)
        if (prev == c)
          throw ValidationError("apt table." + key + ": duplicate channel " +
                                to_string(c));
      ranking.push_back(c);
    }
    t.rankings[dt] = std::move(ranking);
  }
  return t;
}

namespace detail {

inline FieldDef apt_field(AptDataType t) {
  FieldDef f;
  switch (t) {
    case AptDataType::quantitative:
      f = {"q_field", FieldType::number, 20, 0.0, 100.0, {}};
      break;
    case AptDataType::ordinal:
      f = {"o_field", FieldType::string, 5, {}, {}, {}};
      break;
    case AptDataType::nominal:
      f = {"n_field", FieldType::string, 5, {}, {}, {}};
      break;
  }
  return f;
}

inline ScaleType apt_scale(AptDataType t) {
  switch (t) {
    case AptDataType::quantitative: return ScaleType::linear;
    case AptDataType::ordinal: return ScaleType::ordinal;
    case AptDataType::nominal: return ScaleType::categorical;
  }
  return ScaleType::linear;
}

}  // namespace detail

// One ranked pair per adjacent step of each requested ranking. The two specs
// of a pair differ only in the channel of the ranked encoding. A spec must
// occupy x or y, so steps comparing two off-position channels (or one
// position and one off-position channel) share a fixed count-on-position
// anchor encoding, identical on both sides.
inline std::vector<RankedPair> translate_apt_baseline(
    const std::vector<AptDataType>& types,
    const AptTable& table = default_apt_table()) {
  if (types.empty())
    throw ValidationError("translate_apt_baseline: no data types given");
  std::vector<AptDataType> unique;
  for (AptDataType t : types) {
    bool seen = false;
    for (AptDataType u : unique) seen = seen || u == t;
    if (!seen) unique.push_back(t);
  }

  std::vector<RankedPair> out;
  for (AptDataType t : unique) {
    auto it = table.rankings.find(t);
    if (it == table.rankings.end())
      throw ValidationError(std::string("translate_apt_baseline: no ranking for ") +
                            to_string(t));
    const auto& ranking = it->second;
    FieldDef field = detail::apt_field(t);
    ScaleType scale = detail::apt_scale(t);
    for (std::size_t i = 0; i + 1 < ranking.size(); ++i) {
      Channel hi = ranking[i], lo = ranking[i + 1];
      bool anchored = !(is_position(hi) && is_position(lo));
      Channel anchor = Channel::x;
      if (anchored && (hi == Channel::x || lo == Channel::x)) anchor = Channel::y;

      auto build = [&](Channel ch) {
        VizSpec s;
        s.mark = Mark::bar;
        s.task = Task::value;
        if (anchored)
          s.encodings.push_back(
              {anchor, std::nullopt, ScaleType::linear, Aggregate::count, false});
        s.encodings.push_back({ch, field, scale, Aggregate::none, false});
        s = canonicalize(s);
        validate(s, "apt pair");
        return s;
      };

      RankedPair p;
      p.paper_id = "apt";
      p.positive = build(hi);
      p.negative = build(lo);
      p.task_label = "channel_effectiveness";
      p.metric = std::string(to_string(t)) + ":" + to_string(hi) + ">" +
                 to_string(lo);
      p.significant = true;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace vizrec
