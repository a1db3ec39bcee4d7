#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "vizrec/common.hpp"
#include "vizrec/spec_model.hpp"

namespace vizrec {

// Rule file grammar, one rule per line ('#' starts a comment):
//
//   <kind> <name> [<weight>] :- <scope>: <attr> <op> <value> (, <attr> <op> <value>)*
//
//   kind  := hard | soft          (weight allowed on soft only, default 1)
//   scope := spec | encoding
//   op    := = | != | < | <= | > | >=   (ordering ops on numeric attributes only)
//
// An encoding-scoped rule counts the encodings satisfying every condition; a
// spec-scoped rule counts 1 or 0. Conditions over attributes that are absent
// for an instance (e.g. field_type on a count encoding) evaluate to false.

enum class ConstraintKind { hard, soft };
enum class Scope { spec, encoding };
enum class CmpOp { eq, ne, lt, le, gt, ge };

// Derived per-spec attribute: the kind of scale occupying x (or y).
enum class ScaleKind { continuous, discrete, none };

enum class AttrKey {
  mark,
  task,
  channel,
  field_type,
  scale_type,
  aggregate,
  binned,
  cardinality,
  field_min,
  field_max,
  encoding_count,
  has_facet,
  x_scale_kind,
  y_scale_kind,
};

enum class AttrValueType {
  mark_enum,
  task_enum,
  channel_enum,
  field_type_enum,
  scale_type_enum,
  aggregate_enum,
  scale_kind_enum,
  boolean,
  numeric,
};

namespace detail {

struct AttrInfo {
  AttrKey key;
  const char* name;
  AttrValueType type;
  bool encoding_only;
};

inline constexpr AttrInfo kAttrs[] = {
    {AttrKey::mark, "mark", AttrValueType::mark_enum, false},
    {AttrKey::task, "task", AttrValueType::task_enum, false},
    {AttrKey::channel, "channel", AttrValueType::channel_enum, true},
    {AttrKey::field_type, "field_type", AttrValueType::field_type_enum, true},
    {AttrKey::scale_type, "scale_type", AttrValueType::scale_type_enum, true},
    {AttrKey::aggregate, "aggregate", AttrValueType::aggregate_enum, true},
    {AttrKey::binned, "binned", AttrValueType::boolean, true},
    {AttrKey::cardinality, "cardinality", AttrValueType::numeric, true},
    {AttrKey::field_min, "field_min", AttrValueType::numeric, true},
    {AttrKey::field_max, "field_max", AttrValueType::numeric, true},
    {AttrKey::encoding_count, "encoding_count", AttrValueType::numeric, false},
    {AttrKey::has_facet, "has_facet", AttrValueType::boolean, false},
    {AttrKey::x_scale_kind, "x_scale_kind", AttrValueType::scale_kind_enum, false},
    {AttrKey::y_scale_kind, "y_scale_kind", AttrValueType::scale_kind_enum, false},
};

inline const AttrInfo& attr_info(AttrKey key) {
  for (const auto& a : kAttrs)
    if (a.key == key) return a;
  throw ValidationError("unmapped attribute key");
}

inline const char* op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  throw ValidationError("unmapped op");
}

}  // namespace detail

struct Condition {
  AttrKey attr = AttrKey::mark;
  CmpOp op = CmpOp::eq;
  // Exactly one of these is meaningful, per the attribute's value type.
  double number = 0.0;
  bool boolean = false;
  int enum_code = 0;
  std::string token;  // value spelling, kept for serialization

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct ConstraintDef {
  ConstraintKind kind = ConstraintKind::soft;
  std::string name;
  double default_weight = 1.0;  // soft rules only
  Scope scope = Scope::encoding;
  std::vector<Condition> conditions;

  friend bool operator==(const ConstraintDef&, const ConstraintDef&) = default;
};

struct ConstraintSet {
  std::vector<ConstraintDef> hard;  // file order
  std::vector<ConstraintDef> soft;  // file order; featurization layout

  std::vector<std::string> soft_names() const {
    std::vector<std::string> out;
    out.reserve(soft.size());
    for (const auto& c : soft) out.push_back(c.name);
    return out;
  }

  // Index into the soft layout, or -1.
  int soft_index(const std::string& name) const {
    for (std::size_t i = 0; i < soft.size(); ++i)
      if (soft[i].name == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<double> default_weights() const {
    std::vector<double> w;
    w.reserve(soft.size());
    for (const auto& c : soft) w.push_back(c.default_weight);
    return w;
  }

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline CmpOp parse_op(const std::string& s, const std::string& ctx) {
  if (s == "=") return CmpOp::eq;
  if (s == "!=") return CmpOp::ne;
  if (s == "<") return CmpOp::lt;
  if (s == "<=") return CmpOp::le;
  if (s == ">") return CmpOp::gt;
  if (s == ">=") return CmpOp::ge;
  throw ParseError(ctx + ": unknown operator '" + s + "'");
}

inline int parse_enum_code(AttrValueType type, const std::string& tok,
                           const std::string& ctx) {
  try {
    switch (type) {
      case AttrValueType::mark_enum: return static_cast<int>(mark_from(tok));
      case AttrValueType::task_enum: return static_cast<int>(task_from(tok));
      case AttrValueType::channel_enum: return static_cast<int>(channel_from(tok));
      case AttrValueType::field_type_enum: return static_cast<int>(field_type_from(tok));
      case AttrValueType::scale_type_enum: return static_cast<int>(scale_type_from(tok));
      case AttrValueType::aggregate_enum: return static_cast<int>(aggregate_from(tok));
      case AttrValueType::scale_kind_enum:
        if (tok == "continuous") return static_cast<int>(ScaleKind::continuous);
        if (tok == "discrete") return static_cast<int>(ScaleKind::discrete);
        if (tok == "none") return static_cast<int>(ScaleKind::none);
        throw ParseError("unknown scale kind: '" + tok + "'");
      default: break;
    }
  } catch (const ParseError& e) {
    throw ParseError(ctx + ": " + e.what());
  }
  throw ParseError(ctx + ": internal enum type");
}

inline Condition parse_condition(const std::string& text, Scope scope,
                                 const std::string& ctx) {
  auto tokens = split_ws(text);
  if (tokens.size() != 3)
    throw ParseError(ctx + ": condition must be '<attr> <op> <value>', got '" +
                     trim(text) + "'");
  Condition c;
  const AttrInfo* info = nullptr;
  for (const auto& a : kAttrs)
    if (tokens[0] == a.name) info = &a;
  if (!info) throw ParseError(ctx + ": unknown attribute '" + tokens[0] + "'");
  c.attr = info->key;
  if (info->encoding_only && scope == Scope::spec)
    throw ParseError(ctx + ": attribute '" + tokens[0] +
                     "' is per-encoding and cannot appear in spec scope");
  c.op = parse_op(tokens[1], ctx);
  c.token = tokens[2];
  bool ordering = c.op != CmpOp::eq && c.op != CmpOp::ne;
  switch (info->type) {
    case AttrValueType::numeric: {
      char* end = nullptr;
      c.number = std::strtod(tokens[2].c_str(), &end);
      if (end == tokens[2].c_str() || *end != '\0')
        throw ParseError(ctx + ": attribute '" + tokens[0] +
                         "' expects a numeric value, got '" + tokens[2] + "'");
      break;
    }
    case AttrValueType::boolean:
      if (ordering)
        throw ParseError(ctx + ": ordering operator on boolean attribute '" +
                         tokens[0] + "'");
      if (tokens[2] == "true") c.boolean = true;
      else if (tokens[2] == "false") c.boolean = false;
      else
        throw ParseError(ctx + ": attribute '" + tokens[0] +
                         "' expects true/false, got '" + tokens[2] + "'");
      break;
    default:
      if (ordering)
        throw ParseError(ctx + ": ordering operator on enum attribute '" +
                         tokens[0] + "'");
      c.enum_code = parse_enum_code(info->type, tokens[2], ctx);
      break;
  }
  return c;
}

inline std::string format_weight(double w) {
  char buf[64];
  if (w == static_cast<long long>(w) && std::abs(w) < 1e15)
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(w));
  else
    std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace detail

inline ConstraintSet parse_rules(const std::string& text) {
  ConstraintSet set;
  std::map<std::string, int> seen;  // name -> line
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                                 : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string ctx = "rules line " + std::to_string(line_no);

    auto sep = line.find(":-");
    if (sep == std::string::npos)
      throw ParseError(ctx + ": missing ':-'");
    auto head = detail::split_ws(line.substr(0, sep));
    std::string body = trim(line.substr(sep + 2));

    ConstraintDef def;
    if (head.size() < 2 || head.size() > 3)
      throw ParseError(ctx + ": head must be '<kind> <name> [<weight>]'");
    if (head[0] == "hard") def.kind = ConstraintKind::hard;
    else if (head[0] == "soft") def.kind = ConstraintKind::soft;
    else throw ParseError(ctx + ": unknown kind '" + head[0] + "'");
    def.name = head[1];
    if (head.size() == 3) {
      if (def.kind == ConstraintKind::hard)
        throw ParseError(ctx + ": hard rules carry no weight");
      char* end = nullptr;
      def.default_weight = std::strtod(head[2].c_str(), &end);
      if (end == head[2].c_str() || *end != '\0')
        throw ParseError(ctx + ": bad weight '" + head[2] + "'");
    }
    if (seen.count(def.name))
      throw ParseError(ctx + ": duplicate rule name '" + def.name +
                       "' (first defined at line " +
                       std::to_string(seen[def.name]) + ")");
    seen[def.name] = line_no;

    auto colon = body.find(':');
    if (colon == std::string::npos)
      throw ParseError(ctx + ": missing scope");
    std::string scope_tok = trim(body.substr(0, colon));
    if (scope_tok == "spec") def.scope = Scope::spec;
    else if (scope_tok == "encoding") def.scope = Scope::encoding;
    else throw ParseError(ctx + ": unknown scope '" + scope_tok + "'");

    std::string conds = body.substr(colon + 1);
    std::size_t start = 0;
    while (true) {
      auto comma = conds.find(',', start);
      std::string one = conds.substr(start, comma == std::string::npos
                                                ? std::string::npos
                                                : comma - start);
      def.conditions.push_back(detail::parse_condition(one, def.scope, ctx));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }

    if (def.kind == ConstraintKind::hard) set.hard.push_back(std::move(def));
    else set.soft.push_back(std::move(def));
  }
  return set;
}

inline std::string serialize_rule(const ConstraintDef& def) {
  std::string out = def.kind == ConstraintKind::hard ? "hard " : "soft ";
  out += def.name;
  if (def.kind == ConstraintKind::soft)
    out += " " + detail::format_weight(def.default_weight);
  out += " :- ";
  out += def.scope == Scope::spec ? "spec: " : "encoding: ";
  for (std::size_t i = 0; i < def.conditions.size(); ++i) {
    const auto& c = def.conditions[i];
    if (i) out += ", ";
    out += detail::attr_info(c.attr).name;
    out += ' ';
    out += detail::op_symbol(c.op);
    out += ' ';
    out += c.token;
  }
  return out;
}

inline std::string serialize_rules(const ConstraintSet& set) {
  std::string out;
  for (const auto& d : set.hard) out += serialize_rule(d) + "\n";
  for (const auto& d : set.soft) out += serialize_rule(d) + "\n";
  return out;
}

}  // namespace vizrec
