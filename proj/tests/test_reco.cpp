// Schema parsing, design-space enumeration, recommendation, and the weight
// shift metrics. The enumerator is compared against a from-scratch oracle
// that walks the documented design space (channel injections, scale choices,
// mean placement, count placement, marks) and collects canonical
// serializations into a set.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <vizrec/evaluate.hpp>
#include <vizrec/learner.hpp>
#include <vizrec/meta.hpp>
#include <vizrec/recommender.hpp>
#include <vizrec/rules.hpp>
#include <vizrec/spec_model.hpp>
#include <vizrec/stats.hpp>

using namespace vizrec;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(VIZREC_DATA_DIR) + "/" + rel;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const ConstraintSet& shipped_rules() {
  static ConstraintSet set = parse_rules(slurp(data_path("rules/default.rules")));
  return set;
}

DatasetSchema toy_schema() {
  DatasetSchema s;
  s.name = "toy";
  s.row_count = 50;
  s.fields = {
      FieldDef{"num_pos", FieldType::number, 12, 1.0, 250.0, {}},
      FieldDef{"num_any", FieldType::number, 9, -5.0, 5.0, {}},
      FieldDef{"cat5", FieldType::string, 5, {}, {}, {}},
      FieldDef{"flag", FieldType::boolean, 2, {}, {}, {}},
      FieldDef{"when", FieldType::datetime, 40, {}, {}, {}},
  };
  return s;
}

WeightModel wm(std::vector<std::string> names, std::vector<double> weights) {
  WeightModel m;
  m.constraint_names = std::move(names);
  m.weights = std::move(weights);
  m.pair_count = 1;
  return m;
}

// Oracle enumeration. Walks the documented space directly: each injective
// assignment of fields to the five data channels, each scale choice per field
// type, optionally one mean over a continuously scaled number field,
// optionally (single-field queries only) a count encoding on the free
// position channel, each mark. Keeps specs that have a position encoding and
// no hard violation. Relies on canonical_json and check_hard, which have
// their own oracles elsewhere.
std::set<std::string> oracle_space(const DatasetSchema& schema, const Query& q,
                                   const ConstraintSet& set) {
  std::vector<const FieldDef*> fields;
  for (const auto& n : q.field_names) fields.push_back(&schema.field(n));
  const std::size_t nf = fields.size();
  const Channel channels[] = {Channel::x, Channel::y, Channel::color,
                              Channel::size, Channel::shape};
  const Mark marks[] = {Mark::bar, Mark::line, Mark::point,
                        Mark::tick, Mark::area, Mark::rect};

  auto scale_options = [](const FieldDef& f) -> std::vector<ScaleType> {
    switch (f.field_type) {
      case FieldType::number:
        if (f.min_value && *f.min_value > 0)
          return {ScaleType::linear, ScaleType::log};
        return {ScaleType::linear};
      case FieldType::datetime: return {ScaleType::linear};
      case FieldType::string: return {ScaleType::ordinal, ScaleType::categorical};
      case FieldType::boolean: return {ScaleType::categorical};
    }
    return {};
  };

  std::set<std::string> out;
  std::vector<int> assignment(nf);
  std::vector<ScaleType> chosen(nf);

  auto emit = [&]() {
    for (int agg = -1; agg < static_cast<int>(nf); ++agg) {
      if (agg >= 0 && !(fields[agg]->field_type == FieldType::number &&
                        is_continuous(chosen[agg])))
        continue;
      for (bool with_count : {false, true}) {
        if (with_count && nf != 1) continue;
        for (Mark mark : marks) {
          VizSpec s;
          s.mark = mark;
          s.task = q.task;
          for (std::size_t i = 0; i < nf; ++i) {
            Encoding e;
            e.channel = channels[assignment[i]];
            e.field = *fields[i];
            e.scale_type = chosen[i];
            e.aggregate =
                static_cast<int>(i) == agg ? Aggregate::mean : Aggregate::none;
            s.encodings.push_back(std::move(e));
          }
          if (with_count) {
            Channel free = channels[assignment[0]] == Channel::x ? Channel::y
                                                                 : Channel::x;
            s.encodings.push_back(
                {free, std::nullopt, ScaleType::linear, Aggregate::count, false});
          }
          bool position = false;
          for (const auto& e : s.encodings)
            if (is_position(e.channel)) position = true;
          if (!position) continue;
          if (!hard_valid(s, set)) continue;
          out.insert(canonical_json(s));
        }
      }
    }
  };

  auto scale_rec = [&](auto&& self, std::size_t i) -> void {
    if (i == nf) {
      emit();
      return;
    }
    for (ScaleType st : scale_options(*fields[i])) {
      chosen[i] = st;
      self(self, i + 1);
    }
  };

  auto assign_rec = [&](auto&& self, std::size_t i, unsigned used) -> void {
    if (i == nf) {
      scale_rec(scale_rec, 0);
      return;
    }
    for (int c = 0; c < 5; ++c) {
      if (used & (1u << c)) continue;
      assignment[i] = c;
      self(self, i + 1, used | (1u << c));
    }
  };
  assign_rec(assign_rec, 0, 0u);
  return out;
}

void check_space_matches_oracle(const DatasetSchema& schema, const Query& q,
                                const ConstraintSet& set,
                                std::size_t min_size) {
  auto specs = enumerate_space(schema, q, set);
  std::vector<std::string> got;
  for (const auto& s : specs) got.push_back(canonical_json(s));

  auto oracle = oracle_space(schema, q, set);
  std::vector<std::string> want(oracle.begin(), oracle.end());

  INFO("query fields " << q.field_names.size() << ", space " << got.size());
  CHECK(got.size() >= min_size);
  REQUIRE(got == want);  // same specs, same canonical ascending order, no dupes
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("bundled schemas parse") {
  DatasetSchema cars = parse_schema(slurp(data_path("schemas/cars.json")));
  CHECK(cars.name == "cars");
  CHECK(cars.row_count == 406);
  REQUIRE(cars.fields.size() == 9);
  CHECK(cars.fields[0].name == "miles_per_gallon");
  CHECK(cars.fields[0].field_type == FieldType::number);
  CHECK(cars.field("horsepower").cardinality == 93);
  CHECK(cars.field("origin").field_type == FieldType::string);
  CHECK_THROWS_WITH(cars.field("nonexistent"),
                    ContainsSubstring("cars") && ContainsSubstring("nonexistent"));

  DatasetSchema movies = parse_schema(slurp(data_path("schemas/movies.json")));
  CHECK(movies.row_count == 3201);
  CHECK(movies.field("worldwide_gross").min_value == 884.0);

  DatasetSchema weather =
      parse_schema(slurp(data_path("schemas/seattle_weather.json")));
  CHECK(weather.name == "seattle_weather");
  CHECK(weather.field("precipitation_mm").min_value == 0.0);
}

TEST_CASE("schema parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_schema("{"), ParseError);
  CHECK_THROWS_AS(parse_schema("[]"), ParseError);
  CHECK_THROWS_AS(parse_schema(R"({"name": "x", "row_count": 1})"), ParseError);
  CHECK_THROWS_AS(parse_schema(R"({"name": "x", "row_count": 1, "fields": []})"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_schema(R"({"name": "x", "row_count": 1.5, "fields": []})"),
      ParseError);
  CHECK_THROWS_WITH(
      parse_schema(
          R"({"name": "x", "row_count": -2, "fields": [
               {"name": "a", "field_type": "number", "cardinality": 3}]})"),
      ContainsSubstring("negative row_count"));
  CHECK_THROWS_WITH(
      parse_schema(
          R"({"name": "x", "row_count": 2, "fields": [
               {"name": "a", "field_type": "number", "cardinality": 3},
               {"name": "a", "field_type": "string", "cardinality": 2}]})"),
      ContainsSubstring("duplicate field 'a'"));
}

TEST_CASE("schema JSON round-trips") {
  DatasetSchema s = toy_schema();
  DatasetSchema back = parse_schema(to_json(s).dump());
  CHECK(to_json(back).dump() == to_json(s).dump());
}

// ---------------------------------------------------------------------------

TEST_CASE("enumeration matches the oracle across field types") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();

  SECTION("single positive number: linear and log, count histograms") {
    check_space_matches_oracle(toy, {{"num_pos"}, Task::value}, set, 20);
  }
  SECTION("single string") {
    check_space_matches_oracle(toy, {{"cat5"}, Task::value}, set, 10);
  }
  SECTION("single boolean, summary task") {
    check_space_matches_oracle(toy, {{"flag"}, Task::summary}, set, 5);
  }
  SECTION("single datetime") {
    check_space_matches_oracle(toy, {{"when"}, Task::value}, set, 5);
  }
  SECTION("number with negative minimum gets no log option") {
    check_space_matches_oracle(toy, {{"num_any", "cat5"}, Task::value}, set, 50);
    for (const auto& s :
         enumerate_space(toy, {{"num_any", "cat5"}, Task::value}, set))
      for (const auto& e : s.encodings)
        if (e.field && e.field->name == "num_any")
          CHECK(e.scale_type == ScaleType::linear);
  }
  SECTION("two numbers, summary task") {
    check_space_matches_oracle(toy, {{"num_pos", "num_any"}, Task::summary}, set,
                               50);
  }
  SECTION("three fields") {
    check_space_matches_oracle(toy, {{"num_pos", "cat5", "flag"}, Task::value},
                               set, 100);
  }
  SECTION("three fields without numbers") {
    check_space_matches_oracle(toy, {{"cat5", "flag", "when"}, Task::summary},
                               set, 50);
  }
}

TEST_CASE("enumeration contains hand-built specs") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();
  auto specs = enumerate_space(toy, {{"num_pos"}, Task::value}, set);
  std::set<std::string> keys;
  for (const auto& s : specs) keys.insert(canonical_json(s));

  // histogram: field on x, count on y
  VizSpec histogram;
  histogram.mark = Mark::bar;
  histogram.task = Task::value;
  histogram.encodings.push_back({Channel::x, toy.field("num_pos"),
                                 ScaleType::linear, Aggregate::none, false});
  histogram.encodings.push_back(
      {Channel::y, std::nullopt, ScaleType::linear, Aggregate::count, false});
  CHECK(keys.count(canonical_json(histogram)) == 1);

  // field alone on y is still a positional spec
  VizSpec strip;
  strip.mark = Mark::tick;
  strip.task = Task::value;
  strip.encodings.push_back({Channel::y, toy.field("num_pos"), ScaleType::log,
                             Aggregate::none, false});
  CHECK(keys.count(canonical_json(strip)) == 1);

  // every enumerated spec is structurally valid and hard-valid
  for (const auto& s : specs) {
    CHECK_NOTHROW(validate(s, "enumerated"));
    CHECK(hard_valid(s, set));
  }
}

TEST_CASE("enumeration rejects bad queries") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();
  CHECK_THROWS_WITH(enumerate_space(toy, {{}, Task::value}, set),
                    ContainsSubstring("no fields"));
  CHECK_THROWS_WITH(enumerate_space(toy, {{"num_pos", "num_pos"}, Task::value}, set),
                    ContainsSubstring("duplicate query field"));
  CHECK_THROWS_WITH(
      enumerate_space(toy, {{"num_pos", "num_any", "cat5", "flag"}, Task::value},
                      set),
      ContainsSubstring("at most 3"));
  CHECK_THROWS_WITH(enumerate_space(toy, {{"missing"}, Task::value}, set),
                    ContainsSubstring("no field named 'missing'"));
}

// ---------------------------------------------------------------------------

TEST_CASE("recommend returns a cost-ordered prefix of the space") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema cars = parse_schema(slurp(data_path("schemas/cars.json")));
  WeightModel model = default_weight_model(set);
  Query q{{"horsepower"}, Task::value};

  auto top10 = recommend(cars, q, set, model, 10);
  REQUIRE(top10.size() == 10);
  for (std::size_t i = 0; i < top10.size(); ++i) {
    CHECK(top10[i].rank == static_cast<int>(i + 1));
    CHECK(top10[i].cost ==
          cost(featurize(top10[i].spec, set), model.weights));
    CHECK(hard_valid(top10[i].spec, set));
    if (i > 0) CHECK(top10[i].cost >= top10[i - 1].cost);
  }

  // smaller k is a prefix of larger k
  auto top3 = recommend(cars, q, set, model, 3);
  REQUIRE(top3.size() == 3);
  for (std::size_t i = 0; i < top3.size(); ++i) {
    CHECK(canonical_json(top3[i].spec) == canonical_json(top10[i].spec));
    CHECK(top3[i].cost == top10[i].cost);
  }

  // asking for more than the space yields the whole space
  auto space = enumerate_space(cars, q, set);
  auto all = recommend(cars, q, set, model, 1000000);
  CHECK(all.size() == space.size());

  CHECK_THROWS_AS(recommend(cars, q, set, model, 0), ValidationError);
}

TEST_CASE("recommendation order is invariant under weight scaling") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();
  WeightModel model = default_weight_model(set);
  Query q{{"num_pos", "cat5"}, Task::value};

  auto base = recommend(toy, q, set, model, 25);

  WeightModel doubled = model;
  for (auto& w : doubled.weights) w *= 2.0;
  auto scaled = recommend(toy, q, set, doubled, 25);
  REQUIRE(scaled.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(canonical_json(scaled[i].spec) == canonical_json(base[i].spec));
    CHECK(scaled[i].cost == 2.0 * base[i].cost);  // doubling is exact
  }

  WeightModel halved = model;
  for (auto& w : halved.weights) w *= 0.5;
  auto half = recommend(toy, q, set, halved, 25);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(canonical_json(half[i].spec) == canonical_json(base[i].spec));
    CHECK(half[i].cost == 0.5 * base[i].cost);
  }
}

TEST_CASE("zero weights fall back to canonical order") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();
  WeightModel zero = default_weight_model(set);
  std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
  Query q{{"cat5"}, Task::value};

  auto space = enumerate_space(toy, q, set);
  auto recs = recommend(toy, q, set, zero, 8);
  REQUIRE(recs.size() == 8);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].cost == 0.0);
    CHECK(canonical_json(recs[i].spec) == canonical_json(space[i]));
  }
}

TEST_CASE("a lone mark preference dominates the ranking") {
  ConstraintSet tiny = parse_rules("soft mark_not_point 1 :- spec: mark != point\n");
  WeightModel model = default_weight_model(tiny);
  DatasetSchema toy = toy_schema();

  auto recs = recommend(toy, {{"num_pos"}, Task::value}, tiny, model, 3);
  REQUIRE(!recs.empty());
  CHECK(recs[0].spec.mark == Mark::point);
  CHECK(recs[0].cost == 0.0);

  // model layout must match the rule set in use
  const ConstraintSet& shipped = shipped_rules();
  CHECK_THROWS_AS(recommend(toy, {{"num_pos"}, Task::value}, shipped, model, 3),
                  ValidationError);
}

TEST_CASE("rerank produces fractional ranks of candidate costs") {
  const ConstraintSet& set = shipped_rules();
  DatasetSchema toy = toy_schema();
  WeightModel model = default_weight_model(set);

  auto candidates = enumerate_space(toy, {{"cat5"}, Task::value}, set);
  REQUIRE(candidates.size() >= 3);

  std::vector<double> costs;
  for (const auto& s : candidates)
    costs.push_back(cost(featurize(s, set), model.weights));
  CHECK(rerank(candidates, set, model) == fractional_ranks(costs));

  // all-equal costs collapse to the average rank
  WeightModel zero = model;
  std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
  auto flat = rerank(candidates, set, zero);
  double avg = (static_cast<double>(flat.size()) + 1.0) / 2.0;
  for (double r : flat) CHECK(r == avg);

  WeightModel other = wm({"a"}, {1.0});
  CHECK_THROWS_AS(rerank(candidates, set, other), ValidationError);
}

TEST_CASE("attribute combinations enumerate subsets then tasks") {
  DatasetSchema s;
  s.name = "abc";
  s.row_count = 3;
  s.fields = {FieldDef{"a", FieldType::number, 3, 1.0, 9.0, {}},
              FieldDef{"b", FieldType::string, 4, {}, {}, {}},
              FieldDef{"c", FieldType::boolean, 2, {}, {}, {}}};

  std::vector<Query> expected = {
      {{"a"}, Task::value},      {{"a"}, Task::summary},
      {{"b"}, Task::value},      {{"b"}, Task::summary},
      {{"c"}, Task::value},      {{"c"}, Task::summary},
      {{"a", "b"}, Task::value}, {{"a", "b"}, Task::summary},
      {{"a", "c"}, Task::value}, {{"a", "c"}, Task::summary},
      {{"b", "c"}, Task::value}, {{"b", "c"}, Task::summary},
  };
  CHECK(attribute_combinations(s, 2) == expected);

  auto full = attribute_combinations(s, 3);
  REQUIRE(full.size() == 14);
  CHECK(full[12] == Query{{"a", "b", "c"}, Task::value});
  CHECK(full[13] == Query{{"a", "b", "c"}, Task::summary});

  // max_fields beyond the field count saturates
  s.fields.pop_back();
  CHECK(attribute_combinations(s, 3).size() == 6);

  CHECK_THROWS_AS(attribute_combinations(s, 0), ValidationError);
  CHECK_THROWS_AS(attribute_combinations(s, 4), ValidationError);

  DatasetSchema cars = parse_schema(slurp(data_path("schemas/cars.json")));
  auto singles = attribute_combinations(cars, 1);
  REQUIRE(singles.size() == 18);
  CHECK(singles[0] == Query{{"miles_per_gallon"}, Task::value});
  CHECK(singles[1] == Query{{"miles_per_gallon"}, Task::summary});
}

// ---------------------------------------------------------------------------

TEST_CASE("coverage marks constraints exercised by either side of a pair") {
  const ConstraintSet& set = shipped_rules();

  CoverageVector empty = coverage("none", {}, set);
  REQUIRE(empty.bits.size() == set.soft.size());
  for (int b : empty.bits) CHECK(b == 0);

  auto skeleton = [](Mark m) {
    VizSpec s;
    s.mark = m;
    s.task = Task::value;
    s.encodings.push_back({Channel::x,
                           FieldDef{"q", FieldType::number, 20, 0.0, 100.0, {}},
                           ScaleType::linear, Aggregate::none, false});
    s.encodings.push_back({Channel::y, FieldDef{"o", FieldType::string, 5, {}, {}, {}},
                           ScaleType::ordinal, Aggregate::none, false});
    return s;
  };
  RankedPair pair;
  pair.paper_id = "t";
  pair.positive = skeleton(Mark::tick);
  pair.negative = skeleton(Mark::point);
  pair.significant = true;

  CoverageVector cv = coverage("t", {pair}, set);
  CHECK(cv.paper_id == "t");
  int total = 0;
  for (int b : cv.bits) total += b;
  CHECK(total == 7);
  for (const char* name : {"linear_x", "ordinal_y", "second_encoding",
                           "value_tick", "value_point", "c_d_no_overlap_tick",
                           "c_d_no_overlap_point"})
    CHECK(cv.bits[set.soft_index(name)] == 1);
  CHECK(cv.bits[set.soft_index("value_bar")] == 0);

  // coverage of a pair list is the union of single-pair coverage
  RankedPair other = pair;
  other.positive = skeleton(Mark::line);
  CoverageVector a = coverage("t", {pair}, set);
  CoverageVector b = coverage("t", {other}, set);
  CoverageVector both = coverage("t", {pair, other}, set);
  for (std::size_t i = 0; i < both.bits.size(); ++i)
    CHECK(both.bits[i] == (a.bits[i] | b.bits[i]));
}

TEST_CASE("sign shift classifies weight movement") {
  WeightModel base = wm({"a", "b", "c"}, {0.0, 0.0, 0.0});
  WeightModel plus = wm({"a", "b", "c"}, {0.5, -0.2, 0.0});

  ShiftVector sv = sign_shift(base, plus, 1e-6);
  CHECK(sv.kind == ShiftKind::sign);
  CHECK(sv.values == std::vector<double>{1.0, -1.0, 0.0});
  CHECK(!sv.degenerate);

  // movement inside the dead zone counts as no movement
  WeightModel wiggle = wm({"a", "b", "c"}, {1e-9, -1e-9, 0.0});
  CHECK(sign_shift(base, wiggle, 1e-6).values ==
        std::vector<double>{0.0, 0.0, 0.0});

  CHECK(sign_shift(base, base, 1e-6).values ==
        std::vector<double>{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(sign_shift(base, plus, -1.0), ValidationError);
  CHECK_THROWS_AS(sign_shift(base, wm({"a"}, {1.0}), 1e-6), ValidationError);
}

TEST_CASE("single-normalizer shift divides by the experimental maximum") {
  WeightModel base = wm({"a", "b"}, {0.0, 0.0});
  WeightModel exp = wm({"a", "b"}, {2.0, -4.0});

  ShiftVector sv = normalized_shift_exp(base, exp);
  CHECK(sv.kind == ShiftKind::normalized_exp);
  CHECK(sv.values == std::vector<double>{0.5, -1.0});
  CHECK(!sv.degenerate);

  ShiftVector zero = normalized_shift_exp(base, wm({"a", "b"}, {0.0, 0.0}));
  CHECK(zero.values == std::vector<double>{0.0, 0.0});
  CHECK(zero.degenerate);
}

TEST_CASE("per-constraint shift normalizes by the coordinate-wise maximum") {
  WeightModel base = wm({"a", "b"}, {1.0, 2.0});
  std::vector<WeightModel> plusones = {wm({"a", "b"}, {2.0, 1.0}),
                                       wm({"a", "b"}, {0.5, 3.0})};

  ShiftVector sa = normalized_shift_multi(base, plusones, 0, "A");
  CHECK(sa.paper_id == "A");
  CHECK(sa.kind == ShiftKind::normalized_multi);
  // coordinate maxima: a -> 2, b -> 3
  CHECK(sa.values[0] == 0.5);
  CHECK(sa.values[1] == -1.0 / 3.0);

  ShiftVector sb = normalized_shift_multi(base, plusones, 1);
  CHECK(sb.values[0] == -0.25);
  CHECK(sb.values[1] == 1.0 / 3.0);

  // a coordinate at zero everywhere stays zero instead of dividing by zero
  WeightModel zbase = wm({"a", "b"}, {0.0, 5.0});
  ShiftVector sz =
      normalized_shift_multi(zbase, {wm({"a", "b"}, {0.0, 4.0})}, 0);
  CHECK(sz.values[0] == 0.0);

  CHECK_THROWS_AS(normalized_shift_multi(base, {}, 0), ValidationError);
  CHECK_THROWS_AS(normalized_shift_multi(base, plusones, 2), ValidationError);

  CHECK(influence(sa) == 0.5 + 1.0 / 3.0);
  ShiftVector half;
  half.kind = ShiftKind::normalized_multi;
  half.values = {0.5, -0.5};
  CHECK(influence(half) == 1.0);
  ShiftVector wrong;
  wrong.kind = ShiftKind::sign;
  wrong.values = {1.0};
  CHECK_THROWS_AS(influence(wrong), ValidationError);
}

TEST_CASE("normalized shifts are scale invariant") {
  WeightModel base = wm({"a", "b"}, {1.0, 2.0});
  std::vector<WeightModel> plusones = {wm({"a", "b"}, {2.0, 1.0}),
                                       wm({"a", "b"}, {0.5, 3.0})};

  auto scale = [](const WeightModel& m, double f) {
    WeightModel out = m;
    for (auto& w : out.weights) w *= f;
    return out;
  };

  for (double f : {2.0, 0.5}) {  // power-of-two scaling is exact
    std::vector<WeightModel> sp = {scale(plusones[0], f), scale(plusones[1], f)};
    CHECK(normalized_shift_exp(scale(base, f), sp[0]).values ==
          normalized_shift_exp(base, plusones[0]).values);
    CHECK(normalized_shift_multi(scale(base, f), sp, 0).values ==
          normalized_shift_multi(base, plusones, 0).values);
  }

  std::vector<WeightModel> sp3 = {scale(plusones[0], 3.0),
                                  scale(plusones[1], 3.0)};
  auto got = normalized_shift_multi(scale(base, 3.0), sp3, 1).values;
  auto want = normalized_shift_multi(base, plusones, 1).values;
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == Approx(want[i]).margin(1e-12));
}

TEST_CASE("shift metrics agree and stay bounded on random models") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::vector<std::string> names = {"a", "b", "c", "d"};

  for (int iter = 0; iter < 100; ++iter) {
    auto rand_model = [&]() {
      std::vector<double> w(names.size());
      for (auto& v : w) v = coord(rng);
      return wm(names, w);
    };
    WeightModel base = rand_model();
    std::vector<WeightModel> plusones = {rand_model(), rand_model(),
                                         rand_model()};
    std::size_t target = rng() % plusones.size();

    ShiftVector multi = normalized_shift_multi(base, plusones, target);
    double eps = default_shift_eps(base);
    ShiftVector sign = sign_shift(base, plusones[target], eps);

    for (std::size_t i = 0; i < names.size(); ++i) {
      // |p - b| <= |p| + |b| <= 2 max, so the normalized shift is in [-2, 2]
      CHECK(std::abs(multi.values[i]) <= 2.0);
      double d = plusones[target].weights[i] - base.weights[i];
      if (std::abs(d) >= eps && multi.values[i] != 0.0)
        CHECK((multi.values[i] > 0) == (sign.values[i] > 0));
      if (base.weights[i] * plusones[target].weights[i] >= 0)
        CHECK(std::abs(multi.values[i]) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("default shift tolerance tracks the largest baseline weight") {
  WeightModel m = wm({"a", "b"}, {3.0, -7.0});
  CHECK(m.max_abs_weight() == 7.0);
  CHECK(default_shift_eps(m) == Approx(7e-6).epsilon(1e-12));
  WeightModel z = wm({"a"}, {0.0});
  CHECK(default_shift_eps(z) == 0.0);
}

// ---------------------------------------------------------------------------

TEST_CASE("random queries over the bundled schemas keep engine contracts") {
  const ConstraintSet& set = shipped_rules();
  std::vector<DatasetSchema> schemas = {
      parse_schema(slurp(data_path("schemas/cars.json"))),
      parse_schema(slurp(data_path("schemas/movies.json"))),
      parse_schema(slurp(data_path("schemas/seattle_weather.json")))};
  WeightModel model = default_weight_model(set);
  std::mt19937 rng(29);

  for (int iter = 0; iter < 100; ++iter) {
    const DatasetSchema& schema = schemas[rng() % schemas.size()];
    std::size_t nf = 1 + rng() % 2;
    std::vector<std::string> names;
    while (names.size() < nf) {
      std::string candidate = schema.fields[rng() % schema.fields.size()].name;
      if (std::find(names.begin(), names.end(), candidate) == names.end())
        names.push_back(candidate);
    }
    Query q{names, rng() % 2 == 0 ? Task::value : Task::summary};
    INFO("schema " << schema.name << " query " << iter);

    auto recs = recommend(schema, q, set, model, 12);
    REQUIRE(!recs.empty());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = recs[i];
      CHECK(r.rank == static_cast<int>(i + 1));
      CHECK_NOTHROW(validate(r.spec, "recommended"));
      CHECK(hard_valid(r.spec, set));
      CHECK(r.cost == cost(featurize(r.spec, set), model.weights));
      if (i > 0) CHECK(r.cost >= recs[i - 1].cost);
      CHECK(seen.insert(canonical_json(r.spec)).second);

      // every fielded data encoding uses a query field
      for (const auto& e : r.spec.encodings)
        if (e.field)
          CHECK(std::find(names.begin(), names.end(), e.field->name) !=
                names.end());
    }
  }
}
