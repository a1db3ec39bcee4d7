#pragma once

#include <string>
#include <vector>

#include "vizrec/apt.hpp"
#include "vizrec/spec_model.hpp"

namespace vizrec {

// Deterministic 12-paper corpus exercising the whole influence range, from
// papers that cannot move the baseline at all to one revising it on several
// fronts at once. Pair counts grow with designed influence so the
// count-vs-influence and influence-vs-recommendation-shift correlations have
// signal to find. Shipped verbatim as data/corpus/synthetic12.json.
inline StudyCorpus synthetic_corpus() {
  using enum Mark;
  using enum Task;

  const FieldDef q{"q_field", FieldType::number, 20, 0.0, 100.0, {}};
  const FieldDef o{"o_field", FieldType::string, 5, {}, {}, {}};
  const FieldDef n{"n_field", FieldType::string, 5, {}, {}, {}};
  const FieldDef wide{"magnitude", FieldType::number, 50, 1.0, 1000000.0, {}};
  const FieldDef fine{"category_fine", FieldType::string, 20, {}, {}, {}};
  const FieldDef alpha{"alpha", FieldType::number, 10, 0.0, 1.0, {}};
  const FieldDef beta{"beta", FieldType::number, 10, 0.0, 1.0, {}};

  auto enc = [](Channel ch, const FieldDef& f, ScaleType sc,
                Aggregate agg = Aggregate::none, bool binned = false) {
    return Encoding{ch, f, sc, agg, binned};
  };
  auto count_enc = [](Channel ch) {
    return Encoding{ch, {}, ScaleType::linear, Aggregate::count, false};
  };
  auto spec = [](Mark m, Task t, std::vector<Encoding> encodings) {
    VizSpec s;
    s.mark = m;
    s.task = t;
    s.encodings = std::move(encodings);
    s = canonicalize(s);
    validate(s, "synthetic corpus spec");
    return s;
  };
  // Continuous x against discrete y, and the transposed layout.
  auto cd = [&](Mark m, Task t) {
    return spec(m, t, {enc(Channel::x, q, ScaleType::linear),
                       enc(Channel::y, o, ScaleType::ordinal)});
  };
  auto dc = [&](Mark m, Task t) {
    return spec(m, t, {enc(Channel::x, o, ScaleType::ordinal),
                       enc(Channel::y, q, ScaleType::linear)});
  };

  StudyCorpus corpus;
  corpus.schema_version = "1";
  auto add = [&](const std::string& paper, VizSpec pos, VizSpec neg,
                 const std::string& task_label, const std::string& metric) {
    RankedPair p;
    p.paper_id = paper;
    p.positive = std::move(pos);
    p.negative = std::move(neg);
    p.task_label = task_label;
    p.metric = metric;
    p.significant = true;
    corpus.papers[paper].push_back(std::move(p));
  };

  // p01: replicates three channel-effectiveness pairs verbatim. Redundant
  // with the baseline by construction.
  for (auto& pair : translate_apt_baseline({AptDataType::quantitative})) {
    pair.paper_id = "p01_replicates_anchor";
    corpus.papers[pair.paper_id].push_back(std::move(pair));
  }

  // p02: positive and negative differ only in field name, which no
  // constraint can see. Zero feature delta, zero influence.
  {
    auto mk = [&](const FieldDef& f, Mark m, Task t) {
      return spec(m, t, {enc(Channel::x, f, ScaleType::linear),
                         enc(Channel::y, o, ScaleType::ordinal)});
    };
    add("p02_unseen_difference", mk(alpha, point, value), mk(beta, point, value),
        "value", "accuracy:alpha>beta");
    add("p02_unseen_difference", mk(alpha, line, summary), mk(beta, line, summary),
        "summary", "accuracy:alpha>beta");
  }

  // p03: mark preferences under the summary task.
  add("p03_summary_marks", cd(bar, summary), cd(point, summary), "summary",
      "error:bar>point");
  add("p03_summary_marks", cd(bar, summary), cd(tick, summary), "summary",
      "error:bar>tick");
  add("p03_summary_marks", cd(line, summary), cd(point, summary), "summary",
      "error:line>point");

  // p04: mark preferences on the transposed layout.
  add("p04_transposed_marks", dc(point, value), dc(bar, value), "value",
      "time:point>bar");
  add("p04_transposed_marks", dc(point, value), dc(area, value), "value",
      "time:point>area");
  add("p04_transposed_marks", dc(tick, value), dc(bar, value), "value",
      "time:tick>bar");
  add("p04_transposed_marks", dc(tick, value), dc(rect, value), "value",
      "time:tick>rect");

  // p05: categorical channel comparisons the baseline never made.
  {
    auto second = [&](Channel ch, const FieldDef& f, ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, q, ScaleType::linear),
                             enc(ch, f, sc)});
    };
    add("p05_categorical_channels",
        second(Channel::color, n, ScaleType::categorical, point),
        second(Channel::shape, n, ScaleType::categorical, point), "value",
        "accuracy:color>shape");
    add("p05_categorical_channels",
        second(Channel::color, n, ScaleType::categorical, bar),
        second(Channel::shape, n, ScaleType::categorical, bar), "value",
        "accuracy:color>shape");
    add("p05_categorical_channels",
        second(Channel::shape, n, ScaleType::categorical, point),
        second(Channel::size, n, ScaleType::ordinal, point), "value",
        "accuracy:shape>size");
    add("p05_categorical_channels",
        second(Channel::shape, n, ScaleType::categorical, tick),
        second(Channel::size, n, ScaleType::ordinal, tick), "value",
        "accuracy:shape>size");
    add("p05_categorical_channels",
        second(Channel::color, n, ScaleType::categorical, point),
        second(Channel::size, n, ScaleType::ordinal, point), "value",
        "accuracy:color>size");
  }

  // p06: scale choice depends on the data's dynamic range. Log wins on
  // wide-range fields, linear wins on narrow ones; the optimizer reconciles
  // the two through the wide-range penalty.
  {
    auto scaled_x = [&](const FieldDef& f, ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, f, sc),
                             enc(Channel::y, o, ScaleType::ordinal)});
    };
    auto scaled_y = [&](const FieldDef& f, ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, o, ScaleType::ordinal),
                             enc(Channel::y, f, sc)});
    };
    const FieldDef narrow{"narrow", FieldType::number, 20, 1.0, 100.0, {}};
    for (Mark m : {point, tick, line}) {
      add("p06_log_scales", scaled_x(wide, ScaleType::log, m),
          scaled_x(wide, ScaleType::linear, m), "value",
          "accuracy:log>linear@wide");
      add("p06_log_scales", scaled_x(narrow, ScaleType::linear, m),
          scaled_x(narrow, ScaleType::log, m), "value",
          "accuracy:linear>log@narrow");
    }
    for (Mark m : {point, line})
      add("p06_log_scales", scaled_y(wide, ScaleType::log, m),
          scaled_y(wide, ScaleType::linear, m), "value",
          "accuracy:log>linear@wide");
    auto scaled_third = [&](Channel ch, ScaleType sc) {
      return spec(point, value, {enc(Channel::x, q, ScaleType::linear),
                                 enc(Channel::y, o, ScaleType::ordinal),
                                 enc(ch, wide, sc)});
    };
    add("p06_log_scales", scaled_third(Channel::color, ScaleType::log),
        scaled_third(Channel::color, ScaleType::linear), "value",
        "accuracy:log>linear@wide");
    add("p06_log_scales", scaled_third(Channel::size, ScaleType::log),
        scaled_third(Channel::size, ScaleType::linear), "value",
        "accuracy:log>linear@wide");
  }

  // p07: aggregation preferences for summary reading; means beat raw values,
  // counts beat means, histograms beat mean bars.
  {
    auto agg = [&](Aggregate a, Mark m) {
      return spec(m, summary, {enc(Channel::x, o, ScaleType::ordinal),
                               a == Aggregate::count
                                   ? count_enc(Channel::y)
                                   : enc(Channel::y, q, ScaleType::linear, a)});
    };
    for (Mark m : {bar, line, point, area})
      add("p07_mean_aggregation", agg(Aggregate::mean, m), agg(Aggregate::none, m),
          "summary", "error:mean>raw");
    add("p07_mean_aggregation", agg(Aggregate::count, bar),
        agg(Aggregate::mean, bar), "summary", "accuracy:count>mean");
    add("p07_mean_aggregation", agg(Aggregate::count, point),
        agg(Aggregate::mean, point), "summary", "accuracy:count>mean");
    auto histogram = [&](Mark m) {
      return spec(m, summary, {enc(Channel::x, q, ScaleType::linear,
                                   Aggregate::none, true),
                               count_enc(Channel::y)});
    };
    add("p07_mean_aggregation", histogram(bar), agg(Aggregate::mean, bar),
        "summary", "accuracy:histogram>mean");
    add("p07_mean_aggregation", histogram(point), agg(Aggregate::mean, point),
        "summary", "accuracy:histogram>mean");
  }

  // p08: the second field belongs on the y position, not on a retinal
  // channel.
  {
    auto on_channel = [&](Channel ch, ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, q, ScaleType::linear),
                             enc(ch, o, sc)});
    };
    for (Mark m : {point, tick, line})
      add("p08_second_field_position", cd(m, value),
          on_channel(Channel::color, ScaleType::categorical, m), "value",
          "time:y>color");
    for (Mark m : {point, tick})
      add("p08_second_field_position", cd(m, value),
          on_channel(Channel::shape, ScaleType::categorical, m), "value",
          "time:y>shape");
    add("p08_second_field_position", cd(point, value),
        on_channel(Channel::size, ScaleType::ordinal, point), "value",
        "time:y>size");
  }

  // p09: contradicts the baseline's position preference with weight of
  // numbers: size beats y position across marks and field classes.
  {
    auto on = [&](Channel ch, const FieldDef& f, ScaleType sc, Mark m) {
      std::vector<Encoding> encodings;
      if (ch != Channel::x) encodings.push_back(count_enc(Channel::x));
      encodings.push_back(enc(ch, f, sc));
      return spec(m, value, std::move(encodings));
    };
    for (Mark m : {bar, point, tick, line, area, rect})
      add("p09_position_override", on(Channel::size, q, ScaleType::linear, m),
          on(Channel::y, q, ScaleType::linear, m), "value", "accuracy:size>y");
    add("p09_position_override", on(Channel::size, o, ScaleType::ordinal, bar),
        on(Channel::y, o, ScaleType::ordinal, bar), "value", "accuracy:size>y");
  }

  // p10: broad mark-preference study across both layouts.
  add("p10_mark_survey", cd(area, value), cd(rect, value), "value", "acc:area>rect");
  add("p10_mark_survey", dc(area, value), dc(rect, value), "value", "acc:area>rect");
  add("p10_mark_survey", cd(line, value), cd(rect, value), "value", "acc:line>rect");
  add("p10_mark_survey", dc(line, value), dc(rect, value), "value", "acc:line>rect");
  add("p10_mark_survey", cd(area, value), cd(bar, value), "value", "acc:area>bar");
  add("p10_mark_survey", dc(area, value), dc(bar, value), "value", "acc:area>bar");
  add("p10_mark_survey", cd(point, value), cd(bar, value), "value", "acc:point>bar");
  add("p10_mark_survey", dc(point, value), dc(bar, value), "value", "acc:point>bar");

  // p11: channel capacity at high cardinality; color > size > shape once a
  // field outgrows the shape palette.
  {
    auto classed = [&](Channel ch, ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, q, ScaleType::linear),
                             enc(ch, fine, sc)});
    };
    for (Mark m : {point, line, tick})
      add("p11_cardinality_channels",
          classed(Channel::color, ScaleType::categorical, m),
          classed(Channel::shape, ScaleType::categorical, m), "value",
          "accuracy:color>shape@20");
    for (Mark m : {point, line, tick})
      add("p11_cardinality_channels",
          classed(Channel::color, ScaleType::categorical, m),
          classed(Channel::size, ScaleType::ordinal, m), "value",
          "accuracy:color>size@20");
  }

  // p12: revises the baseline on several fronts at once.
  {
    auto scaled_y = [&](ScaleType sc, Mark m) {
      return spec(m, value, {enc(Channel::x, o, ScaleType::ordinal),
                             enc(Channel::y, wide, sc)});
    };
    add("p12_broad_revision", scaled_y(ScaleType::log, point),
        scaled_y(ScaleType::linear, point), "value", "accuracy:log>linear");
    add("p12_broad_revision", scaled_y(ScaleType::log, tick),
        scaled_y(ScaleType::linear, tick), "value", "accuracy:log>linear");
    auto solo = [&](Channel ch, Mark m) {
      return spec(m, value, {enc(ch, q, ScaleType::linear)});
    };
    add("p12_broad_revision", solo(Channel::y, bar), solo(Channel::x, bar),
        "value", "accuracy:y>x");
    add("p12_broad_revision", solo(Channel::y, point), solo(Channel::x, point),
        "value", "accuracy:y>x");
    for (Mark m : {point, line, tick})
      add("p12_broad_revision", cd(rect, value), cd(m, value), "value",
          std::string("accuracy:rect>") + to_string(m));
    add("p12_broad_revision", cd(rect, value), cd(area, value), "value",
        "accuracy:rect>area");
    add("p12_broad_revision", cd(point, summary), cd(bar, summary), "summary",
        "error:point>bar");
    add("p12_broad_revision", dc(point, summary), dc(bar, summary), "summary",
        "error:point>bar");
  }

  return corpus;
}

}  // namespace vizrec
