#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vizrec/apt.hpp"
#include "vizrec/cluster.hpp"
#include "vizrec/evaluate.hpp"
#include "vizrec/learner.hpp"
#include "vizrec/meta.hpp"
#include "vizrec/parallel.hpp"
#include "vizrec/recommender.hpp"
#include "vizrec/spec_model.hpp"
#include "vizrec/stats.hpp"

namespace vizrec {

// ---------------------------------------------------------------------------
// Plus-one study: baseline model from the anchor pairs alone, one model per
// paper trained on anchor pairs + that paper's significant pairs, then the
// shift/coverage/influence analysis across all papers.

// Training setup for study runs. The default epoch budget is geared toward
// interactive training; the weakly-constrained directions it leaves slightly
// unconverged differ between a baseline run and a plus-one run, which would
// register as spurious shift. Studies therefore train long enough that a
// paper merely duplicating baseline pairs lands within the snap threshold.
inline TrainConfig study_train_config() {
  TrainConfig tc;
  tc.epochs = 40000;
  return tc;
}

struct PlusOneConfig {
  TrainConfig train = study_train_config();
  // Trained weights within this relative distance of the baseline are snapped
  // onto it before any shift is computed. Gradient descent leaves float-level
  // residue on constraints a paper never touches; snapping keeps "no change"
  // exactly zero while real shifts sit orders of magnitude above the cutoff.
  double snap_eps_rel = 1e-3;
  unsigned jobs = 1;
};

struct PaperStudy {
  std::string paper_id;
  std::size_t pair_count = 0;  // significant pairs contributed
  bool failed = false;
  std::string error;
  WeightModel model;
  CoverageVector cover;
  ShiftVector sign;   // vs baseline, dead zone default_shift_eps(baseline)
  ShiftVector shift;  // per-constraint normalized shift across all models
  double influence_score = std::numeric_limits<double>::quiet_NaN();
};

struct PlusOneStudy {
  WeightModel baseline;
  std::vector<PaperStudy> papers;  // corpus id order
  // Pearson between per-paper pair count and influence, over usable papers.
  double pair_influence_r = std::numeric_limits<double>::quiet_NaN();
  double pair_influence_p = std::numeric_limits<double>::quiet_NaN();
  std::optional<Dendrogram> coverage_tree;  // papers by coverage vector
  std::optional<Dendrogram> sign_tree;      // papers by sign-shift vector

  std::vector<const PaperStudy*> usable() const {
    std::vector<const PaperStudy*> out;
    for (const auto& p : papers)
      if (!p.failed) out.push_back(&p);
    return out;
  }
};

inline PlusOneStudy run_plus_one_study(const StudyCorpus& corpus,
                                       const std::vector<RankedPair>& baseline_pairs,
                                       const ConstraintSet& set,
                                       const PlusOneConfig& cfg = {}) {
  PlusOneStudy study;
  study.baseline = train(baseline_pairs, set, cfg.train);
  const double snap_eps = cfg.snap_eps_rel * study.baseline.max_abs_weight();
  const double sign_eps = default_shift_eps(study.baseline);

  std::vector<std::string> ids;
  for (const auto& [id, pairs] : corpus.papers) ids.push_back(id);
  study.papers.resize(ids.size());

  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    PaperStudy& ps = study.papers[i];
    ps.paper_id = ids[i];
    const auto& all_pairs = corpus.papers.at(ids[i]);
    std::vector<RankedPair> sig = training_pairs(all_pairs);
    ps.pair_count = sig.size();
    ps.cover = coverage(ids[i], sig, set);
    if (sig.empty()) {
      ps.failed = true;
      ps.error = "no statistically significant pairs";
      return;
    }
    std::vector<RankedPair> training_set = baseline_pairs;
    training_set.insert(training_set.end(), sig.begin(), sig.end());
    try {
      ps.model = train(training_set, set, cfg.train);
    } catch (const std::exception& e) {
      ps.failed = true;
      ps.error = e.what();
      return;
    }
    for (std::size_t c = 0; c < ps.model.weights.size(); ++c)
      if (std::abs(ps.model.weights[c] - study.baseline.weights[c]) < snap_eps)
        ps.model.weights[c] = study.baseline.weights[c];
    ps.sign = sign_shift(study.baseline, ps.model, sign_eps);
    ps.sign.paper_id = ids[i];
  });

  // The per-constraint normalizer spans every successful model, so the
  // normalized shifts exist only once the whole batch is done.
  std::vector<WeightModel> models;
  std::vector<std::size_t> model_owner;
  for (std::size_t i = 0; i < study.papers.size(); ++i)
    if (!study.papers[i].failed) {
      models.push_back(study.papers[i].model);
      model_owner.push_back(i);
    }
  for (std::size_t m = 0; m < models.size(); ++m) {
    PaperStudy& ps = study.papers[model_owner[m]];
    ps.shift = normalized_shift_multi(study.baseline, models, m, ps.paper_id);
    ps.influence_score = influence(ps.shift);
  }

  std::vector<double> counts, influences;
  for (const auto& ps : study.papers)
    if (!ps.failed) {
      counts.push_back(static_cast<double>(ps.pair_count));
      influences.push_back(ps.influence_score);
    }
  if (counts.size() >= 3) {
    study.pair_influence_r = pearson(counts, influences);
    if (!std::isnan(study.pair_influence_r))
      study.pair_influence_p =
          correlation_pvalue(study.pair_influence_r, counts.size());
  }

  if (models.size() >= 2) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> cover_vecs, sign_vecs;
    for (std::size_t i : model_owner) {
      const PaperStudy& ps = study.papers[i];
      labels.push_back(ps.paper_id);
      cover_vecs.emplace_back(ps.cover.bits.begin(), ps.cover.bits.end());
      sign_vecs.push_back(ps.sign.values);
    }
    study.coverage_tree = hier_cluster(cover_vecs, labels);
    study.sign_tree = hier_cluster(sign_vecs, labels);
  }
  return study;
}

// ---------------------------------------------------------------------------
// Recommendation-shift study: how much each paper's model reorders a fixed
// candidate set. Candidates are the default model's top-k per query; each
// model's cost ranking of those candidates is compared against the baseline
// model's ranking by Spearman correlation.

struct RecShiftConfig {
  std::size_t k = 100;
  std::size_t max_fields = 2;
  unsigned jobs = 1;
};

struct RecShiftPaper {
  std::string paper_id;
  double influence_score = 0.0;
  double mean_spearman = std::numeric_limits<double>::quiet_NaN();
  double rec_shift = std::numeric_limits<double>::quiet_NaN();  // 1 - mean
  std::size_t queries_used = 0;
};

struct RecShiftStudy {
  std::vector<RecShiftPaper> papers;
  std::size_t queries_total = 0;
  std::size_t queries_skipped = 0;  // fewer than 2 candidates
  // Pearson between the papers' influence ranks and rec-shift ranks.
  double influence_shift_r = std::numeric_limits<double>::quiet_NaN();
  double influence_shift_p = std::numeric_limits<double>::quiet_NaN();
};

inline RecShiftStudy run_rec_shift_study(const WeightModel& default_model,
                                         const PlusOneStudy& study,
                                         const std::vector<DatasetSchema>& schemas,
                                         const ConstraintSet& set,
                                         const RecShiftConfig& cfg = {}) {
  if (cfg.k < 2) throw ValidationError("rec-shift study: k must be >= 2");
  check_layout(default_model, set);

  struct QueryRef {
    const DatasetSchema* schema;
    Query query;
  };
  std::vector<QueryRef> queries;
  for (const auto& schema : schemas)
    for (auto& q : attribute_combinations(schema, cfg.max_fields))
      queries.push_back({&schema, std::move(q)});

  auto usable = study.usable();
  // rho[q][p]: agreement between baseline and paper p's ranking on query q;
  // NaN marks undefined (degenerate variance) entries.
  std::vector<std::vector<double>> rho(queries.size());
  std::vector<char> skipped(queries.size(), 0);

  parallel_for(queries.size(), cfg.jobs, [&](std::size_t qi) {
    auto recs = recommend(*queries[qi].schema, queries[qi].query, set,
                          default_model, cfg.k);
    if (recs.size() < 2) {
      skipped[qi] = 1;
      return;
    }
    std::vector<FeatureVector> fvs;
    fvs.reserve(recs.size());
    for (const auto& r : recs) fvs.push_back(featurize(r.spec, set));
    auto rank_under = [&](const WeightModel& m) {
      std::vector<double> costs;
      costs.reserve(fvs.size());
      for (const auto& fv : fvs) costs.push_back(cost(fv, m.weights));
      return fractional_ranks(costs);
    };
    auto base_ranks = rank_under(study.baseline);
    rho[qi].reserve(usable.size());
    for (const auto* ps : usable)
      rho[qi].push_back(spearman(base_ranks, rank_under(ps->model)));
  });

  RecShiftStudy out;
  out.queries_total = queries.size();
  for (std::size_t qi = 0; qi < queries.size(); ++qi)
    if (skipped[qi]) ++out.queries_skipped;

  for (std::size_t p = 0; p < usable.size(); ++p) {
    RecShiftPaper rp;
    rp.paper_id = usable[p]->paper_id;
    rp.influence_score = usable[p]->influence_score;
    double sum = 0.0;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      if (skipped[qi]) continue;
      double r = rho[qi][p];
      if (std::isnan(r)) continue;
      sum += r;
      ++rp.queries_used;
    }
    if (rp.queries_used > 0) {
      rp.mean_spearman = sum / static_cast<double>(rp.queries_used);
      rp.rec_shift = 1.0 - rp.mean_spearman;
    }
    out.papers.push_back(std::move(rp));
  }

  std::vector<double> influences, shifts;
  for (const auto& rp : out.papers)
    if (!std::isnan(rp.rec_shift)) {
      influences.push_back(rp.influence_score);
      shifts.push_back(rp.rec_shift);
    }
  if (influences.size() >= 3) {
    out.influence_shift_r =
        pearson(fractional_ranks(influences), fractional_ranks(shifts));
    if (!std::isnan(out.influence_shift_r))
      out.influence_shift_p =
          correlation_pvalue(out.influence_shift_r, influences.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mark-preference experiments: five fixed perturbations of the channel
// -effectiveness baseline (single preference, its reverse, exact conflict,
// partial conflict, partial agreement) plus a duplicate-count sweep, each
// checked against the shifts it must and must not produce.

struct MiniConfig {
  TrainConfig train;
  // The sweep runs at a stiffer regularization so the shift-vs-duplicates
  // curve rises visibly before leveling out; at the default training
  // regularization the curve saturates almost immediately.
  double sweep_regularization = 4.0;
  std::vector<int> sweep_counts = {1, 2, 3, 5, 10, 20};
};

struct MiniShiftRow {
  std::string constraint;
  double baseline = 0.0;
  double plusone = 0.0;
  double shift = 0.0;
  double normalized = 0.0;  // single-normalizer shift vs the baseline
};

struct MiniExperiment {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  std::vector<MiniShiftRow> rows;
  double ratio = 0.0;  // partial agreement only: |shared| / mean coside
};

struct SweepPoint {
  int count = 0;
  double shift = 0.0;  // max absolute normalized shift at this duplicate count
};

struct SweepResult {
  bool pass = false;
  std::string detail;
  std::vector<SweepPoint> points;
};

struct MiniReport {
  WeightModel baseline;
  double tolerance = 0.0;
  std::vector<MiniExperiment> experiments;
  SweepResult sweep;

  bool all_pass() const {
    for (const auto& e : experiments)
      if (!e.pass) return false;
    return sweep.pass;
  }
};

// Shared two-encoding skeleton: continuous x, discrete y, only the mark
// varies. Pairs built from it differ exactly on mark-specific constraints.
inline VizSpec mark_preference_spec(Mark mark) {
  VizSpec s;
  s.mark = mark;
  s.task = Task::value;
  s.encodings.push_back({Channel::x, detail::apt_field(AptDataType::quantitative),
                         ScaleType::linear, Aggregate::none, false});
  s.encodings.push_back({Channel::y, detail::apt_field(AptDataType::ordinal),
                         ScaleType::ordinal, Aggregate::none, false});
  return canonicalize(s);
}

inline RankedPair mark_preference_pair(Mark preferred, Mark rejected) {
  RankedPair p;
  p.paper_id = "mark_preference";
  p.positive = mark_preference_spec(preferred);
  p.negative = mark_preference_spec(rejected);
  p.task_label = "value";
  p.metric = std::string("mark:") + to_string(preferred) + ">" + to_string(rejected);
  p.significant = true;
  return p;
}

namespace detail {

// Soft constraints that fire for this mark's skeleton spec and for no other
// mark in the group: the coordinates a mark-preference pair can move.
inline std::vector<std::size_t> mark_distinctive_coords(
    Mark mark, const std::vector<Mark>& group, const ConstraintSet& set) {
  FeatureVector own = featurize(mark_preference_spec(mark), set);
  std::vector<FeatureVector> others;
  for (Mark m : group)
    if (m != mark) others.push_back(featurize(mark_preference_spec(m), set));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < own.counts.size(); ++i) {
    if (own.counts[i] <= 0) continue;
    bool unique = true;
    for (const auto& fv : others)
      if (fv.counts[i] != 0) unique = false;
    if (unique) out.push_back(i);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline MiniReport run_mini_experiments(const ConstraintSet& set,
                                       const MiniConfig& cfg = {}) {
  const std::vector<AptDataType> kTypes = {
      AptDataType::quantitative, AptDataType::ordinal, AptDataType::nominal};
  const auto apt_pairs = translate_apt_baseline(kTypes);

  MiniReport report;
  report.baseline = train(apt_pairs, set, cfg.train);
  report.tolerance = std::max(default_shift_eps(report.baseline), 1e-12);
  const double tol = report.tolerance;

  const std::vector<Mark> group = {Mark::tick, Mark::point, Mark::line};
  std::vector<std::vector<std::size_t>> coords;
  for (Mark m : group) coords.push_back(detail::mark_distinctive_coords(m, group, set));

  // expected[g]: -1 shift below -tol, +1 above +tol, 0 within the band.
  auto run_case = [&](const std::string& id, const std::string& title,
                      const std::vector<RankedPair>& extra,
                      const std::vector<int>& expected, bool check_ratio) {
    MiniExperiment exp;
    exp.id = id;
    exp.title = title;
    std::vector<RankedPair> pairs = apt_pairs;
    pairs.insert(pairs.end(), extra.begin(), extra.end());
    WeightModel model = train(pairs, set, cfg.train);
    ShiftVector norm = normalized_shift_exp(report.baseline, model);

    bool ok = true;
    std::string why;
    std::vector<char> in_group(set.soft.size(), 0);
    for (std::size_t g = 0; g < group.size(); ++g) {
      if (coords[g].empty()) {
        ok = false;
        why = std::string("no distinctive soft constraints for mark ") +
              to_string(group[g]);
      }
      for (std::size_t i : coords[g]) {
        in_group[i] = 1;
        double s = model.weights[i] - report.baseline.weights[i];
        exp.rows.push_back({set.soft[i].name, report.baseline.weights[i],
                            model.weights[i], s, norm.values[i]});
        bool good = expected[g] > 0   ? s > tol
                    : expected[g] < 0 ? s < -tol
                                      : std::abs(s) <= tol;
        if (!good && why.empty()) {
          ok = false;
          why = set.soft[i].name + " shifted " + detail::format_double(s) +
                ", expected " +
                (expected[g] > 0   ? "> tolerance"
                 : expected[g] < 0 ? "< -tolerance"
                                   : "within tolerance");
        }
      }
    }
    for (std::size_t i = 0; i < set.soft.size(); ++i) {
      if (in_group[i]) continue;
      double s = model.weights[i] - report.baseline.weights[i];
      if (std::abs(s) > tol) {
        exp.rows.push_back({set.soft[i].name, report.baseline.weights[i],
                            model.weights[i], s, norm.values[i]});
        if (why.empty()) {
          ok = false;
          why = "unrelated constraint " + set.soft[i].name + " shifted " +
                detail::format_double(s);
        }
      }
    }
    if (check_ratio) {
      auto mean_abs = [&](std::size_t g) {
        double sum = 0.0;
        for (std::size_t i : coords[g])
          sum += std::abs(model.weights[i] - report.baseline.weights[i]);
        return coords[g].empty() ? 0.0 : sum / coords[g].size();
      };
      double shared = mean_abs(0);
      double coside = 0.5 * (mean_abs(1) + mean_abs(2));
      exp.ratio = coside > 0 ? shared / coside : 0.0;
      if (exp.ratio < 1.5 || exp.ratio > 2.5) {
        ok = false;
        if (why.empty())
          why = "shared/coside magnitude ratio " + detail::format_double(exp.ratio) +
                " outside [1.5, 2.5]";
      }
    }
    exp.pass = ok;
    exp.detail = ok ? "expected shift pattern observed" : why;
    if (ok && check_ratio)
      exp.detail += ", magnitude ratio " + detail::format_double(exp.ratio);
    report.experiments.push_back(std::move(exp));
  };

  auto tick_over_point = mark_preference_pair(Mark::tick, Mark::point);
  auto point_over_tick = mark_preference_pair(Mark::point, Mark::tick);
  auto line_over_tick = mark_preference_pair(Mark::line, Mark::tick);
  auto tick_over_line = mark_preference_pair(Mark::tick, Mark::line);

  run_case("A", "single preference: tick over point", {tick_over_point},
           {-1, +1, 0}, false);
  run_case("B", "reversed preference: point over tick", {point_over_tick},
           {+1, -1, 0}, false);
  run_case("C", "exact conflict: tick over point plus point over tick",
           {tick_over_point, point_over_tick}, {0, 0, 0}, false);
  run_case("D", "partial conflict: tick over point plus line over tick",
           {tick_over_point, line_over_tick}, {0, +1, -1}, false);
  run_case("E", "partial agreement: tick over point plus tick over line",
           {tick_over_point, tick_over_line}, {-1, +1, +1}, true);

  // Duplicate-count sweep: the same preference included k times. Measured
  // against a baseline trained with the sweep's own regularization.
  TrainConfig sweep_cfg = cfg.train;
  sweep_cfg.regularization = cfg.sweep_regularization;
  WeightModel sweep_base = train(apt_pairs, set, sweep_cfg);
  for (int k : cfg.sweep_counts) {
    if (k < 1) throw ValidationError("mini experiments: sweep counts must be >= 1");
    std::vector<RankedPair> pairs = apt_pairs;
    for (int c = 0; c < k; ++c) pairs.push_back(tick_over_point);
    WeightModel model = train(pairs, set, sweep_cfg);
    ShiftVector norm = normalized_shift_exp(sweep_base, model);
    double peak = 0.0;
    for (double v : norm.values) peak = std::max(peak, std::abs(v));
    report.sweep.points.push_back({k, peak});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < report.sweep.points.size(); ++i)
    if (report.sweep.points[i].shift + 1e-12 < report.sweep.points[i - 1].shift)
      monotone = false;
  double knee = 0.0, last = 0.0;
  for (const auto& pt : report.sweep.points) {
    if (pt.count <= 5 || knee == 0.0) knee = pt.shift;
    last = pt.shift;
  }
  double rise = knee > 0 ? (last - knee) / knee : 0.0;
  report.sweep.pass = monotone && rise < 0.25 && !report.sweep.points.empty();
  report.sweep.detail = std::string(monotone ? "monotone" : "NOT monotone") +
                        ", late rise " + detail::format_double(rise * 100.0) + "%";
  return report;
}

}  // namespace vizrec
