// Command-line front end: corpus ingestion, weight training, recommendation,
// and the batch study runners with their report artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <vizrec/apt.hpp>
#include <vizrec/evaluate.hpp>
#include <vizrec/learner.hpp>
#include <vizrec/meta.hpp>
#include <vizrec/parallel.hpp>
#include <vizrec/recommender.hpp>
#include <vizrec/report.hpp>
#include <vizrec/rules.hpp>
#include <vizrec/spec_model.hpp>
#include <vizrec/studies.hpp>
#include <vizrec/version.hpp>

namespace {

using namespace vizrec;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
  if (!out) throw ValidationError("write failed: " + path);
}

std::string join_args(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

std::string num_flag(double v) { return detail::fmt_num(v); }

// Inputs every run touches, collected so the manifest can hash them and
// stamp the report with the newest input mtime (not wall time, so reruns
// over unchanged inputs are byte-identical).
struct ManifestBuilder {
  RunManifest m;
  std::vector<std::string> paths;

  explicit ManifestBuilder(std::string command) { m.command = std::move(command); }

  std::string load(const std::string& path) {
    std::string content = read_file(path);
    m.add_input(path, content);
    paths.push_back(path);
    return content;
  }
  RunManifest finish() {
    m.timestamp = newest_input_timestamp(paths);
    return m;
  }
};

std::vector<RankedPair> full_apt_baseline() {
  using enum AptDataType;
  return translate_apt_baseline({quantitative, ordinal, nominal});
}

void add_train_config(ManifestBuilder& mb, const TrainConfig& tc) {
  mb.m.add_config("seed", std::to_string(tc.seed));
  mb.m.add_config("margin", num_flag(tc.margin));
  mb.m.add_config("regularization", num_flag(tc.regularization));
  mb.m.add_config("learning_rate", num_flag(tc.learning_rate));
  mb.m.add_config("epochs", std::to_string(tc.epochs));
}

// Shared state for the analyze/report family.
struct StudyInputs {
  std::string corpus_path;
  std::string rules_path;
  std::string baseline_corpus_path;  // empty: built-in perceptual-ranking pairs
  std::string out_dir = "reports";
  TrainConfig train = study_train_config();
  double snap_eps_rel = 1e-3;
  unsigned jobs = default_jobs();

  StudyCorpus corpus;
  ConstraintSet set;

  void load(ManifestBuilder& mb, bool needs_corpus = true) {
    set = parse_rules(mb.load(rules_path));
    if (needs_corpus) corpus = parse_corpus(mb.load(corpus_path));
  }
  std::vector<RankedPair> baseline_pairs(ManifestBuilder& mb) {
    if (baseline_corpus_path.empty()) {
      mb.m.add_config("baseline", "apt");
      return full_apt_baseline();
    }
    mb.m.add_config("baseline", baseline_corpus_path);
    StudyCorpus base = parse_corpus(mb.load(baseline_corpus_path));
    std::vector<RankedPair> pairs;
    for (const auto& [id, ps] : base.papers)
      for (const auto& p : training_pairs(ps)) pairs.push_back(p);
    return pairs;
  }
  PlusOneStudy run(ManifestBuilder& mb) {
    PlusOneConfig cfg;
    cfg.train = train;
    cfg.snap_eps_rel = snap_eps_rel;
    cfg.jobs = jobs;
    add_train_config(mb, train);
    mb.m.add_config("snap_eps_rel", num_flag(snap_eps_rel));
    return run_plus_one_study(corpus, baseline_pairs(mb), set, cfg);
  }
};

void emit_coverage(const RunManifest& m, const PlusOneStudy& study,
                   const ConstraintSet& set, const std::string& out_dir) {
  write_file(out_dir + "/coverage.csv", coverage_csv(m, study, set));
}

void emit_shifts(const RunManifest& m, const PlusOneStudy& study,
                 const ConstraintSet& set, const std::string& out_dir) {
  write_file(out_dir + "/sign_shifts.csv",
             shift_matrix_csv(m, study, set, ShiftKind::sign));
  write_file(out_dir + "/weight_shifts.csv",
             shift_matrix_csv(m, study, set, ShiftKind::normalized_multi));
  write_file(out_dir + "/shift_heatmap.svg",
             shift_heatmap_svg(m, study, set, ShiftKind::normalized_multi));
}

void emit_influence(const RunManifest& m, const PlusOneStudy& study,
                    const std::string& out_dir) {
  write_file(out_dir + "/influence.csv", influence_csv(m, study));
  if (study.coverage_tree) {
    write_file(out_dir + "/coverage_dendrogram.json",
               dendrogram_json(m, *study.coverage_tree).dump(2) + "\n");
    write_file(out_dir + "/coverage_dendrogram.svg",
               dendrogram_svg(m, *study.coverage_tree));
  }
  if (study.sign_tree) {
    write_file(out_dir + "/sign_dendrogram.json",
               dendrogram_json(m, *study.sign_tree).dump(2) + "\n");
    write_file(out_dir + "/sign_dendrogram.svg",
               dendrogram_svg(m, *study.sign_tree));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-based visualization recommender and study toolkit"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "validate a study corpus and summarize it");
  struct {
    std::string corpus, out;
  } ing;
  ingest->add_option("--corpus", ing.corpus, "corpus JSON path")->required();
  ingest->add_option("--out", ing.out, "write the validated corpus back out");
  ingest->callback([&] {
    ManifestBuilder mb(command);
    StudyCorpus corpus = parse_corpus(mb.load(ing.corpus));
    RunManifest m = mb.finish();
    std::cout << manifest_header(m) << corpus_summary(corpus);
    if (!ing.out.empty())
      write_file(ing.out, to_json(corpus).dump(2) + "\n");
  });

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "learn soft-constraint weights from ranked pairs");
  struct {
    std::string corpus, rules, baseline, out = "model.json";
    TrainConfig cfg;
  } tr;
  auto* tr_corpus = train_cmd->add_option("--corpus", tr.corpus, "corpus JSON path");
  auto* tr_base = train_cmd->add_option("--baseline", tr.baseline,
                                        "use a built-in corpus (apt)");
  tr_corpus->excludes(tr_base);
  train_cmd->add_option("--rules", tr.rules, "rule file path")->required();
  train_cmd->add_option("--out", tr.out, "output model path");
  train_cmd->add_option("--seed", tr.cfg.seed, "shuffle seed");
  train_cmd->add_option("--margin", tr.cfg.margin, "ranking margin");
  train_cmd->add_option("--reg", tr.cfg.regularization, "L2 regularization");
  train_cmd->add_option("--lr", tr.cfg.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", tr.cfg.epochs, "training epochs");
  train_cmd->callback([&] {
    ManifestBuilder mb(command);
    ConstraintSet set = parse_rules(mb.load(tr.rules));
    std::vector<RankedPair> pairs;
    if (!tr.baseline.empty()) {
      if (tr.baseline != "apt")
        throw ValidationError("unknown built-in corpus '" + tr.baseline + "' (expected: apt)");
      mb.m.add_config("baseline", "apt");
      pairs = full_apt_baseline();
    } else if (!tr.corpus.empty()) {
      StudyCorpus corpus = parse_corpus(mb.load(tr.corpus));
      for (const auto& [id, ps] : corpus.papers)
        for (const auto& p : training_pairs(ps)) pairs.push_back(p);
    } else {
      throw ValidationError("train: need --corpus or --baseline");
    }
    add_train_config(mb, tr.cfg);
    WeightModel model = train(pairs, set, tr.cfg);
    ojson j = to_json(model);
    j["manifest"] = to_json(mb.finish());
    write_file(tr.out, j.dump(2) + "\n");
    std::cout << "trained " << model.constraint_names.size() << " weights from "
              << model.pair_count << " pairs -> " << tr.out << "\n";
  });

  // ---- recommend ----
  auto* rec_cmd = app.add_subcommand("recommend", "rank visualization designs for a query");
  struct {
    std::string schema, rules, model, task = "value", out;
    std::vector<std::string> fields;
    std::size_t k = 5;
  } rc;
  rec_cmd->add_option("--schema", rc.schema, "dataset schema JSON")->required();
  rec_cmd->add_option("--fields", rc.fields, "fields to visualize")
      ->required()
      ->delimiter(',');
  rec_cmd->add_option("--task", rc.task, "task (value|summary)");
  rec_cmd->add_option("--rules", rc.rules, "rule file path")->required();
  rec_cmd->add_option("--model", rc.model, "trained model JSON (default: rule-file weights)");
  rec_cmd->add_option("--k", rc.k, "number of recommendations");
  rec_cmd->add_option("--out", rc.out, "output path (default: stdout)");
  rec_cmd->callback([&] {
    ManifestBuilder mb(command);
    ConstraintSet set = parse_rules(mb.load(rc.rules));
    DatasetSchema schema = parse_schema(mb.load(rc.schema));
    WeightModel model = rc.model.empty() ? default_weight_model(set)
                                         : parse_model(mb.load(rc.model));
    Query query;
    query.field_names = rc.fields;
    query.task = task_from(rc.task);
    mb.m.add_config("task", rc.task);
    mb.m.add_config("k", std::to_string(rc.k));
    auto recs = recommend(schema, query, set, model, rc.k);
    ojson head;
    head["manifest"] = to_json(mb.finish());
    std::string out = head.dump() + "\n";
    for (const auto& r : recs) {
      ojson line;
      line["rank"] = r.rank;
      line["cost"] = r.cost;
      line["spec"] = to_json(r.spec);
      out += line.dump() + "\n";
    }
    if (rc.out.empty())
      std::cout << out;
    else
      write_file(rc.out, out);
  });

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "run a study and emit its reports");
  analyze->require_subcommand(1);
  StudyInputs si;
  struct {
    std::vector<std::string> schemas;
    std::size_t k = 100;
    std::size_t max_fields = 2;
    double sweep_reg = 4.0;
  } an;

  auto add_study_flags = [&](CLI::App* sub, bool corpus_required) {
    auto* c = sub->add_option("--corpus", si.corpus_path, "study corpus JSON");
    if (corpus_required) c->required();
    sub->add_option("--rules", si.rules_path, "rule file path")->required();
    sub->add_option("--out-dir", si.out_dir, "report output directory");
    sub->add_option("--seed", si.train.seed, "shuffle seed");
    sub->add_option("--margin", si.train.margin, "ranking margin");
    sub->add_option("--reg", si.train.regularization, "L2 regularization");
    sub->add_option("--lr", si.train.learning_rate, "learning rate");
    sub->add_option("--epochs", si.train.epochs, "training epochs");
    sub->add_option("--jobs", si.jobs, "worker threads for batch runs");
    sub->add_option("--baseline-corpus", si.baseline_corpus_path,
                    "baseline corpus JSON (default: built-in perceptual ranking)");
    sub->add_option("--snap-eps", si.snap_eps_rel,
                    "relative weight-snapping threshold");
  };

  auto* a_cov = analyze->add_subcommand("coverage", "constraint coverage per paper");
  add_study_flags(a_cov, true);
  a_cov->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb);
    PlusOneStudy study;  // coverage needs no training; fill papers only
    for (const auto& [id, pairs] : si.corpus.papers) {
      PaperStudy ps;
      ps.paper_id = id;
      ps.pair_count = training_pairs(pairs).size();
      ps.cover = coverage(id, pairs, si.set);
      study.papers.push_back(std::move(ps));
    }
    emit_coverage(mb.finish(), study, si.set, si.out_dir);
    std::cout << "wrote " << si.out_dir << "/coverage.csv\n";
  });

  auto* a_shift = analyze->add_subcommand("shifts", "plus-one weight-shift matrices");
  add_study_flags(a_shift, true);
  a_shift->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb);
    PlusOneStudy study = si.run(mb);
    emit_shifts(mb.finish(), study, si.set, si.out_dir);
    std::cout << "wrote " << si.out_dir << "/{sign_shifts,weight_shifts}.csv and shift_heatmap.svg\n";
  });

  auto* a_infl = analyze->add_subcommand("influence", "paper influence ranking and dendrograms");
  add_study_flags(a_infl, true);
  a_infl->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb);
    PlusOneStudy study = si.run(mb);
    emit_influence(mb.finish(), study, si.out_dir);
    std::cout << "wrote " << si.out_dir << "/influence.csv\n";
  });

  auto* a_rec = analyze->add_subcommand("recshift", "recommendation shift per paper");
  add_study_flags(a_rec, true);
  a_rec->add_option("--schemas", an.schemas, "dataset schema JSONs")
      ->required()
      ->delimiter(',');
  a_rec->add_option("--k", an.k, "top-k recommendations per query");
  a_rec->add_option("--max-fields", an.max_fields, "max fields per query (1..3)");
  a_rec->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb);
    std::vector<DatasetSchema> schemas;
    for (const auto& path : an.schemas)
      schemas.push_back(parse_schema(mb.load(path)));
    PlusOneStudy study = si.run(mb);
    mb.m.add_config("k", std::to_string(an.k));
    mb.m.add_config("max_fields", std::to_string(an.max_fields));
    RecShiftConfig rcfg;
    rcfg.k = an.k;
    rcfg.max_fields = an.max_fields;
    rcfg.jobs = si.jobs;
    RecShiftStudy rs =
        run_rec_shift_study(default_weight_model(si.set), study, schemas, si.set, rcfg);
    write_file(si.out_dir + "/recshift.csv", recshift_csv(mb.finish(), rs));
    std::cout << "wrote " << si.out_dir << "/recshift.csv\n";
  });

  auto* a_mini = analyze->add_subcommand("mini", "controlled single-pair experiments");
  add_study_flags(a_mini, false);
  a_mini->add_option("--sweep-reg", an.sweep_reg,
                     "regularization for the duplicate-count sweep");
  a_mini->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb, /*needs_corpus=*/false);
    MiniConfig mcfg;
    mcfg.train = si.train;
    mcfg.sweep_regularization = an.sweep_reg;
    add_train_config(mb, si.train);
    mb.m.add_config("sweep_regularization", num_flag(an.sweep_reg));
    MiniReport report = run_mini_experiments(si.set, mcfg);
    RunManifest m = mb.finish();
    write_file(si.out_dir + "/mini.csv", mini_csv(m, report));
    write_file(si.out_dir + "/mini_summary.txt",
               manifest_header(m) + mini_summary(report));
    std::cout << mini_summary(report);
  });

  // ---- report ----
  auto* rep = app.add_subcommand("report", "run every study and emit all artifacts");
  add_study_flags(rep, true);
  rep->add_option("--schemas", an.schemas, "dataset schema JSONs")->delimiter(',');
  rep->add_option("--k", an.k, "top-k recommendations per query");
  rep->add_option("--max-fields", an.max_fields, "max fields per query (1..3)");
  rep->add_option("--sweep-reg", an.sweep_reg,
                  "regularization for the duplicate-count sweep");
  rep->callback([&] {
    ManifestBuilder mb(command);
    si.load(mb);
    std::vector<DatasetSchema> schemas;
    for (const auto& path : an.schemas)
      schemas.push_back(parse_schema(mb.load(path)));
    PlusOneStudy study = si.run(mb);
    MiniConfig mcfg;
    mcfg.train = si.train;
    mcfg.sweep_regularization = an.sweep_reg;
    MiniReport mini = run_mini_experiments(si.set, mcfg);
    RunManifest m = mb.finish();
    write_file(si.out_dir + "/corpus_summary.csv",
               manifest_header(m) + corpus_summary(si.corpus));
    emit_coverage(m, study, si.set, si.out_dir);
    emit_shifts(m, study, si.set, si.out_dir);
    emit_influence(m, study, si.out_dir);
    write_file(si.out_dir + "/mini.csv", mini_csv(m, mini));
    write_file(si.out_dir + "/mini_summary.txt", manifest_header(m) + mini_summary(mini));
    if (!schemas.empty()) {
      RecShiftConfig rcfg;
      rcfg.k = an.k;
      rcfg.max_fields = an.max_fields;
      rcfg.jobs = si.jobs;
      RecShiftStudy rs =
          run_rec_shift_study(default_weight_model(si.set), study, schemas, si.set, rcfg);
      write_file(si.out_dir + "/recshift.csv", recshift_csv(m, rs));
    }
    std::cout << "wrote reports to " << si.out_dir << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
