#pragma once

#include <sys/stat.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <string>
#include <utility>
#include <vector>

#include "vizrec/cluster.hpp"
#include "vizrec/common.hpp"
#include "vizrec/spec_model.hpp"
#include "vizrec/studies.hpp"
#include "vizrec/version.hpp"

namespace vizrec {

// Provenance block embedded in every emitted report. The timestamp is the
// newest modification time of the inputs, not the wall clock, so rerunning a
// command on unchanged inputs reproduces its outputs byte for byte.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash
  std::vector<std::pair<std::string, std::string>> config;  // key, value
  std::string version = kVersion;
  std::string timestamp;

  void add_input(const std::string& path, const std::string& content) {
    inputs.emplace_back(path, fnv1a64_hex(content));
  }
  void add_config(const std::string& key, const std::string& value) {
    config.emplace_back(key, value);
  }
};

namespace detail {

inline std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string newest_input_timestamp(const std::vector<std::string>& paths) {
  std::time_t newest = 0;
  for (const auto& p : paths) {
    struct stat st{};
    if (::stat(p.c_str(), &st) != 0)
      throw ValidationError("cannot stat input file: " + p);
    newest = std::max(newest, st.st_mtime);
  }
  return detail::iso_utc(newest);
}

inline std::string manifest_header(const RunManifest& m, const char* prefix = "# ") {
  std::string out;
  out += prefix;
  out += std::string(kToolName) + " " + m.version + "\n";
  out += prefix;
  out += "command: " + m.command + "\n";
  for (const auto& [path, hash] : m.inputs)
    out += std::string(prefix) + "input: " + path + " fnv1a64=" + hash + "\n";
  for (const auto& [key, value] : m.config)
    out += std::string(prefix) + "config: " + key + "=" + value + "\n";
  out += prefix;
  out += "inputs-newest: " + m.timestamp + "\n";
  return out;
}

inline ojson to_json(const RunManifest& m) {
  ojson j;
  j["tool"] = kToolName;
  j["version"] = m.version;
  j["command"] = m.command;
  ojson inputs = ojson::array();
  for (const auto& [path, hash] : m.inputs)
    inputs.push_back({{"path", path}, {"fnv1a64", hash}});
  j["inputs"] = std::move(inputs);
  ojson cfg = ojson::object();
  for (const auto& [key, value] : m.config) cfg[key] = value;
  j["config"] = std::move(cfg);
  j["inputs_newest"] = m.timestamp;
  return j;
}

// ---------------------------------------------------------------------------
// CSV reports

inline std::string coverage_csv(const RunManifest& m, const PlusOneStudy& study,
                                const ConstraintSet& set) {
  std::string out = manifest_header(m);
  out += "paper";
  for (const auto& c : set.soft) out += "," + detail::csv_escape(c.name);
  out += "\n";
  for (const auto& ps : study.papers) {
    out += detail::csv_escape(ps.paper_id);
    for (int b : ps.cover.bits) out += b ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

inline std::string shift_matrix_csv(const RunManifest& m, const PlusOneStudy& study,
                                    const ConstraintSet& set, ShiftKind kind) {
  std::string out = manifest_header(m);
  out += "paper";
  for (const auto& c : set.soft) out += "," + detail::csv_escape(c.name);
  out += "\n";
  for (const auto& ps : study.papers) {
    if (ps.failed) continue;
    const ShiftVector& sv = kind == ShiftKind::sign ? ps.sign : ps.shift;
    out += detail::csv_escape(ps.paper_id);
    for (double v : sv.values) out += "," + detail::fmt_num(v);
    out += "\n";
  }
  return out;
}

// Papers by influence, largest first; failed papers trail with their error.
inline std::string influence_csv(const RunManifest& m, const PlusOneStudy& study) {
  std::string out = manifest_header(m);
  out += "# pair-count vs influence: r=" + detail::fmt_num(study.pair_influence_r) +
         " p=" + detail::fmt_num(study.pair_influence_p) + "\n";
  out += "rank,paper,pairs,influence,status\n";
  std::vector<const PaperStudy*> ok, failed;
  for (const auto& ps : study.papers)
    (ps.failed ? failed : ok).push_back(&ps);
  std::stable_sort(ok.begin(), ok.end(), [](const PaperStudy* a, const PaperStudy* b) {
    return a->influence_score > b->influence_score;
  });
  int rank = 0;
  for (const auto* ps : ok) {
    out += std::to_string(++rank) + "," + detail::csv_escape(ps->paper_id) + "," +
           std::to_string(ps->pair_count) + "," +
           detail::fmt_num(ps->influence_score) + ",ok\n";
  }
  for (const auto* ps : failed)
    out += "," + detail::csv_escape(ps->paper_id) + "," +
           std::to_string(ps->pair_count) + ",," +
           detail::csv_escape("failed: " + ps->error) + "\n";
  return out;
}

inline std::string recshift_csv(const RunManifest& m, const RecShiftStudy& study) {
  std::string out = manifest_header(m);
  out += "# influence rank vs rec-shift rank: r=" +
         detail::fmt_num(study.influence_shift_r) +
         " p=" + detail::fmt_num(study.influence_shift_p) + "\n";
  out += "# queries: " + std::to_string(study.queries_total) + " total, " +
         std::to_string(study.queries_skipped) + " skipped (fewer than 2 candidates)\n";
  out += "paper,influence,mean_spearman,rec_shift,queries_used\n";
  for (const auto& rp : study.papers)
    out += detail::csv_escape(rp.paper_id) + "," +
           detail::fmt_num(rp.influence_score) + "," +
           detail::fmt_num(rp.mean_spearman) + "," + detail::fmt_num(rp.rec_shift) +
           "," + std::to_string(rp.queries_used) + "\n";
  return out;
}

inline std::string mini_csv(const RunManifest& m, const MiniReport& report) {
  std::string out = manifest_header(m);
  out += "# tolerance: " + detail::fmt_num(report.tolerance) + "\n";
  out += "experiment,constraint,baseline,plusone,shift,normalized\n";
  for (const auto& exp : report.experiments)
    for (const auto& row : exp.rows)
      out += exp.id + "," + detail::csv_escape(row.constraint) + "," +
             detail::fmt_num(row.baseline) + "," + detail::fmt_num(row.plusone) +
             "," + detail::fmt_num(row.shift) + "," +
             detail::fmt_num(row.normalized) + "\n";
  for (const auto& pt : report.sweep.points)
    out += "F,duplicates_" + std::to_string(pt.count) + ",,,," +
           detail::fmt_num(pt.shift) + "\n";
  return out;
}

inline std::string mini_summary(const MiniReport& report) {
  std::string out;
  for (const auto& exp : report.experiments)
    out += exp.id + " " + (exp.pass ? "PASS" : "FAIL") + "  " + exp.title + ": " +
           exp.detail + "\n";
  out += std::string("F ") + (report.sweep.pass ? "PASS" : "FAIL") +
         "  duplicate-count sweep: " + report.sweep.detail + " [";
  for (std::size_t i = 0; i < report.sweep.points.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(report.sweep.points[i].count) + ":" +
           detail::fmt_num(report.sweep.points[i].shift);
  }
  out += "]\n";
  out += std::string("overall: ") + (report.all_pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

inline std::string corpus_summary(const StudyCorpus& corpus) {
  std::string out = "paper,pairs,significant,excluded\n";
  std::size_t total = 0, kept = 0;
  for (const auto& [id, pairs] : corpus.papers) {
    std::size_t sig = training_pairs(pairs).size();
    out += detail::csv_escape(id) + "," + std::to_string(pairs.size()) + "," +
           std::to_string(sig) + "," + std::to_string(pairs.size() - sig) + "\n";
    total += pairs.size();
    kept += sig;
  }
  out += "total," + std::to_string(total) + "," + std::to_string(kept) + "," +
         std::to_string(total - kept) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Dendrogram reports

inline ojson dendrogram_json(const RunManifest& m, const Dendrogram& dg) {
  ojson j;
  j["manifest"] = to_json(m);
  j["leaves"] = dg.leaves;
  ojson merges = ojson::array();
  for (const auto& mg : dg.merges) merges.push_back({mg.a, mg.b, mg.height});
  j["merges"] = std::move(merges);
  return j;
}

namespace detail {

// Left-to-right leaf order that keeps merge brackets from crossing.
inline void dendro_leaf_order(const Dendrogram& dg, int node,
                              std::vector<int>& out) {
  int n = static_cast<int>(dg.leaves.size());
  if (node < n) {
    out.push_back(node);
    return;
  }
  const Merge& mg = dg.merges[node - n];
  dendro_leaf_order(dg, mg.a, out);
  dendro_leaf_order(dg, mg.b, out);
}

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string dendrogram_svg(const RunManifest& m, const Dendrogram& dg) {
  const int n = static_cast<int>(dg.leaves.size());
  const double row_h = 22.0, label_w = 170.0, tree_w = 420.0;
  const double pad = 16.0;
  const double width = label_w + tree_w + pad * 2;
  const double height = n * row_h + pad * 2;

  std::vector<int> order;
  if (n == 1) order.push_back(0);
  else detail::dendro_leaf_order(dg, 2 * n - 2, order);
  std::vector<double> ypos(2 * n - 1, 0.0);
  for (int slot = 0; slot < n; ++slot)
    ypos[order[slot]] = pad + row_h * (slot + 0.5);

  double h_max = 0.0;
  for (const auto& mg : dg.merges) h_max = std::max(h_max, mg.height);
  auto xpos = [&](double h) {
    return label_w + pad + (h_max > 0 ? tree_w * (h / h_max) : 0.0);
  };

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<!--\n" + manifest_header(m, "  ") + "-->\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
         "\" font-family=\"monospace\" font-size=\"12\">\n";
  for (int i = 0; i < n; ++i)
    svg += "  <text x=\"" + detail::svg_num(label_w + pad - 8) + "\" y=\"" +
           detail::svg_num(ypos[i] + 4) + "\" text-anchor=\"end\">" +
           detail::xml_escape(dg.leaves[i]) + "</text>\n";
  std::vector<double> xnode(2 * n - 1, label_w + pad);
  for (std::size_t k = 0; k < dg.merges.size(); ++k) {
    const Merge& mg = dg.merges[k];
    int id = n + static_cast<int>(k);
    double x = xpos(mg.height);
    double ya = ypos[mg.a], yb = ypos[mg.b];
    svg += "  <polyline fill=\"none\" stroke=\"#333\" points=\"" +
           detail::svg_num(xnode[mg.a]) + "," + detail::svg_num(ya) + " " +
           detail::svg_num(x) + "," + detail::svg_num(ya) + " " +
           detail::svg_num(x) + "," + detail::svg_num(yb) + " " +
           detail::svg_num(xnode[mg.b]) + "," + detail::svg_num(yb) + "\"/>\n";
    ypos[id] = (ya + yb) / 2.0;
    xnode[id] = x;
  }
  svg += "</svg>\n";
  return svg;
}

// Papers-by-constraints heatmap of a shift matrix. Constraints that shift for
// no paper say nothing about the corpus, so they are dropped by default to
// keep the picture readable.
inline std::string shift_heatmap_svg(const RunManifest& m, const PlusOneStudy& study,
                                     const ConstraintSet& set, ShiftKind kind,
                                     bool drop_zero_columns = true) {
  std::vector<const PaperStudy*> rows;
  for (const auto& ps : study.papers)
    if (!ps.failed) rows.push_back(&ps);
  auto value_at = [&](const PaperStudy* ps, std::size_t c) {
    const ShiftVector& sv = kind == ShiftKind::sign ? ps->sign : ps->shift;
    return c < sv.values.size() ? sv.values[c] : 0.0;
  };
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < set.soft.size(); ++c) {
    bool nonzero = false;
    for (const auto* ps : rows) nonzero = nonzero || value_at(ps, c) != 0.0;
    if (nonzero || !drop_zero_columns) cols.push_back(c);
  }
  double vmax = 0.0;
  for (const auto* ps : rows)
    for (std::size_t c : cols) vmax = std::max(vmax, std::abs(value_at(ps, c)));
  if (vmax == 0.0) vmax = 1.0;

  const double cell = 16.0, label_w = 170.0, label_h = 150.0, pad = 10.0;
  const double width = label_w + cols.size() * cell + pad * 2;
  const double height = label_h + rows.size() * cell + pad * 2;

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<!--\n" + manifest_header(m, "  ") + "-->\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
         "\" font-family=\"monospace\" font-size=\"10\">\n";
  for (std::size_t j = 0; j < cols.size(); ++j) {
    double x = label_w + pad + j * cell + cell / 2;
    svg += "  <text x=\"" + detail::svg_num(x) + "\" y=\"" +
           detail::svg_num(label_h + pad - 6) + "\" text-anchor=\"start\" " +
           "transform=\"rotate(-60 " + detail::svg_num(x) + " " +
           detail::svg_num(label_h + pad - 6) + ")\">" +
           detail::xml_escape(set.soft[cols[j]].name) + "</text>\n";
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double y = label_h + pad + i * cell;
    svg += "  <text x=\"" + detail::svg_num(label_w + pad - 8) + "\" y=\"" +
           detail::svg_num(y + cell - 4) + "\" text-anchor=\"end\">" +
           detail::xml_escape(rows[i]->paper_id) + "</text>\n";
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double v = value_at(rows[i], cols[j]);
      int k = static_cast<int>(std::lround(200.0 * std::abs(v) / vmax));
      int r = 255, g = 255, b = 255;
      if (v > 0) { g -= k; b -= k; }
      if (v < 0) { r -= k; g -= k; }
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", r, g, b);
      svg += "  <rect x=\"" + detail::svg_num(label_w + pad + j * cell) +
             "\" y=\"" + detail::svg_num(y) + "\" width=\"" +
             detail::svg_num(cell) + "\" height=\"" + detail::svg_num(cell) +
             "\" fill=\"" + color + "\" stroke=\"#ddd\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vizrec
