#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cproc/baseline.hpp"
#include "cproc/error.hpp"
#include "cproc/graph.hpp"
#include "cproc/rocbands.hpp"
#include "cproc/similarity.hpp"
#include "cproc/synthetic.hpp"
#include "cproc/topology.hpp"
#include "cproc/util.hpp"
#include "svg.hpp"

#ifndef CPROC_VERSION
#define CPROC_VERSION "unknown"
#endif

namespace cproc::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string config_file;

  std::string dataset;
  std::string name;
  std::vector<std::string> filtrations{"degree", "betweenness", "closeness", "communicability", "eigenvector"};
  std::string dims = "0,1";
  double p = 1.0;
  std::size_t resolution = 50;

  std::string scores;
  int knn = 20;
  int knn_train = 0;
  double alpha = 0.1;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string mode = "cond";
  double pool_split = 0.8;
  double calib_split = 0.5;
  double valid_split = 0.0;
  std::size_t min_stratum = 5;
  std::string stratum_policy = "error";
  std::size_t grid_points = 512;
  std::size_t bootstrap = 0;
  double level = 0.95;

  std::string model = "m1";
  std::size_t n_train = 2000, n_calib = 1000, n_test = 500;
  std::size_t reps = 200;
  std::vector<double> beta;
  std::vector<double> shift;
  double intercept = 0;
  double noise_low = 0, noise_high = 0;
  bool oracle_scores = false;

  std::vector<std::string> band_files;
  std::vector<std::string> legend;
  std::string roc;

  std::string out = ".";
  bool force = false;
  std::size_t workers = 0;
};

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (c.command == "topo" || c.command == "simmat" || c.command == "bands") {
    j["dataset"] = c.dataset;
    j["name"] = c.name;
    j["filtration"] = c.filtrations;
  }
  if (c.command == "topo") j["resolution"] = c.resolution;
  if (c.command == "simmat" || c.command == "bands") {
    j["dims"] = c.dims;
    j["wasserstein_p"] = c.p;
  }
  if (c.command == "bands" || c.command == "simulate") {
    j["knn"] = c.knn;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["mode"] = c.mode;
    j["min_stratum"] = c.min_stratum;
    j["stratum_policy"] = c.stratum_policy;
  }
  if (c.command == "bands") {
    j["scores"] = c.scores;
    j["knn_train"] = c.knn_train;
    j["repeats"] = c.repeats;
    j["pool_split"] = c.pool_split;
    j["calib_split"] = c.calib_split;
    j["valid_split"] = c.valid_split;
    j["grid_points"] = c.grid_points;
    j["bootstrap"] = c.bootstrap;
    j["level"] = c.level;
  }
  if (c.command == "simulate") {
    j["model"] = c.model;
    j["n_train"] = c.n_train;
    j["n_calib"] = c.n_calib;
    j["n_test"] = c.n_test;
    j["reps"] = c.reps;
    j["beta"] = c.beta;
    j["shift"] = c.shift;
    j["intercept"] = c.intercept;
    j["noise_low"] = c.noise_low;
    j["noise_high"] = c.noise_high;
    j["oracle_scores"] = c.oracle_scores;
  }
  if (c.command == "plot") {
    j["bands"] = c.band_files;
    j["legend"] = c.legend;
    j["roc"] = c.roc;
  }
  j["out"] = c.out;
  return j;
}

std::string provenance(const RunConfig& c) {
  return "# cproc " + version() + "\n# config " + config_json(c).dump() + "\n";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArgumentError("cannot write " + path.string());
  f << content;
  if (!f) throw ArgumentError("write failed: " + path.string());
}

std::size_t workers_of(const RunConfig& c) { return c.workers > 0 ? c.workers : default_workers(); }

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
}

DiagramSelection parse_dims(const std::string& text) {
  DiagramSelection sel{.dim0 = false, .dim1 = false};
  for (auto tok : split(text, ',')) {
    tok = trim(tok);
    if (tok == "0")
      sel.dim0 = true;
    else if (tok == "1")
      sel.dim1 = true;
    else
      throw ArgumentError("--dims: expected 0, 1 or 0,1");
  }
  if (!sel.dim0 && !sel.dim1) throw ArgumentError("--dims: empty selection");
  return sel;
}

StratumPolicy parse_policy(const std::string& text) {
  if (text == "error") return StratumPolicy::Error;
  if (text == "expand") return StratumPolicy::Expand;
  throw ArgumentError("--stratum-policy: expected error or expand");
}

std::vector<FiltrationKind> filtration_kinds(const RunConfig& c) {
  if (c.filtrations.empty()) throw ArgumentError("--filtration: at least one filtration required");
  std::vector<FiltrationKind> kinds;
  for (const auto& f : c.filtrations) kinds.push_back(parse_filtration(f));
  return kinds;
}

TuDataset load_dataset(RunConfig& c) {
  if (c.dataset.empty()) throw ArgumentError("--dataset is required");
  const fs::path dir = fs::path(c.dataset).lexically_normal();
  if (c.name.empty()) {
    auto base = dir.filename();
    if (base.empty()) base = dir.parent_path().filename();
    c.name = base.string();
  }
  return parse_tu_dataset(dir, c.name);
}

std::vector<PersistenceDiagram> diagrams_for(const TuDataset& ds, FiltrationKind kind, std::size_t workers) {
  std::vector<PersistenceDiagram> out(ds.graphs.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const auto& g = ds.graphs[i];
    out[i] = sublevel_persistence(g, compute_filtration(g, kind));
    out[i].graph_id = i;
  });
  return out;
}

double dataset_cap(std::span<const PersistenceDiagram> diagrams) {
  const double cap = max_finite_value(diagrams);
  return cap > 0 ? cap : 1.0;
}

// ---------------------------------------------------------------------------

int cmd_topo(RunConfig& c, std::ostream& out) {
  const auto kinds = filtration_kinds(c);
  const auto ds = load_dataset(c);
  fs::create_directories(c.out);
  const auto header = provenance(c);
  for (auto kind : kinds) {
    const std::string tag(to_string(kind));
    const fs::path dpath = fs::path(c.out) / ("diagrams_" + tag + ".csv");
    const fs::path ipath = fs::path(c.out) / ("images_" + tag + ".csv");
    if (!c.force && fs::exists(dpath) && fs::exists(ipath)) {
      out << "skip " << tag << ": outputs exist (use --force to rebuild)\n";
      continue;
    }
    const auto diagrams = diagrams_for(ds, kind, workers_of(c));
    ImageOptions opt;
    opt.resolution = c.resolution;
    opt.cap = dataset_cap(diagrams);
    std::vector<PersistenceImage> images(diagrams.size());
    parallel_for(images.size(), workers_of(c), [&](std::size_t i) { images[i] = persistence_image(diagrams[i], opt); });

    std::ostringstream d, im;
    d << header << "# cap " << format_double(opt.cap) << '\n';
    write_diagrams_csv(d, diagrams);
    im << header << "# cap " << format_double(opt.cap) << " sigma " << format_double(opt.cap / 20.0) << '\n';
    write_images_csv(im, images);
    write_file(dpath, d.str());
    write_file(ipath, im.str());
    out << tag << ": " << diagrams.size() << " diagrams\n";
  }
  return kExitOk;
}

std::uint64_t matrix_key(const TuDataset& ds, const RunConfig& c) {
  Fnv1a h;
  h.update(std::uint64_t{ds.graphs.size()});
  for (const auto& g : ds.graphs) {
    h.update(std::uint64_t{g.num_nodes});
    h.update(std::uint64_t{g.edges.size()});
    for (const auto& e : g.edges) h.update((std::uint64_t{e.u} << 32) | e.v);
  }
  for (const auto& f : c.filtrations) h.update(std::string_view(f));
  h.update(std::string_view(c.dims));
  h.update(c.p);
  return h.digest();
}

SimilarityMatrix obtain_matrix(RunConfig& c, const TuDataset& ds, std::ostream& out, std::ostream& err) {
  if (!(c.p >= 1)) throw ArgumentError("--wasserstein-p must be >= 1");
  const auto kinds = filtration_kinds(c);
  const auto sel = parse_dims(c.dims);
  const auto key = matrix_key(ds, c);
  fs::create_directories(c.out);
  const fs::path cache = fs::path(c.out) / "similarity.bin";

  if (!c.force && fs::exists(cache)) {
    auto cached = read_matrix_binary(cache);
    if (cached && cached->size() == ds.graphs.size() && cached->meta().hash == key) {
      out << "cache hit: " << cache.string() << '\n';
      return std::move(*cached);
    }
    err << "warning: " << cache.string() << " is stale or corrupt, recomputing\n";
  }

  std::vector<SimilarityMatrix> parts;
  std::string names;
  for (auto kind : kinds) {
    const auto diagrams = diagrams_for(ds, kind, workers_of(c));
    const double cap = dataset_cap(diagrams);
    std::vector<PersistenceDiagram> capped;
    capped.reserve(diagrams.size());
    for (const auto& d : diagrams) capped.push_back(cap_diagram(d, cap, sel));
    parts.push_back(build_similarity_matrix(capped, c.p, workers_of(c)));
    if (!names.empty()) names += ',';
    names += to_string(kind);
  }
  SimilarityMatrix m = parts.size() == 1 ? std::move(parts.front()) : combine_matrices(parts, c.p);
  m.meta().p = c.p;
  m.meta().filtrations = names;
  m.meta().hash = key;
  write_matrix_binary(cache, m, provenance(c));
  return m;
}

int cmd_simmat(RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(c);
  const auto m = obtain_matrix(c, ds, out, err);
  std::ostringstream csv;
  csv << provenance(c);
  write_matrix_csv(csv, m);
  write_file(fs::path(c.out) / "similarity.csv", csv.str());
  out << "similarity matrix " << m.size() << 'x' << m.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bands

void write_roc_csv(std::ostream& os, const RocCurve& roc) {
  os << "threshold,fpr,tpr\n";
  for (const auto& p : roc.points)
    os << format_double(p.threshold) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

std::vector<std::pair<double, double>> read_roc_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open " + path.string());
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(f, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "threshold,fpr,tpr") throw ParseError(path.string(), number, "bad header");
      header = true;
      continue;
    }
    const auto fields = split(t, ',');
    if (fields.size() != 3) throw ParseError(path.string(), number, "expected 3 columns");
    try {
      pts.emplace_back(parse_double(fields[1]), parse_double(fields[2]));
    } catch (const std::exception&) {
      throw ParseError(path.string(), number, "malformed number");
    }
  }
  if (pts.empty()) throw ParseError(path.string(), number, "no rows");
  return pts;
}

std::vector<std::pair<double, double>> roc_points(const RocCurve& roc) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : roc.points) pts.emplace_back(p.fpr, p.tpr);
  return pts;
}

// Per-lambda mean of the repeat bands, evaluated on a shared uniform grid.
RocBand average_band(const std::vector<BandResult>& reps, std::span<const double> grid, BandMode mode, double alpha) {
  RocBand avg;
  avg.mode = mode;
  avg.alpha = alpha;
  avg.lambda.assign(grid.begin(), grid.end());
  const std::size_t G = grid.size();
  avg.sen_lo.assign(G, 0);
  avg.sen_up.assign(G, 0);
  avg.spe_lo.assign(G, 0);
  avg.spe_up.assign(G, 0);
  for (const auto& r : reps)
    for (std::size_t g = 0; g < G; ++g) {
      const auto v = band_at(r.pos_intervals, r.neg_intervals, grid[g]);
      avg.sen_lo[g] += v.sen_lo;
      avg.sen_up[g] += v.sen_up;
      avg.spe_lo[g] += v.spe_lo;
      avg.spe_up[g] += v.spe_up;
    }
  const auto n = static_cast<double>(reps.size());
  for (std::size_t g = 0; g < G; ++g) {
    avg.sen_lo[g] /= n;
    avg.sen_up[g] /= n;
    avg.spe_lo[g] /= n;
    avg.spe_up[g] /= n;
  }
  avg.auc_lo = parametric_auc(avg.spe_up, avg.sen_lo);
  avg.auc_up = parametric_auc(avg.spe_lo, avg.sen_up);
  return avg;
}

RocBand as_roc_band(const BootstrapBand& b) {
  RocBand r;
  r.lambda = b.lambda;
  r.sen_lo = b.tpr_lo;
  r.sen_up = b.tpr_up;
  r.spe_lo = b.fpr_lo;
  r.spe_up = b.fpr_up;
  r.auc_lo = parametric_auc(r.spe_up, r.sen_lo);
  r.auc_up = parametric_auc(r.spe_lo, r.sen_up);
  return r;
}

json summary_json(const BandSummary& s) {
  json j;
  j["auc"] = s.auc;
  j["auc_lo"] = s.auc_lo;
  j["auc_up"] = s.auc_up;
  j["mean_bw_sen"] = s.mean_bw_sen;
  j["mean_bw_spe"] = s.mean_bw_spe;
  return j;
}

struct TaskInput {
  std::vector<double> scores;
  std::vector<int> labels;
};

json finish_task(const RunConfig& c, const std::string& suffix, const std::vector<BandResult>& reps,
                 const std::vector<TaskInput>& inputs, const std::vector<std::vector<std::size_t>>& tests,
                 BandMode mode) {
  const fs::path dir(c.out);
  const auto header = provenance(c);
  json per_rep = json::array();
  double auc = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::ostringstream b, r;
    b << header << "# repeat " << i << " seed " << c.seed + i << '\n';
    write_band_csv(b, reps[i].band);
    r << header << "# repeat " << i << " seed " << c.seed + i << '\n';
    write_roc_csv(r, reps[i].roc);
    write_file(dir / ("band_rep" + std::to_string(i) + suffix + ".csv"), b.str());
    write_file(dir / ("roc_rep" + std::to_string(i) + suffix + ".csv"), r.str());
    auto s = summary_json(summarize(reps[i].band, reps[i].roc.auc));
    s["seed"] = c.seed + i;
    s["n_test"] = tests[i].size();
    per_rep.push_back(std::move(s));
    auc += reps[i].roc.auc;
  }
  auc /= static_cast<double>(reps.size());

  const auto grid = uniform_grid(c.grid_points);
  const auto avg = average_band(reps, grid, mode, c.alpha);
  std::ostringstream b;
  b << header << "# mean over " << reps.size() << " repeats\n";
  write_band_csv(b, avg);
  write_file(dir / ("band" + suffix + ".csv"), b.str());

  json j = summary_json(summarize(avg, auc));
  j["alpha"] = c.alpha;
  j["mode"] = std::string(to_string(mode));
  j["K"] = c.knn;
  j["repeats"] = reps.size();
  j["per_repeat"] = std::move(per_rep);

  std::vector<PlotBand> plots{{std::string(to_string(mode)) + " CP-ROC band", avg}};
  if (c.bootstrap > 0) {
    BootstrapBand mean;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      std::vector<double> s;
      std::vector<int> l;
      for (auto id : tests[i]) {
        s.push_back(inputs[i].scores[id]);
        l.push_back(inputs[i].labels[id]);
      }
      const auto bb = bootstrap_bands(s, l, grid, c.bootstrap, c.level, c.seed + i, workers_of(c));
      if (i == 0) {
        mean = bb;
        continue;
      }
      for (std::size_t g = 0; g < grid.size(); ++g) {
        mean.tpr_lo[g] += bb.tpr_lo[g];
        mean.tpr_up[g] += bb.tpr_up[g];
        mean.fpr_lo[g] += bb.fpr_lo[g];
        mean.fpr_up[g] += bb.fpr_up[g];
      }
    }
    const auto n = static_cast<double>(reps.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      mean.tpr_lo[g] /= n;
      mean.tpr_up[g] /= n;
      mean.fpr_lo[g] /= n;
      mean.fpr_up[g] /= n;
    }
    std::ostringstream bs;
    bs << header << "# bootstrap resamples " << c.bootstrap << " level " << format_double(c.level) << '\n';
    write_bootstrap_csv(bs, mean);
    write_file(dir / ("bootstrap_band" + suffix + ".csv"), bs.str());
    const auto rb = as_roc_band(mean);
    j["bootstrap"] = {{"resamples", c.bootstrap},
                      {"level", c.level},
                      {"auc_lo", rb.auc_lo},
                      {"auc_up", rb.auc_up},
                      {"mean_bw_tpr", mean_bandwidth(rb.lambda, rb.sen_lo, rb.sen_up)},
                      {"mean_bw_fpr", mean_bandwidth(rb.lambda, rb.spe_lo, rb.spe_up)}};
    plots.push_back({"bootstrap band", rb});
  }
  write_file(dir / ("band" + suffix + ".svg"),
             render_svg(plots, roc_points(reps.front().roc), "cproc " + version() + " config " + config_json(c).dump()));
  return j;
}

int cmd_bands(RunConfig& c, std::ostream& out, std::ostream& err) {
  check_alpha(c.alpha);
  if (c.knn <= 0) throw ArgumentError("--knn must be >= 1");
  if (c.repeats == 0) throw ArgumentError("--repeats must be >= 1");
  if (c.scores.empty()) throw ArgumentError("--scores is required");
  if (!fs::exists(c.scores)) throw ArgumentError("scores file not found: " + c.scores);
  const auto mode = parse_mode(c.mode);
  const auto ds = load_dataset(c);
  const auto scored = load_scores(c.scores, ds.graphs);
  const auto matrix = obtain_matrix(c, ds, out, err);

  BandConfig cfg;
  cfg.mode = mode;
  cfg.k = c.knn;
  cfg.k_train = c.knn_train;
  cfg.alpha = c.alpha;
  cfg.min_stratum = c.min_stratum;
  cfg.policy = parse_policy(c.stratum_policy);
  cfg.grid_points = c.grid_points;
  cfg.workers = workers_of(c);

  const SplitRatios ratios{c.pool_split, c.calib_split, c.valid_split};
  const auto base = split_dataset(ds.graphs.size(), c.seed, ratios);
  const auto header = provenance(c);

  // label -> per-repeat results; the binary case uses label 1 only.
  std::map<int, std::vector<BandResult>> results;
  std::map<int, std::vector<TaskInput>> inputs;
  std::vector<std::vector<std::size_t>> tests;
  for (std::size_t i = 0; i < c.repeats; ++i) {
    const auto split = i == 0 ? base : resplit_pool(base, c.seed + i);
    std::ostringstream s;
    s << header << "# repeat " << i << " seed " << c.seed + i << '\n';
    write_split_manifest(s, split);
    write_file(fs::path(c.out) / ("split_rep" + std::to_string(i) + ".csv"), s.str());

    const auto train = split.ids(Part::Train);
    const auto calib = split.ids(Part::Calib);
    const auto test = split.ids(Part::Test);
    tests.push_back(test);
    if (scored.num_labels == 2) {
      TaskInput in{scored.label_scores(1), {}};
      for (int y : scored.labels) in.labels.push_back(y == 1 ? 1 : 0);
      const BinaryTask task{in.scores, in.labels, train, calib, test};
      results[1].push_back(run_band_pipeline(matrix, task, cfg));
      inputs[1].push_back(std::move(in));
    } else {
      auto per_label = multilabel_bands(scored, matrix, train, calib, test, cfg);
      for (auto& [k, r] : per_label) {
        TaskInput in{scored.label_scores(k), {}};
        for (int y : scored.labels) in.labels.push_back(y == k ? 1 : 0);
        results[k].push_back(std::move(r));
        inputs[k].push_back(std::move(in));
      }
    }
  }

  json summary;
  summary["version"] = version();
  summary["config"] = config_json(c);
  if (scored.num_labels == 2) {
    const auto task = finish_task(c, "", results[1], inputs[1], tests, mode);
    for (const auto& [key, value] : task.items()) summary[key] = value;
  } else {
    json labels;
    for (auto& [k, reps] : results)
      labels[std::to_string(k)] = finish_task(c, "_label" + std::to_string(k), reps, inputs[k], tests, mode);
    summary["labels"] = std::move(labels);
  }
  write_file(fs::path(c.out) / "summary.json", summary.dump(2) + "\n");
  if (summary.contains("auc"))
    out << "auc " << format_double(summary["auc"].get<double>()) << " band [" << format_double(summary["auc_lo"].get<double>())
        << ", " << format_double(summary["auc_up"].get<double>()) << "]\n";
  out << "wrote " << c.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_simulate(RunConfig& c, std::ostream& out) {
  check_alpha(c.alpha);
  if (c.knn <= 0) throw ArgumentError("--knn must be >= 1");
  if (c.reps == 0) throw ArgumentError("--reps must be >= 1");
  SyntheticSpec spec;
  if (c.model == "m1")
    spec = model_m1();
  else if (c.model == "m2")
    spec = model_m2();
  else if (c.model == "m3")
    spec = model_m3();
  else
    throw ArgumentError("--model: expected m1, m2 or m3");
  if (!c.beta.empty()) {
    if (c.beta.size() != spec.beta.size()) throw ArgumentError("--beta: expected " + std::to_string(spec.beta.size()) + " values");
    spec.beta = c.beta;
  }
  spec.n_train = c.n_train;
  spec.n_calib = c.n_calib;
  spec.n_test = c.n_test;
  spec.shift = c.shift;
  spec.intercept = c.intercept;
  spec.noise_low = c.noise_low;
  spec.noise_high = c.noise_high;
  spec.seed = c.seed;

  std::vector<BandMode> modes;
  if (c.mode == "both")
    modes = {BandMode::Exchangeable, BandMode::Conditional};
  else
    modes = {parse_mode(c.mode)};

  fs::create_directories(c.out);
  const auto header = provenance(c);
  json report;
  report["version"] = version();
  report["config"] = config_json(c);
  json results;
  for (auto mode : modes) {
    ExperimentOptions opt;
    opt.alpha = c.alpha;
    opt.k = c.knn;
    opt.reps = c.reps;
    opt.mode = mode;
    opt.oracle_scores = c.oracle_scores;
    opt.min_stratum = c.min_stratum;
    opt.policy = parse_policy(c.stratum_policy);
    opt.workers = workers_of(c);
    const auto rep = coverage_experiment(spec, opt);
    const std::string tag(to_string(mode));
    std::ostringstream csv;
    csv << header;
    write_replicates_csv(csv, rep);
    write_file(fs::path(c.out) / ("replicates_" + tag + ".csv"), csv.str());
    results[tag] = {{"coverage_tpr", rep.coverage_tpr}, {"se_tpr", rep.se_tpr},
                    {"coverage_fpr", rep.coverage_fpr}, {"se_fpr", rep.se_fpr},
                    {"mean_bw_sen", rep.mean_bw_sen},   {"mean_bw_spe", rep.mean_bw_spe},
                    {"reps", rep.replicates.size()}};
    out << tag << ": coverage tpr " << format_double(rep.coverage_tpr) << " fpr " << format_double(rep.coverage_fpr)
        << " mean bandwidth sen " << format_double(rep.mean_bw_sen) << " spe " << format_double(rep.mean_bw_spe)
        << '\n';
  }
  report["results"] = std::move(results);
  write_file(fs::path(c.out) / "report.json", report.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_plot(RunConfig& c, std::ostream& out) {
  if (c.band_files.empty()) throw ArgumentError("plot: no band files given");
  if (!c.legend.empty() && c.legend.size() != c.band_files.size())
    throw ArgumentError("--legend: one name per band file");
  std::vector<PlotBand> bands;
  for (std::size_t i = 0; i < c.band_files.size(); ++i) {
    const fs::path path(c.band_files[i]);
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open " + path.string());
    auto band = read_band_csv(f);
    if (band.lambda.empty()) throw ParseError(path.string(), 0, "no band rows");
    bands.push_back({c.legend.empty() ? path.stem().string() : c.legend[i], std::move(band)});
  }
  std::vector<std::pair<double, double>> roc;
  if (!c.roc.empty()) roc = read_roc_csv(c.roc);
  fs::path target(c.out);
  if (target.extension() != ".svg") {
    fs::create_directories(target);
    target /= "plot.svg";
  } else if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  write_file(target, render_svg(bands, roc, "cproc " + version() + " config " + config_json(c).dump()));
  out << "wrote " << target.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--config", c.config_file, "key = value config file; command-line flags take precedence");
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--pairs-parallel,--workers", c.workers, "Worker threads (0 = hardware concurrency)");
}

void add_dataset(CLI::App* sub, RunConfig& c) {
  sub->add_option("--dataset", c.dataset, "TU dataset directory (required)");
  sub->add_option("--name", c.name, "Dataset file prefix (default: directory name)");
  sub->add_option("--filtration", c.filtrations, "Comma-separated filtrations")->delimiter(',')->capture_default_str();
  sub->add_flag("--force", c.force, "Recompute even if outputs or caches exist");
}

void add_similarity(CLI::App* sub, RunConfig& c) {
  sub->add_option("--wasserstein-p", c.p, "Wasserstein order p >= 1")->capture_default_str();
  sub->add_option("--dims", c.dims, "Homology dimensions compared: 0, 1 or 0,1")->capture_default_str();
}

void add_conformal(CLI::App* sub, RunConfig& c) {
  sub->add_option("--knn", c.knn, "Neighbors K")->capture_default_str();
  sub->add_option("--alpha", c.alpha, "Error rate")->capture_default_str();
  sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  sub->add_option("--min-stratum", c.min_stratum, "Minimum same-label calibration neighbors")->capture_default_str();
  sub->add_option("--stratum-policy", c.stratum_policy, "error or expand")->capture_default_str();
}

// Fills options not given on the command line from a TOML/INI file. Keys
// may use '_' or '-'; a [section] must name the subcommand.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("config file not found: " + path);
  for (const auto& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name()))
      throw ArgumentError("config file: section '" + item.parents[0] + "' does not match '" + sub->get_name() + "'");
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") throw ArgumentError("config file: unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

std::string version() { return CPROC_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Conformal ROC bands for graph classifiers"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* topo = app.add_subcommand("topo", "Persistence diagrams and images per filtration");
  add_common(topo, c);
  add_dataset(topo, c);
  topo->add_option("--resolution", c.resolution, "Persistence image resolution")->capture_default_str();

  auto* simmat = app.add_subcommand("simmat", "Wasserstein similarity matrix (cached)");
  add_common(simmat, c);
  add_dataset(simmat, c);
  add_similarity(simmat, c);

  auto* bands = app.add_subcommand("bands", "CP-ROC bands from classifier scores");
  add_common(bands, c);
  add_dataset(bands, c);
  add_similarity(bands, c);
  add_conformal(bands, c);
  bands->add_option("--scores", c.scores, "CSV graph_id,label,p0,p1,... (required)");
  bands->add_option("--knn-train", c.knn_train, "Neighbors for the soft probability estimate (0 = --knn)");
  bands->add_option("--repeats", c.repeats, "Calibration/test re-splits M")->capture_default_str();
  bands->add_option("--mode", c.mode, "exch or cond")->capture_default_str();
  bands->add_option("--pool-split", c.pool_split, "Training fraction")->capture_default_str();
  bands->add_option("--calib-split", c.calib_split, "Calibration fraction of the pool")->capture_default_str();
  bands->add_option("--valid-split", c.valid_split, "Validation fraction of training")->capture_default_str();
  bands->add_option("--grid-points", c.grid_points, "Uniform lambda points")->capture_default_str();
  bands->add_option("--bootstrap", c.bootstrap, "Bootstrap resamples for the baseline band (0 = off)");
  bands->add_option("--level", c.level, "Bootstrap confidence level")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Coverage study on synthetic logistic data");
  add_common(simulate, c);
  add_conformal(simulate, c);
  simulate->add_option("--mode", c.mode, "exch, cond or both");
  simulate->add_option("--model", c.model, "m1, m2 or m3")->capture_default_str();
  simulate->add_option("--n-train", c.n_train)->capture_default_str();
  simulate->add_option("--n-calib", c.n_calib)->capture_default_str();
  simulate->add_option("--n-test", c.n_test)->capture_default_str();
  simulate->add_option("--reps", c.reps, "Replicates")->capture_default_str();
  simulate->add_option("--beta", c.beta, "Comma-separated coefficients")->delimiter(',');
  simulate->add_option("--shift", c.shift, "Comma-separated test covariate shift")->delimiter(',');
  simulate->add_option("--intercept", c.intercept)->capture_default_str();
  simulate->add_option("--noise-low", c.noise_low, "Score noise sd where x0 < 0")->capture_default_str();
  simulate->add_option("--noise-high", c.noise_high, "Score noise sd where x0 >= 0")->capture_default_str();
  simulate->add_flag("--oracle-scores", c.oracle_scores, "Use the true probability as the model score");

  auto* plot = app.add_subcommand("plot", "Render band CSV files to SVG");
  plot->add_option("bands", c.band_files, "Band CSV files")->required();
  plot->add_option("--legend", c.legend, "Comma-separated names, one per band")->delimiter(',');
  plot->add_option("--roc", c.roc, "Empirical ROC CSV (threshold,fpr,tpr)");
  plot->add_option("--out", c.out, "SVG file or directory")->capture_default_str();

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  for (auto* sub : app.get_subcommands()) {
    if (c.config_file.empty()) break;
    try {
      apply_config_file(sub, c.config_file);
    } catch (const CLI::Error& e) {
      err << "error: config file: " << e.what() << '\n';
      return kExitInput;
    } catch (const ArgumentError& e) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    }
  }

  // simulate uses K = 50 unless the user picked one.
  if (simulate->parsed()) {
    c.command = "simulate";
    if (simulate->count("--knn") == 0) c.knn = 50;
    if (simulate->count("--mode") == 0) c.mode = "both";
  }

  try {
    if (topo->parsed()) {
      c.command = "topo";
      return cmd_topo(c, out);
    }
    if (simmat->parsed()) {
      c.command = "simmat";
      return cmd_simmat(c, out, err);
    }
    if (bands->parsed()) {
      c.command = "bands";
      return cmd_bands(c, out, err);
    }
    if (simulate->parsed()) return cmd_simulate(c, out);
    c.command = "plot";
    return cmd_plot(c, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run(int argc, char** argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace cproc::cli
