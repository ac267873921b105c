#include "cproc/rocbands.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

double rate_above(std::span<const double> sorted_values, double lambda) {
  if (sorted_values.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_values.begin(), sorted_values.end(), lambda);
  return static_cast<double>(sorted_values.end() - it) / static_cast<double>(sorted_values.size());
}

double parametric_auc(std::span<const double> fpr, std::span<const double> tpr) {
  if (fpr.size() != tpr.size()) throw ArgumentError("parametric_auc: length mismatch");
  double area = 0;
  double px = 1.0, py = 1.0;
  for (std::size_t i = 0; i <= fpr.size(); ++i) {
    const double x = i < fpr.size() ? fpr[i] : 0.0;
    const double y = i < tpr.size() ? tpr[i] : 0.0;
    area += (px - x) * (py + y) / 2.0;
    px = x;
    py = y;
  }
  return area;
}

RocCurve empirical_roc(std::span<const double> scores, std::span<const int> labels, int positive_label) {
  if (scores.size() != labels.size()) throw ArgumentError("empirical_roc: length mismatch");
  std::vector<double> pos, neg, thresholds{0.0, 1.0};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (labels[i] == positive_label ? pos : neg).push_back(scores[i]);
    thresholds.push_back(scores[i]);
  }
  if (pos.empty() || neg.empty()) throw DegenerateTestError("empirical ROC needs both classes in the test part");
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve roc;
  roc.points.push_back({-kInfinity, 1.0, 1.0});
  for (double t : thresholds) roc.points.push_back({t, rate_above(neg, t), rate_above(pos, t)});
  std::vector<double> fpr, tpr;
  for (const auto& p : roc.points) {
    fpr.push_back(p.fpr);
    tpr.push_back(p.tpr);
  }
  roc.auc = parametric_auc(fpr, tpr);
  return roc;
}

RocCurve empirical_roc(const ScoredDataset& scored, std::span<const std::size_t> test_ids, int positive_label) {
  std::vector<double> s;
  std::vector<int> y;
  for (auto id : test_ids) {
    s.push_back(scored.probs.at(id).at(static_cast<std::size_t>(positive_label)));
    y.push_back(scored.labels.at(id));
  }
  return empirical_roc(s, y, positive_label);
}

std::string_view to_string(BandMode mode) {
  return mode == BandMode::Exchangeable ? "exch" : "cond";
}

BandMode parse_mode(std::string_view text) {
  text = trim(text);
  if (text == "exch" || text == "exchangeable") return BandMode::Exchangeable;
  if (text == "cond" || text == "conditional") return BandMode::Conditional;
  throw ArgumentError("unknown mode '" + std::string(text) + "' (expected exch or cond)");
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) throw ArgumentError("lambda grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::vector<double> default_lambda_grid(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg,
                                        std::size_t points) {
  auto g = uniform_grid(points);
  for (const auto* side : {&pos, &neg})
    for (const auto& iv : *side)
      for (double x : {iv.lo, iv.up})
        if (x >= 0 && x <= 1) g.push_back(x);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

namespace {

struct SortedEndpoints {
  std::vector<double> lo, up;

  explicit SortedEndpoints(std::span<const SoftInterval> ivs) {
    for (const auto& iv : ivs) {
      lo.push_back(iv.lo);
      up.push_back(iv.up);
    }
    std::sort(lo.begin(), lo.end());
    std::sort(up.begin(), up.end());
  }
};

}  // namespace

RocBand band_from_intervals(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg,
                            std::span<const double> lambda_grid, double alpha, BandMode mode) {
  if (pos.empty() || neg.empty()) throw DegenerateTestError("band needs intervals for both classes");
  RocBand band;
  band.mode = mode;
  band.alpha = alpha;
  band.lambda.assign(lambda_grid.begin(), lambda_grid.end());
  std::sort(band.lambda.begin(), band.lambda.end());
  band.lambda.erase(std::unique(band.lambda.begin(), band.lambda.end()), band.lambda.end());
  if (band.lambda.empty() || band.lambda.front() < 0 || band.lambda.back() > 1)
    throw ArgumentError("lambda grid must be a nonempty subset of [0, 1]");

  const SortedEndpoints p(pos), n(neg);
  for (double l : band.lambda) {
    band.sen_lo.push_back(rate_above(p.lo, l));
    band.sen_up.push_back(rate_above(p.up, l));
    band.spe_lo.push_back(rate_above(n.lo, l));
    band.spe_up.push_back(rate_above(n.up, l));
  }
  band.auc_lo = parametric_auc(band.spe_up, band.sen_lo);
  band.auc_up = parametric_auc(band.spe_lo, band.sen_up);
  return band;
}

BandValue band_at(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg, double lambda) {
  if (pos.empty() || neg.empty()) throw DegenerateTestError("band needs intervals for both classes");
  const auto frac = [lambda](std::span<const SoftInterval> ivs, bool upper) {
    std::size_t c = 0;
    for (const auto& iv : ivs) c += (upper ? iv.up : iv.lo) > lambda;
    return static_cast<double>(c) / static_cast<double>(ivs.size());
  };
  return {frac(pos, false), frac(pos, true), frac(neg, false), frac(neg, true)};
}

double step_mean(std::span<const double> lambda, std::span<const double> values) {
  if (lambda.size() != values.size() || lambda.size() < 2) throw ArgumentError("step_mean: need >= 2 grid points");
  double acc = 0;
  for (std::size_t i = 0; i + 1 < lambda.size(); ++i) acc += values[i] * (lambda[i + 1] - lambda[i]);
  return acc / (lambda.back() - lambda.front());
}

double mean_bandwidth(std::span<const double> lambda, std::span<const double> lo, std::span<const double> up) {
  std::vector<double> w(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) w[i] = up[i] - lo[i];
  return step_mean(lambda, w);
}

BandSummary summarize(const RocBand& band, double point_auc) {
  BandSummary s;
  s.auc = point_auc;
  s.auc_lo = band.auc_lo;
  s.auc_up = band.auc_up;
  s.mean_bw_sen = mean_bandwidth(band.lambda, band.sen_lo, band.sen_up);
  s.mean_bw_spe = mean_bandwidth(band.lambda, band.spe_lo, band.spe_up);
  return s;
}

OracleRates oracle_rates(std::span<const double> pis, std::span<const int> labels, std::span<const double> lambdas,
                         int positive_label) {
  if (pis.size() != labels.size()) throw ArgumentError("oracle_rates: length mismatch");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < pis.size(); ++i) (labels[i] == positive_label ? pos : neg).push_back(pis[i]);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const auto at_least = [](const std::vector<double>& v, double l) {
    if (v.empty()) return 0.0;
    const auto it = std::lower_bound(v.begin(), v.end(), l);
    return static_cast<double>(v.end() - it) / static_cast<double>(v.size());
  };
  OracleRates out;
  out.lambda.assign(lambdas.begin(), lambdas.end());
  for (double l : lambdas) {
    out.tpr.push_back(at_least(pos, l));
    out.fpr.push_back(at_least(neg, l));
  }
  return out;
}

void write_band_csv(std::ostream& os, const RocBand& band) {
  os << "lambda,sen_lo,sen_up,spe_lo,spe_up\n";
  for (std::size_t i = 0; i < band.lambda.size(); ++i)
    os << format_double(band.lambda[i]) << ',' << format_double(band.sen_lo[i]) << ','
       << format_double(band.sen_up[i]) << ',' << format_double(band.spe_lo[i]) << ','
       << format_double(band.spe_up[i]) << '\n';
}

RocBand read_band_csv(std::istream& is) {
  RocBand band;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "lambda,sen_lo,sen_up,spe_lo,spe_up") throw ParseError("band", number, "bad header");
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 5) throw ParseError("band", number, "expected 5 columns");
    try {
      band.lambda.push_back(parse_double(f[0]));
      band.sen_lo.push_back(parse_double(f[1]));
      band.sen_up.push_back(parse_double(f[2]));
      band.spe_lo.push_back(parse_double(f[3]));
      band.spe_up.push_back(parse_double(f[4]));
    } catch (const std::exception&) {
      throw ParseError("band", number, "malformed number");
    }
  }
  if (band.lambda.empty()) throw ParseError("band", number, "no band rows");
  band.auc_lo = parametric_auc(band.spe_up, band.sen_lo);
  band.auc_up = parametric_auc(band.spe_lo, band.sen_up);
  return band;
}

// ---------------------------------------------------------------------------

BandResult run_band_pipeline(const DistanceSource& d, const BinaryTask& task, const BandConfig& cfg) {
  if (task.train.empty() || task.calib.empty()) throw ArgumentError("band pipeline needs train and calib parts");
  const int k_train = cfg.k_train > 0 ? cfg.k_train : cfg.k;

  BandResult out;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
  for (auto id : task.test) {
    test_scores.push_back(task.scores[id]);
    test_labels.push_back(task.labels[id]);
  }
  out.roc = empirical_roc(test_scores, test_labels, 1);

  out.scores = nonconformity_scores(task.calib, d, task.train, task.scores, task.labels, k_train, cfg.workers);
  const ScoreTable table(out.scores, d.size());
  const LocalOptions local{cfg.k, cfg.alpha, cfg.min_stratum, cfg.policy};

  std::vector<SoftInterval> intervals(task.test.size());
  parallel_for(task.test.size(), cfg.workers, [&](std::size_t i) {
    const auto id = task.test[i];
    const int k = task.labels[id];
    intervals[i] = cfg.mode == BandMode::Exchangeable
                       ? label_conditional_interval(id, task.scores[id], k, out.scores, cfg.alpha)
                       : local_conditional_interval(id, task.scores[id], k, d, task.calib, table, local);
  });
  for (const auto& iv : intervals) (iv.label == 1 ? out.pos_intervals : out.neg_intervals).push_back(iv);

  const auto grid = default_lambda_grid(out.pos_intervals, out.neg_intervals, cfg.grid_points);
  out.band = band_from_intervals(out.pos_intervals, out.neg_intervals, grid, cfg.alpha, cfg.mode);
  return out;
}

std::map<int, BandResult> multilabel_bands(const ScoredDataset& scored, const DistanceSource& d,
                                           std::span<const std::size_t> train, std::span<const std::size_t> calib,
                                           std::span<const std::size_t> test, const BandConfig& config) {
  if (scored.num_labels < 2) throw ArgumentError("multilabel_bands: need at least two labels");
  std::map<int, BandResult> out;
  for (int k = 0; k < static_cast<int>(scored.num_labels); ++k) {
    std::vector<int> y(scored.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = scored.labels[i] == k ? 1 : 0;
    const bool present = std::any_of(test.begin(), test.end(), [&](std::size_t id) { return y[id] == 1; });
    if (!present) throw StratumError(k, "label absent from the test part");
    const auto s = scored.label_scores(k);
    out.emplace(k, run_band_pipeline(d, BinaryTask{s, y, train, calib, test}, config));
  }
  return out;
}

}  // namespace cproc
