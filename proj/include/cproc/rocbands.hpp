#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "cproc/conformal.hpp"
#include "cproc/graph.hpp"

namespace cproc {

// Rates use the strict rule "score > lambda" so that empirical curves and
// interval bands share one indicator convention.
struct RocPoint {
  double threshold = 0;
  double fpr = 0;
  double tpr = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // first point is (1, 1) at threshold -inf, thresholds ascend
  double auc = 0;
};

// Throws DegenerateTestError if either class is absent.
RocCurve empirical_roc(std::span<const double> scores, std::span<const int> labels, int positive_label = 1);
RocCurve empirical_roc(const ScoredDataset& scored, std::span<const std::size_t> test_ids, int positive_label);

// Fraction of `values` strictly above lambda.
double rate_above(std::span<const double> sorted_values, double lambda);

enum class BandMode { Exchangeable, Conditional };

std::string_view to_string(BandMode mode);
BandMode parse_mode(std::string_view text);

struct RocBand {
  std::vector<double> lambda;  // ascending, spans [0, 1]
  std::vector<double> sen_lo, sen_up;  // TPR band from positive-class intervals
  std::vector<double> spe_lo, spe_up;  // FPR band from negative-class intervals
  BandMode mode = BandMode::Exchangeable;
  double alpha = 0.1;
  double auc_lo = 0;
  double auc_up = 0;
};

struct BandValue {
  double sen_lo = 0, sen_up = 0, spe_lo = 0, spe_up = 0;
};

// `points` evenly spaced values over [0, 1] plus every interval endpoint
// inside [0, 1], sorted and deduplicated.
std::vector<double> default_lambda_grid(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg,
                                        std::size_t points = 512);
std::vector<double> uniform_grid(std::size_t points = 512);

// sen_lo(lambda) = mean over positives of 1(lo > lambda), sen_up likewise
// with up; spe_* over negatives. AUC bounds are trapezoidal areas of the
// (spe_up, sen_lo) and (spe_lo, sen_up) envelopes.
RocBand band_from_intervals(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg,
                            std::span<const double> lambda_grid, double alpha, BandMode mode);

// Band functional at a single threshold.
BandValue band_at(std::span<const SoftInterval> pos, std::span<const SoftInterval> neg, double lambda);

// Trapezoidal area under the parametric curve (fpr(lambda), tpr(lambda)),
// closed with (1, 1) before the first threshold and (0, 0) after the last.
double parametric_auc(std::span<const double> fpr, std::span<const double> tpr);

// Integral over [0, 1] of a right-continuous step function sampled on a
// grid that contains all of its jumps.
double step_mean(std::span<const double> lambda, std::span<const double> values);
double mean_bandwidth(std::span<const double> lambda, std::span<const double> lo, std::span<const double> up);

struct BandSummary {
  double auc = 0;
  double auc_lo = 0;
  double auc_up = 0;
  double mean_bw_sen = 0;
  double mean_bw_spe = 0;
};

BandSummary summarize(const RocBand& band, double point_auc);

// Oracle rates from true probabilities, with "pi >= lambda".
struct OracleRates {
  std::vector<double> lambda;
  std::vector<double> tpr;
  std::vector<double> fpr;
};

OracleRates oracle_rates(std::span<const double> pis, std::span<const int> labels, std::span<const double> lambdas,
                         int positive_label = 1);

// CSV `lambda,sen_lo,sen_up,spe_lo,spe_up`.
void write_band_csv(std::ostream& os, const RocBand& band);
RocBand read_band_csv(std::istream& is);

// ---------------------------------------------------------------------------
// End-to-end band construction for one binary task.

struct BandConfig {
  BandMode mode = BandMode::Conditional;
  int k = 20;           // neighbors for the local calibration set
  int k_train = 0;      // neighbors for pi_tilde; 0 means "same as k"
  double alpha = 0.1;
  std::size_t min_stratum = 5;
  StratumPolicy policy = StratumPolicy::Error;
  std::size_t grid_points = 512;
  std::size_t workers = 1;
};

struct BinaryTask {
  std::span<const double> scores;  // f_hat of the positive class, by id
  std::span<const int> labels;     // 0/1 by id
  std::span<const std::size_t> train;
  std::span<const std::size_t> calib;
  std::span<const std::size_t> test;
};

struct BandResult {
  RocBand band;
  RocCurve roc;  // empirical curve of the test part
  std::vector<NonconformityScore> scores;
  std::vector<SoftInterval> pos_intervals;
  std::vector<SoftInterval> neg_intervals;
};

BandResult run_band_pipeline(const DistanceSource& d, const BinaryTask& task, const BandConfig& config);

// One-vs-rest bands for every label: label k is binarized as y == k and
// scored with the label-k probability. Throws StratumError if a label is
// missing from the test part.
std::map<int, BandResult> multilabel_bands(const ScoredDataset& scored, const DistanceSource& d,
                                           std::span<const std::size_t> train, std::span<const std::size_t> calib,
                                           std::span<const std::size_t> test, const BandConfig& config);

}  // namespace cproc
