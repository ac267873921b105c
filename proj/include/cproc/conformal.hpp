#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cproc/similarity.hpp"

namespace cproc {

// q_gamma(A): the m-th smallest element of A with m = floor(gamma * |A|)
// clamped to [1, |A|]. Throws ArgumentError on an empty set or gamma
// outside [0, 1].
double quantile(std::span<const double> values, double gamma);

// s = pi_tilde - f_hat for one calibration graph.
struct NonconformityScore {
  std::size_t id = 0;
  double s = 0;
  int label = 0;
};

enum class Conditioning { Marginal, Label, Local };

std::string_view to_string(Conditioning c);

struct SoftInterval {
  std::size_t id = 0;
  double lo = 0;  // raw endpoints; band indicators use these
  double up = 0;
  double alpha = 0.1;
  Conditioning conditioning = Conditioning::Marginal;
  int label = -1;      // conditioning label, -1 for marginal
  std::size_t k = 0;   // neighborhood size for local intervals
  std::size_t stratum = 0;  // number of scores the quantiles were taken over

  double reported_lo() const { return lo < 0 ? 0 : (lo > 1 ? 1 : lo); }
  double reported_up() const { return up < 0 ? 0 : (up > 1 ? 1 : up); }
};

// pi_tilde: mean model probability over the k nearest training graphs.
// `probs` is indexed by graph id.
double soft_prob_estimate(std::size_t id, const DistanceSource& d, std::span<const std::size_t> train_pool,
                          std::span<const double> probs, int k);

// Scores for every id in `calib`, in the same order.
std::vector<NonconformityScore> nonconformity_scores(std::span<const std::size_t> calib, const DistanceSource& d,
                                                     std::span<const std::size_t> train_pool,
                                                     std::span<const double> probs, std::span<const int> labels,
                                                     int k, std::size_t workers = 1);

// Diagnostic conformal p-value of a candidate probability `pi`:
// (#{j : s_j < pi - f_hat} + 1) / |calib|.
double conformal_pvalue(double pi, double f_hat, std::span<const NonconformityScore> calib);

// [f_hat + q_{alpha/2}(s), f_hat + q_{1-alpha/2}(s)] over all calibration scores.
SoftInterval marginal_interval(std::size_t id, double f_hat, std::span<const NonconformityScore> calib, double alpha);

// Same formula over the calibration scores with label k. Throws
// StratumError when no calibration graph carries label k.
SoftInterval label_conditional_interval(std::size_t id, double f_hat, int k,
                                        std::span<const NonconformityScore> calib, double alpha);

// Calibration scores addressable by graph id.
class ScoreTable {
 public:
  ScoreTable(std::span<const NonconformityScore> scores, std::size_t num_ids);

  bool contains(std::size_t id) const { return id < present_.size() && present_[id]; }
  const NonconformityScore& operator[](std::size_t id) const { return scores_[id]; }

 private:
  std::vector<NonconformityScore> scores_;
  std::vector<bool> present_;
};

enum class StratumPolicy {
  Error,   // StratumError when the neighborhood has fewer than min_stratum label-k graphs
  Expand,  // keep walking outward in distance order until min_stratum are found
};

struct LocalOptions {
  int k = 20;
  double alpha = 0.1;
  std::size_t min_stratum = 5;
  StratumPolicy policy = StratumPolicy::Error;
};

// Interval calibrated on the label-k members of the k nearest calibration
// graphs of `id`.
SoftInterval local_conditional_interval(std::size_t id, double f_hat, int label, const DistanceSource& d,
                                        std::span<const std::size_t> calib_pool, const ScoreTable& scores,
                                        const LocalOptions& options);

}  // namespace cproc
