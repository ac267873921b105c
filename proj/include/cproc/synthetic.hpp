#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cproc/graph.hpp"
#include "cproc/rocbands.hpp"
#include "cproc/similarity.hpp"

namespace cproc {

// Logistic data with a known oracle probability pi(x) = logistic(x . beta + b).
struct SyntheticSpec {
  std::size_t n_train = 2000;
  std::size_t n_calib = 1000;
  std::size_t n_test = 500;
  std::vector<double> beta{1.0, -0.8, 0.5};
  double intercept = 0.0;
  std::vector<std::size_t> missing;  // covariates hidden from the fitted model
  std::vector<double> shift;         // added to test covariates (empty = iid)
  // Logit-scale noise added to the model score; the sd is noise_low where
  // x[0] < 0 and noise_high elsewhere. Zero means a noiseless scorer.
  double noise_low = 0.0;
  double noise_high = 0.0;
  std::uint64_t seed = 1;

  std::size_t dim() const noexcept { return beta.size(); }
  std::size_t size() const noexcept { return n_train + n_calib + n_test; }
};

// The regression-study designs: all covariates (M1), one hidden (M2), two hidden (M3).
SyntheticSpec model_m1();
SyntheticSpec model_m2();
SyntheticSpec model_m3();

struct SyntheticData {
  std::size_t dim = 0;
  std::vector<double> x;      // row-major, size() rows
  std::vector<double> pi;     // oracle probability
  std::vector<int> labels;    // Bernoulli(pi)
  std::vector<Part> parts;    // train rows first, then calib, then test
  std::vector<double> noise;  // standard normal draw per row, scaled by SyntheticSpec's noise sd

  std::size_t size() const noexcept { return pi.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * dim, dim}; }
  std::vector<std::size_t> ids(Part part) const;
};

// Covariates are standard normal; test rows get `shift` added. Pure
// function of the SyntheticSpec (including its seed).
SyntheticData generate(const SyntheticSpec& spec);

// Euclidean distance between covariate rows, computed on demand.
class EuclideanDistance final : public DistanceSource {
 public:
  explicit EuclideanDistance(const SyntheticData& data) : data_(&data) {}
  std::size_t size() const override { return data_->size(); }
  double distance(std::size_t i, std::size_t j) const override;

 private:
  const SyntheticData* data_;
};

// Materialized covariate distance matrix (small datasets / export).
SimilarityMatrix euclidean_matrix(const SyntheticData& data);

struct FittedLogit {
  std::vector<std::size_t> columns;  // covariates used, ascending
  std::vector<double> coef;          // one per column
  double intercept = 0;
  std::size_t iterations = 0;
  double grad_norm = 0;
  bool converged = false;
  bool separation = false;           // classes linearly separated; refit with ridge 1e-6
  std::vector<double> loss_history;  // mean negative log-likelihood per iteration

  double predict(std::span<const double> row) const;
};

// Maximum-likelihood logistic regression by damped IRLS (Newton steps with
// step halving, so the loss never increases). Stops when the mean gradient
// norm is <= tol. Throws NumericalError if max_iter is reached first.
FittedLogit fit_logistic(const SyntheticData& data, std::span<const std::size_t> rows,
                         std::span<const std::size_t> missing, double tol = 1e-8, std::size_t max_iter = 500);

// Model probabilities for every row, with SyntheticSpec's score noise applied.
std::vector<double> model_scores(const SyntheticData& data, const FittedLogit& fit, const SyntheticSpec& spec);

struct ExperimentOptions {
  double alpha = 0.1;
  int k = 50;
  std::size_t reps = 200;
  BandMode mode = BandMode::Conditional;
  bool oracle_scores = false;  // use pi itself as f_hat (skips fitting)
  std::size_t min_stratum = 5;
  StratumPolicy policy = StratumPolicy::Error;
  std::size_t workers = 1;
};

struct ReplicateOutcome {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double lambda_tpr = 0, tpr_oracle = 0, sen_lo = 0, sen_up = 0;
  bool tpr_hit = false;
  double lambda_fpr = 0, fpr_oracle = 0, spe_lo = 0, spe_up = 0;
  bool fpr_hit = false;
  double bw_sen = 0, bw_spe = 0;
  double auc = 0;
};

struct CoverageReport {
  BandMode mode = BandMode::Conditional;
  double alpha = 0.1;
  int k = 0;
  std::vector<ReplicateOutcome> replicates;
  double coverage_tpr = 0, se_tpr = 0;
  double coverage_fpr = 0, se_fpr = 0;
  double mean_bw_sen = 0, mean_bw_spe = 0;
};

// Per replicate r (seed = spec.seed + r): generate, fit, build the band,
// draw a jump point lambda = pi(G_s) uniformly over each test class and
// record whether the oracle TPR / FPR at lambda lies inside the band.
CoverageReport coverage_experiment(const SyntheticSpec& spec, const ExperimentOptions& options);

void write_replicates_csv(std::ostream& os, const CoverageReport& report);

}  // namespace cproc
