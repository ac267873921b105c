#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cproc {

// Percentile bootstrap band for the empirical ROC, used as a baseline.
struct BootstrapBand {
  std::vector<double> lambda;
  std::vector<double> tpr_lo, tpr_up;
  std::vector<double> fpr_lo, fpr_up;
  std::size_t resamples = 0;
  double level = 0.95;
};

// Draws B class-stratified resamples (with replacement, class counts kept)
// of the test scores, evaluates TPR/FPR ("score > lambda") on the grid and
// takes the (1-level)/2 and 1-(1-level)/2 percentiles per lambda. Resample b
// is driven by seed + b.
BootstrapBand bootstrap_bands(std::span<const double> scores, std::span<const int> labels,
                              std::span<const double> lambda_grid, std::size_t resamples, double level,
                              std::uint64_t seed, std::size_t workers = 1);

// Linear-interpolation percentile of an unsorted sample (q in [0, 1]).
double percentile(std::vector<double> sample, double q);

// Writes the band with the `lambda,sen_lo,sen_up,spe_lo,spe_up` schema so it
// overlays CP-ROC band files directly.
void write_bootstrap_csv(std::ostream& os, const BootstrapBand& band);

}  // namespace cproc
