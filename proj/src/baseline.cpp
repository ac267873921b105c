#include "cproc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cproc/error.hpp"
#include "cproc/rocbands.hpp"
#include "cproc/util.hpp"

namespace cproc {

double percentile(std::vector<double> sample, double q) {
  if (sample.empty()) throw ArgumentError("percentile: empty sample");
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const auto above = std::min(below + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sample[below] + frac * (sample[above] - sample[below]);
}

BootstrapBand bootstrap_bands(std::span<const double> scores, std::span<const int> labels,
                              std::span<const double> lambda_grid, std::size_t resamples, double level,
                              std::uint64_t seed, std::size_t workers) {
  if (resamples == 0) throw ArgumentError("bootstrap: need at least one resample");
  if (!(level > 0 && level < 1)) throw ArgumentError("bootstrap: level must lie in (0, 1)");
  if (scores.size() != labels.size()) throw ArgumentError("bootstrap: length mismatch");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) throw DegenerateTestError("bootstrap needs both classes");

  const std::size_t G = lambda_grid.size();
  // tpr[b * G + g], fpr[b * G + g]
  std::vector<double> tpr(resamples * G), fpr(resamples * G);
  parallel_for(resamples, workers, [&](std::size_t b) {
    Rng rng(seed + b);
    const auto draw = [&rng](const std::vector<double>& src) {
      std::vector<double> out(src.size());
      for (auto& x : out) x = src[uniform_index(rng, src.size())];
      std::sort(out.begin(), out.end());
      return out;
    };
    const auto rp = draw(pos);
    const auto rn = draw(neg);
    for (std::size_t g = 0; g < G; ++g) {
      tpr[b * G + g] = rate_above(rp, lambda_grid[g]);
      fpr[b * G + g] = rate_above(rn, lambda_grid[g]);
    }
  });

  BootstrapBand out;
  out.lambda.assign(lambda_grid.begin(), lambda_grid.end());
  out.resamples = resamples;
  out.level = level;
  const double qlo = (1 - level) / 2;
  const double qhi = 1 - qlo;
  std::vector<double> col(resamples);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t b = 0; b < resamples; ++b) col[b] = tpr[b * G + g];
    out.tpr_lo.push_back(percentile(col, qlo));
    out.tpr_up.push_back(percentile(col, qhi));
    for (std::size_t b = 0; b < resamples; ++b) col[b] = fpr[b * G + g];
    out.fpr_lo.push_back(percentile(col, qlo));
    out.fpr_up.push_back(percentile(col, qhi));
  }
  return out;
}

void write_bootstrap_csv(std::ostream& os, const BootstrapBand& band) {
  os << "lambda,sen_lo,sen_up,spe_lo,spe_up\n";
  for (std::size_t i = 0; i < band.lambda.size(); ++i)
    os << format_double(band.lambda[i]) << ',' << format_double(band.tpr_lo[i]) << ','
       << format_double(band.tpr_up[i]) << ',' << format_double(band.fpr_lo[i]) << ','
       << format_double(band.fpr_up[i]) << '\n';
}

}  // namespace cproc
