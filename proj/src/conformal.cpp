#include "cproc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

double quantile(std::span<const double> values, double gamma) {
  if (values.empty()) throw ArgumentError("quantile: empty set");
  if (!(gamma >= 0 && gamma <= 1)) throw ArgumentError("quantile: gamma outside [0, 1]");
  const std::size_t n = values.size();
  auto m = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  std::vector<double> buf(values.begin(), values.end());
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m - 1), buf.end());
  return buf[m - 1];
}

std::string_view to_string(Conditioning c) {
  switch (c) {
    case Conditioning::Marginal: return "marginal";
    case Conditioning::Label: return "label";
    case Conditioning::Local: return "local";
  }
  return "?";
}

double soft_prob_estimate(std::size_t id, const DistanceSource& d, std::span<const std::size_t> train_pool,
                          std::span<const double> probs, int k) {
  const auto nb = knn(d, id, train_pool, k, Part::Train);
  double sum = 0;
  for (const auto& n : nb.neighbors) sum += probs[n.id];
  return sum / static_cast<double>(nb.neighbors.size());
}

std::vector<NonconformityScore> nonconformity_scores(std::span<const std::size_t> calib, const DistanceSource& d,
                                                     std::span<const std::size_t> train_pool,
                                                     std::span<const double> probs, std::span<const int> labels,
                                                     int k, std::size_t workers) {
  std::vector<NonconformityScore> out(calib.size());
  parallel_for(calib.size(), workers, [&](std::size_t i) {
    const auto id = calib[i];
    out[i] = {id, soft_prob_estimate(id, d, train_pool, probs, k) - probs[id], labels[id]};
  });
  return out;
}

double conformal_pvalue(double pi, double f_hat, std::span<const NonconformityScore> calib) {
  if (calib.empty()) throw ArgumentError("conformal_pvalue: empty calibration set");
  const double s = pi - f_hat;
  const auto below = std::count_if(calib.begin(), calib.end(), [&](const auto& c) { return c.s < s; });
  return static_cast<double>(below + 1) / static_cast<double>(calib.size());
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
}

SoftInterval interval_from(std::size_t id, double f_hat, std::span<const double> s, double alpha) {
  SoftInterval out;
  out.id = id;
  out.alpha = alpha;
  out.lo = f_hat + quantile(s, alpha / 2);
  out.up = f_hat + quantile(s, 1 - alpha / 2);
  out.stratum = s.size();
  return out;
}

}  // namespace

SoftInterval marginal_interval(std::size_t id, double f_hat, std::span<const NonconformityScore> calib, double alpha) {
  check_alpha(alpha);
  if (calib.empty()) throw ArgumentError("marginal_interval: empty calibration set");
  std::vector<double> s;
  s.reserve(calib.size());
  for (const auto& c : calib) s.push_back(c.s);
  auto out = interval_from(id, f_hat, s, alpha);
  out.conditioning = Conditioning::Marginal;
  return out;
}

SoftInterval label_conditional_interval(std::size_t id, double f_hat, int k,
                                        std::span<const NonconformityScore> calib, double alpha) {
  check_alpha(alpha);
  std::vector<double> s;
  for (const auto& c : calib)
    if (c.label == k) s.push_back(c.s);
  if (s.empty()) throw StratumError(k, "no calibration graph carries this label");
  auto out = interval_from(id, f_hat, s, alpha);
  out.conditioning = Conditioning::Label;
  out.label = k;
  return out;
}

ScoreTable::ScoreTable(std::span<const NonconformityScore> scores, std::size_t num_ids)
    : scores_(num_ids), present_(num_ids, false) {
  for (const auto& s : scores) {
    if (s.id >= num_ids) throw ArgumentError("ScoreTable: id out of range");
    scores_[s.id] = s;
    present_[s.id] = true;
  }
}

SoftInterval local_conditional_interval(std::size_t id, double f_hat, int label, const DistanceSource& d,
                                        std::span<const std::size_t> calib_pool, const ScoreTable& scores,
                                        const LocalOptions& opt) {
  check_alpha(opt.alpha);
  const auto nb = knn(d, id, calib_pool, opt.k, Part::Calib);
  std::vector<double> s;
  for (const auto& n : nb.neighbors) {
    if (!scores.contains(n.id)) throw ArgumentError("local_conditional_interval: calibration graph without score");
    if (scores[n.id].label == label) s.push_back(scores[n.id].s);
  }
  std::size_t used = nb.neighbors.size();
  if (s.size() < opt.min_stratum) {
    if (opt.policy == StratumPolicy::Error)
      throw StratumError(label, "graph " + std::to_string(id) + ": " + std::to_string(s.size()) + " of its " +
                                    std::to_string(nb.neighbors.size()) +
                                    " nearest calibration graphs carry the label, need " +
                                    std::to_string(opt.min_stratum));
    const auto all = knn(d, id, calib_pool, static_cast<int>(calib_pool.size()), Part::Calib);
    for (std::size_t i = nb.neighbors.size(); i < all.neighbors.size() && s.size() < opt.min_stratum; ++i) {
      if (!scores.contains(all.neighbors[i].id))
        throw ArgumentError("local_conditional_interval: calibration graph without score");
      const auto& sc = scores[all.neighbors[i].id];
      if (sc.label == label) s.push_back(sc.s);
      used = i + 1;
    }
    if (s.empty()) throw StratumError(label, "no calibration graph carries this label");
  }
  auto out = interval_from(id, f_hat, s, opt.alpha);
  out.conditioning = Conditioning::Local;
  out.label = label;
  out.k = used;
  return out;
}

}  // namespace cproc
