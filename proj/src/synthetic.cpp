#include "cproc/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

namespace {

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

SyntheticSpec model_m1() { return SyntheticSpec{}; }

SyntheticSpec model_m2() {
  auto s = model_m1();
  s.missing = {s.dim() - 1};
  return s;
}

SyntheticSpec model_m3() {
  auto s = model_m1();
  s.missing = {s.dim() - 2, s.dim() - 1};
  return s;
}

std::vector<std::size_t> SyntheticData::ids(Part part) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i] == part) out.push_back(i);
  return out;
}

SyntheticData generate(const SyntheticSpec& spec) {
  if (spec.dim() == 0) throw ArgumentError("synthetic: need at least one covariate");
  if (!spec.shift.empty() && spec.shift.size() != spec.dim()) throw ArgumentError("synthetic: shift has wrong length");
  for (auto m : spec.missing)
    if (m >= spec.dim()) throw ArgumentError("synthetic: missing covariate index out of range");

  SyntheticData d;
  d.dim = spec.dim();
  const std::size_t n = spec.size();
  d.x.resize(n * d.dim);
  d.pi.resize(n);
  d.labels.resize(n);
  d.parts.resize(n);
  d.noise.resize(n);

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    d.parts[i] = i < spec.n_train ? Part::Train : (i < spec.n_train + spec.n_calib ? Part::Calib : Part::Test);
    double eta = spec.intercept;
    for (std::size_t c = 0; c < d.dim; ++c) {
      double v = normal(rng);
      if (d.parts[i] == Part::Test && !spec.shift.empty()) v += spec.shift[c];
      d.x[i * d.dim + c] = v;
      eta += v * spec.beta[c];
    }
    d.pi[i] = logistic(eta);
    d.labels[i] = unit(rng) < d.pi[i] ? 1 : 0;
    d.noise[i] = normal(rng);
  }
  return d;
}

double EuclideanDistance::distance(std::size_t i, std::size_t j) const {
  const auto a = data_->row(i);
  const auto b = data_->row(j);
  double acc = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double t = a[c] - b[c];
    acc += t * t;
  }
  return std::sqrt(acc);
}

SimilarityMatrix euclidean_matrix(const SyntheticData& data) {
  const EuclideanDistance dist(data);
  SimilarityMatrix m(data.size());
  m.meta().filtrations = "euclidean";
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = i + 1; j < data.size(); ++j) m.at(i, j) = m.at(j, i) = dist.distance(i, j);
  return m;
}

// ---------------------------------------------------------------------------

double FittedLogit::predict(std::span<const double> row) const {
  double eta = intercept;
  for (std::size_t c = 0; c < columns.size(); ++c) eta += coef[c] * row[columns[c]];
  return logistic(eta);
}

namespace {

struct IrlsResult {
  Eigen::VectorXd beta;
  std::size_t iterations = 0;
  double grad_norm = 0;
  bool converged = false;
  std::vector<double> losses;
};

// Minimizes mean NLL + ridge/2 * |beta[1:]|^2 with damped Newton steps.
IrlsResult irls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double ridge, double tol, std::size_t max_iter) {
  const auto n = static_cast<double>(z.rows());
  const auto p = z.cols();
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, ridge);
  penalty(0) = 0;

  const auto loss = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = z * b;
    double acc = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) acc += softplus(eta(i)) - y(i) * eta(i);
    return acc / n + 0.5 * (penalty.array() * b.array().square()).sum();
  };

  IrlsResult r;
  r.beta = Eigen::VectorXd::Zero(p);
  double current = loss(r.beta);
  for (r.iterations = 0; r.iterations <= max_iter; ++r.iterations) {
    r.losses.push_back(current);
    const Eigen::VectorXd eta = z * r.beta;
    Eigen::VectorXd mu(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = logistic(eta(i));
      w(i) = mu(i) * (1 - mu(i));
    }
    const Eigen::VectorXd grad = z.transpose() * (mu - y) / n + (penalty.array() * r.beta.array()).matrix();
    r.grad_norm = grad.norm();
    if (r.grad_norm <= tol) {
      r.converged = true;
      break;
    }
    if (r.iterations == max_iter) break;
    Eigen::MatrixXd h = z.transpose() * w.asDiagonal() * z / n;
    h.diagonal() += penalty;
    const Eigen::VectorXd step = h.completeOrthogonalDecomposition().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = r.beta - step;
    double next_loss = loss(next);
    for (int halvings = 0; next_loss > current && halvings < 40; ++halvings) {
      t /= 2;
      next = r.beta - t * step;
      next_loss = loss(next);
    }
    if (next_loss > current) break;  // no descent possible at machine precision
    r.beta = next;
    current = next_loss;
  }
  return r;
}

}  // namespace

FittedLogit fit_logistic(const SyntheticData& data, std::span<const std::size_t> rows,
                         std::span<const std::size_t> missing, double tol, std::size_t max_iter) {
  FittedLogit fit;
  for (std::size_t c = 0; c < data.dim; ++c)
    if (std::find(missing.begin(), missing.end(), c) == missing.end()) fit.columns.push_back(c);

  bool has0 = false, has1 = false;
  for (auto r : rows) (data.labels[r] ? has1 : has0) = true;
  if (!has0 || !has1) throw ArgumentError("fit_logistic: both labels must be present");

  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fit.columns.size() + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    z(ii, 0) = 1.0;
    for (std::size_t c = 0; c < fit.columns.size(); ++c)
      z(ii, static_cast<Eigen::Index>(c + 1)) = data.x[rows[i] * data.dim + fit.columns[c]];
    y(ii) = data.labels[rows[i]];
  }

  auto r = irls(z, y, 0.0, tol, max_iter);
  // Under complete separation the likelihood has no maximizer: the unpenalized
  // iterate classifies every row correctly while its norm keeps growing.
  const Eigen::VectorXd eta = z * r.beta;
  bool separated = true;
  for (Eigen::Index i = 0; i < eta.size() && separated; ++i) separated = y(i) > 0.5 ? eta(i) > 0 : eta(i) < 0;
  if (separated || r.beta.tail(r.beta.size() - 1).norm() > 1e4 || (!r.converged && r.beta.norm() > 1e3)) {
    fit.separation = true;
    r = irls(z, y, 1e-6, tol, max_iter);
  }
  if (!r.converged)
    throw NumericalError("fit_logistic: no convergence after " + std::to_string(r.iterations) +
                         " iterations (gradient norm " + format_double(r.grad_norm) + ")");
  fit.intercept = r.beta(0);
  for (std::size_t c = 0; c < fit.columns.size(); ++c) fit.coef.push_back(r.beta(static_cast<Eigen::Index>(c + 1)));
  fit.iterations = r.iterations;
  fit.grad_norm = r.grad_norm;
  fit.converged = true;
  fit.loss_history = std::move(r.losses);
  return fit;
}

std::vector<double> model_scores(const SyntheticData& data, const FittedLogit& fit, const SyntheticSpec& spec) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    double eta = fit.intercept;
    for (std::size_t c = 0; c < fit.columns.size(); ++c) eta += fit.coef[c] * row[fit.columns[c]];
    const double sd = row[0] < 0 ? spec.noise_low : spec.noise_high;
    out[i] = logistic(eta + sd * data.noise[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ReplicateOutcome run_replicate(const SyntheticSpec& base, const ExperimentOptions& opt, std::size_t rep) {
  SyntheticSpec spec = base;
  spec.seed = base.seed + rep;
  const auto data = generate(spec);
  const auto train = data.ids(Part::Train);
  const auto calib = data.ids(Part::Calib);
  const auto test = data.ids(Part::Test);

  std::vector<double> f_hat;
  if (opt.oracle_scores) {
    f_hat = data.pi;
  } else {
    const auto fit = fit_logistic(data, train, spec.missing);
    f_hat = model_scores(data, fit, spec);
  }

  const EuclideanDistance dist(data);
  BandConfig cfg;
  cfg.mode = opt.mode;
  cfg.k = opt.k;
  cfg.alpha = opt.alpha;
  cfg.min_stratum = opt.min_stratum;
  cfg.policy = opt.policy;
  const auto result = run_band_pipeline(dist, BinaryTask{f_hat, data.labels, train, calib, test}, cfg);

  std::vector<double> test_pi;
  std::vector<int> test_y;
  std::vector<std::size_t> pos, neg;
  for (auto id : test) {
    (data.labels[id] == 1 ? pos : neg).push_back(id);
    test_pi.push_back(data.pi[id]);
    test_y.push_back(data.labels[id]);
  }

  ReplicateOutcome o;
  o.rep = rep;
  o.seed = spec.seed;
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  o.lambda_tpr = data.pi[pos[uniform_index(rng, pos.size())]];
  o.lambda_fpr = data.pi[neg[uniform_index(rng, neg.size())]];
  const double lambdas[] = {o.lambda_tpr, o.lambda_fpr};
  const auto oracle = oracle_rates(test_pi, test_y, lambdas);
  o.tpr_oracle = oracle.tpr[0];
  o.fpr_oracle = oracle.fpr[1];
  const auto at_tpr = band_at(result.pos_intervals, result.neg_intervals, o.lambda_tpr);
  const auto at_fpr = band_at(result.pos_intervals, result.neg_intervals, o.lambda_fpr);
  o.sen_lo = at_tpr.sen_lo;
  o.sen_up = at_tpr.sen_up;
  o.spe_lo = at_fpr.spe_lo;
  o.spe_up = at_fpr.spe_up;
  o.tpr_hit = o.sen_lo <= o.tpr_oracle && o.tpr_oracle <= o.sen_up;
  o.fpr_hit = o.spe_lo <= o.fpr_oracle && o.fpr_oracle <= o.spe_up;
  const auto summary = summarize(result.band, result.roc.auc);
  o.bw_sen = summary.mean_bw_sen;
  o.bw_spe = summary.mean_bw_spe;
  o.auc = result.roc.auc;
  return o;
}

}  // namespace

CoverageReport coverage_experiment(const SyntheticSpec& spec, const ExperimentOptions& opt) {
  if (opt.reps == 0) throw ArgumentError("coverage_experiment: reps must be >= 1");
  if (!(opt.alpha > 0 && opt.alpha < 1)) throw ArgumentError("alpha must lie in (0, 1)");
  CoverageReport report;
  report.mode = opt.mode;
  report.alpha = opt.alpha;
  report.k = opt.k;
  report.replicates.resize(opt.reps);
  parallel_for(opt.reps, opt.workers, [&](std::size_t r) { report.replicates[r] = run_replicate(spec, opt, r); });

  const auto n = static_cast<double>(opt.reps);
  double tpr = 0, fpr = 0, bws = 0, bwp = 0;
  for (const auto& o : report.replicates) {
    tpr += o.tpr_hit;
    fpr += o.fpr_hit;
    bws += o.bw_sen;
    bwp += o.bw_spe;
  }
  report.coverage_tpr = tpr / n;
  report.coverage_fpr = fpr / n;
  report.se_tpr = std::sqrt(report.coverage_tpr * (1 - report.coverage_tpr) / n);
  report.se_fpr = std::sqrt(report.coverage_fpr * (1 - report.coverage_fpr) / n);
  report.mean_bw_sen = bws / n;
  report.mean_bw_spe = bwp / n;
  return report;
}

void write_replicates_csv(std::ostream& os, const CoverageReport& report) {
  os << "rep,seed,lambda_tpr,tpr_oracle,sen_lo,sen_up,tpr_hit,lambda_fpr,fpr_oracle,spe_lo,spe_up,fpr_hit,bw_sen,"
        "bw_spe,auc\n";
  for (const auto& o : report.replicates)
    os << o.rep << ',' << o.seed << ',' << format_double(o.lambda_tpr) << ',' << format_double(o.tpr_oracle) << ','
       << format_double(o.sen_lo) << ',' << format_double(o.sen_up) << ',' << int(o.tpr_hit) << ','
       << format_double(o.lambda_fpr) << ',' << format_double(o.fpr_oracle) << ',' << format_double(o.spe_lo) << ','
       << format_double(o.spe_up) << ',' << int(o.fpr_hit) << ',' << format_double(o.bw_sen) << ','
       << format_double(o.bw_spe) << ',' << format_double(o.auc) << '\n';
}

}  // namespace cproc
