#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cproc/error.hpp"
#include "cproc/rocbands.hpp"
#include "cproc/synthetic.hpp"

using namespace cproc;

namespace {

double mann_whitney(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return wins / pairs;
}

std::vector<SoftInterval> intervals(const std::vector<double>& lo, const std::vector<double>& up, int label) {
  std::vector<SoftInterval> out;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    SoftInterval iv;
    iv.id = i;
    iv.lo = lo[i];
    iv.up = up[i];
    iv.label = label;
    out.push_back(iv);
  }
  return out;
}

}  // namespace

TEST(EmpiricalRoc, HandExample) {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  const std::vector<int> y{1, 0, 1, 0};
  const auto roc = empirical_roc(s, y);
  EXPECT_EQ(roc.points.front().fpr, 1.0);
  EXPECT_EQ(roc.points.front().tpr, 1.0);
  EXPECT_EQ(roc.points.back().fpr, 0.0);
  EXPECT_EQ(roc.points.back().tpr, 0.0);
  EXPECT_DOUBLE_EQ(roc.auc, 0.75);
}

TEST(EmpiricalRoc, AucIsMannWhitneyWithTies) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> grid(0, 10);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(30);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      s[i] = grid(rng) / 10.0;
      y[i] = coin(rng);
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(empirical_roc(s, y).auc, mann_whitney(s, y), 1e-12);
  }
}

TEST(EmpiricalRoc, OneClassIsDegenerate) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<int> y{1, 1};
  EXPECT_THROW(empirical_roc(s, y), DegenerateTestError);
}

TEST(Band, DegenerateIntervalsReproduceEmpiricalRoc) {
  const std::vector<double> pos{0.9, 0.6, 0.3, 0.6};
  const std::vector<double> neg{0.5, 0.2, 0.1};
  const auto p = intervals(pos, pos, 1);
  const auto n = intervals(neg, neg, 0);
  const auto band = band_from_intervals(p, n, default_lambda_grid(p, n, 64), 0.1, BandMode::Exchangeable);
  std::vector<double> sp = pos, sn = neg;
  std::sort(sp.begin(), sp.end());
  std::sort(sn.begin(), sn.end());
  for (std::size_t i = 0; i < band.lambda.size(); ++i) {
    EXPECT_EQ(band.sen_lo[i], band.sen_up[i]);
    EXPECT_EQ(band.sen_lo[i], rate_above(sp, band.lambda[i]));
    EXPECT_EQ(band.spe_lo[i], rate_above(sn, band.lambda[i]));
  }
  std::vector<double> all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  std::vector<int> y{1, 1, 1, 1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(band.auc_lo, empirical_roc(all, y).auc);
  EXPECT_DOUBLE_EQ(band.auc_up, band.auc_lo);
}

TEST(Band, SandwichesTheEmpiricalCurveAndIsMonotone) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1), w(0, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> fp(40), fn(60), plo, pup, nlo, nup;
    for (auto& f : fp) {
      f = u(rng);
      plo.push_back(f - w(rng));
      pup.push_back(f + w(rng));
    }
    for (auto& f : fn) {
      f = u(rng);
      nlo.push_back(f - w(rng));
      nup.push_back(f + w(rng));
    }
    const auto p = intervals(plo, pup, 1);
    const auto n = intervals(nlo, nup, 0);
    const auto band = band_from_intervals(p, n, default_lambda_grid(p, n), 0.1, BandMode::Conditional);
    std::sort(fp.begin(), fp.end());
    std::sort(fn.begin(), fn.end());
    for (std::size_t i = 0; i < band.lambda.size(); ++i) {
      const double tpr = rate_above(fp, band.lambda[i]);
      const double fpr = rate_above(fn, band.lambda[i]);
      ASSERT_LE(band.sen_lo[i], tpr);
      ASSERT_LE(tpr, band.sen_up[i]);
      ASSERT_LE(band.spe_lo[i], fpr);
      ASSERT_LE(fpr, band.spe_up[i]);
      if (i > 0) {
        ASSERT_LE(band.sen_lo[i], band.sen_lo[i - 1]);
        ASSERT_LE(band.spe_up[i], band.spe_up[i - 1]);
      }
      const auto at = band_at(p, n, band.lambda[i]);
      ASSERT_EQ(at.sen_lo, band.sen_lo[i]);
      ASSERT_EQ(at.spe_up, band.spe_up[i]);
    }
    EXPECT_LE(band.auc_lo, band.auc_up);
  }
}

TEST(Band, GridContainsEndpointsInsideUnitInterval) {
  const auto p = intervals({-0.1, 0.25}, {0.3, 1.2}, 1);
  const auto n = intervals({0.123}, {0.456}, 0);
  const auto g = default_lambda_grid(p, n, 5);
  EXPECT_EQ(g, (std::vector<double>{0, 0.123, 0.25, 0.3, 0.456, 0.5, 0.75, 1}));
}

TEST(Band, StepMeanAndBandwidth) {
  const std::vector<double> l{0, 0.25, 1};
  const std::vector<double> v{1, 0.5, 0};
  EXPECT_DOUBLE_EQ(step_mean(l, v), 0.25 + 0.375);
  const std::vector<double> lo{0, 0, 0}, up{0.4, 0.4, 0.4};
  EXPECT_DOUBLE_EQ(mean_bandwidth(l, lo, up), 0.4);
}

TEST(Band, ParametricAucOfPerfectCurve) {
  const std::vector<double> fpr{0, 0}, tpr{1, 0};
  EXPECT_DOUBLE_EQ(parametric_auc(fpr, tpr), 1.0);
  const std::vector<double> none;
  EXPECT_DOUBLE_EQ(parametric_auc(none, none), 0.5);
}

TEST(Band, OracleRatesCountTies) {
  const std::vector<double> pi{0.2, 0.5, 0.5, 0.9};
  const std::vector<int> y{1, 1, 0, 0};
  const std::vector<double> l{0.5};
  const auto r = oracle_rates(pi, y, l);
  EXPECT_EQ(r.tpr[0], 0.5);
  EXPECT_EQ(r.fpr[0], 1.0);
}

TEST(Band, CsvRoundTrip) {
  const auto p = intervals({0.1, 0.4}, {0.3, 0.9}, 1);
  const auto n = intervals({0.05}, {0.2}, 0);
  const auto band = band_from_intervals(p, n, default_lambda_grid(p, n, 16), 0.1, BandMode::Exchangeable);
  std::stringstream ss;
  ss << "# cproc test\n";
  write_band_csv(ss, band);
  const auto back = read_band_csv(ss);
  EXPECT_EQ(back.lambda, band.lambda);
  EXPECT_EQ(back.sen_lo, band.sen_lo);
  EXPECT_EQ(back.spe_up, band.spe_up);
}

TEST(Band, ModeNames) {
  EXPECT_EQ(parse_mode("exch"), BandMode::Exchangeable);
  EXPECT_EQ(parse_mode("cond"), BandMode::Conditional);
  EXPECT_THROW(parse_mode("iid"), ArgumentError);
}

class Pipeline : public ::testing::Test {
 protected:
  Pipeline() {
    spec.n_train = 300;
    spec.n_calib = 120;
    spec.n_test = 80;
    spec.seed = 3;
    data = generate(spec);
    train = data.ids(Part::Train);
    calib = data.ids(Part::Calib);
    test = data.ids(Part::Test);
  }

  SyntheticSpec spec;
  SyntheticData data;
  std::vector<std::size_t> train, calib, test;
};

TEST_F(Pipeline, FullNeighborhoodEqualsExchangeable) {
  const EuclideanDistance d(data);
  BandConfig cfg;
  cfg.k = static_cast<int>(calib.size());
  cfg.mode = BandMode::Conditional;
  const BinaryTask task{data.pi, data.labels, train, calib, test};
  const auto cond = run_band_pipeline(d, task, cfg);
  cfg.mode = BandMode::Exchangeable;
  const auto exch = run_band_pipeline(d, task, cfg);
  EXPECT_EQ(cond.band.lambda, exch.band.lambda);
  EXPECT_EQ(cond.band.sen_lo, exch.band.sen_lo);
  EXPECT_EQ(cond.band.sen_up, exch.band.sen_up);
  EXPECT_EQ(cond.band.spe_lo, exch.band.spe_lo);
  EXPECT_EQ(cond.band.spe_up, exch.band.spe_up);
}

TEST_F(Pipeline, MultilabelBandsPerLabel) {
  const EuclideanDistance d(data);
  ScoredDataset scored;
  scored.num_labels = 3;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.row(i)[1];
    const int label = x < -0.4 ? 0 : (x < 0.4 ? 1 : 2);
    scored.labels.push_back(label);
    const double p1 = 0.5 * data.pi[i];
    scored.probs.push_back({(1 - data.pi[i]) / 2 + 0.25 * data.pi[i], p1, 0.0});
    auto& pr = scored.probs.back();
    pr[2] = 1 - pr[0] - pr[1];
  }
  BandConfig cfg;
  cfg.mode = BandMode::Exchangeable;
  const auto bands = multilabel_bands(scored, d, train, calib, test, cfg);
  EXPECT_EQ(bands.size(), 3u);
  for (const auto& [k, r] : bands) EXPECT_FALSE(r.band.lambda.empty());

  std::vector<std::size_t> no_label2;
  for (auto id : test)
    if (scored.labels[id] != 2) no_label2.push_back(id);
  EXPECT_THROW(multilabel_bands(scored, d, train, calib, no_label2, cfg), StratumError);
}
