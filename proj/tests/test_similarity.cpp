#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cproc/assignment.hpp"
#include "cproc/error.hpp"
#include "cproc/similarity.hpp"
#include "oracles.hpp"

using namespace cproc;
namespace fs = std::filesystem;

namespace {

std::vector<PersistencePair> random_diagram(std::mt19937_64& rng, std::size_t max_points) {
  std::uniform_int_distribution<std::size_t> count(0, max_points);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<PersistencePair> d(count(rng));
  for (auto& p : d) {
    p.birth = u(rng);
    p.death = p.birth + u(rng);
  }
  return d;
}

}  // namespace

TEST(Assignment, MatchesPermutationSearch) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    std::vector<double> cost(n * n);
    for (auto& c : cost) c = u(rng);
    const auto got = solve_assignment(cost, n);
    double got_cost = 0;
    for (std::size_t r = 0; r < n; ++r) got_cost += cost[r * n + got[r]];
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
      double c = 0;
      for (std::size_t r = 0; r < n; ++r) c += cost[r * n + perm[r]];
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got_cost, best, 1e-9);
  }
}

TEST(Wasserstein, MatchesExhaustiveMatching) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_diagram(rng, 4);
    const auto b = random_diagram(rng, 4);
    for (double p : {1.0, 2.0}) EXPECT_NEAR(wasserstein_distance(a, b, p), oracle::wasserstein_exhaustive(a, b, p), 1e-9);
  }
}

TEST(Wasserstein, BasicProperties) {
  const std::vector<PersistencePair> a{{0, 2}, {1, 1.5}};
  const std::vector<PersistencePair> empty;
  EXPECT_EQ(wasserstein_distance(a, a, 1), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein_distance(a, empty, 1), 1.0 + 0.25);
  const std::vector<PersistencePair> zero{{0.5, 0.5}};
  EXPECT_EQ(wasserstein_distance(zero, empty, 1), 0.0);
}

TEST(Wasserstein, SymmetricBitForBit) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_diagram(rng, 7);
    const auto b = random_diagram(rng, 7);
    EXPECT_EQ(wasserstein_distance(a, b, 1), wasserstein_distance(b, a, 1));
    EXPECT_EQ(wasserstein_distance(a, b, 2), wasserstein_distance(b, a, 2));
  }
}

TEST(Wasserstein, CombinesDimensions) {
  PersistenceDiagram x, y;
  x.dim0 = {{0, 1}};
  x.dim1 = {{0, 3}};
  const double w0 = 0.5, w1 = 1.5;
  EXPECT_DOUBLE_EQ(wasserstein_distance(x, y, 1), w0 + w1);
  EXPECT_DOUBLE_EQ(wasserstein_distance(x, y, 2), std::sqrt(w0 * w0 + w1 * w1));
  x.dim1 = {{0, kInfinity}};
  EXPECT_THROW(wasserstein_distance(x, y, 1), ArgumentError);
}

TEST(SimilarityMatrix, FixtureMatchesOracle) {
  const auto ds = parse_tu_dataset(fs::path(CPROC_TEST_DATA) / "TRI", "TRI");
  std::vector<PersistenceDiagram> capped;
  std::vector<PersistenceDiagram> raw;
  for (const auto& g : ds.graphs) raw.push_back(sublevel_persistence(g, compute_filtration(g, FiltrationKind::Degree)));
  const double cap = max_finite_value(raw);
  EXPECT_EQ(cap, 3.0);
  for (const auto& d : raw) capped.push_back(cap_diagram(d, cap));
  const auto m = build_similarity_matrix(capped, 1.0, 2);
  // Triangle: dim0 {(2,2),(2,2)}, dim1 {(2,3)}; path: dim0 {(1,2),(2,2)};
  // star: dim0 {(1,3),(1,3),(3,3)}.
  const double tri_path = oracle::wasserstein_exhaustive(capped[0].dim0, capped[1].dim0, 1) +
                          oracle::wasserstein_exhaustive(capped[0].dim1, capped[1].dim1, 1);
  EXPECT_DOUBLE_EQ(m.at(0, 1), tri_path);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5 + 0.5);
  EXPECT_DOUBLE_EQ(m.at(1, 2), 1.0 + 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.at(i, i), 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at(i, j), m.at(j, i));
  }
}

TEST(SimilarityMatrix, ParallelEqualsSerial) {
  std::mt19937_64 rng(4);
  std::vector<PersistenceDiagram> ds(25);
  for (auto& d : ds) {
    d.dim0 = random_diagram(rng, 5);
    d.dim1 = random_diagram(rng, 3);
  }
  EXPECT_EQ(build_similarity_matrix(ds, 1, 1), build_similarity_matrix(ds, 1, 4));
}

TEST(SimilarityMatrix, CombineIsPNorm) {
  SimilarityMatrix a(2), b(2);
  a.at(0, 1) = a.at(1, 0) = 3;
  b.at(0, 1) = b.at(1, 0) = 4;
  const std::vector<SimilarityMatrix> parts{a, b};
  EXPECT_DOUBLE_EQ(combine_matrices(parts, 2).at(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(combine_matrices(parts, 1).at(1, 0), 7.0);
}

TEST(Knn, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  const std::size_t n = 200;
  SimilarityMatrix m(n);
  std::uniform_int_distribution<int> coarse(0, 40);  // coarse values force ties
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.at(i, j) = m.at(j, i) = coarse(rng) / 4.0;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> kdist(1, 60);
  for (int q = 0; q < 1000; ++q) {
    const auto query = pick(rng);
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i)
      if ((i * 7 + static_cast<std::size_t>(q)) % 3 != 0) pool.push_back(i);
    const int k = kdist(rng);
    const auto got = knn(m, query, pool, k);

    std::vector<Neighbor> all;
    for (auto id : pool)
      if (id != query) all.push_back({id, m.at(query, id)});
    std::sort(all.begin(), all.end(),
              [](const Neighbor& a, const Neighbor& b) { return std::tie(a.distance, a.id) < std::tie(b.distance, b.id); });
    all.resize(std::min<std::size_t>(all.size(), static_cast<std::size_t>(k)));
    ASSERT_EQ(got.neighbors, all);
  }
}

TEST(Knn, Errors) {
  SimilarityMatrix m(3);
  const std::vector<std::size_t> pool{0, 1, 2};
  EXPECT_THROW(knn(m, 0, pool, 0), ArgumentError);
  const std::vector<std::size_t> self{0};
  EXPECT_THROW(knn(m, 0, self, 1), ArgumentError);
}

TEST(MatrixFile, BinaryRoundTripAndCorruption) {
  SimilarityMatrix m(3, {2.0, "degree", 1.0, 0xfeedULL});
  m.at(0, 1) = m.at(1, 0) = 0.25;
  m.at(0, 2) = m.at(2, 0) = 1.5;
  const auto path = fs::temp_directory_path() / "cproc_matrix_test.bin";
  write_matrix_binary(path, m, "# config {}\n");
  const auto back = read_matrix_binary(path);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, m);
  EXPECT_EQ(back->meta().hash, 0xfeedULL);
  EXPECT_EQ(back->meta().p, 2.0);

  fs::resize_file(path, 20);
  EXPECT_FALSE(read_matrix_binary(path).has_value());
  std::ofstream(path, std::ios::binary) << "NOTAMATRIXFILE000000000000000000000000000";
  EXPECT_FALSE(read_matrix_binary(path).has_value());
  EXPECT_FALSE(read_matrix_binary(path.string() + ".missing").has_value());
}
