#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cproc/graph.hpp"
#include "cproc/topology.hpp"

namespace cproc {

// Pairwise distance between dataset items. Graph pipelines use a
// SimilarityMatrix; synthetic studies plug in a covariate-space metric.
class DistanceSource {
 public:
  virtual ~DistanceSource() = default;
  virtual std::size_t size() const = 0;
  virtual double distance(std::size_t i, std::size_t j) const = 0;
};

struct SimilarityMeta {
  double p = 1.0;
  std::string filtrations;
  double cap = 0.0;
  std::uint64_t hash = 0;
};

class SimilarityMatrix final : public DistanceSource {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n, SimilarityMeta meta = {})
      : n_(n), values_(n * n, 0.0), meta_(std::move(meta)) {}

  std::size_t size() const override { return n_; }
  double distance(std::size_t i, std::size_t j) const override { return values_[i * n_ + j]; }

  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  const SimilarityMeta& meta() const { return meta_; }
  SimilarityMeta& meta() { return meta_; }

  bool operator==(const SimilarityMatrix& o) const { return n_ == o.n_ && values_ == o.values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
  SimilarityMeta meta_;
};

// Exact p-Wasserstein distance between two finite diagrams of one homology
// dimension. Points may match a point of the other diagram (L-infinity
// ground cost) or their own diagonal projection; zero-persistence points
// cost nothing and are skipped. Symmetric bit-for-bit.
double wasserstein_distance(std::span<const PersistencePair> a, std::span<const PersistencePair> b, double p);

// Matches dim0 and dim1 separately and combines them as
// (W_p(dim0)^p + W_p(dim1)^p)^(1/p). Both diagrams must already be capped
// (no infinite deaths), see cap_diagram.
double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p);

// All n(n-1)/2 pairwise distances, computed on up to `workers` threads.
SimilarityMatrix build_similarity_matrix(std::span<const PersistenceDiagram> capped, double p,
                                         std::size_t workers = 1);

// Elementwise (sum_f D_f^p)^(1/p), used when several filtrations are combined.
SimilarityMatrix combine_matrices(std::span<const SimilarityMatrix> parts, double p);

struct Neighbor {
  std::size_t id = 0;
  double distance = 0;

  bool operator==(const Neighbor&) const = default;
};

struct NeighborSet {
  std::size_t query = 0;
  std::vector<Neighbor> neighbors;  // ascending distance, ties by id
  Part pool = Part::Calib;
};

// The k pool members closest to `query` (the query itself is skipped).
// Throws ArgumentError when k <= 0 or the pool has no other member.
NeighborSet knn(const DistanceSource& d, std::size_t query, std::span<const std::size_t> pool, int k,
                Part pool_tag = Part::Calib);

// Binary layout, little endian:
//   "CPROCSM1" | u64 n | f64 p | u64 hash | n*n f64 row-major | u64 len | config text
void write_matrix_binary(const std::filesystem::path& path, const SimilarityMatrix& m,
                         const std::string& config_text = {});
// Returns nullopt if the file is missing, truncated or has a foreign magic.
std::optional<SimilarityMatrix> read_matrix_binary(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& os, const SimilarityMatrix& m);

}  // namespace cproc
