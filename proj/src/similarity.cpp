#include "cproc/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

#include "cproc/assignment.hpp"
#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

namespace {

double linf(const PersistencePair& a, const PersistencePair& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_distance(const PersistencePair& a) { return (a.death - a.birth) / 2.0; }

std::vector<PersistencePair> off_diagonal(std::span<const PersistencePair> pts) {
  std::vector<PersistencePair> out;
  for (const auto& pt : pts) {
    if (!std::isfinite(pt.birth) || !std::isfinite(pt.death))
      throw ArgumentError("wasserstein_distance: diagram must be capped before matching");
    if (pt.death != pt.birth) out.push_back(pt);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Sum of matched costs raised to p (before taking the root).
double matching_cost_pow(std::span<const PersistencePair> a_in, std::span<const PersistencePair> b_in, double p) {
  auto a = off_diagonal(a_in);
  auto b = off_diagonal(b_in);
  // Fixed operand order makes the result independent of argument order.
  if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) std::swap(a, b);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  if (n == 0) return 0.0;

  // Rows: points of a, then one diagonal slot per point of b.
  // Columns: points of b, then one diagonal slot per point of a.
  // Any diagonal slot serves any point, so each point's diagonal cost is
  // repeated across the slot block; slot-to-slot pairs cost nothing.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    const double diag = std::pow(diagonal_distance(a[i]), p);
    for (std::size_t j = 0; j < nb; ++j) cost[i * n + j] = std::pow(linf(a[i], b[j]), p);
    for (std::size_t j = nb; j < n; ++j) cost[i * n + j] = diag;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    const double diag = std::pow(diagonal_distance(b[j]), p);
    for (std::size_t i = na; i < n; ++i) cost[i * n + j] = diag;
  }
  const auto assignment = solve_assignment(cost, n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + assignment[i]];
  return total;
}

void check_order(double p) {
  if (!(p >= 1) || !std::isfinite(p)) throw ArgumentError("wasserstein order p must be >= 1");
}

}  // namespace

double wasserstein_distance(std::span<const PersistencePair> a, std::span<const PersistencePair> b, double p) {
  check_order(p);
  return std::pow(matching_cost_pow(a, b, p), 1.0 / p);
}

double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, double p) {
  check_order(p);
  const double total = matching_cost_pow(a.dim0, b.dim0, p) + matching_cost_pow(a.dim1, b.dim1, p);
  return std::pow(total, 1.0 / p);
}

SimilarityMatrix build_similarity_matrix(std::span<const PersistenceDiagram> capped, double p,
                                         std::size_t workers) {
  check_order(p);
  const std::size_t n = capped.size();
  SimilarityMatrix m(n);
  m.meta().p = p;
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = wasserstein_distance(capped[i], capped[j], p);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  });
  return m;
}

SimilarityMatrix combine_matrices(std::span<const SimilarityMatrix> parts, double p) {
  check_order(p);
  if (parts.empty()) throw ArgumentError("combine_matrices: nothing to combine");
  if (parts.size() == 1) return parts.front();
  const std::size_t n = parts.front().size();
  SimilarityMatrix out(n, parts.front().meta());
  auto values = out.values();
  for (const auto& m : parts) {
    if (m.size() != n) throw ArgumentError("combine_matrices: size mismatch");
    const auto src = m.values();
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += std::pow(src[k], p);
  }
  for (auto& x : values) x = std::pow(x, 1.0 / p);
  return out;
}

NeighborSet knn(const DistanceSource& d, std::size_t query, std::span<const std::size_t> pool, int k, Part pool_tag) {
  if (k <= 0) throw ArgumentError("knn: K must be positive");
  NeighborSet out;
  out.query = query;
  out.pool = pool_tag;
  out.neighbors.reserve(pool.size());
  for (auto id : pool)
    if (id != query) out.neighbors.push_back({id, d.distance(query, id)});
  if (out.neighbors.empty()) throw ArgumentError("knn: pool has no candidate besides the query");
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  };
  const auto keep = std::min(out.neighbors.size(), static_cast<std::size_t>(k));
  std::partial_sort(out.neighbors.begin(), out.neighbors.begin() + static_cast<std::ptrdiff_t>(keep),
                    out.neighbors.end(), closer);
  out.neighbors.resize(keep);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'P', 'R', 'O', 'C', 'S', 'M', '1'};

static_assert(std::endian::native == std::endian::little, "matrix files assume a little-endian host");

template <typename T>
void put(std::ostream& os, T x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof x);
}

template <typename T>
bool get(std::istream& is, T& x) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&x), sizeof x));
}

}  // namespace

void write_matrix_binary(const std::filesystem::path& path, const SimilarityMatrix& m, const std::string& config) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(os, m.size());
  put<double>(os, m.meta().p);
  put<std::uint64_t>(os, m.meta().hash);
  os.write(reinterpret_cast<const char*>(m.values().data()),
           static_cast<std::streamsize>(m.values().size() * sizeof(double)));
  put<std::uint64_t>(os, config.size());
  os.write(config.data(), static_cast<std::streamsize>(config.size()));
}

std::optional<SimilarityMatrix> read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) return std::nullopt;
  std::uint64_t n = 0, hash = 0;
  double p = 0;
  if (!get(is, n) || !get(is, p) || !get(is, hash)) return std::nullopt;
  if (n > (1u << 20)) return std::nullopt;
  SimilarityMatrix m(static_cast<std::size_t>(n));
  m.meta().p = p;
  m.meta().hash = hash;
  if (!is.read(reinterpret_cast<char*>(m.values().data()),
               static_cast<std::streamsize>(m.values().size() * sizeof(double))))
    return std::nullopt;
  return m;
}

void write_matrix_csv(std::ostream& os, const SimilarityMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? "," : "") << format_double(m.at(i, j));
    os << '\n';
  }
}

}  // namespace cproc
