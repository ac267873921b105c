#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cproc/graph.hpp"

namespace cproc {

enum class FiltrationKind { Degree, Betweenness, Closeness, Communicability, Eigenvector };

inline constexpr FiltrationKind kAllFiltrations[] = {
    FiltrationKind::Degree, FiltrationKind::Betweenness, FiltrationKind::Closeness,
    FiltrationKind::Communicability, FiltrationKind::Eigenvector};

std::string_view to_string(FiltrationKind kind);
FiltrationKind parse_filtration(std::string_view text);

// One finite value per vertex.
//   Degree           vertex degree
//   Betweenness      unnormalized shortest-path betweenness, each unordered
//                    pair split evenly among its shortest paths
//   Closeness        harmonic closeness, sum over u != v of 1 / d(u, v)
//   Communicability  subgraph centrality, diag(exp(A))
//   Eigenvector      principal eigenvector of A per connected component,
//                    unit L2 norm per component, isolated vertices 0
// Throws ArgumentError for an empty graph and NumericalError if the power
// iteration does not converge.
std::vector<double> compute_filtration(const Graph& g, FiltrationKind kind);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
  double birth = 0;
  double death = kInfinity;

  bool essential() const noexcept { return death == kInfinity; }
  double persistence() const noexcept { return death - birth; }
  auto operator<=>(const PersistencePair&) const = default;
};

struct PersistenceDiagram {
  std::size_t graph_id = 0;
  std::vector<PersistencePair> dim0;
  std::vector<PersistencePair> dim1;

  bool operator==(const PersistenceDiagram&) const = default;
};

// Sublevel-set persistence of the vertex function `values`: vertex v enters
// at values[v], edge (u, v) at max(values[u], values[v]). H0 uses the elder
// rule (older birth survives, ties go to the lower vertex id); every edge
// closing a cycle contributes an essential H1 class. Zero-persistence pairs
// are kept. Pairs within each dimension are sorted.
PersistenceDiagram sublevel_persistence(const Graph& g, std::span<const double> values);

// Which diagram points take part in comparisons and vectorizations.
struct DiagramSelection {
  bool dim0 = true;
  bool dim1 = true;
  bool dim0_essential = false;  // the oldest component never dies; off by default
};

// Drops unselected points and replaces +inf deaths by `cap`.
PersistenceDiagram cap_diagram(const PersistenceDiagram& d, double cap, const DiagramSelection& sel = {});

// Largest finite birth/death value over all diagrams (0 if none).
double max_finite_value(std::span<const PersistenceDiagram> diagrams);

struct ImageOptions {
  std::size_t resolution = 50;
  double cap = 1.0;   // grid covers [0, cap]^2 in (birth, persistence)
  double sigma = 0;   // <= 0 selects cap / 20
  DiagramSelection selection{.dim0 = true, .dim1 = true, .dim0_essential = true};
};

struct PersistenceImage {
  std::size_t resolution = 0;
  double sigma = 0;
  double cap = 0;
  std::string weight = "linear";  // w(pers) = pers / cap
  std::vector<double> pixels;     // row-major, row = persistence bin, column = birth bin

  double at(std::size_t row, std::size_t col) const { return pixels[row * resolution + col]; }
  double total() const;
};

// Gaussian-splatted persistence image. Each point (b, d) maps to
// (b, d - b) and adds w(d - b) times the mass of an isotropic Gaussian of
// width sigma falling inside each pixel.
PersistenceImage persistence_image(const PersistenceDiagram& d, const ImageOptions& options);

// CSV `graph_id,dim,birth,death` with `inf` for essential classes.
void write_diagrams_csv(std::ostream& os, std::span<const PersistenceDiagram> diagrams);
std::vector<PersistenceDiagram> read_diagrams_csv(std::istream& is, std::size_t num_graphs);

// One row per image: graph_id followed by resolution^2 pixel values.
void write_images_csv(std::ostream& os, std::span<const PersistenceImage> images);

}  // namespace cproc
