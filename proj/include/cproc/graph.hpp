#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cproc {

// Undirected edge stored with u < v.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  auto operator<=>(const Edge&) const = default;
};

// A simple undirected graph with optional node data. Node indices are
// 0-based and local to the graph; TU files are 1-based and global, the
// parser rebases them.
struct Graph {
  std::size_t id = 0;
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;                          // sorted, unique, no self-loops
  std::vector<std::vector<double>> node_attributes;  // empty or one row per node
  std::vector<long> node_labels;                     // empty or one per node
  int label = 0;                                     // remapped class in [0, L)

  bool operator==(const Graph&) const = default;
};

// Normalizes a raw edge list: orients u < v, drops self-loops, removes
// duplicates and sorts. Returns the number of self-loops dropped.
std::size_t normalize_edges(std::vector<Edge>& edges);

std::vector<std::vector<std::uint32_t>> adjacency_list(const Graph& g);

struct TuDataset {
  std::string name;
  std::vector<Graph> graphs;
  // original_labels[k] is the file label mapped to class k (ascending order).
  std::vector<long> original_labels;
  std::size_t self_loops_dropped = 0;

  std::size_t num_classes() const noexcept { return original_labels.size(); }
};

// Reads NAME_A.txt, NAME_graph_indicator.txt, NAME_graph_labels.txt and the
// optional NAME_node_labels.txt / NAME_node_attributes.txt from `dir`.
// Throws ParseError on missing files, malformed lines, cross-graph edges
// or an empty dataset.
TuDataset parse_tu_dataset(const std::filesystem::path& dir, const std::string& name);

// Inverse of parse_tu_dataset. Edges are written in both directions as in
// the published benchmark files.
void write_tu_dataset(const TuDataset& dataset, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Splits

enum class Part : std::uint8_t { Train = 0, Valid = 1, Calib = 2, Test = 3 };

std::string_view to_string(Part part);
Part parse_part(std::string_view text);

struct SplitRatios {
  double pool_split = 0.8;   // fraction of the dataset used for training
  double calib_split = 0.5;  // fraction of the remaining pool sent to calibration
  double valid_split = 0.0;  // fraction of the training part carved off as validation
};

struct SplitAssignment {
  std::vector<Part> parts;  // indexed by graph id
  std::uint64_t seed = 0;
  SplitRatios ratios;

  std::vector<std::size_t> ids(Part part) const;
  // Sizes in (train, valid, calib, test) order.
  std::array<std::size_t, 4> sizes() const;
};

// Deterministic four-way split. Sizes: train = floor(n * pool_split),
// valid = floor(train * valid_split) taken out of train,
// calib = floor((n - train) * calib_split), test = the rest.
// Throws SplitError if a required part ends up empty.
SplitAssignment split_dataset(std::size_t n, std::uint64_t seed, const SplitRatios& ratios);

// Re-draws the calib/test partition of the non-training pool with a new
// seed; train and valid membership is unchanged.
SplitAssignment resplit_pool(const SplitAssignment& base, std::uint64_t seed);

void write_split_manifest(std::ostream& os, const SplitAssignment& split);

// ---------------------------------------------------------------------------
// Classifier scores

struct ScoredDataset {
  std::vector<int> labels;                 // indexed by graph id
  std::vector<std::vector<double>> probs;  // per graph, one entry per label
  std::size_t num_labels = 0;

  std::size_t size() const noexcept { return labels.size(); }
  // Score of label k for every graph (the binary score is k = 1).
  std::vector<double> label_scores(int k) const;
};

// Parses `graph_id,label,p0,p1[,p2...]`. Every graph id of the dataset must
// appear exactly once, each row must sum to 1 within 1e-6 and its label
// must agree with the parsed dataset. Violations raise ScoreIngestError.
ScoredDataset load_scores(const std::filesystem::path& path, const std::vector<Graph>& dataset);
ScoredDataset parse_scores(std::istream& in, const std::vector<Graph>& dataset);

}  // namespace cproc
