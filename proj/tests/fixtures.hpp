// Generated on-disk datasets for end-to-end runs.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cproc/graph.hpp"
#include "cproc/util.hpp"
#include "oracles.hpp"

namespace fixture {

// Writes NAME_*.txt with `n` random graphs (two classes: sparse vs dense)
// and a matching scores CSV with `classes` probability columns. Returns the
// scores path.
inline std::filesystem::path write_random_dataset(const std::filesystem::path& dir, const std::string& name,
                                                  std::size_t n, std::uint64_t seed, int classes = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(6, 14);
  std::uniform_real_distribution<double> u(0, 1);
  cproc::TuDataset ds;
  ds.name = name;
  for (int k = 0; k < classes; ++k) ds.original_labels.push_back(k);
  std::vector<std::vector<double>> probs;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(classes));
    auto g = oracle::random_graph(rng, size(rng), 0.15 + 0.12 * label);
    g.id = i;
    g.label = label;
    ds.graphs.push_back(g);
    // A noisy scorer that leans toward the true class.
    std::vector<double> p(static_cast<std::size_t>(classes));
    double total = 0;
    for (int k = 0; k < classes; ++k) {
      p[static_cast<std::size_t>(k)] = std::exp((k == label ? 1.2 : 0.0) + u(rng));
      total += p[static_cast<std::size_t>(k)];
    }
    for (auto& x : p) x /= total;
    probs.push_back(p);
  }
  cproc::write_tu_dataset(ds, dir);
  const auto path = dir / (name + "_scores.csv");
  std::ofstream out(path);
  out << "graph_id,label";
  for (int k = 0; k < classes; ++k) out << ",p" << k;
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',' << ds.graphs[i].label;
    // Keep rows summing to one after decimal formatting.
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < probs[i].size(); ++k) {
      out << ',' << cproc::format_double(probs[i][k]);
      rest -= probs[i][k];
    }
    out << ',' << cproc::format_double(rest) << '\n';
  }
  return path;
}

}  // namespace fixture
