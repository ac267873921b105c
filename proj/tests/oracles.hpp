// Slow reference implementations used to check the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "cproc/graph.hpp"
#include "cproc/topology.hpp"

namespace oracle {

// G(n, p) on vertices 0..n-1.
inline cproc::Graph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  cproc::Graph g;
  g.num_nodes = n;
  std::bernoulli_distribution coin(p);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (coin(rng)) g.edges.push_back({u, v});
  return g;
}

inline std::size_t count_components(const cproc::Graph& g) {
  std::vector<std::size_t> parent(g.num_nodes);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::size_t comps = g.num_nodes;
  for (const auto& e : g.edges) {
    const auto a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

// Betweenness by enumerating every simple path between every pair and
// keeping the shortest ones. Exponential; small graphs only.
inline std::vector<double> betweenness_by_paths(const cproc::Graph& g) {
  const auto adj = cproc::adjacency_list(g);
  const std::size_t n = g.num_nodes;
  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) {
      std::vector<std::vector<std::size_t>> paths;
      std::vector<std::size_t> path{s};
      std::vector<bool> seen(n, false);
      seen[s] = true;
      std::function<void(std::size_t)> walk = [&](std::size_t v) {
        if (v == t) {
          paths.push_back(path);
          return;
        }
        for (auto w : adj[v]) {
          if (seen[w]) continue;
          seen[w] = true;
          path.push_back(w);
          walk(w);
          path.pop_back();
          seen[w] = false;
        }
      };
      walk(s);
      if (paths.empty()) continue;
      std::size_t shortest = std::numeric_limits<std::size_t>::max();
      for (const auto& p : paths) shortest = std::min(shortest, p.size());
      std::vector<const std::vector<std::size_t>*> best;
      for (const auto& p : paths)
        if (p.size() == shortest) best.push_back(&p);
      for (const auto* p : best)
        for (std::size_t i = 1; i + 1 < p->size(); ++i) bc[(*p)[i]] += 1.0 / static_cast<double>(best.size());
    }
  return bc;
}

// Exact W_p by trying every partial matching of a into b; unmatched points
// go to the diagonal at cost (death - birth) / 2.
inline double wasserstein_exhaustive(const std::vector<cproc::PersistencePair>& a,
                                     const std::vector<cproc::PersistencePair>& b, double p) {
  const auto linf = [](const cproc::PersistencePair& x, const cproc::PersistencePair& y) {
    return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
  };
  const auto diag = [](const cproc::PersistencePair& x) { return (x.death - x.birth) / 2; };
  std::vector<bool> used(b.size(), false);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> go = [&](std::size_t i, double acc) {
    if (i == a.size()) {
      double total = acc;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (!used[j]) total += std::pow(diag(b[j]), p);
      best = std::min(best, total);
      return;
    }
    go(i + 1, acc + std::pow(diag(a[i]), p));
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      go(i + 1, acc + std::pow(linf(a[i], b[j]), p));
      used[j] = false;
    }
  };
  go(0, 0.0);
  return std::pow(best, 1.0 / p);
}

// m-th smallest, m = floor(gamma * n) clamped to [1, n].
inline double sorted_quantile(std::vector<double> v, double gamma) {
  std::sort(v.begin(), v.end());
  auto m = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(v.size())));
  m = std::clamp<std::size_t>(m, 1, v.size());
  return v[m - 1];
}

}  // namespace oracle
