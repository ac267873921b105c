#include "cproc/topology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>

#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

std::string_view to_string(FiltrationKind kind) {
  switch (kind) {
    case FiltrationKind::Degree: return "degree";
    case FiltrationKind::Betweenness: return "betweenness";
    case FiltrationKind::Closeness: return "closeness";
    case FiltrationKind::Communicability: return "communicability";
    case FiltrationKind::Eigenvector: return "eigenvector";
  }
  return "?";
}

FiltrationKind parse_filtration(std::string_view text) {
  text = trim(text);
  for (auto k : kAllFiltrations)
    if (text == to_string(k)) return k;
  throw ArgumentError("unknown filtration '" + std::string(text) + "'");
}

namespace {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

std::vector<double> degree_values(const Adjacency& adj) {
  std::vector<double> out(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) out[v] = static_cast<double>(adj[v].size());
  return out;
}

// Brandes' accumulation; each unordered pair is visited from both ends so
// the sums are halved at the end.
std::vector<double> betweenness_values(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> bc(n, 0.0);
  std::vector<std::size_t> order;
  std::vector<long> dist(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<std::uint32_t>> preds(n);
  for (std::size_t s = 0; s < n; ++s) {
    order.clear();
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    dist[s] = 0;
    sigma[s] = 1;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      order.push_back(v);
      for (auto w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(static_cast<std::uint32_t>(v));
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  for (auto& x : bc) x /= 2.0;
  return bc;
}

std::vector<double> harmonic_closeness_values(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<double> out(n, 0.0);
  std::vector<long> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          out[s] += 1.0 / static_cast<double>(dist[w]);
          q.push(w);
        }
    }
  }
  return out;
}

Eigen::MatrixXd dense_adjacency(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_nodes),
                                            static_cast<Eigen::Index>(g.num_nodes));
  for (const auto& e : g.edges) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

// diag(exp(A)) from the spectral decomposition A = V diag(l) V^T.
std::vector<double> communicability_values(const Graph& g) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_adjacency(g));
  if (eig.info() != Eigen::Success) throw NumericalError("communicability: eigendecomposition failed");
  const auto& vecs = eig.eigenvectors();
  const Eigen::VectorXd expl = eig.eigenvalues().array().exp();
  std::vector<double> out(g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    const auto row = vecs.row(static_cast<Eigen::Index>(i));
    out[i] = (row.array().square() * expl.transpose().array()).sum();
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> components(const Adjacency& adj) {
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<bool> seen(adj.size(), false);
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::uint32_t> comp{static_cast<std::uint32_t>(s)};
    seen[s] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (auto w : adj[comp[k]])
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// Power iteration on A + I restricted to each component. The shift keeps
// the Perron eigenvalue strictly dominant on bipartite components without
// changing the eigenvector.
std::vector<double> eigenvector_values(const Adjacency& adj) {
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 10'000;
  std::vector<double> out(adj.size(), 0.0);
  std::vector<double> next(adj.size(), 0.0);
  for (const auto& comp : components(adj)) {
    if (comp.size() == 1) continue;
    const double init = 1.0 / std::sqrt(static_cast<double>(comp.size()));
    for (auto v : comp) out[v] = init;
    bool converged = false;
    for (int it = 0; it < kMaxIter && !converged; ++it) {
      double norm = 0;
      for (auto v : comp) {
        double acc = out[v];
        for (auto w : adj[v]) acc += out[w];
        next[v] = acc;
        norm += acc * acc;
      }
      norm = std::sqrt(norm);
      double change = 0;
      for (auto v : comp) {
        next[v] /= norm;
        change = std::max(change, std::abs(next[v] - out[v]));
        out[v] = next[v];
      }
      converged = change < kTol;
    }
    if (!converged) throw NumericalError("eigenvector filtration: power iteration did not converge");
  }
  return out;
}

}  // namespace

std::vector<double> compute_filtration(const Graph& g, FiltrationKind kind) {
  if (g.num_nodes == 0) throw ArgumentError("compute_filtration: empty graph");
  const auto adj = adjacency_list(g);
  switch (kind) {
    case FiltrationKind::Degree: return degree_values(adj);
    case FiltrationKind::Betweenness: return betweenness_values(adj);
    case FiltrationKind::Closeness: return harmonic_closeness_values(adj);
    case FiltrationKind::Communicability: return communicability_values(g);
    case FiltrationKind::Eigenvector: return eigenvector_values(adj);
  }
  throw ArgumentError("compute_filtration: bad kind");
}

// ---------------------------------------------------------------------------

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // `child` must be a root; it is attached under `root`.
  void attach(std::size_t child, std::size_t root) { parent_[child] = root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PersistenceDiagram sublevel_persistence(const Graph& g, std::span<const double> values) {
  if (values.size() != g.num_nodes) throw ArgumentError("sublevel_persistence: one value per vertex required");
  for (double v : values)
    if (!std::isfinite(v)) throw ArgumentError("sublevel_persistence: non-finite vertex value");

  PersistenceDiagram out;
  out.graph_id = g.id;

  struct WeightedEdge {
    double value;
    Edge edge;
  };
  std::vector<WeightedEdge> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.push_back({std::max(values[e.u], values[e.v]), e});
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.edge < b.edge;
  });

  // A component is represented by its oldest vertex: the root of the
  // union-find tree is always the surviving (elder) vertex.
  UnionFind uf(g.num_nodes);
  const auto elder = [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  };
  for (const auto& we : edges) {
    const auto ra = uf.find(we.edge.u);
    const auto rb = uf.find(we.edge.v);
    if (ra == rb) {
      out.dim1.push_back({we.value, kInfinity});
      continue;
    }
    const auto [survivor, victim] = elder(ra, rb) ? std::pair{ra, rb} : std::pair{rb, ra};
    out.dim0.push_back({values[victim], we.value});
    uf.attach(victim, survivor);
  }
  for (std::size_t v = 0; v < g.num_nodes; ++v)
    if (uf.find(v) == v) out.dim0.push_back({values[v], kInfinity});

  std::sort(out.dim0.begin(), out.dim0.end());
  std::sort(out.dim1.begin(), out.dim1.end());
  return out;
}

PersistenceDiagram cap_diagram(const PersistenceDiagram& d, double cap, const DiagramSelection& sel) {
  PersistenceDiagram out;
  out.graph_id = d.graph_id;
  if (sel.dim0)
    for (auto p : d.dim0) {
      if (p.essential()) {
        if (!sel.dim0_essential) continue;
        p.death = std::max(cap, p.birth);
      }
      out.dim0.push_back(p);
    }
  if (sel.dim1)
    for (auto p : d.dim1) {
      if (p.essential()) p.death = std::max(cap, p.birth);
      out.dim1.push_back(p);
    }
  return out;
}

double max_finite_value(std::span<const PersistenceDiagram> diagrams) {
  double best = 0;
  for (const auto& d : diagrams)
    for (const auto* dim : {&d.dim0, &d.dim1})
      for (const auto& p : *dim) {
        best = std::max(best, p.birth);
        if (!p.essential()) best = std::max(best, p.death);
      }
  return best;
}

double PersistenceImage::total() const { return std::accumulate(pixels.begin(), pixels.end(), 0.0); }

namespace {

// Mass of N(mu, sigma^2) on [a, b].
double gaussian_mass(double a, double b, double mu, double sigma) {
  const double s = sigma * std::sqrt(2.0);
  return 0.5 * (std::erf((b - mu) / s) - std::erf((a - mu) / s));
}

}  // namespace

PersistenceImage persistence_image(const PersistenceDiagram& d, const ImageOptions& opt) {
  if (opt.resolution == 0) throw ArgumentError("persistence_image: resolution must be >= 1");
  if (!(opt.cap > 0)) throw ArgumentError("persistence_image: cap must be positive");
  PersistenceImage img;
  img.resolution = opt.resolution;
  img.cap = opt.cap;
  img.sigma = opt.sigma > 0 ? opt.sigma : opt.cap / 20.0;
  img.pixels.assign(opt.resolution * opt.resolution, 0.0);

  const auto capped = cap_diagram(d, opt.cap, opt.selection);
  const double h = opt.cap / static_cast<double>(opt.resolution);
  std::vector<double> mass_birth(opt.resolution), mass_pers(opt.resolution);
  for (const auto* dim : {&capped.dim0, &capped.dim1})
    for (const auto& p : *dim) {
      const double pers = p.persistence();
      const double w = pers / opt.cap;
      if (w <= 0) continue;
      // The Gaussian is separable, so each pixel mass is a product of 1-D masses.
      for (std::size_t k = 0; k < opt.resolution; ++k) {
        const double lo = static_cast<double>(k) * h;
        mass_birth[k] = gaussian_mass(lo, lo + h, p.birth, img.sigma);
        mass_pers[k] = gaussian_mass(lo, lo + h, pers, img.sigma);
      }
      for (std::size_t r = 0; r < opt.resolution; ++r) {
        if (mass_pers[r] == 0) continue;
        for (std::size_t c = 0; c < opt.resolution; ++c)
          img.pixels[r * opt.resolution + c] += w * mass_pers[r] * mass_birth[c];
      }
    }
  return img;
}

void write_diagrams_csv(std::ostream& os, std::span<const PersistenceDiagram> diagrams) {
  os << "graph_id,dim,birth,death\n";
  for (const auto& d : diagrams) {
    for (const auto& p : d.dim0) os << d.graph_id << ",0," << format_double(p.birth) << ',' << format_double(p.death) << '\n';
    for (const auto& p : d.dim1) os << d.graph_id << ",1," << format_double(p.birth) << ',' << format_double(p.death) << '\n';
  }
}

std::vector<PersistenceDiagram> read_diagrams_csv(std::istream& is, std::size_t num_graphs) {
  std::vector<PersistenceDiagram> out(num_graphs);
  for (std::size_t i = 0; i < num_graphs; ++i) out[i].graph_id = i;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "graph_id,dim,birth,death") throw ParseError("diagrams", number, "bad header");
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 4) throw ParseError("diagrams", number, "expected 4 columns");
    try {
      const auto id = std::stoul(std::string(f[0]));
      const auto dim = std::stoi(std::string(f[1]));
      if (id >= num_graphs || (dim != 0 && dim != 1)) throw ParseError("diagrams", number, "bad id or dim");
      PersistencePair p{parse_double(f[2]), parse_double(f[3])};
      (dim == 0 ? out[id].dim0 : out[id].dim1).push_back(p);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("diagrams", number, "malformed row");
    }
  }
  return out;
}

void write_images_csv(std::ostream& os, std::span<const PersistenceImage> images) {
  if (images.empty()) return;
  const auto P = images.front().resolution;
  os << "graph_id";
  for (std::size_t k = 0; k < P * P; ++k) os << ",px" << k;
  os << '\n';
  for (std::size_t i = 0; i < images.size(); ++i) {
    os << i;
    for (double x : images[i].pixels) os << ',' << format_double(x);
    os << '\n';
  }
}

}  // namespace cproc
