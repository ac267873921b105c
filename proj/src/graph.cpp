#include "cproc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cproc/error.hpp"
#include "cproc/util.hpp"

namespace cproc {

namespace fs = std::filesystem;

std::size_t normalize_edges(std::vector<Edge>& edges) {
  std::size_t loops = 0;
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (auto e : edges) {
    if (e.u == e.v) {
      ++loops;
      continue;
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  edges = std::move(out);
  return loops;
}

std::vector<std::vector<std::uint32_t>> adjacency_list(const Graph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.num_nodes);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> read_lines(const fs::path& path, bool required) {
  std::ifstream in(path);
  if (!in) {
    if (required) throw ParseError(path.string(), 0, "cannot open mandatory file");
    return {};
  }
  std::vector<Line> lines;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (trim(text).empty()) continue;
    lines.push_back({number, text});
  }
  return lines;
}

// Integers separated by commas and/or whitespace.
std::vector<long> parse_ints(const Line& line, const fs::path& path) {
  std::vector<long> out;
  std::string buf = line.text;
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream is(buf);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line.number, "expected integer, got '" + tok + "'");
    }
  }
  return out;
}

long parse_single_int(const Line& line, const fs::path& path) {
  const auto v = parse_ints(line, path);
  if (v.empty()) throw ParseError(path.string(), line.number, "expected an integer");
  return v.front();
}

}  // namespace

TuDataset parse_tu_dataset(const fs::path& dir, const std::string& name) {
  const auto file = [&](std::string_view suffix) { return dir / (name + std::string(suffix)); };
  const auto a_path = file("_A.txt");
  const auto ind_path = file("_graph_indicator.txt");
  const auto lab_path = file("_graph_labels.txt");
  const auto nlab_path = file("_node_labels.txt");
  const auto attr_path = file("_node_attributes.txt");

  const auto a_lines = read_lines(a_path, true);
  const auto ind_lines = read_lines(ind_path, true);
  const auto lab_lines = read_lines(lab_path, true);
  const auto nlab_lines = read_lines(nlab_path, false);
  const auto attr_lines = read_lines(attr_path, false);

  if (lab_lines.empty()) throw ParseError(lab_path.string(), 0, "empty dataset");

  TuDataset ds;
  ds.name = name;
  const std::size_t num_graphs = lab_lines.size();

  std::vector<long> raw_labels;
  raw_labels.reserve(num_graphs);
  for (const auto& l : lab_lines) raw_labels.push_back(parse_single_int(l, lab_path));
  ds.original_labels = raw_labels;
  std::sort(ds.original_labels.begin(), ds.original_labels.end());
  ds.original_labels.erase(std::unique(ds.original_labels.begin(), ds.original_labels.end()),
                           ds.original_labels.end());

  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.graphs[g].id = g;
    const auto it = std::lower_bound(ds.original_labels.begin(), ds.original_labels.end(), raw_labels[g]);
    ds.graphs[g].label = static_cast<int>(it - ds.original_labels.begin());
  }

  // Global 1-based node id -> (graph, local index).
  const std::size_t num_nodes = ind_lines.size();
  std::vector<std::uint32_t> node_graph(num_nodes);
  std::vector<std::uint32_t> node_local(num_nodes);
  for (std::size_t k = 0; k < num_nodes; ++k) {
    const long g = parse_single_int(ind_lines[k], ind_path);
    if (g < 1 || static_cast<std::size_t>(g) > num_graphs)
      throw ParseError(ind_path.string(), ind_lines[k].number,
                       "graph index " + std::to_string(g) + " outside [1, " + std::to_string(num_graphs) + "]");
    auto& graph = ds.graphs[static_cast<std::size_t>(g - 1)];
    node_graph[k] = static_cast<std::uint32_t>(g - 1);
    node_local[k] = static_cast<std::uint32_t>(graph.num_nodes++);
  }

  std::vector<std::vector<Edge>> raw_edges(num_graphs);
  for (const auto& l : a_lines) {
    const auto v = parse_ints(l, a_path);
    if (v.size() != 2) throw ParseError(a_path.string(), l.number, "expected two node ids");
    for (long id : v)
      if (id < 1 || static_cast<std::size_t>(id) > num_nodes)
        throw ParseError(a_path.string(), l.number, "node id " + std::to_string(id) + " out of range");
    const auto a = static_cast<std::size_t>(v[0] - 1);
    const auto b = static_cast<std::size_t>(v[1] - 1);
    if (node_graph[a] != node_graph[b])
      throw ParseError(a_path.string(), l.number, "edge joins nodes of different graphs");
    raw_edges[node_graph[a]].push_back({node_local[a], node_local[b]});
  }
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.self_loops_dropped += normalize_edges(raw_edges[g]);
    ds.graphs[g].edges = std::move(raw_edges[g]);
  }

  if (!nlab_lines.empty()) {
    if (nlab_lines.size() != num_nodes)
      throw ParseError(nlab_path.string(), 0, "expected one label per node");
    for (auto& g : ds.graphs) g.node_labels.resize(g.num_nodes);
    for (std::size_t k = 0; k < num_nodes; ++k)
      ds.graphs[node_graph[k]].node_labels[node_local[k]] = parse_single_int(nlab_lines[k], nlab_path);
  }

  if (!attr_lines.empty()) {
    if (attr_lines.size() != num_nodes)
      throw ParseError(attr_path.string(), 0, "expected one attribute row per node");
    for (auto& g : ds.graphs) g.node_attributes.resize(g.num_nodes);
    for (std::size_t k = 0; k < num_nodes; ++k) {
      std::vector<double> row;
      for (auto tok : split(attr_lines[k].text, ',')) {
        try {
          row.push_back(parse_double(tok));
        } catch (const std::exception&) {
          throw ParseError(attr_path.string(), attr_lines[k].number, "bad attribute value");
        }
      }
      ds.graphs[node_graph[k]].node_attributes[node_local[k]] = std::move(row);
    }
  }
  return ds;
}

void write_tu_dataset(const TuDataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  const auto open = [&](std::string_view suffix) {
    std::ofstream out(dir / (ds.name + std::string(suffix)));
    if (!out) throw Error("cannot write " + (dir / (ds.name + std::string(suffix))).string());
    return out;
  };
  auto a = open("_A.txt");
  auto ind = open("_graph_indicator.txt");
  auto lab = open("_graph_labels.txt");
  const bool has_nlab = std::any_of(ds.graphs.begin(), ds.graphs.end(),
                                    [](const Graph& g) { return !g.node_labels.empty(); });
  const bool has_attr = std::any_of(ds.graphs.begin(), ds.graphs.end(),
                                    [](const Graph& g) { return !g.node_attributes.empty(); });
  std::optional<std::ofstream> nlab, attr;
  if (has_nlab) nlab = open("_node_labels.txt");
  if (has_attr) attr = open("_node_attributes.txt");

  std::size_t offset = 1;
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const auto& graph = ds.graphs[g];
    lab << ds.original_labels.at(static_cast<std::size_t>(graph.label)) << '\n';
    for (std::size_t k = 0; k < graph.num_nodes; ++k) {
      ind << g + 1 << '\n';
      if (nlab) *nlab << (graph.node_labels.empty() ? 0 : graph.node_labels[k]) << '\n';
      if (attr) {
        if (!graph.node_attributes.empty()) {
          const auto& row = graph.node_attributes[k];
          for (std::size_t c = 0; c < row.size(); ++c) *attr << (c ? ", " : "") << format_double(row[c]);
        }
        *attr << '\n';
      }
    }
    for (const auto& e : graph.edges) {
      a << offset + e.u << ", " << offset + e.v << '\n';
      a << offset + e.v << ", " << offset + e.u << '\n';
    }
    offset += graph.num_nodes;
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(Part part) {
  switch (part) {
    case Part::Train: return "train";
    case Part::Valid: return "valid";
    case Part::Calib: return "calib";
    case Part::Test: return "test";
  }
  return "?";
}

Part parse_part(std::string_view text) {
  text = trim(text);
  if (text == "train") return Part::Train;
  if (text == "valid") return Part::Valid;
  if (text == "calib") return Part::Calib;
  if (text == "test") return Part::Test;
  throw ArgumentError("unknown split part '" + std::string(text) + "'");
}

std::vector<std::size_t> SplitAssignment::ids(Part part) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i] == part) out.push_back(i);
  return out;
}

std::array<std::size_t, 4> SplitAssignment::sizes() const {
  std::array<std::size_t, 4> s{};
  for (auto p : parts) ++s[static_cast<std::size_t>(p)];
  return s;
}

namespace {

// floor(n * f); the slack absorbs representation error such as 0.29 * 100.
std::size_t floor_fraction(std::size_t n, double f) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
}

}  // namespace

SplitAssignment split_dataset(std::size_t n, std::uint64_t seed, const SplitRatios& r) {
  if (!(r.pool_split > 0 && r.pool_split < 1) || !(r.calib_split > 0 && r.calib_split < 1) ||
      !(r.valid_split >= 0 && r.valid_split < 1))
    throw SplitError("split fractions must lie in (0, 1)");
  if (n < 4) throw SplitError("need at least 4 graphs to split, got " + std::to_string(n));

  const std::size_t train_total = floor_fraction(n, r.pool_split);
  const std::size_t valid = floor_fraction(train_total, r.valid_split);
  const std::size_t train = train_total - valid;
  const std::size_t pool = n - train_total;
  const std::size_t calib = floor_fraction(pool, r.calib_split);
  const std::size_t test = pool - calib;
  if (train == 0 || calib == 0 || test == 0 || (r.valid_split > 0 && valid == 0))
    throw SplitError("split of " + std::to_string(n) + " graphs leaves an empty part");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);

  SplitAssignment out;
  out.seed = seed;
  out.ratios = r;
  out.parts.resize(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < valid; ++i) out.parts[order[k++]] = Part::Valid;
  for (std::size_t i = 0; i < train; ++i) out.parts[order[k++]] = Part::Train;
  for (std::size_t i = 0; i < calib; ++i) out.parts[order[k++]] = Part::Calib;
  while (k < n) out.parts[order[k++]] = Part::Test;
  return out;
}

SplitAssignment resplit_pool(const SplitAssignment& base, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < base.parts.size(); ++i)
    if (base.parts[i] == Part::Calib || base.parts[i] == Part::Test) pool.push_back(i);
  const std::size_t calib = floor_fraction(pool.size(), base.ratios.calib_split);
  if (calib == 0 || calib == pool.size()) throw SplitError("pool re-split leaves an empty part");
  Rng rng(seed);
  shuffle(pool, rng);
  SplitAssignment out = base;
  out.seed = seed;
  for (std::size_t k = 0; k < pool.size(); ++k) out.parts[pool[k]] = k < calib ? Part::Calib : Part::Test;
  return out;
}

void write_split_manifest(std::ostream& os, const SplitAssignment& split) {
  os << "graph_id,part\n";
  for (std::size_t i = 0; i < split.parts.size(); ++i) os << i << ',' << to_string(split.parts[i]) << '\n';
}

// ---------------------------------------------------------------------------

std::vector<double> ScoredDataset::label_scores(int k) const {
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i].at(static_cast<std::size_t>(k));
  return out;
}

ScoredDataset parse_scores(std::istream& in, const std::vector<Graph>& dataset) {
  std::string text;
  std::size_t row = 0;
  // Skip provenance comments.
  do {
    if (!std::getline(in, text)) throw ScoreIngestError(0, "missing header");
    ++row;
  } while (trim(text).empty() || trim(text).front() == '#');

  const auto header = split(trim(text), ',');
  if (header.size() < 4 || trim(header[0]) != "graph_id" || trim(header[1]) != "label")
    throw ScoreIngestError(row, "header must be graph_id,label,p0,p1[,...]");
  const std::size_t num_labels = header.size() - 2;
  for (std::size_t k = 0; k < num_labels; ++k)
    if (trim(header[k + 2]) != "p" + std::to_string(k))
      throw ScoreIngestError(row, "expected column p" + std::to_string(k));

  ScoredDataset out;
  out.num_labels = num_labels;
  out.labels.assign(dataset.size(), -1);
  out.probs.assign(dataset.size(), {});
  std::vector<bool> seen(dataset.size(), false);

  while (std::getline(in, text)) {
    ++row;
    if (trim(text).empty() || trim(text).front() == '#') continue;
    const auto fields = split(trim(text), ',');
    if (fields.size() != num_labels + 2) throw ScoreIngestError(row, "wrong number of columns");
    long id = 0;
    long label = 0;
    std::vector<double> p(num_labels);
    try {
      id = std::stol(std::string(trim(fields[0])));
      label = std::stol(std::string(trim(fields[1])));
      for (std::size_t k = 0; k < num_labels; ++k) p[k] = parse_double(fields[k + 2]);
    } catch (const std::exception&) {
      throw ScoreIngestError(row, "malformed value");
    }
    if (id < 0 || static_cast<std::size_t>(id) >= dataset.size())
      throw ScoreIngestError(row, "unknown graph id " + std::to_string(id));
    const auto gid = static_cast<std::size_t>(id);
    if (seen[gid]) throw ScoreIngestError(row, "duplicate graph id " + std::to_string(id));
    if (label < 0 || static_cast<std::size_t>(label) >= num_labels)
      throw ScoreIngestError(row, "label outside [0, " + std::to_string(num_labels) + ")");
    if (label != dataset[gid].label)
      throw ScoreIngestError(row, "label " + std::to_string(label) + " disagrees with dataset label " +
                                      std::to_string(dataset[gid].label));
    double sum = 0;
    for (double x : p) {
      if (!(x >= 0 && x <= 1)) throw ScoreIngestError(row, "probability outside [0, 1]");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ScoreIngestError(row, "probabilities sum to " + format_double(sum));
    seen[gid] = true;
    out.labels[gid] = static_cast<int>(label);
    out.probs[gid] = std::move(p);
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ScoreIngestError(row, "graph id " + std::to_string(i) + " has no score row");
  return out;
}

ScoredDataset load_scores(const fs::path& path, const std::vector<Graph>& dataset) {
  std::ifstream in(path);
  if (!in) throw ScoreIngestError(0, "cannot open " + path.string());
  return parse_scores(in, dataset);
}

}  // namespace cproc
