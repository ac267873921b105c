#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cproc/baseline.hpp"
#include "cproc/conformal.hpp"
#include "cproc/error.hpp"
#include "cproc/graph.hpp"
#include "cproc/rocbands.hpp"
#include "cproc/similarity.hpp"
#include "cproc/synthetic.hpp"
#include "cproc/topology.hpp"

namespace py = pybind11;
using namespace cproc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IdArray = py::array_t<std::size_t, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

template <class T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> pairs_to_array(const std::vector<PersistencePair>& pairs) {
  py::array_t<double> out({pairs.size(), std::size_t{2}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    m(i, 0) = pairs[i].birth;
    m(i, 1) = pairs[i].death;
  }
  return out;
}

std::vector<PersistencePair> array_to_pairs(const Array& a) {
  if (a.size() == 0) return {};
  if (a.ndim() != 2 || a.shape(1) != 2) throw ArgumentError("diagram array must have shape (n, 2)");
  std::vector<PersistencePair> out(static_cast<std::size_t>(a.shape(0)));
  const auto v = a.unchecked<2>();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {v(i, 0), v(i, 1)};
  return out;
}

SimilarityMatrix matrix_from(const Array& d) {
  if (d.ndim() != 2 || d.shape(0) != d.shape(1)) throw ArgumentError("distance matrix must be square");
  const auto n = static_cast<std::size_t>(d.shape(0));
  SimilarityMatrix m(n);
  std::copy(d.data(), d.data() + n * n, m.values().begin());
  return m;
}

StratumPolicy policy_from(const std::string& text) {
  if (text == "error") return StratumPolicy::Error;
  if (text == "expand") return StratumPolicy::Expand;
  throw ArgumentError("policy: expected 'error' or 'expand'");
}

py::dict band_dict(const RocBand& b) {
  py::dict d;
  d["lambda"] = to_array(b.lambda);
  d["sen_lo"] = to_array(b.sen_lo);
  d["sen_up"] = to_array(b.sen_up);
  d["spe_lo"] = to_array(b.spe_lo);
  d["spe_up"] = to_array(b.spe_up);
  d["auc_lo"] = b.auc_lo;
  d["auc_up"] = b.auc_up;
  d["mode"] = std::string(to_string(b.mode));
  d["alpha"] = b.alpha;
  return d;
}

py::dict roc_dict(const RocCurve& roc) {
  std::vector<double> t, f, p;
  for (const auto& pt : roc.points) {
    t.push_back(pt.threshold);
    f.push_back(pt.fpr);
    p.push_back(pt.tpr);
  }
  py::dict d;
  d["threshold"] = to_array(t);
  d["fpr"] = to_array(f);
  d["tpr"] = to_array(p);
  d["auc"] = roc.auc;
  return d;
}

py::dict intervals_dict(const std::vector<SoftInterval>& ivs) {
  std::vector<double> ids, lo, up;
  for (const auto& iv : ivs) {
    ids.push_back(static_cast<double>(iv.id));
    lo.push_back(iv.lo);
    up.push_back(iv.up);
  }
  py::dict d;
  d["id"] = to_array(ids);
  d["lo"] = to_array(lo);
  d["up"] = to_array(up);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conformal ROC bands for graph classifiers";

  auto base = py::register_exception<Error>(m, "CprocError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SplitError>(m, "SplitError", base.ptr());
  py::register_exception<ScoreIngestError>(m, "ScoreIngestError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<StratumError>(m, "StratumError", base.ptr());
  py::register_exception<DegenerateTestError>(m, "DegenerateTestError", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t num_nodes, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                       int label) {
             Graph g;
             g.num_nodes = num_nodes;
             g.label = label;
             for (auto [u, v] : edges) {
               if (u >= num_nodes || v >= num_nodes) throw ArgumentError("edge endpoint out of range");
               g.edges.push_back({u, v});
             }
             normalize_edges(g.edges);
             return g;
           }),
           py::arg("num_nodes"), py::arg("edges"), py::arg("label") = 0)
      .def_readonly("id", &Graph::id)
      .def_readonly("num_nodes", &Graph::num_nodes)
      .def_readonly("label", &Graph::label)
      .def_readonly("node_labels", &Graph::node_labels)
      .def_property_readonly("edges", [](const Graph& g) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (const auto& e : g.edges) out.emplace_back(e.u, e.v);
        return out;
      });

  py::class_<TuDataset>(m, "TuDataset")
      .def_readonly("name", &TuDataset::name)
      .def_readonly("graphs", &TuDataset::graphs)
      .def_readonly("original_labels", &TuDataset::original_labels)
      .def_property_readonly("num_classes", &TuDataset::num_classes)
      .def("__len__", [](const TuDataset& d) { return d.graphs.size(); });

  m.def("parse_tu_dataset", [](const std::string& dir, const std::string& name) { return parse_tu_dataset(dir, name); },
        py::arg("directory"), py::arg("name"));
  m.def("write_tu_dataset", [](const TuDataset& d, const std::string& dir) { write_tu_dataset(d, dir); },
        py::arg("dataset"), py::arg("directory"));

  m.def(
      "split_dataset",
      [](std::size_t n, std::uint64_t seed, double pool, double calib, double valid) {
        const auto s = split_dataset(n, seed, SplitRatios{pool, calib, valid});
        py::dict d;
        for (auto part : {Part::Train, Part::Valid, Part::Calib, Part::Test})
          d[py::str(std::string(to_string(part)))] = s.ids(part);
        return d;
      },
      py::arg("n"), py::arg("seed") = 0, py::arg("pool") = 0.8, py::arg("calib") = 0.5, py::arg("valid") = 0.0);

  py::class_<PersistenceDiagram>(m, "PersistenceDiagram")
      .def(py::init([](const Array& dim0, const Array& dim1) {
             PersistenceDiagram d;
             d.dim0 = array_to_pairs(dim0);
             d.dim1 = array_to_pairs(dim1);
             return d;
           }),
           py::arg("dim0"), py::arg("dim1"))
      .def_property_readonly("dim0", [](const PersistenceDiagram& d) { return pairs_to_array(d.dim0); })
      .def_property_readonly("dim1", [](const PersistenceDiagram& d) { return pairs_to_array(d.dim1); });

  m.def(
      "compute_filtration",
      [](const Graph& g, const std::string& kind) { return to_array(compute_filtration(g, parse_filtration(kind))); },
      py::arg("graph"), py::arg("kind"));
  m.def(
      "sublevel_persistence",
      [](const Graph& g, const Array& values) { return sublevel_persistence(g, to_vector(values)); },
      py::arg("graph"), py::arg("values"));
  m.def(
      "cap_diagram",
      [](const PersistenceDiagram& d, double cap, bool dim0, bool dim1, bool dim0_essential) {
        return cap_diagram(d, cap, DiagramSelection{dim0, dim1, dim0_essential});
      },
      py::arg("diagram"), py::arg("cap"), py::arg("dim0") = true, py::arg("dim1") = true,
      py::arg("dim0_essential") = false);
  m.def(
      "persistence_image",
      [](const PersistenceDiagram& d, std::size_t resolution, double cap, double sigma) {
        ImageOptions opt;
        opt.resolution = resolution;
        opt.cap = cap;
        opt.sigma = sigma;
        const auto img = persistence_image(d, opt);
        py::array_t<double> out({img.resolution, img.resolution});
        std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
        return out;
      },
      py::arg("diagram"), py::arg("resolution") = 50, py::arg("cap") = 1.0, py::arg("sigma") = 0.0);

  m.def(
      "wasserstein_distance",
      [](const Array& a, const Array& b, double p) { return wasserstein_distance(array_to_pairs(a), array_to_pairs(b), p); },
      py::arg("a"), py::arg("b"), py::arg("p") = 1.0, "Distance between two (n, 2) point sets of one dimension.");
  m.def(
      "similarity_matrix",
      [](const std::vector<PersistenceDiagram>& capped, double p, std::size_t workers) {
        const auto s = build_similarity_matrix(capped, p, workers);
        py::array_t<double> out({s.size(), s.size()});
        std::copy(s.values().begin(), s.values().end(), out.mutable_data());
        return out;
      },
      py::arg("diagrams"), py::arg("p") = 1.0, py::arg("workers") = 1);

  m.def(
      "quantile", [](const Array& v, double gamma) { return quantile(to_vector(v), gamma); }, py::arg("values"),
      py::arg("gamma"));

  m.def(
      "empirical_roc",
      [](const Array& scores, const LabelArray& labels) { return roc_dict(empirical_roc(to_vector(scores), to_vector(labels))); },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "band_pipeline",
      [](const Array& distances, const Array& scores, const LabelArray& labels, const IdArray& train,
         const IdArray& calib, const IdArray& test, const std::string& mode, int k, int k_train, double alpha,
         std::size_t min_stratum, const std::string& policy, std::size_t grid_points) {
        const auto d = matrix_from(distances);
        const auto s = to_vector(scores);
        const auto y = to_vector(labels);
        const auto tr = to_vector(train), ca = to_vector(calib), te = to_vector(test);
        if (s.size() != d.size() || y.size() != d.size())
          throw ArgumentError("scores and labels must have one entry per distance-matrix row");
        BandConfig cfg;
        cfg.mode = parse_mode(mode);
        cfg.k = k;
        cfg.k_train = k_train;
        cfg.alpha = alpha;
        cfg.min_stratum = min_stratum;
        cfg.policy = policy_from(policy);
        cfg.grid_points = grid_points;
        BandResult r;
        {
          py::gil_scoped_release release;
          r = run_band_pipeline(d, BinaryTask{s, y, tr, ca, te}, cfg);
        }
        auto out = band_dict(r.band);
        out["roc"] = roc_dict(r.roc);
        out["positive_intervals"] = intervals_dict(r.pos_intervals);
        out["negative_intervals"] = intervals_dict(r.neg_intervals);
        return out;
      },
      py::arg("distances"), py::arg("scores"), py::arg("labels"), py::arg("train"), py::arg("calib"),
      py::arg("test"), py::arg("mode") = "cond", py::arg("k") = 20, py::arg("k_train") = 0, py::arg("alpha") = 0.1,
      py::arg("min_stratum") = 5, py::arg("policy") = "error", py::arg("grid_points") = 512);

  m.def(
      "bootstrap_bands",
      [](const Array& scores, const LabelArray& labels, std::size_t resamples, double level, std::uint64_t seed,
         std::size_t grid_points) {
        const auto b = bootstrap_bands(to_vector(scores), to_vector(labels), uniform_grid(grid_points), resamples,
                                       level, seed);
        py::dict d;
        d["lambda"] = to_array(b.lambda);
        d["tpr_lo"] = to_array(b.tpr_lo);
        d["tpr_up"] = to_array(b.tpr_up);
        d["fpr_lo"] = to_array(b.fpr_lo);
        d["fpr_up"] = to_array(b.fpr_up);
        return d;
      },
      py::arg("scores"), py::arg("labels"), py::arg("resamples") = 1000, py::arg("level") = 0.95,
      py::arg("seed") = 0, py::arg("grid_points") = 512);

  m.def(
      "coverage_experiment",
      [](const std::string& model, std::size_t n_train, std::size_t n_calib, std::size_t n_test, std::size_t reps,
         int k, double alpha, const std::string& mode, const std::string& policy, bool oracle_scores,
         std::uint64_t seed, double intercept, std::vector<double> shift, double noise_low, double noise_high) {
        SyntheticSpec spec = model == "m1" ? model_m1()
                             : model == "m2" ? model_m2()
                             : model == "m3" ? model_m3()
                                             : throw ArgumentError("model: expected m1, m2 or m3");
        spec.n_train = n_train;
        spec.n_calib = n_calib;
        spec.n_test = n_test;
        spec.seed = seed;
        spec.intercept = intercept;
        spec.shift = std::move(shift);
        spec.noise_low = noise_low;
        spec.noise_high = noise_high;
        ExperimentOptions opt;
        opt.alpha = alpha;
        opt.k = k;
        opt.reps = reps;
        opt.mode = parse_mode(mode);
        opt.policy = policy_from(policy);
        opt.oracle_scores = oracle_scores;
        CoverageReport r;
        {
          py::gil_scoped_release release;
          r = coverage_experiment(spec, opt);
        }
        py::dict d;
        d["coverage_tpr"] = r.coverage_tpr;
        d["coverage_fpr"] = r.coverage_fpr;
        d["se_tpr"] = r.se_tpr;
        d["se_fpr"] = r.se_fpr;
        d["mean_bw_sen"] = r.mean_bw_sen;
        d["mean_bw_spe"] = r.mean_bw_spe;
        d["replicates"] = r.replicates.size();
        return d;
      },
      py::arg("model") = "m1", py::arg("n_train") = 2000, py::arg("n_calib") = 1000, py::arg("n_test") = 500,
      py::arg("reps") = 200, py::arg("k") = 50, py::arg("alpha") = 0.1, py::arg("mode") = "cond",
      py::arg("policy") = "error", py::arg("oracle_scores") = false, py::arg("seed") = 1, py::arg("intercept") = 0.0,
      py::arg("shift") = std::vector<double>{}, py::arg("noise_low") = 0.0, py::arg("noise_high") = 0.0);
}
