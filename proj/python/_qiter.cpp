// Copyright 2026 The qiter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the qiter core. Partitions cross the boundary as lists
// of (name, size) pairs, kernels as the same dicts the CLI reads from JSON.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "qiter/axioms.hpp"
#include "qiter/error.hpp"
#include "qiter/grover.hpp"
#include "qiter/json_io.hpp"
#include "qiter/kappa.hpp"
#include "qiter/lsi.hpp"
#include "qiter/qwhile.hpp"
#include "qiter/trace.hpp"

namespace py = pybind11;
using namespace qiter;

namespace {

using PortList = std::vector<std::pair<std::string, Eigen::Index>>;

Partition to_partition(const PortList& ports) {
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;
  for (const auto& [n, s] : ports) {
    names.push_back(n);
    sizes.push_back(s);
  }
  return Partition(std::move(names), std::move(sizes));
}

PortList from_partition(const Partition& p) {
  PortList out;
  for (std::size_t i = 0; i < p.block_count(); ++i) out.emplace_back(p.names()[i], p.sizes()[i]);
  return out;
}

FirKernel kernel_from_dict(const py::object& d) {
  const std::string text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
  return kernel_from_json(nlohmann::json::parse(text));
}

py::object kernel_to_dict(const FirKernel& k) {
  return py::module_::import("json").attr("loads")(dump_json(kernel_to_json(k), -1));
}

TraceConfig config(double tol, std::size_t max_terms) {
  TraceConfig cfg;
  cfg.series_tol = tol;
  cfg.max_terms = max_terms;
  cfg.validate();
  return cfg;
}

py::dict trace_dict(const TraceResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["rows"] = from_partition(r.rows);
  d["cols"] = from_partition(r.cols);
  d["method"] = std::string(to_string(r.method));
  d["terms_used"] = r.terms_used;
  d["residual"] = r.residual;
  d["converged"] = r.converged;
  d["disagreement"] = r.disagreement;
  return d;
}

py::array_t<Complex> samples_array(const FrequencyResponse& r) {
  const auto rows = static_cast<py::ssize_t>(r.rows.total());
  const auto cols = static_cast<py::ssize_t>(r.cols.total());
  py::array_t<Complex> a({static_cast<py::ssize_t>(r.size()), rows, cols});
  auto v = a.mutable_unchecked<3>();
  for (py::ssize_t j = 0; j < static_cast<py::ssize_t>(r.size()); ++j) {
    for (py::ssize_t i = 0; i < rows; ++i) {
      for (py::ssize_t k = 0; k < cols; ++k) v(j, i, k) = r.samples[j](i, k);
    }
  }
  return a;
}

GroverParams grover_params(std::uint64_t B, double kappa, std::uint64_t seed,
                           std::size_t max_iterations, std::optional<double> initial_angle) {
  GroverParams p{B, kappa, seed, max_iterations, initial_angle};
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_qiter, m) {
  m.doc() = "Traced monoidal iteration on contractions, LSI systems and kappa-measured loops";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PartitionError>(m, "PartitionError", base);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base);
  py::register_exception<DivergenceError>(m, "DivergenceError", base);
  py::register_exception<NotKiTraceableError>(m, "NotKiTraceableError", base);
  py::register_exception<InternalConsistencyError>(m, "InternalConsistencyError", base);
  py::register_exception<qwhile::ParseError>(m, "ParseError", base);

  m.def(
      "ex",
      [](const ComplexMatrix& f, const PortList& rows, const PortList& cols,
         const std::string& loop, const std::string& method, double tol, std::size_t max_terms) {
        const PartitionedMap map(f, to_partition(rows), to_partition(cols));
        const TraceConfig cfg = config(tol, max_terms);
        if (method == "series") return trace_dict(ex_series(map, loop, cfg));
        if (method == "ki") return trace_dict(ex_kernel_image(map, loop, cfg));
        if (method == "both") return trace_dict(ex(map, loop, cfg));
        throw Error("method must be series, ki or both");
      },
      py::arg("matrix"), py::arg("rows"), py::arg("cols"), py::arg("loop") = "U",
      py::arg("method") = "both", py::arg("tol") = TraceConfig{}.series_tol,
      py::arg("max_terms") = TraceConfig{}.max_terms,
      "Trace out block `loop` of a partitioned matrix.");

  m.def("halmos_dilation", [](const ComplexMatrix& f) { return halmos_dilation(f); },
        py::arg("matrix"));

  m.def(
      "cnu_decompose",
      [](const ComplexMatrix& f, double tol) {
        const CnuDecomposition c = cnu_decompose(f, tol);
        py::dict d;
        d["unitary_dim"] = c.unitary_dim;
        d["basis_change"] = c.basis_change;
        d["f0"] = c.f0;
        d["f1"] = c.f1;
        d["f1_power_norm"] = c.f1_power_norm;
        d["off_diagonal"] = c.off_diagonal;
        return d;
      },
      py::arg("matrix"), py::arg("tol") = 1e-9);

  m.def(
      "check_axioms",
      [](std::size_t cases, std::uint64_t seed, Eigen::Index max_dim, unsigned threads) {
        AxiomCheckOptions opt{cases, seed, max_dim, threads};
        py::list out;
        py::gil_scoped_release release;
        const AxiomReport r = check_trace_axioms(opt);
        py::gil_scoped_acquire acquire;
        for (const auto& a : r.axioms) {
          py::dict d;
          d["name"] = a.name;
          d["cases"] = a.cases;
          d["passed"] = a.passed;
          d["failed"] = a.failed;
          d["worst_deviation"] = a.worst_deviation;
          d["first_failure"] = a.first_failure;
          out.append(d);
        }
        return out;
      },
      py::arg("cases") = 1000, py::arg("seed") = 7, py::arg("max_dim") = 3,
      py::arg("threads") = 1);

  m.def("vanishing_ii_counterexample", [] {
    const CounterexampleReport r = check_vanishing_ii_counterexample();
    py::dict d;
    d["matrix"] = vanishing_ii_counterexample_matrix();
    d["inner"] = r.inner;
    d["nested"] = r.nested;
    d["joint_series_diverged"] = r.joint_series_diverged;
    d["joint_kernel_image_ok"] = r.joint_kernel_image_ok;
    d["joint_kernel_image"] = r.joint_kernel_image;
    d["flagged"] = r.flagged;
    return d;
  });

  py::class_<FrequencyResponse>(m, "FrequencyResponse")
      .def_property_readonly("rows", [](const FrequencyResponse& r) { return from_partition(r.rows); })
      .def_property_readonly("cols", [](const FrequencyResponse& r) { return from_partition(r.cols); })
      .def_property_readonly("grid", [](const FrequencyResponse& r) { return r.grid; })
      .def_property_readonly("samples", &samples_array)
      .def("__len__", &FrequencyResponse::size)
      .def("classify",
           [](const FrequencyResponse& r) { return std::string(to_string(lsi_classify(r))); })
      .def("trace", [](const FrequencyResponse& r, const std::string& loop) { return lsi_ex(r, loop); },
           py::arg("loop"))
      .def("then", [](const FrequencyResponse& f, const FrequencyResponse& g) { return compose(g, f); },
           py::arg("next"), "Series composition: this response followed by `next`.")
      .def("to_csv", &response_to_csv);

  m.def("dtft", [](const py::object& k, std::size_t n) { return dtft(kernel_from_dict(k), n); },
        py::arg("kernel"), py::arg("grid") = kDefaultGridSize);
  m.def(
      "convolve",
      [](const py::object& g, const py::object& f) {
        return kernel_to_dict(convolve(kernel_from_dict(g), kernel_from_dict(f)));
      },
      py::arg("g"), py::arg("f"), "Kernel of `f` followed by `g`.");
  m.def(
      "inverse_dtft",
      [](const FrequencyResponse& r) {
        const InverseDtftResult inv = inverse_dtft(r);
        return py::make_tuple(kernel_to_dict(inv.kernel), inv.aliasing_warning);
      },
      py::arg("response"));

  py::class_<qwhile::Program>(m, "Program")
      .def_property_readonly("gates",
                             [](const qwhile::Program& p) {
                               std::map<std::string, ComplexMatrix> g;
                               for (const auto& [name, decl] : p.gates) g[name] = decl.matrix;
                               return g;
                             })
      .def("sexpr", [](const qwhile::Program& p) { return qwhile::to_sexpr(p.root); })
      .def(
          "semantics",
          [](const qwhile::Program& p, std::size_t n, unsigned threads) {
            py::gil_scoped_release release;
            return qwhile::semantics(p, n, {}, threads);
          },
          py::arg("grid") = kDefaultGridSize, py::arg("threads") = 1);

  m.def(
      "parse_program",
      [](const std::string& text, bool allow_contraction) {
        return qwhile::parse(text, qwhile::CheckOptions{allow_contraction});
      },
      py::arg("text"), py::arg("allow_contraction") = false);
  m.def(
      "check_program",
      [](const std::string& text, bool allow_contraction) {
        const qwhile::WellFormedReport r =
            qwhile::check(qwhile::parse_unchecked(text), qwhile::CheckOptions{allow_contraction});
        py::list diags;
        for (const auto& d : r.diagnostics) {
          diags.append(py::dict(py::arg("path") = d.path, py::arg("message") = d.message,
                                py::arg("line") = d.line, py::arg("column") = d.column));
        }
        return diags;
      },
      py::arg("text"), py::arg("allow_contraction") = false,
      "Well-formedness diagnostics; an empty list means the program is well formed.");

  m.def("theta", &theta, py::arg("a"), py::arg("kappa"));
  m.def("theta_bound", &theta_bound, py::arg("kappa"));
  m.def(
      "build_E",
      [](double kappa, const ComplexMatrix& projector) {
        KappaMeasurement km{kappa, projector};
        km.validate();
        return build_E(km);
      },
      py::arg("kappa"), py::arg("projector"));

  m.def(
      "grover_recurrence",
      [](std::uint64_t B, double kappa, std::size_t steps, std::optional<double> initial_angle) {
        return grover_recurrence(grover_params(B, kappa, 0, 0, initial_angle), steps);
      },
      py::arg("B"), py::arg("kappa"), py::arg("steps") = 0, py::arg("initial_angle") = py::none());

  m.def(
      "grover_montecarlo",
      [](std::uint64_t B, double kappa, std::size_t trials, std::uint64_t seed,
         const std::string& mode, unsigned threads, std::size_t max_iterations,
         std::size_t bucket_width) {
        if (mode != "recurrence" && mode != "statevector") {
          throw Error("mode must be recurrence or statevector");
        }
        const GroverParams p = grover_params(B, kappa, seed, max_iterations, std::nullopt);
        MonteCarloResult r;
        {
          py::gil_scoped_release release;
          r = grover_montecarlo(p, trials,
                                mode == "recurrence" ? McMode::recurrence : McMode::statevector,
                                threads, bucket_width);
        }
        std::vector<std::size_t> iterations;
        std::vector<bool> censored;
        for (const auto& t : r.trials) {
          iterations.push_back(t.iterations);
          censored.push_back(t.censored);
        }
        py::list hist;
        for (const auto& b : r.summary.histogram) hist.append(py::make_tuple(b.lo, b.count));
        py::dict d;
        d["iterations"] = py::array_t<std::size_t>(iterations.size(), iterations.data());
        d["censored"] = censored;
        d["median"] = r.summary.median;
        d["mean"] = r.summary.mean;
        d["censored_count"] = r.summary.censored;
        d["bucket_width"] = r.summary.bucket_width;
        d["histogram"] = hist;
        d["multimodal"] = is_multimodal(r.summary.histogram);
        return d;
      },
      py::arg("B"), py::arg("kappa"), py::arg("trials") = 10000, py::arg("seed") = 0,
      py::arg("mode") = "recurrence", py::arg("threads") = 1, py::arg("max_iterations") = 0,
      py::arg("bucket_width") = 0);

  m.def(
      "runtime_bound",
      [](std::uint64_t B, double kappa, std::optional<double> epsilon, double c) {
        const double eps = epsilon.value_or(std::sin(3.0 * std::asin(1.0 / std::sqrt(double(B)))));
        return runtime_bound(grover_runtime_bound(B, kappa, eps), c);
      },
      py::arg("B"), py::arg("kappa"), py::arg("epsilon") = py::none(), py::arg("c") = 1.0,
      "g(f(ceil(2c / (kappa (1 - 2 epsilon))))); epsilon defaults to sin(3 alpha).");

  m.def(
      "verify_guarantee",
      [](std::uint64_t B, double kappa, std::uint64_t n_max) {
        const GuaranteeReport r = verify_guarantee(grover_params(B, kappa, 0, 0, std::nullopt), n_max);
        py::dict d;
        d["ok"] = r.ok();
        d["K"] = r.K;
        d["epsilon"] = r.epsilon;
        d["guarantee_violations"] = r.guarantee_violations.size();
        d["robustness_violations"] = r.robustness_violations.size();
        return d;
      },
      py::arg("B"), py::arg("kappa"), py::arg("n_max"));
}
