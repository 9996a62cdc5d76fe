#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "divscale/bound.hpp"
#include "divscale/dependency.hpp"
#include "divscale/divergence.hpp"
#include "divscale/error.hpp"
#include "divscale/report.hpp"
#include "divscale/scaling.hpp"
#include "divscale/scores.hpp"
#include "divscale/synthgen.hpp"
#include "divscale/trace.hpp"

namespace py = pybind11;
using namespace divscale;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

BranchPairTrace pair_from_arrays(const FloatArray& a, const FloatArray& b) {
  if (a.ndim() != 2 || b.ndim() != 2) throw Error(ErrorKind::ShapeMismatch, "branch arrays must be 2-D (n, dim)");
  if (a.shape(0) != b.shape(0) || a.shape(1) != b.shape(1)) {
    throw Error(ErrorKind::ShapeMismatch, "branch arrays differ in shape");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto dim = static_cast<std::size_t>(a.shape(1));
  std::vector<float> va(a.data(), a.data() + n * dim);
  std::vector<float> vb(b.data(), b.data() + n * dim);
  return BranchPairTrace(n, dim, std::move(va), std::move(vb));
}

py::array_t<float> to_array(const std::vector<float>& v, std::size_t n, std::size_t dim) {
  py::array_t<float> out({n, dim});
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(float));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Divergence-token analysis core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<BranchPairTrace>(m, "BranchPairTrace")
      .def(py::init(&pair_from_arrays), py::arg("a"), py::arg("b"))
      .def_property_readonly("n", &BranchPairTrace::n)
      .def_property_readonly("dim", &BranchPairTrace::dim)
      .def_property_readonly("a", [](const BranchPairTrace& p) { return to_array(p.branch_a(), p.n(), p.dim()); })
      .def_property_readonly("b", [](const BranchPairTrace& p) { return to_array(p.branch_b(), p.n(), p.dim()); })
      .def(py::self == py::self);

  py::class_<TraceSet>(m, "TraceSet")
      .def(py::init<std::size_t, Metadata>(), py::arg("dim"), py::arg("metadata") = Metadata{})
      .def("add", &TraceSet::add, py::arg("sample"))
      .def("add_arrays", [](TraceSet& s, const FloatArray& a, const FloatArray& b) { s.add(pair_from_arrays(a, b)); },
           py::arg("a"), py::arg("b"))
      .def_property_readonly("dim", &TraceSet::dim)
      .def_property_readonly("metadata", [](const TraceSet& s) { return s.metadata(); })
      .def_property_readonly("max_length", &TraceSet::max_length)
      .def("__len__", &TraceSet::size)
      .def("__getitem__",
           [](const TraceSet& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def(py::self == py::self);

  m.def("write_trace_file", &write_trace_file, py::arg("set"), py::arg("path"));
  m.def("read_trace_file", &read_trace_file, py::arg("path"));
  m.def("encode_trace", [](const TraceSet& s) {
    const auto bytes = encode_trace(s);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });
  m.def("decode_trace", [](py::bytes data) {
    const std::string_view view = data;
    return decode_trace(std::span(reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
  });

  py::enum_<EstimatorMode>(m, "EstimatorMode")
      .value("NormOfSum", EstimatorMode::NormOfSum)
      .value("SumOfNorms", EstimatorMode::SumOfNorms);
  py::class_<DivergenceCurve>(m, "DivergenceCurve")
      .def_readonly("n_max", &DivergenceCurve::n_max)
      .def_readonly("mean", &DivergenceCurve::mean)
      .def_readonly("std", &DivergenceCurve::std)
      .def_readonly("counts", &DivergenceCurve::counts)
      .def_readonly("mode", &DivergenceCurve::mode)
      .def_readonly("truncated", &DivergenceCurve::truncated);
  m.def("divergence_curve", &divergence_curve, py::arg("set"), py::arg("n_max"),
        py::arg("mode") = EstimatorMode::NormOfSum);
  m.def("norm_bound", [](const TraceSet& s, std::size_t n_max) { return norm_bound(s, n_max).m; });

  py::enum_<DependencyMode>(m, "DependencyMode")
      .value("SupClamped", DependencyMode::SupClamped)
      .value("MeanClamped", DependencyMode::MeanClamped)
      .value("MeanRaw", DependencyMode::MeanRaw);
  py::class_<DependencyProfile>(m, "DependencyProfile")
      .def_readonly("n_max", &DependencyProfile::n_max)
      .def_readonly("psi_equal_ab", &DependencyProfile::psi_equal_ab)
      .def_readonly("psi_cross_ab", &DependencyProfile::psi_cross_ab)
      .def_readonly("psi_cross_aa", &DependencyProfile::psi_cross_aa)
      .def_readonly("psi_cross_bb", &DependencyProfile::psi_cross_bb)
      .def_readonly("psi_cross_sym", &DependencyProfile::psi_cross_sym)
      .def_readonly("mode", &DependencyProfile::mode);
  m.def("dependency_profile",
        py::overload_cast<const TraceSet&, std::size_t, DependencyMode>(&dependency_profile), py::arg("set"),
        py::arg("n_max"), py::arg("mode") = DependencyMode::MeanClamped);

  py::class_<PsiConstants>(m, "PsiConstants")
      .def(py::init(&PsiConstants::checked), py::arg("equal_ab"), py::arg("cross_aa"), py::arg("cross_ab"))
      .def_readonly("equal_ab", &PsiConstants::equal_ab)
      .def_readonly("cross_aa", &PsiConstants::cross_aa)
      .def_readonly("cross_ab", &PsiConstants::cross_ab)
      .def_property_readonly("delta", &PsiConstants::delta)
      .def("__repr__", [](const PsiConstants& p) {
        return "PsiConstants(" + format_double(p.equal_ab) + ", " + format_double(p.cross_aa) + ", " +
               format_double(p.cross_ab) + ")";
      });
  m.def("upsilon", [](const PsiConstants& p, std::size_t n) { return upsilon(p, n); });
  m.def("upsilon_profile", [](const DependencyProfile& p, std::size_t n) { return upsilon(PsiSource(p), n); });
  m.def("balance_point", &balance_point);
  m.def("rho", &rho);
  m.def("fit_lambda", [](const DivergenceCurve& c, const PsiConstants& p) { return fit_lambda(c, p); });
  m.def("fit_lambda_profile",
        [](const DivergenceCurve& c, const DependencyProfile& p) { return fit_lambda(c, PsiSource(p)); });

  py::class_<BoundChainStep>(m, "BoundChainStep")
      .def_readonly("n", &BoundChainStep::n)
      .def_readonly("mean_d", &BoundChainStep::mean_d)
      .def_readonly("mean_d_sq", &BoundChainStep::mean_d_sq)
      .def_readonly("jensen_ok", &BoundChainStep::jensen_ok)
      .def_readonly("decomp_ok", &BoundChainStep::decomp_ok)
      .def_readonly("rhs", &BoundChainStep::rhs)
      .def_readonly("final_ok", &BoundChainStep::final_ok);
  py::class_<BoundChainReport>(m, "BoundChainReport")
      .def_readonly("m", &BoundChainReport::m)
      .def_readonly("steps", &BoundChainReport::steps)
      .def("all_ok", &BoundChainReport::all_ok);
  m.def("validate_bound_chain", &validate_bound_chain, py::arg("set"), py::arg("n_max"));

  m.def("scaling_constant", [](double beta, double gamma, const PsiConstants& p) {
    return scaling_constant({beta, gamma, p});
  });
  m.def("alpha_constant_psi", [](double beta, double gamma, const PsiConstants& p, double n) {
    return alpha_constant_psi({beta, gamma, p}, n);
  });

  py::class_<ScalingFit>(m, "ScalingFit")
      .def_readonly("c", &ScalingFit::c)
      .def_readonly("alpha", &ScalingFit::alpha)
      .def_readonly("excluded", &ScalingFit::excluded)
      .def_readonly("sse_log", &ScalingFit::sse_log)
      .def_property_readonly("n_points", [](const ScalingFit& f) { return f.points.size(); });
  m.def(
      "fit_power_law",
      [](const std::vector<double>& n_l, const std::vector<double>& score, const std::set<int>& exclude) {
        if (n_l.size() != score.size()) throw Error(ErrorKind::ShapeMismatch, "n_l and score differ in length");
        std::vector<ScorePoint> pts;
        for (std::size_t k = 0; k < n_l.size(); ++k) pts.push_back({n_l[k], score[k]});
        return fit_power_law(pts, exclude);
      },
      py::arg("n_l"), py::arg("score"), py::arg("exclude") = std::set<int>{});

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("dim", &SynthSpec::dim)
      .def_readwrite("n", &SynthSpec::n)
      .def_readwrite("samples", &SynthSpec::samples)
      .def_readwrite("r_shared", &SynthSpec::r_shared)
      .def_readwrite("r_pos", &SynthSpec::r_pos)
      .def_readwrite("r_branch", &SynthSpec::r_branch)
      .def_readwrite("r_noise", &SynthSpec::r_noise)
      .def_readwrite("seed", &SynthSpec::seed);
  m.def("generate", &generate, py::arg("spec"));
  m.def("expected_psi", &expected_psi, py::arg("spec"));
}
