#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tvdeblur/errors.hpp"
#include "tvdeblur/harness.hpp"
#include "tvdeblur/log.hpp"

namespace py = pybind11;
using namespace tvdeblur;

namespace {

TransformKind parse_transform(const std::string& name) {
  if (name == "dct" || name == "cosine") {
    return TransformKind::Dct;
  }
  if (name == "dst" || name == "sine") {
    return TransformKind::Dst1;
  }
  if (name == "ar" || name == "antireflective") {
    return TransformKind::AntiReflective;
  }
  if (name == "sinehat") {
    return TransformKind::SineHat;
  }
  throw InvalidArgument("unknown transform '" + name + "'");
}

std::vector<double> apply_transform(const std::string& kind, std::vector<double> v, bool inverse,
                                    int dim) {
  std::size_t n = v.size();
  if (dim == 2) {
    n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
      throw InvalidArgument("transform: 2D input must have n*n entries");
    }
  }
  transform(parse_transform(kind), inverse ? Direction::Inverse : Direction::Forward,
            Shape{dim, n}, v);
  return v;
}

RestorationConfig build_config(int dim, const std::string& bc, const std::string& l_bc,
                               const std::string& formulation, const std::string& precond,
                               double alpha, std::optional<double> beta,
                               std::optional<double> fp_tol, std::optional<int> fp_max,
                               std::optional<double> inner_tol, std::optional<int> inner_max) {
  RestorationConfig c = RestorationConfig::defaults(dim);
  c.bc_h = parse_boundary(bc);
  c.bc_l = parse_diffusion_boundary(l_bc);
  c.formulation = parse_formulation(formulation);
  c.preconditioner = parse_preconditioner_choice(precond);
  c.alpha = alpha;
  c.beta = beta.value_or(dim == 1 ? 0.1 : 0.01);
  c.fp_tol = fp_tol.value_or(c.fp_tol);
  c.fp_max = fp_max.value_or(c.fp_max);
  c.inner.tol = inner_tol.value_or(c.inner.tol);
  c.inner.max_iterations = inner_max.value_or(c.inner.max_iterations);
  return c;
}

} // namespace

PYBIND11_MODULE(_tvdeblur, m) {
  m.doc() = "TV deblurring with boundary-aware transform preconditioners";

  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("set_quiet", [](bool quiet) {
    if (quiet) {
      set_log_sink({});
    } else {
      set_log_sink([](LogLevel, std::string_view msg) {
        py::gil_scoped_acquire gil;
        py::module_::import("warnings").attr("warn")(std::string(msg));
      });
    }
  }, py::arg("quiet") = true, "Silence library warnings, or route them to warnings.warn.");

  py::class_<SymmetricPsf>(m, "Psf")
      .def_static("make_1d", &SymmetricPsf::make_1d, py::arg("coefficients"))
      .def_static("make_2d", &SymmetricPsf::make_2d, py::arg("half_width"), py::arg("coefficients"))
      .def_static("identity", &SymmetricPsf::identity, py::arg("dim"))
      .def_property_readonly("dim", &SymmetricPsf::dim)
      .def_property_readonly("half_width", &SymmetricPsf::half_width)
      .def_property_readonly("coefficients", [](const SymmetricPsf& p) {
        return std::vector<double>(p.coefficients().begin(), p.coefficients().end());
      })
      .def("__repr__", [](const SymmetricPsf& p) {
        return "Psf(dim=" + std::to_string(p.dim()) + ", half_width=" +
               std::to_string(p.half_width()) + ")";
      });

  m.def("out_of_focus_psf", &out_of_focus_psf, py::arg("m"));
  m.def("gaussian_psf", &gaussian_psf, py::arg("m"), py::arg("sigma"));

  m.def("transform", &apply_transform, py::arg("kind"), py::arg("v"), py::arg("inverse") = false,
        py::arg("dim") = 1, "Apply C_n (dct), S_n (dst), T_n (ar) or the sine-hat transform.");

  m.def("blur_apply", [](const SymmetricPsf& psf, const std::string& bc, std::size_t n,
                         const std::vector<double>& u) {
    return BlurOperator(psf, parse_boundary(bc), n).apply(u);
  }, py::arg("psf"), py::arg("bc"), py::arg("n"), py::arg("u"));
  m.def("blur_eigenvalues", [](const SymmetricPsf& psf, const std::string& bc, std::size_t n) {
    return blur_eigenvalues(psf, parse_boundary(bc), n);
  }, py::arg("psf"), py::arg("bc"), py::arg("n"));
  m.def("blur_matrix", [](const SymmetricPsf& psf, const std::string& bc, std::size_t n) {
    return dense_blur_matrix(psf, parse_boundary(bc), n);
  }, py::arg("psf"), py::arg("bc"), py::arg("n"));

  m.def("cosine_project", py::overload_cast<const Eigen::MatrixXd&>(&cosine_project), py::arg("a"));
  m.def("sine_project", py::overload_cast<const Eigen::MatrixXd&>(&sine_project), py::arg("a"));
  m.def("sinehat_project", py::overload_cast<const Eigen::MatrixXd&>(&sinehat_project),
        py::arg("a"));
  m.def("ar_project", [](const Eigen::MatrixXd& a) {
    const ArProjection p = ar_project(a);
    return py::make_tuple(ar_matrix(p.z), p.eigenvalues);
  }, py::arg("a"), "Returns (AR(A) as a dense matrix, its eigenvalues).");

  m.def("benchmark_1d", [](std::size_t n, std::optional<std::size_t> half_width, double nsr,
                           std::uint64_t seed) {
    const std::size_t hw = half_width.value_or(default_half_width_1d(n));
    const Benchmark1D b = gen_signal_1d(n, hw);
    const SymmetricPsf psf = out_of_focus_psf(hw);
    const Observation obs = blur_and_observe(b.extended, psf, n, nsr, seed);
    py::dict d;
    d["x"] = b.field_positions();
    d["truth"] = obs.truth;
    d["blurred"] = obs.blurred;
    d["observed"] = obs.observed;
    d["psf"] = psf;
    return d;
  }, py::arg("n") = 203, py::arg("m") = py::none(), py::arg("nsr") = 0.01, py::arg("seed") = 1);
  m.def("benchmark_2d", [](std::size_t n, std::optional<std::size_t> half_width,
                           std::optional<double> sigma, double nsr, std::uint64_t seed) {
    const std::size_t hw = half_width.value_or(default_half_width_2d(n));
    const Benchmark2D b = gen_image_2d(n, hw);
    const SymmetricPsf psf = gaussian_psf(hw, sigma.value_or(static_cast<double>(hw) / 2.0));
    const Observation obs = blur_and_observe(b.extended, psf, n, nsr, seed);
    py::dict d;
    d["truth"] = obs.truth;
    d["blurred"] = obs.blurred;
    d["observed"] = obs.observed;
    d["psf"] = psf;
    return d;
  }, py::arg("n") = 64, py::arg("m") = py::none(), py::arg("sigma") = py::none(),
     py::arg("nsr") = 0.001, py::arg("seed") = 1);
  m.def("rre", [](const std::vector<double>& restored, const std::vector<double>& truth) {
    return rre(restored, truth);
  }, py::arg("restored"), py::arg("truth"));

  py::class_<RestorationReport>(m, "RestorationReport")
      .def_readonly("restored", &RestorationReport::restored)
      .def_readonly("solver", &RestorationReport::solver)
      .def_readonly("preconditioner", &RestorationReport::preconditioner)
      .def_readonly("fp_steps", &RestorationReport::fp_steps)
      .def_readonly("inner_iterations", &RestorationReport::inner_iterations)
      .def_readonly("average_inner", &RestorationReport::average_inner)
      .def_readonly("relative_change", &RestorationReport::relative_change)
      .def_readonly("residual_norms", &RestorationReport::residual_norms)
      .def_readonly("rre", &RestorationReport::rre)
      .def_readonly("fp_converged", &RestorationReport::fp_converged)
      .def_readonly("aborted", &RestorationReport::aborted)
      .def_readonly("failure", &RestorationReport::failure)
      .def_property_readonly("all_inner_converged", &RestorationReport::all_inner_converged);

  m.def("restore", [](const std::vector<double>& v, const SymmetricPsf& psf,
                      const std::string& bc, const std::string& l_bc,
                      const std::string& formulation, const std::string& precond, double alpha,
                      std::optional<double> beta, std::optional<double> fp_tol,
                      std::optional<int> fp_max, std::optional<double> inner_tol,
                      std::optional<int> inner_max, const std::vector<double>& truth) {
    const RestorationConfig c = build_config(psf.dim(), bc, l_bc, formulation, precond, alpha,
                                             beta, fp_tol, fp_max, inner_tol, inner_max);
    py::gil_scoped_release release;
    return restore(v, psf, c, truth);
  }, py::arg("v"), py::arg("psf"), py::arg("bc") = "reflective", py::arg("l_bc") = "zn",
     py::arg("formulation") = "normal", py::arg("precond") = "X_D", py::arg("alpha") = 1e-3,
     py::arg("beta") = py::none(), py::arg("fp_tol") = py::none(), py::arg("fp_max") = py::none(),
     py::arg("inner_tol") = py::none(), py::arg("inner_max") = py::none(),
     py::arg("truth") = std::vector<double>{});
}
