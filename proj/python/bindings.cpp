#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "morphogrid/cli.hpp"
#include "morphogrid/error.hpp"
#include "morphogrid/gridlab.hpp"
#include "morphogrid/io.hpp"
#include "morphogrid/maps.hpp"
#include "morphogrid/pipeline.hpp"
#include "morphogrid/registration.hpp"
#include "morphogrid/synthetic.hpp"
#include "morphogrid/tps.hpp"
#include "morphogrid/trend.hpp"

namespace py = pybind11;
using namespace morphogrid;

namespace {

using PointArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point2> to_points(const PointArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 2)
    throw MorphoError(ErrorCode::kInvalidArgument, "expected an array of shape (k, 2)");
  auto r = a.unchecked<2>();
  std::vector<Point2> out(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) out[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1)};
  return out;
}

PointArray to_array(const std::vector<Point2>& pts) {
  PointArray out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(static_cast<py::ssize_t>(i), 0) = pts[i].x;
    w(static_cast<py::ssize_t>(i), 1) = pts[i].y;
  }
  return out;
}

LandmarkConfiguration config(const PointArray& a, Units units = Units::kRaw) {
  return LandmarkConfiguration::from_points("specimen", to_points(a), units);
}

Quad quad(const PointArray& a) {
  const auto pts = to_points(a);
  if (pts.size() != 4) throw MorphoError(ErrorCode::kInvalidArgument, "a quad needs exactly 4 corners");
  return Quad({pts[0], pts[1], pts[2], pts[3]});
}

template <typename F>
PointArray map_points(const PointArray& a, F&& f) {
  auto pts = to_points(a);
  for (auto& p : pts) p = f(p);
  return to_array(pts);
}

Baseline baseline(std::pair<std::size_t, std::size_t> b) { return {b.first, b.second}; }

py::dict dataset_dict(const Dataset& d) {
  py::dict out;
  py::list specimens;
  for (const auto& c : d.sample.configurations()) {
    py::dict s;
    s["name"] = c.name();
    s["group"] = d.sample.group_of(c.name());
    s["points"] = to_array(c.points());
    specimens.append(s);
  }
  out["labels"] = d.sample.labels();
  out["specimens"] = specimens;
  out["metadata"] = d.sample.metadata();
  return out;
}

}  // namespace

PYBIND11_MODULE(_morphogrid, m) {
  m.doc() = "Landmark registration, thin-plate splines, polynomial trends and grid diagnostics.";

  // The module keeps the type alive; the extra reference is never released.
  static py::handle error_type = py::exception<MorphoError>(m, "MorphoError", PyExc_ValueError).inc_ref();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const MorphoError& e) {
      py::object exc = error_type(e.what());
      exc.attr("code") = error_code_name(e.code());
      exc.attr("input_error") = is_input_error(e.code());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("two_point_register", [](const PointArray& pts, std::pair<std::size_t, std::size_t> b) {
    return to_array(two_point_register(config(pts), baseline(b)).points());
  }, py::arg("points"), py::arg("baseline") = std::pair<std::size_t, std::size_t>{0, 1},
     "Similarity sending landmark baseline[0] to (0,0) and baseline[1] to (1,0). Indices are 0-based.");

  m.def("procrustes_align", [](const PointArray& pts, const PointArray& reference) {
    return to_array(procrustes_align(config(pts), config(reference)).points());
  }, py::arg("points"), py::arg("reference"));

  m.def("gpa_mean", [](const std::vector<PointArray>& specimens, double tolerance, int max_iterations) {
    std::vector<LandmarkConfiguration> configs;
    for (std::size_t i = 0; i < specimens.size(); ++i)
      configs.push_back(LandmarkConfiguration::from_points("s" + std::to_string(i + 1), to_points(specimens[i])));
    const auto result = generalized_procrustes(Sample(std::move(configs)), {tolerance, max_iterations});
    return py::make_tuple(to_array(result.mean.points()), result.iterations);
  }, py::arg("specimens"), py::arg("tolerance") = 1e-10, py::arg("max_iterations") = 100,
     "Returns (mean, iterations).");

  m.def("affine_fit", [](const PointArray& tmpl, const PointArray& target) {
    const auto a = affine_fit(config(tmpl), config(target));
    return py::make_tuple(Eigen::Matrix2d(a.linear), Eigen::Vector2d(a.translation.x, a.translation.y));
  }, py::arg("template"), py::arg("target"), "Returns (linear 2x2, translation).");

  m.def("remove_affine", [](const PointArray& tmpl, const PointArray& target) {
    return to_array(remove_affine(config(tmpl), config(target)).points());
  }, py::arg("template"), py::arg("target"));

  py::class_<TpsModel>(m, "TpsModel")
      .def_readonly("weights", &TpsModel::weights)
      .def_readonly("affine", &TpsModel::affine)
      .def_property_readonly("bending_energy", [](const TpsModel& t) { return bending_energy(t); })
      .def("__call__", [](const TpsModel& t, const PointArray& pts) {
        return map_points(pts, [&](Point2 p) { return tps_eval(t, p); });
      })
      .def("jacobian", [](const TpsModel& t, std::pair<double, double> p) {
        return Eigen::Matrix2d(tps_jacobian(t, {p.first, p.second}));
      });
  m.def("tps_fit", [](const PointArray& tmpl, const PointArray& target) {
    return tps_fit(config(tmpl), config(target));
  }, py::arg("template"), py::arg("target"));

  py::class_<PolynomialTrend>(m, "PolynomialTrend")
      .def_readonly("degree", &PolynomialTrend::degree)
      .def_readonly("coefficients", &PolynomialTrend::coefficients)
      .def_readonly("residual_df", &PolynomialTrend::residual_df)
      .def_readonly("condition_number", &PolynomialTrend::condition_number)
      .def_property_readonly("terms", [](const PolynomialTrend& t) { return trend_term_names(t.degree); })
      .def_property_readonly("fitted", [](const PolynomialTrend& t) { return to_array(t.fitted); })
      .def_property_readonly("residuals", [](const PolynomialTrend& t) { return to_array(t.residuals); })
      .def_property_readonly("rss", [](const PolynomialTrend& t) { return trend_rss(t); })
      .def("__call__", [](const PolynomialTrend& t, const PointArray& pts) {
        return map_points(pts, [&](Point2 p) { return trend_eval(t, p); });
      });
  m.def("trend_fit", [](const PointArray& tmpl, const PointArray& target, int degree) {
    return trend_fit(config(tmpl), config(target), degree);
  }, py::arg("template"), py::arg("target"), py::arg("degree") = 2);

  m.def("segment_rotations", [](const PointArray& tmpl, const PointArray& target, double threshold) {
    const auto report = segment_rotations(config(tmpl), config(target));
    py::list rows;
    for (const auto& s : filter_rotations(report, threshold))
      rows.append(py::make_tuple(s.segment.i, s.segment.j, s.rotation, s.length_ratio));
    return rows;
  }, py::arg("template"), py::arg("target"), py::arg("threshold") = 0.0,
     "(i, j, rotation, length_ratio) for segments with |rotation| >= threshold, largest first.");

  m.def("bilinear_map", [](const PointArray& src, const PointArray& dst, const PointArray& pts) {
    const Quad s = quad(src);
    const Quad d = quad(dst);
    return map_points(pts, [&](Point2 p) { return bilinear_eval(s, d, p); });
  }, py::arg("src"), py::arg("dst"), py::arg("points"));

  m.def("homography", [](const PointArray& src, const PointArray& dst) {
    return Eigen::Matrix3d(homography_from_quads(quad(src), quad(dst)).matrix);
  }, py::arg("src"), py::arg("dst"));

  m.def("load_dataset", [](const std::filesystem::path& path) { return dataset_dict(load_dataset(path)); },
        py::arg("path"));

  m.def("synthetic_vilmann", [] {
    const auto s = make_synthetic_vilmann();
    py::dict out = dataset_dict(s.dataset);
    out["baseline"] = py::make_tuple(s.baseline.from, s.baseline.to);
    out["coefficients"] = Eigen::MatrixX2d(s.coefficients);
    out["perturbed_landmark"] = s.perturbed_landmark;
    return out;
  });

  m.def("run_cli", [](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run(std::move(args), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
