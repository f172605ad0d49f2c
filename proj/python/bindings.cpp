#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shapeflow/curvature.hpp"
#include "shapeflow/flows.hpp"
#include "shapeflow/io.hpp"

namespace py = pybind11;
using namespace shapeflow;

namespace {

using Pt = std::pair<double, double>;

Vec2 vec(Pt p) { return {p.first, p.second}; }
Pt pt(Vec2 v) { return {v.x, v.y}; }

TriangleHypothesis hypothesis(const std::string& s) {
  if (s == "stretch") return TriangleHypothesis::ShortestHeightStretch;
  if (s == "compress") return TriangleHypothesis::TallestHeightCompress;
  if (s == "leg") return TriangleHypothesis::LegStretch;
  throw Error(ErrorKind::InvalidInput, "hypothesis must be stretch, compress or leg");
}

CurvatureFlow curvature_flow(const std::string& s) {
  if (s == "csf") return CurvatureFlow::Csf;
  if (s == "imcf") return CurvatureFlow::Imcf;
  if (s == "torsion") return CurvatureFlow::Torsion;
  throw Error(ErrorKind::InvalidInput, "flow must be csf, imcf or torsion");
}

}  // namespace

PYBIND11_MODULE(_shapeflow, m) {
  m.doc() = "Torsion and eigenvalue functionals of planar domains under deformation and curvature flows";
  m.attr("__version__") = SHAPEFLOW_VERSION;

  py::register_exception<Error>(m, "ShapeflowError", PyExc_RuntimeError);

  py::class_<Polygon>(m, "Polygon")
      .def(py::init([](const std::vector<Pt>& v, std::vector<std::string> tags) {
             std::vector<Vec2> pts;
             for (const Pt& p : v) pts.push_back(vec(p));
             return Polygon(std::move(pts), std::move(tags));
           }),
           py::arg("vertices"), py::arg("tags") = std::vector<std::string>{})
      .def_property_readonly("vertices",
                             [](const Polygon& p) {
                               std::vector<Pt> v;
                               for (const Vec2& x : p.vertices()) v.push_back(pt(x));
                               return v;
                             })
      .def_property_readonly("tags", &Polygon::tags)
      .def_property_readonly("area", [](const Polygon& p) { return area(p); })
      .def_property_readonly("perimeter", &Polygon::perimeter)
      .def_property_readonly("diameter", &Polygon::diameter)
      .def("side_length", &Polygon::side_length)
      .def("is_convex", &Polygon::is_convex, py::arg("rel_tol") = 1e-12)
      .def("__len__", &Polygon::size)
      .def("to_text", [](const Polygon& p) {
        std::ostringstream s;
        write_polygon(s, p);
        return s.str();
      });

  m.def("parse_polygon", [](const std::string& text) {
    std::istringstream s(text);
    return parse_polygon(s);
  });
  m.def("read_polygon", &read_polygon);
  m.def("make_rectangle", &make_rectangle, py::arg("width"), py::arg("height"));
  m.def("make_rhombus", &make_rhombus, py::arg("half_diagonal"), py::arg("ratio"));
  m.def(
      "make_regular_polygon", [](int n, double r, Pt c) { return make_regular_polygon(n, r, vec(c)); },
      py::arg("n"), py::arg("radius"), py::arg("center") = Pt{0, 0});
  m.def("make_triangle", [](Pt a, Pt b, Pt c) { return make_triangle(vec(a), vec(b), vec(c)); });

  py::class_<AffineFlow>(m, "AffineFlow")
      .def_static("height_stretch", &AffineFlow::height_stretch)
      .def_static("height_compress", &AffineFlow::height_compress)
      .def_static("leg_stretch", &AffineFlow::leg_stretch, py::arg("alpha"))
      .def_static("rhombus_diagonal", &AffineFlow::rhombus_diagonal)
      .def_static("rectangle_side", &AffineFlow::rectangle_side)
      .def_static("translate", [](Pt d) { return AffineFlow::translate(vec(d)); })
      .def_static("scale", &AffineFlow::scale)
      .def_property_readonly("kind", [](const AffineFlow& f) { return std::string(to_string(f.kind())); })
      .def("map", [](const AffineFlow& f, double t, Pt x) { return pt(f.map(t, vec(x))); })
      .def("velocity", [](const AffineFlow& f, double t, Pt x) { return pt(f.velocity(t, vec(x))); });
  m.def("apply_flow", &apply_flow, py::arg("flow"), py::arg("t"), py::arg("polygon"));

  py::class_<TriangleConfig>(m, "TriangleConfig")
      .def_static(
          "canonicalize",
          [](Pt p, Pt q, Pt r, const std::string& hyp) {
            return TriangleConfig::canonicalize(vec(p), vec(q), vec(r), hypothesis(hyp));
          },
          py::arg("p"), py::arg("q"), py::arg("r"), py::arg("hypothesis"))
      .def_static("isosceles", &TriangleConfig::isosceles, py::arg("alpha"), py::arg("leg") = 1.0)
      .def_property_readonly("a", [](const TriangleConfig& c) { return pt(c.a()); })
      .def_property_readonly("b", [](const TriangleConfig& c) { return pt(c.b()); })
      .def_property_readonly("c", [](const TriangleConfig& c) { return pt(c.c()); })
      .def_property_readonly("angles",
                             [](const TriangleConfig& c) {
                               return std::tuple{c.angle_a(), c.angle_b(), c.angle_c()};
                             })
      .def("polygon", &TriangleConfig::polygon)
      .def("critical_time", [](const TriangleConfig& c, const std::string& kind) {
        if (kind != "stretch" && kind != "compress")
          throw Error(ErrorKind::InvalidInput, "kind must be stretch or compress");
        return critical_time(c, kind == "stretch" ? CriticalKind::Stretch : CriticalKind::Compress);
      });

  py::class_<FunctionalReport>(m, "FunctionalReport")
      .def_readonly("area", &FunctionalReport::area)
      .def_readonly("T", &FunctionalReport::T_domain)
      .def_readonly("T_pohozaev", &FunctionalReport::T_pohozaev)
      .def_readonly("lambda1", &FunctionalReport::lambda1)
      .def_readonly("lambda1_pohozaev", &FunctionalReport::lambda1_pohozaev)
      .def_readonly("T_norm", &FunctionalReport::T_normalized)
      .def_readonly("lambda1_norm", &FunctionalReport::lambda1_normalized)
      .def_readonly("side_average", &FunctionalReport::side_average)
      .def_readonly("T_gap", &FunctionalReport::T_gap)
      .def_readonly("lambda1_gap", &FunctionalReport::lambda1_gap)
      .def_readonly("consistent", &FunctionalReport::consistent)
      .def_readonly("min_angle_deg", &FunctionalReport::min_angle_deg)
      .def_readonly("h", &FunctionalReport::h)
      .def_readonly("num_triangles", &FunctionalReport::num_triangles);

  m.def(
      "report",
      [](const Polygon& p, double rel_h, int degree, bool with_eigen) {
        ReportOptions o;
        o.degree = degree;
        o.with_eigen = with_eigen;
        py::gil_scoped_release release;
        return report(p, rel_h * p.diameter(), o);
      },
      py::arg("polygon"), py::arg("rel_h") = 0.02, py::arg("degree") = 2, py::arg("with_eigen") = true,
      "Functionals of a polygon meshed at rel_h times its diameter.");

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("t", &ScanRow::t)
      .def_readonly("area", &ScanRow::area)
      .def_readonly("T", &ScanRow::T)
      .def_readonly("lambda1", &ScanRow::lambda1)
      .def_readonly("T_norm", &ScanRow::T_norm)
      .def_readonly("lambda1_norm", &ScanRow::lambda1_norm)
      .def_readonly("dTnorm_dt", &ScanRow::dTnorm_dt)
      .def_readonly("dTnorm_dt_fd", &ScanRow::dTnorm_dt_fd)
      .def_readonly("dLnorm_dt", &ScanRow::dLnorm_dt)
      .def_readonly("proof_form", &ScanRow::proof_form)
      .def_readonly("flag", &ScanRow::flag)
      .def("trusted", &ScanRow::trusted);

  m.def(
      "monotonicity_scan",
      [](const Polygon& p, const AffineFlow& f, const std::vector<double>& grid, double rel_h, int degree,
         bool with_fd, int workers) {
        ScanOptions o;
        o.rel_h = rel_h;
        o.degree = degree;
        o.with_fd = with_fd;
        o.workers = workers;
        py::gil_scoped_release release;
        return monotonicity_scan(p, f, grid, o);
      },
      py::arg("polygon"), py::arg("flow"), py::arg("t_grid"), py::arg("rel_h") = 0.02, py::arg("degree") = 2,
      py::arg("with_fd") = true, py::arg("workers") = 0);
  m.def("linear_grid", &linear_grid, py::arg("t_min"), py::arg("t_max"), py::arg("n"), py::arg("open") = false);

  m.def("css_lambda", &css_lambda);
  m.def("css_xi", &css_xi);
  py::class_<CssRow>(m, "CssRow")
      .def_readonly("t", &CssRow::t)
      .def_readonly("xi", &CssRow::xi)
      .def_readonly("s_prime", &CssRow::s_prime)
      .def_readonly("T_s", &CssRow::T_s)
      .def_readonly("T_s_prime", &CssRow::T_s_prime)
      .def_readonly("increased", &CssRow::increased);
  py::class_<CssReport>(m, "CssReport")
      .def_readonly("s", &CssReport::s)
      .def_readonly("rows", &CssReport::rows)
      .def_readonly("passed", &CssReport::passed);
  m.def(
      "css_verify",
      [](double s, const std::vector<double>& grid, double rel_h) {
        FdOptions o;
        o.rel_h = rel_h;
        py::gil_scoped_release release;
        return css_verify(s, grid, o);
      },
      py::arg("s"), py::arg("t_grid"), py::arg("rel_h") = 0.02);
  m.def(
      "css_torsion_curve",
      [](const std::vector<double>& grid, double rel_h) {
        FdOptions o;
        o.rel_h = rel_h;
        py::gil_scoped_release release;
        return css_torsion_curve(grid, o);
      },
      py::arg("s_grid"), py::arg("rel_h") = 0.02);

  py::class_<SupportBody>(m, "SupportBody")
      .def(py::init<std::vector<double>>(), py::arg("h"))
      .def_static(
          "circle", [](double r, Pt c, int n) { return SupportBody::circle(r, vec(c), n); }, py::arg("radius"),
          py::arg("center") = Pt{0, 0}, py::arg("n") = kDefaultBodyNodes)
      .def_static(
          "ellipse",
          [](double a, double b, double rot, Pt c, int n) { return SupportBody::ellipse(a, b, rot, vec(c), n); },
          py::arg("a"), py::arg("b"), py::arg("rotation") = 0.0, py::arg("center") = Pt{0, 0},
          py::arg("n") = kDefaultBodyNodes)
      .def_property_readonly("h", &SupportBody::h)
      .def_property_readonly("rho", &SupportBody::rho)
      .def_property_readonly("area", &SupportBody::area)
      .def_property_readonly("perimeter", &SupportBody::perimeter)
      .def_property_readonly("centroid", [](const SupportBody& b) { return pt(b.centroid()); })
      .def("__len__", &SupportBody::size)
      .def("to_polygon", &to_polygon, py::arg("m") = 0);

  m.def("deficit", &deficit, py::arg("T"), py::arg("A"));

  py::class_<FlowSample>(m, "FlowSample")
      .def_readonly("t", &FlowSample::t)
      .def_readonly("area", &FlowSample::area)
      .def_readonly("perimeter", &FlowSample::perimeter)
      .def_readonly("T", &FlowSample::T)
      .def_readonly("deficit", &FlowSample::deficit)
      .def_readonly("lemma51", &FlowSample::lemma51)
      .def_readonly("isoper", &FlowSample::isoper)
      .def_readonly("rho_min", &FlowSample::rho_min);
  py::class_<FlowSeries>(m, "FlowSeries")
      .def_property_readonly("kind", [](const FlowSeries& s) { return std::string(to_string(s.kind)); })
      .def_readonly("samples", &FlowSeries::samples)
      .def_readonly("steps", &FlowSeries::steps)
      .def_readonly("halvings", &FlowSeries::halvings)
      .def_readonly("failure", &FlowSeries::failure)
      .def_readonly("final_h", &FlowSeries::final_h)
      .def("to_csv", [](const FlowSeries& s) {
        std::ostringstream o;
        write_csv(o, {"flow " + std::string(to_string(s.kind)), {}, 0}, flow_table(s));
        return o.str();
      });

  m.def(
      "run_flow",
      [](const std::string& kind, const SupportBody& b, double t_end, int sample_every, bool sample_fem,
         double dt_safety, double dh_max_rel, double rel_h) {
        FlowConfig c;
        c.t_end = t_end;
        c.sample_every = sample_every;
        c.sample_fem = sample_fem;
        c.dt_safety = dt_safety;
        c.dh_max_rel = dh_max_rel;
        c.fem.rel_h = rel_h;
        const CurvatureFlow k = curvature_flow(kind);
        py::gil_scoped_release release;
        return run_flow(k, b, c);
      },
      py::arg("kind"), py::arg("body"), py::arg("t_end") = 0.1, py::arg("sample_every") = 10,
      py::arg("sample_fem") = true, py::arg("dt_safety") = 0.5, py::arg("dh_max_rel") = 1e-3,
      py::arg("rel_h") = 0.02);
}
