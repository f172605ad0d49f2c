#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapeflow/curvature.hpp"
#include "shapeflow/flows.hpp"
#include "shapeflow/io.hpp"
#include "shapeflow/sampling.hpp"

using namespace shapeflow;

namespace {

enum Exit { kOk = 0, kNumerical = 1, kHypothesis = 2, kIo = 3 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::SolveFailure:
    case ErrorKind::ConvexityLost:
    case ErrorKind::OriginEscaped: return kNumerical;
    case ErrorKind::Io: return kIo;
    default: return kHypothesis;
  }
}

struct Common {
  double rel_h = 0.02;
  int degree = 2;
  std::string out;
  std::string svg;
  std::uint64_t seed = 0;
  int workers = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--h", c.rel_h, "Mesh size as a fraction of the domain diameter")->check(CLI::PositiveNumber);
  sub->add_option("--degree", c.degree, "Finite element degree")->check(CLI::IsMember({1, 2}));
  sub->add_option("--out", c.out, "CSV output path (default: stdout)");
  sub->add_option("--svg", c.svg, "SVG plot path");
  sub->add_option("--seed", c.seed, "Seed for randomly drawn shapes");
  sub->add_option("--workers", c.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

std::vector<std::pair<std::string, std::string>> config_echo(const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (const CLI::Option* o : sub->get_options()) {
    const std::string name = o->get_single_name();
    if (name == "help" || name == "out" || name == "svg" || name == "workers" || name == "seed") continue;
    std::string v;
    if (o->get_expected_max() == 0) {
      v = o->count() > 0 ? "1" : "0";
    } else if (o->count() > 0) {
      for (const std::string& r : o->results()) v += (v.empty() ? "" : " ") + r;
    } else {
      v = o->get_default_str();
    }
    kv.emplace_back(name, v);
  }
  return kv;
}

void emit(const Common& c, const CsvHeader& header, const Table& table) {
  std::ostringstream s;
  write_csv(s, header, table);
  if (c.out.empty()) {
    std::cout << s.str();
  } else {
    write_text_file(c.out, s.str());
  }
}

void emit_svg(const Common& c, const std::string& title, const std::string& x_label,
              const std::vector<SvgSeries>& series) {
  if (c.svg.empty()) return;
  try {
    write_text_file(c.svg, svg_line_chart(title, x_label, series));
  } catch (const std::exception& e) {
    std::cerr << "warning: plot not written: " << e.what() << '\n';
  }
}

std::string yes_no(bool b) { return b ? "1" : "0"; }

// Apply key=value pairs from the file named after --config as option
// defaults, so that flags given on the command line still win.
void apply_config(int argc, char** argv, const std::vector<CLI::App*>& subs) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return;
  for (const auto& [key, value] : read_config(path)) {
    bool used = false;
    for (CLI::App* sub : subs) {
      if (CLI::Option* o = sub->get_option_no_throw("--" + key)) {
        o->default_val(value);
        used = true;
      }
    }
    if (!used) throw Error(ErrorKind::Io, "unknown config key '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for torsion and eigenvalue monotonicity under deformation flows"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags override it");

  // report
  Common rc;
  std::string report_file;
  auto* report_cmd = app.add_subcommand("report", "Functionals of one polygon");
  report_cmd->add_option("polygon", report_file, "Polygon file, one \"x y [tag]\" per line")->required();
  add_common(report_cmd, rc);

  // scan
  Common sc;
  std::string theorem;
  double t_min = NAN, t_max = NAN, alpha_deg = 60.0, q = 1.0, width = 1.0, height = 1.0;
  int t_steps = 9;
  std::vector<double> vertices;
  bool random_shape = false, no_fd = false;
  auto* scan_cmd = app.add_subcommand("scan", "Monotonicity scan along a deformation family");
  scan_cmd->add_option("theorem", theorem, "Family to scan")
      ->required()
      ->check(CLI::IsMember({"thm1_1", "thm1_2", "thm1_3", "thm1_4", "thm1_7"}));
  scan_cmd->add_option("--t-min", t_min, "First flow time (default per family)");
  scan_cmd->add_option("--t-max", t_max, "Last flow time (default per family)");
  scan_cmd->add_option("--t-steps", t_steps, "Number of flow times")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--vertices", vertices, "Triangle vertices x1 y1 x2 y2 x3 y3")->expected(6);
  scan_cmd->add_flag("--random", random_shape, "Draw the triangle from --seed");
  scan_cmd->add_option("--alpha", alpha_deg, "Aperture in degrees (thm1_4)");
  scan_cmd->add_option("--q", q, "Diagonal ratio (thm1_3)")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--width", width, "Rectangle width (thm1_7)")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--height", height, "Rectangle height (thm1_7)")->check(CLI::PositiveNumber);
  scan_cmd->add_flag("--no-fd", no_fd, "Skip the finite difference column");
  add_common(scan_cmd, sc);

  // flow
  Common fc;
  std::string flow_kind, body = "ellipse";
  double fa = 2.0, fb = 1.0, rotation = 0.0, t_end = 0.1, dt_safety = 0.5, dh_max = 1e-3, area_stop = 0.0;
  int grid_n = kDefaultBodyNodes, sample_every = 10;
  bool no_fem = false;
  auto* flow_cmd = app.add_subcommand("flow", "Curvature flow of a convex body");
  flow_cmd->add_option("kind", flow_kind, "Flow")->required()->check(CLI::IsMember({"csf", "imcf", "torsion"}));
  flow_cmd->add_option("--body", body, "Initial body")->check(CLI::IsMember({"circle", "ellipse"}));
  flow_cmd->add_option("--a", fa, "Semi-axis along x, or the radius")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--b", fb, "Semi-axis along y")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--rotation", rotation, "Rotation in radians");
  flow_cmd->add_option("--grid-n", grid_n, "Support function nodes (power of two)");
  flow_cmd->add_option("--t-max", t_end, "End time")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--dt-safety", dt_safety, "Fraction of the stability bound")->check(CLI::PositiveNumber);
  flow_cmd->add_option("--dh-max", dh_max, "Largest change of h per step relative to min h")
      ->check(CLI::PositiveNumber);
  flow_cmd->add_option("--area-stop", area_stop, "Stop once the area drops to this value");
  flow_cmd->add_option("--sample-every", sample_every, "Steps between samples")->check(CLI::PositiveNumber);
  flow_cmd->add_flag("--no-fem", no_fem, "Skip torsion solves at samples (csf, imcf)");
  add_common(flow_cmd, fc);

  // css
  Common cc;
  double css_s = 0.5, css_t_min = 0.0, css_t_max = 1.0, s_min = 0.3, s_max = 0.95;
  int css_t_steps = 11, s_steps = 14;
  bool sweep = false;
  auto* css_cmd = app.add_subcommand("css", "Continuous Steiner symmetrization of rectangles");
  css_cmd->add_option("--s", css_s, "Rectangle R(s) = [0,s]x[0,1/s]");
  css_cmd->add_option("--t-min", css_t_min, "First symmetrization time");
  css_cmd->add_option("--t-max", css_t_max, "Last symmetrization time");
  css_cmd->add_option("--t-steps", css_t_steps, "Number of times")->check(CLI::PositiveNumber);
  css_cmd->add_flag("--sweep", sweep, "Tabulate T(R(s)) over an s-grid instead");
  css_cmd->add_option("--s-min", s_min, "Sweep start");
  css_cmd->add_option("--s-max", s_max, "Sweep end");
  css_cmd->add_option("--s-steps", s_steps, "Sweep points")->check(CLI::PositiveNumber);
  add_common(css_cmd, cc);

  // sides
  Common dc;
  std::string sides_file;
  auto* sides_cmd = app.add_subcommand("sides", "Mean boundary flux of the torsion function per side");
  sides_cmd->add_option("polygon", sides_file, "Polygon file")->required();
  add_common(sides_cmd, dc);

  try {
    apply_config(argc, argv, {report_cmd, scan_cmd, flow_cmd, css_cmd, sides_cmd});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIo;
  }

  try {
    if (*report_cmd) {
      const Polygon p = read_polygon(report_file);
      ReportOptions o;
      o.degree = rc.degree;
      const FunctionalReport r = report(p, rc.rel_h * p.diameter(), o);
      Table t;
      t.columns = {"area", "T", "T_pohozaev", "T_gap", "lambda1", "lambda1_pohozaev", "lambda1_gap",
                   "T_norm", "lambda1_norm", "min_angle_deg", "num_triangles", "consistent"};
      t.rows.push_back({format_number(r.area), format_number(r.T_domain), format_number(r.T_pohozaev),
                        format_number(r.T_gap), format_number(r.lambda1), format_number(r.lambda1_pohozaev),
                        format_number(r.lambda1_gap), format_number(r.T_normalized),
                        format_number(r.lambda1_normalized), format_number(r.min_angle_deg),
                        std::to_string(r.num_triangles), yes_no(r.consistent)});
      emit(rc, {"report", config_echo(report_cmd), rc.seed}, t);
      SvgSeries outline{"boundary", {}, {}};
      for (std::size_t i = 0; i <= p.size(); ++i) {
        outline.x.push_back(p.vertex(i).x);
        outline.y.push_back(p.vertex(i).y);
      }
      emit_svg(rc, report_file, "x", {outline});
      return r.consistent ? kOk : kNumerical;
    }

    if (*scan_cmd) {
      Rng rng(sc.seed);
      Polygon p = make_rectangle(1, 1);
      std::optional<AffineFlow> f;
      double lo = 0.0, hi = 1.0;
      bool open = false;
      auto triangle = [&](TriangleHypothesis hyp) {
        if (random_shape) return random_triangle(rng, hyp);
        if (vertices.size() == 6)
          return TriangleConfig::canonicalize({vertices[0], vertices[1]}, {vertices[2], vertices[3]},
                                              {vertices[4], vertices[5]}, hyp);
        if (hyp == TriangleHypothesis::ShortestHeightStretch)
          return TriangleConfig::canonicalize({-0.4, 0}, {1.2, 0}, {0, 0.5}, hyp);
        return TriangleConfig::canonicalize({-0.4, 0}, {0.5, 0}, {0, 1.1}, hyp);
      };
      if (theorem == "thm1_1" || theorem == "thm1_2") {
        const bool stretch = theorem == "thm1_1";
        const TriangleConfig cfg =
            triangle(stretch ? TriangleHypothesis::ShortestHeightStretch : TriangleHypothesis::TallestHeightCompress);
        p = cfg.polygon();
        f = stretch ? AffineFlow::height_stretch() : AffineFlow::height_compress();
        hi = critical_time(cfg, stretch ? CriticalKind::Stretch : CriticalKind::Compress);
        open = true;
      } else if (theorem == "thm1_3") {
        p = make_rhombus(1.0, q);
        f = AffineFlow::rhombus_diagonal();
      } else if (theorem == "thm1_4") {
        const double alpha = alpha_deg * std::numbers::pi / 180.0;
        const TriangleConfig cfg = random_shape ? TriangleConfig::isosceles(uniform(rng, 0.3, 2.6))
                                                : TriangleConfig::isosceles(alpha);
        p = cfg.polygon();
        f = AffineFlow::leg_stretch(cfg.angle_a());
        lo = 0.2;
        hi = 2.0;
      } else {
        p = make_rectangle(width, height);
        f = AffineFlow::rectangle_side();
      }
      if (!std::isnan(t_min)) lo = t_min, open = false;
      if (!std::isnan(t_max)) hi = t_max, open = false;
      ScanOptions o;
      o.rel_h = sc.rel_h;
      o.degree = sc.degree;
      o.with_fd = !no_fd;
      o.workers = sc.workers;
      const std::vector<double> grid = linear_grid(lo, hi, t_steps, open);
      const std::vector<ScanRow> rows = monotonicity_scan(p, *f, grid, o);
      emit(sc, {"scan " + theorem, config_echo(scan_cmd), sc.seed}, scan_table(rows));
      SvgSeries tn{"T/A^2 relative", {}, {}}, ln{"lambda1 A relative", {}, {}};
      for (const ScanRow& r : rows) {
        tn.x.push_back(r.t);
        ln.x.push_back(r.t);
        tn.y.push_back(r.T_norm / rows.front().T_norm);
        ln.y.push_back(r.lambda1_norm / rows.front().lambda1_norm);
      }
      emit_svg(sc, "scan " + theorem, "t", {tn, ln});
      int trusted = 0;
      for (const ScanRow& r : rows) trusted += r.trusted();
      std::cerr << rows.size() << " rows, " << trusted << " unflagged\n";
      return kOk;
    }

    if (*flow_cmd) {
      const SupportBody b0 = body == "circle" ? SupportBody::circle(fa, {}, grid_n)
                                              : SupportBody::ellipse(fa, fb, rotation, {}, grid_n);
      FlowConfig o;
      o.t_end = t_end;
      o.dt_safety = dt_safety;
      o.dh_max_rel = dh_max;
      o.area_stop = area_stop;
      o.sample_every = sample_every;
      o.sample_fem = !no_fem;
      o.fem.rel_h = fc.rel_h;
      o.fem.degree = fc.degree;
      const CurvatureFlow kind = flow_kind == "csf"    ? CurvatureFlow::Csf
                                 : flow_kind == "imcf" ? CurvatureFlow::Imcf
                                                       : CurvatureFlow::Torsion;
      const FlowSeries s = run_flow(kind, b0, o);
      emit(fc, {"flow " + flow_kind, config_echo(flow_cmd), fc.seed}, flow_table(s));
      SvgSeries g{"deficit", {}, {}}, iso{"P^2/A - 4 pi", {}, {}};
      for (const FlowSample& x : s.samples) {
        g.x.push_back(x.t);
        g.y.push_back(x.deficit);
        iso.x.push_back(x.t);
        iso.y.push_back(x.isoper - 4 * std::numbers::pi);
      }
      emit_svg(fc, "flow " + flow_kind, "t", {g, iso});
      if (!s.failure.empty()) {
        std::cerr << "error: " << s.failure << '\n';
        return kNumerical;
      }
      return kOk;
    }

    if (*css_cmd) {
      FdOptions o;
      o.rel_h = cc.rel_h;
      o.degree = cc.degree;
      Table t;
      SvgSeries curve{"T", {}, {}};
      bool ok = true;
      if (sweep) {
        const auto pts = css_torsion_curve(linear_grid(s_min, s_max, s_steps), o);
        t.columns = {"s", "T"};
        for (std::size_t i = 0; i < pts.size(); ++i) {
          t.rows.push_back({format_number(pts[i].first), format_number(pts[i].second)});
          curve.x.push_back(pts[i].first);
          curve.y.push_back(pts[i].second);
          if (i > 0 && !(pts[i].second > pts[i - 1].second)) ok = false;
        }
      } else {
        const CssReport rep = css_verify(css_s, linear_grid(css_t_min, css_t_max, css_t_steps), o);
        t.columns = {"s", "t", "xi", "s_prime", "T_s", "T_s_prime"};
        for (const CssRow& r : rep.rows) {
          t.rows.push_back({format_number(rep.s), format_number(r.t), format_number(r.xi), format_number(r.s_prime),
                            format_number(r.T_s), format_number(r.T_s_prime)});
          curve.x.push_back(r.t);
          curve.y.push_back(r.T_s_prime);
        }
        ok = rep.passed;
      }
      emit(cc, {"css", config_echo(css_cmd), cc.seed}, t);
      emit_svg(cc, sweep ? "T(R(s))" : "T(R(s')) along the symmetrization", sweep ? "s" : "t", {curve});
      if (!ok) {
        std::cerr << "error: torsion did not increase along the symmetrization\n";
        return kHypothesis;
      }
      return kOk;
    }

    if (*sides_cmd) {
      const Polygon p = read_polygon(sides_file);
      ReportOptions o;
      o.degree = dc.degree;
      o.with_eigen = false;
      const Solution s = solve(p, dc.rel_h * p.diameter(), o);
      Table t;
      t.columns = {"tag", "length", "mean_grad_sq"};
      for (std::size_t i = 0; i < p.size(); ++i)
        t.rows.push_back({p.tag(i), format_number(p.side_length(i)),
                          format_number(side_average_flux(s.torsion_trace, static_cast<int>(i)))});
      emit(dc, {"sides", config_echo(sides_cmd), dc.seed}, t);
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
