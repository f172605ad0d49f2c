#include "shapeflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shapeflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string opt_number(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

}  // namespace

Polygon parse_polygon(std::istream& in) {
  std::vector<Vec2> pts;
  std::vector<std::string> tags;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    Vec2 v;
    std::string tag, extra;
    if (!(ls >> v.x >> v.y)) throw Error(ErrorKind::Io, "line " + std::to_string(lineno) + ": expected \"x y [tag]\"");
    ls >> tag;
    if (ls >> extra) throw Error(ErrorKind::Io, "line " + std::to_string(lineno) + ": trailing text");
    pts.push_back(v);
    tags.push_back(tag);
  }
  if (std::all_of(tags.begin(), tags.end(), [](const std::string& s) { return s.empty(); })) {
    tags.clear();
  } else {
    for (std::size_t i = 0; i < tags.size(); ++i)
      if (tags[i].empty()) tags[i] = "e" + std::to_string(i);
  }
  return Polygon(std::move(pts), std::move(tags));
}

Polygon read_polygon(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_polygon(in);
}

void write_polygon(std::ostream& out, const Polygon& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    out << format_number(p.vertex(i).x) << ' ' << format_number(p.vertex(i).y) << ' ' << p.tag(i) << '\n';
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Io, "config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Io, "config line " + std::to_string(lineno) + ": empty key");
    kv[std::move(key)] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_config(in);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& out, const CsvHeader& header, const Table& table) {
  out << "# shapeflow " << SHAPEFLOW_VERSION << '\n';
  out << "# command: " << header.command << '\n';
  for (const auto& [k, v] : header.config) out << "# " << k << " = " << v << '\n';
  out << "# seed = " << header.seed << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

Table scan_table(const std::vector<ScanRow>& rows) {
  Table t;
  t.columns = {"t", "area", "T", "lambda1", "T_norm", "lambda1_norm", "dTnorm_dt", "dTnorm_dt_fd", "dLnorm_dt",
               "proof_form", "flag"};
  for (const ScanRow& r : rows) {
    t.rows.push_back({format_number(r.t), format_number(r.area), format_number(r.T), format_number(r.lambda1),
                      format_number(r.T_norm), format_number(r.lambda1_norm), format_number(r.dTnorm_dt),
                      format_number(r.dTnorm_dt_fd), format_number(r.dLnorm_dt), opt_number(r.proof_form), r.flag});
  }
  return t;
}

Table flow_table(const FlowSeries& s) {
  Table t;
  t.columns = {"t", "area", "perimeter", "T", "deficit", "lemma51", "isoper", "rho_min"};
  for (const FlowSample& x : s.samples) {
    t.rows.push_back({format_number(x.t), format_number(x.area), format_number(x.perimeter), format_number(x.T),
                      format_number(x.deficit), format_number(x.lemma51), format_number(x.isoper),
                      format_number(x.rho_min)});
  }
  return t;
}

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<SvgSeries>& series) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << format_number(x0) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"end\">"
    << format_number(x1) << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
    << escape_xml(x_label) << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(y1)
    << "</text>\n";
  o << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(y0)
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    const char* color = colors[k % 5];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    o << "\"/>\n";
    const double ly = T + 16 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << escape_xml(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace shapeflow
