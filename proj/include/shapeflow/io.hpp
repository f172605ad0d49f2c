#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shapeflow/curvature.hpp"
#include "shapeflow/flows.hpp"

namespace shapeflow {

/// One vertex per line, "x y [tag]", counterclockwise. The tag names the edge
/// leaving that vertex; untagged edges get "e<i>". Blank lines and lines
/// starting with '#' are skipped. Throws `Io` on malformed text.
Polygon parse_polygon(std::istream& in);
Polygon read_polygon(const std::string& path);
void write_polygon(std::ostream& out, const Polygon& p);

/// Flat "key = value" text; '#' starts a comment. Throws `Io`.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config(const std::string& path);

/// Shortest text that reads back to the same double; "nan" and "inf" spelled out.
std::string format_number(double x);

/// Comment lines written before every CSV.
struct CsvHeader {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const CsvHeader& header, const Table& table);

Table scan_table(const std::vector<ScanRow>& rows);
Table flow_table(const FlowSeries& series);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Minimal line chart; non-finite points are dropped.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::vector<SvgSeries>& series);

/// Throws `Io`.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace shapeflow
