#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/bounds.hpp"

namespace bmlab::report {

// Shortest round-trip decimal form of x. Used for every number that lands in
// an artifact so that report.csv and report.json are byte-stable across runs,
// platforms with the same FP semantics, and worker counts.
std::string format_double(double x);

// RFC 4180: CRLF line endings, fields quoted only when they contain a comma,
// a quote, or a line break, quotes doubled inside quoted fields.
std::string to_csv(const bounds::BoundReport& rep);

// Keys: columns, rows, fits, config. Deliberately carries no timing or host
// information; those live in the run manifest instead.
nlohmann::ordered_json to_json(const bounds::BoundReport& rep);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;  // (n, value), both > 0
};

// Hand-rolled log-log scatter-with-lines chart. Coordinates are printed with
// fixed precision, so equal inputs give byte-identical documents. Series with
// nonpositive values are dropped from the drawing but kept in the legend.
std::string svg_loglog(const std::string& title,
                       const std::vector<Series>& series,
                       const std::vector<std::string>& annotations);

}  // namespace bmlab::report
