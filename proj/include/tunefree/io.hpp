#pragma once

#include "tunefree/estimators.hpp"
#include "tunefree/sim.hpp"
#include "tunefree/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tunefree::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// CSV: comma separated, '.' decimal point, optional single header row that is
// recognised by a non-numeric first row.

struct CsvTable {
    std::vector<std::string> header; // empty when the file has none
    Matrix values;
};

/// Throws InputError naming the 1-based line and column of the first
/// malformed cell, or of a row with the wrong number of fields.
CsvTable parse_csv(const std::string &text);
CsvTable read_csv(const std::string &path);

Matrix read_matrix(const std::string &path);
/// A single numeric column (a single row is accepted too).
Vector read_vector(const std::string &path);

/// Shortest text that parses back to the same double.
std::string format_double(double x);

void write_matrix(std::ostream &os, const Matrix &M);
void write_vector(std::ostream &os, const Vector &v);
std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);

// ---------------------------------------------------------------------------
// Scenario files: `key = value` lines, '#' comments, one scenario per
// `[scenario]` section (the header is optional for a single scenario).
// Keys: label, n, p, sigma, beta0 ("1:1, 2:-0.5"), replications, seed.

std::vector<sim::Scenario> parse_scenarios(const std::string &text);

// ---------------------------------------------------------------------------
// Reports. Every report is a list of flat-ish JSON records that can be
// rendered as JSON lines, CSV or a pretty table.

enum class Format { JsonLines, Csv, Pretty };
Format parse_format(const std::string &name);

Json regression_record(const estimators::RegressionFit &fit,
                       const Json &inputs);
Json matrix_record(const estimators::MatrixFit &fit, const Json &inputs);
std::vector<Json> sim_records(const sim::SimReport &report);
std::vector<Json> matrix_sim_records(const sim::MatrixSimReport &report);
Json bound_record(const std::string &kind, const estimators::RiskBound &bound,
                  const Json &inputs);

std::string render(const std::vector<Json> &records, Format format);

/// Parsers for the two machine formats, used for round-trip checks.
std::vector<Json> parse_json_lines(const std::string &text);
std::vector<std::map<std::string, std::string>>
parse_csv_records(const std::string &text);

} // namespace tunefree::io
