#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

// Bit-stable serialization of computed results: CSV with a commented metadata
// header, or a JSON mirror of the same structure.  Identical inputs produce
// byte-identical files (no timestamps, fixed float rendering, fixed order).
namespace ptforge::shell {

// One metadata value: a number, an integer, free text, or a numeric list.
struct MetaValue {
  enum class Kind { kNumber, kInteger, kText, kNumberList };
  Kind kind = Kind::kText;
  double number = 0.0;
  std::int64_t integer = 0;
  std::string text;
  std::vector<double> list;
};
MetaValue meta(double x);
MetaValue meta(std::int64_t x);
MetaValue meta(std::string x);
MetaValue meta(std::vector<double> xs);

using MetaBlock = std::vector<std::pair<std::string, MetaValue>>;

// A computed result ready for serialization: the resolved configuration (the
// re-parseable echo), summary results, and a rectangular numeric table with
// an optional trailing text column.
struct Table {
  std::string command;
  MetaBlock config;
  MetaBlock result;
  std::vector<std::string> columns;        // numeric column names
  std::vector<std::vector<double>> rows;   // one entry per numeric column
  std::string tag_column;                  // trailing text column ("" if none)
  std::vector<std::string> tags;           // one per row when tag_column is set
  int exit_status = 0;  // nonzero: run succeeded but the outcome is qualified
};

// Data rows: scientific notation, 12 significant digits.
std::string format_data(double x);
// Metadata: shortest representation that parses back to the identical double.
std::string format_exact(double x);

void write_csv(const Table& t, std::ostream& os);
void write_json(const Table& t, std::ostream& os);

// Renders in the given format ("csv" or "json") to the path, or to stdout
// when path is "-".  Throws IoError when the file cannot be written.
void write_table(const Table& t, const std::string& format,
                 const std::string& path);

}  // namespace ptforge::shell
