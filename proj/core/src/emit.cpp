#include "ptforge/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "ptforge/errors.hpp"

#ifndef PTFORGE_VERSION
#define PTFORGE_VERSION "0.0.0"
#endif

namespace ptforge::shell {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string render(const MetaValue& v) {
  switch (v.kind) {
    case MetaValue::Kind::kNumber:
      return format_exact(v.number);
    case MetaValue::Kind::kInteger:
      return std::to_string(v.integer);
    case MetaValue::Kind::kText:
      return '"' + v.text + '"';
    case MetaValue::Kind::kNumberList: {
      std::string out = "\"";
      for (std::size_t i = 0; i < v.list.size(); ++i) {
        if (i) out += ',';
        out += format_exact(v.list[i]);
      }
      return out + '"';
    }
  }
  return {};
}

ordered_json to_json(const MetaValue& v) {
  switch (v.kind) {
    case MetaValue::Kind::kNumber:
      return v.number;
    case MetaValue::Kind::kInteger:
      return v.integer;
    case MetaValue::Kind::kText:
      return v.text;
    case MetaValue::Kind::kNumberList:
      return v.list;
  }
  return nullptr;
}

void write_meta_block(std::ostream& os, const char* name, const MetaBlock& block) {
  os << "# [" << name << "]\n";
  for (const auto& [key, value] : block) {
    os << "# " << key << " = " << render(value) << '\n';
  }
}

}  // namespace

MetaValue meta(double x) {
  MetaValue v;
  v.kind = MetaValue::Kind::kNumber;
  v.number = x;
  return v;
}

MetaValue meta(std::int64_t x) {
  MetaValue v;
  v.kind = MetaValue::Kind::kInteger;
  v.integer = x;
  return v;
}

MetaValue meta(std::string x) {
  MetaValue v;
  v.kind = MetaValue::Kind::kText;
  v.text = std::move(x);
  return v;
}

MetaValue meta(std::vector<double> xs) {
  MetaValue v;
  v.kind = MetaValue::Kind::kNumberList;
  v.list = std::move(xs);
  return v;
}

std::string format_data(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

std::string format_exact(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void write_csv(const Table& t, std::ostream& os) {
  os << "# pt-forge " << t.command << '\n';
  os << "# version = \"" << PTFORGE_VERSION << "\"\n";
  write_meta_block(os, "config", t.config);
  write_meta_block(os, "result", t.result);
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) os << ',';
    os << t.columns[c];
  }
  if (!t.tag_column.empty()) {
    if (!t.columns.empty()) os << ',';
    os << t.tag_column;
  }
  os << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (c) os << ',';
      os << format_data(t.rows[r][c]);
    }
    if (!t.tag_column.empty()) {
      if (!t.rows[r].empty()) os << ',';
      os << t.tags[r];
    }
    os << '\n';
  }
}

void write_json(const Table& t, std::ostream& os) {
  ordered_json doc;
  doc["command"] = t.command;
  doc["version"] = PTFORGE_VERSION;
  const auto block_to_json = [](const MetaBlock& block) {
    ordered_json obj = ordered_json::object();
    for (const auto& [key, value] : block) obj[key] = to_json(value);
    return obj;
  };
  doc["config"] = block_to_json(t.config);
  doc["result"] = block_to_json(t.result);
  ordered_json columns = t.columns;
  if (!t.tag_column.empty()) columns.push_back(t.tag_column);
  doc["columns"] = std::move(columns);
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ordered_json row = t.rows[r];
    if (!t.tag_column.empty()) row.push_back(t.tags[r]);
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void write_table(const Table& t, const std::string& format,
                 const std::string& path) {
  std::ostringstream buffer;
  if (format == "json") {
    write_json(t, buffer);
  } else {
    write_csv(t, buffer);
  }
  const std::string body = buffer.str();
  if (path == "-") {
    std::cout << body;
    std::cout.flush();
    if (!std::cout) throw IoError("writing to stdout failed");
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  out.close();
  if (!out) throw IoError("writing '" + path + "' failed");
}

}  // namespace ptforge::shell
