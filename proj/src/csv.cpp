/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ddf/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddf {

namespace {

bool parse_int64(std::string_view s, int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_float64(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true") { out = true; return true; }
  if (s == "false") { out = false; return true; }
  return false;
}

void format_float64(double v, std::string& out) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  std::string_view s(buf, size_t(ptr - buf));
  out.append(s);
  // Keep float columns recognizably float: integral values print as "4.0",
  // never "4", so inference round-trips the dtype.
  if (s.find_first_of(".eEni") == std::string_view::npos) out.append(".0");
}

bool needs_quoting(std::string_view s) {
  if (s.empty()) return true;  // distinguish empty string from null
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') return true;
  }
  return false;
}

void append_quoted(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void append_field(std::string& out, std::string_view s) {
  if (needs_quoting(s)) {
    append_quoted(out, s);
  } else {
    out.append(s);
  }
}

}  // namespace

CsvData parse_csv(std::string_view text) {
  CsvData data;
  std::vector<std::optional<std::string>> record;
  std::string field;
  bool quoted = false;        // current field was ever quoted
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    if (!quoted && field.empty()) {
      record.emplace_back(std::nullopt);
    } else {
      record.emplace_back(std::move(field));
    }
    field.clear();
    quoted = false;
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (data.header.empty()) {
      for (auto& cell : record) {
        data.header.push_back(cell ? *cell : std::string());
      }
    } else {
      if (record.size() != data.header.size()) {
        throw IoError("csv row has " + std::to_string(record.size()) +
                      " fields, header has " + std::to_string(data.header.size()));
      }
      data.rows.push_back(std::move(record));
    }
    record.clear();
  };

  size_t i = 0;
  const size_t n = text.size();
  bool any = false;
  while (i < n) {
    char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          i++;
        }
      } else {
        field.push_back(c);
        i++;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        quoted = true;
        field_started = true;
        i++;
        break;
      case ',':
        end_field();
        i++;
        break;
      case '\r':
        i++;
        break;
      case '\n':
        end_record();
        i++;
        break;
      default:
        field.push_back(c);
        field_started = true;
        i++;
    }
  }
  if (in_quotes) throw IoError("csv ends inside a quoted field");
  if (any && (field_started || quoted || !record.empty() || !field.empty())) {
    end_record();  // final record without trailing newline
  }
  return data;
}

Schema infer_csv_schema(const CsvData& data) {
  std::vector<Field> fields;
  for (size_t c = 0; c < data.header.size(); c++) {
    bool all_int = true, all_float = true, all_bool = true, any_value = false;
    for (const auto& row : data.rows) {
      if (!row[c]) continue;
      any_value = true;
      int64_t i;
      double d;
      bool b;
      if (all_int && !parse_int64(*row[c], i)) all_int = false;
      if (all_float && !parse_float64(*row[c], d)) all_float = false;
      if (all_bool && !parse_bool(*row[c], b)) all_bool = false;
      if (!all_int && !all_float && !all_bool) break;
    }
    DataType dtype = DataType::Utf8;
    if (any_value) {
      if (all_int) dtype = DataType::Int64;
      else if (all_float) dtype = DataType::Float64;
      else if (all_bool) dtype = DataType::Bool;
    }
    fields.push_back({data.header[c], dtype});
  }
  return Schema(std::move(fields));
}

Table csv_to_table(const CsvData& data, const Schema& schema) {
  if (static_cast<int>(data.header.size()) != schema.num_fields()) {
    throw IoError("csv header arity does not match schema");
  }
  for (int c = 0; c < schema.num_fields(); c++) {
    if (data.header[c] != schema.field(c).name) {
      throw IoError("csv header mismatch: expected '" + schema.field(c).name +
                    "', found '" + data.header[c] + "'");
    }
  }
  std::vector<Column> cols;
  for (int c = 0; c < schema.num_fields(); c++) {
    ColumnBuilder b(schema.field(c).dtype);
    b.reserve(static_cast<int64_t>(data.rows.size()));
    for (const auto& row : data.rows) {
      if (!row[c]) {
        b.append_null();
        continue;
      }
      const std::string& cell = *row[c];
      switch (schema.field(c).dtype) {
        case DataType::Int64: {
          int64_t v;
          if (!parse_int64(cell, v)) {
            throw IoError("cannot parse '" + cell + "' as int64 in column " +
                          schema.field(c).name);
          }
          b.append_int64(v);
          break;
        }
        case DataType::Float64: {
          double v;
          if (!parse_float64(cell, v)) {
            throw IoError("cannot parse '" + cell + "' as float64 in column " +
                          schema.field(c).name);
          }
          b.append_float64(v);
          break;
        }
        case DataType::Bool: {
          bool v;
          if (!parse_bool(cell, v)) {
            throw IoError("cannot parse '" + cell + "' as bool in column " +
                          schema.field(c).name);
          }
          b.append_bool(v);
          break;
        }
        case DataType::Utf8:
          b.append_utf8(cell);
          break;
      }
    }
    cols.push_back(b.finish());
  }
  return Table(schema, std::move(cols));
}

std::string table_to_csv(const Table& t) {
  std::string out;
  for (int c = 0; c < t.num_columns(); c++) {
    if (c) out.push_back(',');
    append_field(out, t.schema().field(c).name);
  }
  out.push_back('\n');
  std::string scratch;
  for (int64_t r = 0; r < t.num_rows(); r++) {
    for (int c = 0; c < t.num_columns(); c++) {
      if (c) out.push_back(',');
      const Column& col = t.column(c);
      if (col.is_null(r)) continue;  // null = unquoted empty field
      switch (col.dtype()) {
        case DataType::Int64:
          out.append(std::to_string(col.int64_at(r)));
          break;
        case DataType::Float64:
          scratch.clear();
          format_float64(col.float64_at(r), scratch);
          out.append(scratch);
          break;
        case DataType::Bool:
          out.append(col.bool_at(r) ? "true" : "false");
          break;
        case DataType::Utf8:
          append_field(out, col.utf8_at(r));
          break;
      }
    }
    out.push_back('\n');
  }
  return out;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  CsvData data = parse_csv(text);
  return csv_to_table(data, infer_csv_schema(data));
}

Table read_csv_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  return csv_to_table(parse_csv(text), schema);
}

void write_csv_file(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << table_to_csv(t);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ddf
