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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddf/table.hpp"

namespace ddf {

/// Raw parsed CSV: header row plus string cells. An unquoted empty field is
/// null (nullopt); a quoted empty field is the empty string.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<std::string>>> rows;
};

/// RFC-4180 parser: comma separated, first row is the header, double quotes
/// escape separators/newlines/quotes. Accepts LF and CRLF line endings.
CsvData parse_csv(std::string_view text);

/// Infers column dtypes over the non-null cells, trying Int64, then Float64,
/// then Bool (`true`/`false` literals), falling back to Utf8. All-null
/// columns infer as Utf8.
Schema infer_csv_schema(const CsvData& data);

/// Builds a typed table from parsed cells. Throws IoError when a cell cannot
/// be parsed as the schema's dtype or the header does not match.
Table csv_to_table(const CsvData& data, const Schema& schema);

/// Formats with RFC-4180 quoting. Nulls are unquoted empty fields; empty
/// strings are quoted so the round trip preserves them. Float64 uses
/// shortest round-trip formatting.
std::string table_to_csv(const Table& t);

Table read_csv_file(const std::string& path);
Table read_csv_file(const std::string& path, const Schema& schema);
void write_csv_file(const Table& t, const std::string& path);

}  // namespace ddf
