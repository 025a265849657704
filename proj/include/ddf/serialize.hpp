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

#include <cstdint>
#include <span>
#include <vector>

#include "ddf/table.hpp"

namespace ddf {

/// Flat buffer-list form of a table, suitable for buffer-oriented
/// communication.
///
/// Header layout (all integers little-endian):
///   magic "DDF1"
///   u32 column count
///   u64 row count
///   per column: u8 dtype tag (0=Int64, 1=Float64, 2=Bool, 3=Utf8),
///               u8 flags (bit0 = has validity),
///               u16 name length, name bytes
///   per buffer: u64 byte length
///
/// Buffers follow the header in declared order: for each column, validity
/// (when flagged), offsets (Utf8 only), then data.
struct SerializedTable {
  std::vector<uint8_t> header;
  std::vector<std::vector<uint8_t>> buffers;

  uint64_t total_bytes() const;

  /// header || buffers, one contiguous blob.
  std::vector<uint8_t> to_bytes() const;
  /// Splits a blob back into header + buffers per the header's size list.
  static SerializedTable from_bytes(std::span<const uint8_t> bytes);
};

SerializedTable serialize_table(const Table& t);

/// Inverse of serialize_table. Throws DecodeError when the header is
/// inconsistent with the buffer list (size mismatch, unknown dtype tag, ...).
Table deserialize_table(const SerializedTable& s);

/// Convenience round-trip through the flat representation.
inline std::vector<uint8_t> table_to_bytes(const Table& t) {
  return serialize_table(t).to_bytes();
}
inline Table table_from_bytes(std::span<const uint8_t> bytes) {
  return deserialize_table(SerializedTable::from_bytes(bytes));
}

}  // namespace ddf
